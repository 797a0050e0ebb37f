#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "bhdimer/core_model.hpp"
#include "bhdimer/errors.hpp"
#include "bhdimer/units.hpp"
#include "support.hpp"

using namespace bhd;

namespace {

// Classical energy in the pump frame (units of hbar).
double classical_energy(const DimerParams& p, const Drive& d, const ModeAmplitudes& a) {
    const auto [dL, dR] = frame_detunings(p, d.omega_p);
    const double nL = std::norm(a.alpha_L), nR = std::norm(a.alpha_R);
    const cplx hop = a.alpha_L * std::conj(a.alpha_R);
    const cplx drv = std::sqrt(p.kappa) * d.alpha_in * std::conj(a.alpha_L);
    return dL * nL + dR * nR + 0.5 * p.U_L * nL * nL + 0.5 * p.U_R * nR * nR + 2.0 * p.J * hop.real() -
           2.0 * drv.imag();
}

// -i dH/d(alpha^*) - (kappa/2) alpha, derivative by central differences.
ModeAmplitudes flow_from_energy(const DimerParams& p, const Drive& d, const ModeAmplitudes& a) {
    const double h = 1e-6;
    auto wirtinger = [&](int which) {
        auto shifted = [&](cplx delta) {
            ModeAmplitudes b = a;
            (which == 0 ? b.alpha_L : b.alpha_R) += delta;
            return classical_energy(p, d, b);
        };
        const double dx = (shifted({h, 0}) - shifted({-h, 0})) / (2 * h);
        const double dy = (shifted({0, h}) - shifted({0, -h})) / (2 * h);
        return 0.5 * cplx(dx, dy);
    };
    const cplx I{0, 1};
    return {-I * wirtinger(0) - 0.5 * p.kappa_total_L() * a.alpha_L,
            -I * wirtinger(1) - 0.5 * p.kappa_total_R() * a.alpha_R};
}

}  // namespace

TEST_CASE("equations of motion: linear single-mode fixed point") {
    DimerParams p;
    p.omega_L = p.omega_R = 3.0;
    p.kappa = 1.0;
    const Drive d{3.0, {1.0, 0.0}};
    const auto r = equations_of_motion(p, d, {{2.0, 0.0}, {0.0, 0.0}});
    CHECK(std::abs(r.alpha_L) < 1e-15);
    CHECK(std::abs(r.alpha_R) < 1e-15);
}

TEST_CASE("equations of motion: vacuum is a fixed point without drive") {
    const auto p = test::scaled_dimer();
    const auto r = equations_of_motion(p, Drive{p.omega_L, {0, 0}}, {{0, 0}, {0, 0}});
    CHECK(std::abs(r.alpha_L) == 0.0);
    CHECK(std::abs(r.alpha_R) == 0.0);
}

TEST_CASE("equations of motion match the finite-difference Hamiltonian flow") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        DimerParams p;
        p.omega_L = 10 + u(rng);
        p.omega_R = 10 + u(rng);
        p.kappa = 0.5 + std::abs(u(rng));
        p.kappa_R = 0.3 * std::abs(u(rng));
        p.kappa_int_L = 0.1 * std::abs(u(rng));
        p.kappa_int_R = 0.1 * std::abs(u(rng));
        p.J = std::abs(u(rng));
        p.U_L = 0.1 * u(rng);
        p.U_R = 0.1 * u(rng);
        const Drive d{10 + u(rng), {2 * u(rng), 2 * u(rng)}};
        const ModeAmplitudes a{{3 * u(rng), 3 * u(rng)}, {3 * u(rng), 3 * u(rng)}};
        const auto exact = equations_of_motion(p, d, a);
        const auto fd = flow_from_energy(p, d, a);
        CHECK(std::abs(exact.alpha_L - fd.alpha_L) < 1e-6 * (1 + std::abs(exact.alpha_L)));
        CHECK(std::abs(exact.alpha_R - fd.alpha_R) < 1e-6 * (1 + std::abs(exact.alpha_R)));
    }
}

TEST_CASE("frame conventions round trip") {
    const auto p = test::device_dimer();
    for (double delta : {-3e9, -1.0, 0.0, 2.5e8}) {
        const double wp = pump_from_detuning(p, delta);
        CHECK(drive_detuning(p, wp) == doctest::Approx(delta).epsilon(1e-12));
        const auto [dL, dR] = frame_detunings(p, wp);
        CHECK(dL == doctest::Approx(p.omega_L - wp));
        CHECK(dR == doctest::Approx(p.omega_R - wp));
    }
    CHECK(p.omega_0() == doctest::Approx(units::ghz_to_rad(7.1)));
}

TEST_CASE("parameter validation") {
    auto p = test::scaled_dimer();
    CHECK_NOTHROW(p.validate());
    p.kappa = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidParams);
    p = test::scaled_dimer();
    p.J = -0.1;
    CHECK_THROWS_AS(p.validate(), InvalidParams);
    p = test::scaled_dimer();
    p.kappa_int_R = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(p.validate(), InvalidParams);
    // Strong Kerr outside the usual regime is allowed.
    p = test::scaled_dimer(0.7, -50.0);
    CHECK_NOTHROW(p.validate());
}

namespace {

// Jacobian of the flow in the (alpha_L, alpha_L^*, alpha_R, alpha_R^*) basis by central differences.
Matrix4c numeric_drift(const DimerParams& p, const Drive& d, const ModeAmplitudes& a) {
    const double h = 1e-6;
    Matrix4c A;
    for (int mode = 0; mode < 2; ++mode) {
        auto f = [&](cplx delta) {
            ModeAmplitudes b = a;
            (mode == 0 ? b.alpha_L : b.alpha_R) += delta;
            return equations_of_motion(p, d, b);
        };
        const auto px = f({h, 0}), mx = f({-h, 0}), py = f({0, h}), my = f({0, -h});
        const cplx I{0, 1};
        const cplx dLdx = (px.alpha_L - mx.alpha_L) / (2 * h), dLdy = (py.alpha_L - my.alpha_L) / (2 * h);
        const cplx dRdx = (px.alpha_R - mx.alpha_R) / (2 * h), dRdy = (py.alpha_R - my.alpha_R) / (2 * h);
        // d/d alpha = (d/dx - i d/dy)/2, d/d alpha^* = (d/dx + i d/dy)/2
        A(0, 2 * mode) = 0.5 * (dLdx - I * dLdy);
        A(0, 2 * mode + 1) = 0.5 * (dLdx + I * dLdy);
        A(2, 2 * mode) = 0.5 * (dRdx - I * dRdy);
        A(2, 2 * mode + 1) = 0.5 * (dRdx + I * dRdy);
    }
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            A(2 * i + 1, 2 * j + 1) = std::conj(A(2 * i, 2 * j));
            A(2 * i + 1, 2 * j) = std::conj(A(2 * i, 2 * j + 1));
        }
    return A;
}

}  // namespace

TEST_CASE("drift matrix equals the numerical Jacobian at steady states") {
    const auto p = test::scaled_dimer(0.7, -0.05);
    for (double delta : {-1.5, -0.4, 0.3}) {
        const Drive d = Drive::from_flux(pump_from_detuning(p, delta), 2.0, 0.3);
        for (const auto& ss : solve_steady_states(p, d)) {
            const auto A = drift_matrix(p, d, ss.amplitudes()).A;
            CHECK((A - numeric_drift(p, d, ss.amplitudes())).cwiseAbs().maxCoeff() < 1e-7);
        }
    }
}

TEST_CASE("drift matrix structure") {
    SUBCASE("linear case: no anomalous terms, hybridized eigenvalues") {
        auto p = test::scaled_dimer(0.7, 0.0);
        p.omega_R = p.omega_L + 0.4;
        p.kappa_R = 0.2;
        const Drive d = Drive::from_flux(p.omega_0(), 0.8);
        const auto ss = solve_steady_states(p, d).at(0);
        const auto& A = ss.drift.A;
        CHECK(std::abs(A(0, 1)) == 0.0);
        CHECK(std::abs(A(2, 3)) == 0.0);
        // Independent 2x2 diagonalization of the linear coupled-mode problem.
        const auto [dL, dR] = frame_detunings(p, d.omega_p);
        Eigen::Matrix2cd M;
        M << cplx(-0.5 * p.kappa_total_L(), -dL), cplx(0, -p.J), cplx(0, -p.J), cplx(-0.5 * p.kappa_total_R(), -dR);
        const Eigen::Vector2cd ev = M.eigenvalues();
        for (int k = 0; k < 2; ++k) {
            bool found = false, found_conj = false;
            for (const auto& lam : ss.eigenvalues) {
                found |= std::abs(lam - ev(k)) < 1e-12;
                found_conj |= std::abs(lam - std::conj(ev(k))) < 1e-12;
            }
            CHECK(found);
            CHECK(found_conj);
        }
        // Equal frequencies and equal damping: Im parts split by exactly 2J.
        auto q = test::scaled_dimer(0.7, 0.0);
        q.kappa_R = q.kappa;
        const auto s2 = solve_steady_states(q, Drive::from_flux(q.omega_L, 0.0)).at(0);
        std::vector<double> im;
        for (const auto& lam : s2.eigenvalues) im.push_back(lam.imag());
        std::sort(im.begin(), im.end());
        CHECK(im[3] - im[0] == doctest::Approx(2 * q.J).epsilon(1e-12));
    }
    SUBCASE("undriven: independent of U, non-positive real parts") {
        const Drive d{50.3, {0, 0}};
        const auto A1 = drift_matrix(test::scaled_dimer(0.7, -0.2), d, {{0, 0}, {0, 0}}).A;
        const auto A2 = drift_matrix(test::scaled_dimer(0.7, 0.0), d, {{0, 0}, {0, 0}}).A;
        CHECK((A1 - A2).cwiseAbs().maxCoeff() == 0.0);
        const Eigen::Vector4cd ev = A1.eigenvalues();
        for (int i = 0; i < 4; ++i) CHECK(ev(i).real() <= 1e-12);
    }
    SUBCASE("conjugation symmetry is exact") {
        const auto p = test::scaled_dimer(0.4, -0.3);
        const Drive d = Drive::from_flux(p.omega_L - 0.9, 3.0, 1.1);
        for (const auto& ss : solve_steady_states(p, d)) {
            const auto& A = ss.drift.A;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    CHECK(A(2 * i + 1, 2 * j + 1) == std::conj(A(2 * i, 2 * j)));
                    CHECK(A(2 * i + 1, 2 * j) == std::conj(A(2 * i, 2 * j + 1)));
                }
        }
    }
}

TEST_CASE("drift matrix rejects non-stationary amplitudes") {
    const auto p = test::scaled_dimer();
    const Drive d = Drive::from_flux(p.omega_L, 1.0);
    CHECK_THROWS_AS(drift_matrix(p, d, {{0.3, 0.1}, {0.0, 0.2}}), NotSteadyState);
}

TEST_CASE("photon flux conversion") {
    const double flux = units::dbm_to_flux(-110.0, units::ghz_to_rad(7.79));
    CHECK(flux * 1e-6 == doctest::Approx(2000).epsilon(0.05));
    CHECK(units::dbm_to_flux(-std::numeric_limits<double>::infinity(), 1e10) == 0.0);
    for (double dbm : {-140.0, -110.0, -73.2, 0.0, 12.0}) {
        const double w = units::ghz_to_rad(6.3);
        const double f = units::dbm_to_flux(dbm, w);
        CHECK(units::dbm_to_flux(units::flux_to_dbm(f, w), w) == doctest::Approx(f).epsilon(1e-12));
        // P = hbar omega flux
        CHECK(units::kHbar * w * f == doctest::Approx(std::pow(10.0, (dbm - 30) / 10)).epsilon(1e-12));
    }
    CHECK(units::rad_to_ghz(units::ghz_to_rad(7.123)) == doctest::Approx(7.123).epsilon(1e-15));
    CHECK(units::rad_to_mhz(units::mhz_to_rad(157.5)) == doctest::Approx(157.5).epsilon(1e-15));
    CHECK(units::from_db(units::to_db(3.7)) == doctest::Approx(3.7).epsilon(1e-14));
}

TEST_CASE("drive helpers") {
    const Drive d = Drive::from_flux(5.0, 4.0, 0.5);
    CHECK(d.flux() == doctest::Approx(4.0));
    CHECK(std::arg(d.alpha_in) == doctest::Approx(0.5));
}
