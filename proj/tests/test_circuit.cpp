#include <doctest.h>

#include <cmath>

#include "bhdimer/circuit.hpp"
#include "bhdimer/errors.hpp"
#include "bhdimer/units.hpp"
#include "support.hpp"

using namespace bhd;
using units::ghz_to_rad;

namespace {

// Round-number design: 10 SQUIDs, 2.4 pF shunts, E_J1/E_J2 = 1/3, left mode near 7.1 GHz.
CircuitParams reference_design() {
    CircuitParams c;
    c.M = 10;
    c.C_L = 2.4e-12;
    c.C_R = 2.4e-12;
    c.C_J = 0.28e-12;
    c.C_kappa = 0.02e-12;
    const double E = josephson_energy_for_frequency(ghz_to_rad(7.1), c.C_L, c.M);
    c.E_J1 = 0.25 * E;
    c.E_J2 = 0.75 * E;
    return c;
}

bool close(double a, double b, double rel = 1e-12) { return std::abs(a - b) <= rel * std::abs(b); }

}  // namespace

TEST_CASE("asymmetric SQUID energy") {
    const double E1 = 1.0e-24, E2 = 3.0e-24;
    CHECK(squid_array_energy(E1, E2, 0.0) == doctest::Approx(E1 + E2).epsilon(1e-15));
    // d = 0.5: the floor at half a flux quantum is half the maximum.
    CHECK(squid_array_energy(E1, E2, 0.5) == doctest::Approx(0.5 * (E1 + E2)).epsilon(1e-15));
    CHECK(squid_array_energy(2e-24, 2e-24, 0.25) == doctest::Approx(4e-24 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(squid_array_energy(2e-24, 2e-24, 0.5) < 1e-15 * 4e-24);
    for (double phi : test::linspace(-1.3, 1.7, 61)) {
        const double e = squid_array_energy(E1, E2, phi);
        CHECK(close(squid_array_energy(E1, E2, phi + 1.0), e));
        CHECK(close(squid_array_energy(E1, E2, -phi), e));
        // |cos| sqrt(1 + d^2 tan^2) form, away from its removable singularity.
        const double x = std::numbers::pi * phi;
        if (std::abs(std::cos(x)) > 1e-3)
            CHECK(close(e, (E1 + E2) * std::abs(std::cos(x)) * std::sqrt(1 + 0.25 * std::pow(std::tan(x), 2)), 1e-12));
    }
}

TEST_CASE("circuit to dimer formulas") {
    const auto c = reference_design();
    const auto p = circuit_to_dimer(c);
    const double E = squid_array_energy(c.E_J1, c.E_J2, 0.0);
    const double L = c.M * std::pow(units::kFluxQuantum / (2 * std::numbers::pi), 2) / E;
    CHECK(close(p.omega_L, 1 / std::sqrt(L * c.C_L)));
    const double Ec = std::pow(units::kElementaryCharge, 2) / (2 * c.C_R);
    CHECK(close(p.U_R, -Ec / (units::kHbar * c.M * c.M)));
    CHECK(close(p.J, c.C_J * std::sqrt(p.omega_L * p.omega_R) / (4 * c.C_R)));
    CHECK(close(p.kappa, p.omega_L * p.omega_L * c.C_kappa * c.C_kappa * c.Z0 / c.C_L));
    CHECK(p.kappa_int_L == 0.0);
    CHECK(p.kappa_R == 0.0);
}

TEST_CASE("circuit scaling laws") {
    const auto c = reference_design();
    const auto p = circuit_to_dimer(c);
    SUBCASE("doubling M at fixed junctions") {
        auto c2 = c;
        c2.M *= 2;
        const auto q = circuit_to_dimer(c2);
        CHECK(close(q.U_L, p.U_L / 4));
        CHECK(close(q.U_R, p.U_R / 4));
        CHECK(close(q.omega_0(), p.omega_0() / std::sqrt(2.0)));
    }
    SUBCASE("J is linear in C_J") {
        auto c2 = c;
        c2.C_J *= 2;
        CHECK(close(circuit_to_dimer(c2).J, 2 * p.J));
    }
    SUBCASE("shunt capacitance") {
        auto c2 = c;
        c2.C_L *= 3;
        c2.C_R *= 3;
        const auto q = circuit_to_dimer(c2);
        CHECK(close(q.omega_L, p.omega_L / std::sqrt(3.0)));
        CHECK(close(q.U_L, p.U_L / 3));
        // omega_L^2 / C_L: kappa scales as 1/9.
        CHECK(close(q.kappa, p.kappa / 9));
        // omega_0 / C_R: J scales as 3^(-3/2).
        CHECK(close(q.J, p.J / std::pow(3.0, 1.5)));
    }
    SUBCASE("frequency follows sqrt of the Josephson energy") {
        for (double phi : test::linspace(0.0, 0.5, 11)) {
            auto c2 = c;
            c2.phi_ext = phi;
            const double ratio = squid_array_energy(c.E_J1, c.E_J2, phi) / squid_array_energy(c.E_J1, c.E_J2, 0.0);
            const auto q = circuit_to_dimer(c2);
            CHECK(close(q.omega_L, p.omega_L * std::sqrt(ratio)));
            // No flux dependence of the Kerr shift.
            CHECK(q.U_L == p.U_L);
        }
    }
}

TEST_CASE("reference design anchors") {
    const auto c = reference_design();
    const auto p = circuit_to_dimer(c);
    CHECK(units::rad_to_ghz(p.omega_L) == doctest::Approx(7.1).epsilon(1e-12));
    CHECK(units::rad_to_hz(p.U_L) == doctest::Approx(-80e3).epsilon(0.25));
    const auto tc = flux_tuning_curve(c, test::linspace(0.0, 0.5, 201));
    CHECK(units::rad_to_ghz(tc.range_L) == doctest::Approx(2.0).epsilon(0.3));
    // d = 0.5 floor: omega(1/2) / omega(0) = sqrt(d).
    CHECK(close(tc.points.back().omega_L / tc.points.front().omega_L, std::sqrt(0.5)));
    CHECK(!coupling_regime_warning(c).has_value());
}

TEST_CASE("symmetric SQUIDs tune to zero at half flux") {
    auto c = reference_design();
    c.E_J1 = c.E_J2;
    const auto tc = flux_tuning_curve(c, test::linspace(0.0, 0.5, 11));
    CHECK(tc.points.back().omega_L < 1e-6 * tc.points.front().omega_L);
    CHECK(tc.range_L == doctest::Approx(tc.points.front().omega_L));
}

TEST_CASE("design inversion round trip") {
    DesignTargets t;
    t.omega_L = ghz_to_rad(7.0);
    t.omega_R = ghz_to_rad(7.2);
    t.U_R = -units::hz_to_rad(80e3);
    t.J = ghz_to_rad(0.25);
    t.kappa = ghz_to_rad(0.29);
    t.M = 10;
    const auto c = design_circuit(t);
    CHECK(c.asymmetry() == doctest::Approx(0.5).epsilon(1e-12));
    const auto p = circuit_to_dimer(c);
    CHECK(close(p.omega_L, t.omega_L));
    CHECK(close(p.omega_R, t.omega_R));
    CHECK(close(p.U_R, t.U_R));
    CHECK(close(p.J, t.J));
    CHECK(close(p.kappa, t.kappa));
    CHECK(c.C_R * 1e12 == doctest::Approx(2.42).epsilon(0.01));
    // kappa comparable to J needs a strong coupling capacitor.
    CHECK(coupling_regime_warning(c).has_value());
}

TEST_CASE("circuit validation") {
    auto c = reference_design();
    c.C_L = 0;
    CHECK_THROWS_AS(circuit_to_dimer(c), InvalidParams);
    c = reference_design();
    c.M = 0;
    CHECK_THROWS_AS(circuit_to_dimer(c), InvalidParams);
    c = reference_design();
    std::swap(c.E_J1, c.E_J2);
    CHECK_THROWS_AS(circuit_to_dimer(c), InvalidParams);
    CHECK_THROWS_AS(flux_tuning_curve(reference_design(), {0.0, 0.3, 0.1}), PreconditionViolation);
    DesignTargets t;
    CHECK_THROWS_AS(design_circuit(t), InvalidParams);
}
