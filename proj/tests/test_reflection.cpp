#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "bhdimer/reflection.hpp"
#include "bhdimer/units.hpp"
#include "support.hpp"

using namespace bhd;
using units::ghz_to_rad;

namespace {

constexpr double kPi = std::numbers::pi;

DimerParams device_linear() {
    DimerParams p;
    p.omega_L = ghz_to_rad(7.0);
    p.omega_R = ghz_to_rad(7.2);
    p.kappa = ghz_to_rad(0.29);
    p.J = ghz_to_rad(0.25);
    return p;
}

std::vector<double> probe_grid() {
    std::vector<double> w;
    for (double f : test::linspace(6.4, 7.8, 561)) w.push_back(ghz_to_rad(f));
    return w;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("reflection model limits") {
    const auto p = device_linear();
    CHECK(std::abs(reflection_model(p, ghz_to_rad(1e4)) - 1.0) < 1e-4);
    SUBCASE("lossless unitarity and 4 pi winding on random draws") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int t = 0; t < 200; ++t) {
            DimerParams q;
            q.omega_L = 10 + 2 * u(rng);
            q.omega_R = 10 + 2 * u(rng);
            q.kappa = 0.05 + 0.5 * u(rng);
            q.J = 0.1 + 0.5 * u(rng);
            // Coarse wide sweep plus fine windows around both bare frequencies.
            std::vector<double> ws = test::linspace(-2000.0, 2000.0, 2001);
            for (double c : {8.0, q.omega_L, q.omega_R}) {
                const double half = c == 8.0 ? 3.0 : 0.05;
                const auto fine = test::linspace(c - half + (c == 8.0 ? 3.0 : 0.0), c + half + (c == 8.0 ? 3.0 : 0.0), 4001);
                ws.insert(ws.end(), fine.begin(), fine.end());
            }
            std::sort(ws.begin(), ws.end());
            std::vector<cplx> g;
            for (double w : ws) g.push_back(reflection_model(q, w));
            for (const auto& z : g) CHECK(std::abs(std::abs(z) - 1.0) < 1e-12);
            CHECK(std::abs(std::abs(phase_winding(g)) - 4 * kPi) < 0.01);
        }
    }
    SUBCASE("decoupled limit is a single resonance") {
        auto q = p;
        q.J = 0.0;
        std::vector<cplx> g;
        for (double w : test::linspace(ghz_to_rad(-1e3), ghz_to_rad(1e3), 20001)) {
            const cplx single = 1.0 - q.kappa / (cplx(0, q.omega_L - w) + 0.5 * q.kappa);
            CHECK(std::abs(reflection_model(q, w) - single) < 1e-14);
            g.push_back(single);
        }
        CHECK(std::abs(std::abs(phase_winding(g)) - 2 * kPi) < 0.01);
    }
    SUBCASE("internal loss reduces the magnitude") {
        auto q = p;
        q.kappa_int_L = 0.1 * q.kappa;
        CHECK(std::abs(reflection_model(q, q.omega_L)) < 1.0);
    }
}

TEST_CASE("angle helpers and traces") {
    CHECK(angle_difference(kPi - 0.1, -kPi + 0.1) == doctest::Approx(-0.2));
    CHECK(angle_difference(0.3, 0.1) == doctest::Approx(0.2));
    CHECK(angle_difference(kPi, 0.0) == doctest::Approx(kPi));
    CHECK(angle_difference(-kPi, 0.0) == doctest::Approx(kPi));
    const auto p = device_linear();
    const auto a = synthetic_trace(p, probe_grid(), 0.01, 9);
    const auto b = synthetic_trace(p, probe_grid(), 0.01, 9);
    const auto c = synthetic_trace(p, probe_grid(), 0.01, 10);
    CHECK(a.phase == b.phase);
    CHECK(a.phase != c.phase);
    for (double ph : a.phase) CHECK(std::abs(ph) <= kPi);
    ReflectionTrace bad = a;
    std::swap(bad.omega[3], bad.omega[4]);
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
    bad = a;
    bad.phase.pop_back();
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
}

TEST_CASE("noiseless fit recovers the parameters") {
    const auto p = device_linear();
    const auto t = synthetic_trace(p, probe_grid());
    auto guess = p;
    guess.omega_L *= 1.01;
    guess.omega_R *= 0.995;
    guess.kappa *= 1.2;
    guess.J *= 0.8;
    const auto r = fit_reflection(t, guess);
    CHECK(rel(r.params.omega_L, p.omega_L) < 1e-8);
    CHECK(rel(r.params.omega_R, p.omega_R) < 1e-8);
    CHECK(rel(r.params.kappa, p.kappa) < 1e-8);
    CHECK(rel(r.params.J, p.J) < 1e-8);
    CHECK(r.converged);
    // Stored residual is reproducible.
    CHECK(phase_residual(t, r.params) == r.residual);
    SUBCASE("label-swapped guess") {
        auto swapped = guess;
        std::swap(swapped.omega_L, swapped.omega_R);
        const auto s = fit_reflection(t, swapped);
        CHECK(rel(s.params.omega_L, p.omega_L) < 1e-8);
        CHECK(rel(s.params.omega_R, p.omega_R) < 1e-8);
    }
}

TEST_CASE("fit is self-inverse on random noiseless draws") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        DimerParams p = device_linear();
        p.omega_L *= 1 + 0.01 * u(rng);
        p.omega_R *= 1 + 0.01 * u(rng);
        p.kappa *= 1 + 0.3 * u(rng);
        p.J *= 1 + 0.3 * u(rng);
        const auto tr = synthetic_trace(p, probe_grid());
        const auto r = fit_reflection(tr, device_linear());
        CHECK(rel(r.params.omega_L, p.omega_L) < 1e-6);
        CHECK(rel(r.params.omega_R, p.omega_R) < 1e-6);
        CHECK(rel(r.params.kappa, p.kappa) < 1e-6);
        CHECK(rel(r.params.J, p.J) < 1e-6);
    }
}

TEST_CASE("noisy fit with one degree of phase noise") {
    const auto p = device_linear();
    const double noise = kPi / 180;
    for (unsigned long long seed : {1ULL, 2ULL, 3ULL}) {
        const auto t = synthetic_trace(p, probe_grid(), noise, seed);
        const auto r = fit_reflection(t, p);
        const double truth[4] = {p.omega_L, p.omega_R, p.kappa, p.J};
        const double got[4] = {r.params.omega_L, r.params.omega_R, r.params.kappa, r.params.J};
        for (int k = 0; k < 4; ++k) {
            CHECK(rel(got[k], truth[k]) < 0.01);
            CHECK(r.stderr_[k] > 0.0);
            CHECK(std::abs(got[k] - truth[k]) < 5 * r.stderr_[k]);
        }
        // rms residual matches the injected noise.
        CHECK(std::sqrt(r.residual / t.phase.size()) == doctest::Approx(noise).epsilon(0.15));
    }
}

TEST_CASE("fit failures") {
    const auto p = device_linear();
    SUBCASE("unusable data") {
        auto t = synthetic_trace(p, probe_grid());
        for (auto& ph : t.phase) ph = std::nan("");
        CHECK_THROWS_AS(fit_reflection(t, p), FitDiverged);
    }
    SUBCASE("unidentifiable right mode") {
        auto q = p;
        q.J = 0.0;
        const auto t = synthetic_trace(q, probe_grid());
        try {
            fit_reflection(t, p);
            FAIL("expected an ambiguous fit");
        } catch (const AmbiguousFit& e) {
            CHECK(e.name() == "Ambiguous");
            CHECK(e.best().residual <= e.other().residual);
            CHECK(e.other().residual <= 2 * e.best().residual + 1e-18 * t.phase.size());
            CHECK(e.best().params.J < 1e-3 * p.J);
        }
    }
}
