#pragma once

#include <optional>
#include <random>
#include <vector>

#include "bhdimer/core_model.hpp"
#include "bhdimer/semiclassical.hpp"
#include "bhdimer/units.hpp"

namespace bhd::test {

// Dimensionless dimer: kappa = 1, J = 0.7, weak negative Kerr, degenerate modes.
inline DimerParams scaled_dimer(double J = 0.7, double U = -1e-3) {
    DimerParams p;
    p.omega_L = p.omega_R = 50.0;
    p.kappa = 1.0;
    p.J = J;
    p.U_L = p.U_R = U;
    return p;
}

// Device-scale parameters (7.0, 7.2, 0.29, 0.25) GHz with U/2pi = -80 kHz.
inline DimerParams device_dimer() {
    DimerParams p;
    p.omega_L = units::ghz_to_rad(7.0);
    p.omega_R = units::ghz_to_rad(7.2);
    p.kappa = units::ghz_to_rad(0.29);
    p.J = units::ghz_to_rad(0.25);
    p.U_L = p.U_R = -units::ghz_to_rad(80e-6);
    return p;
}

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

// The unique stable solution at (delta, flux), if the point is in S.
inline std::optional<SteadyState> single_stable(const DimerParams& p, double delta, double flux) {
    const Drive d = Drive::from_flux(pump_from_detuning(p, delta), flux);
    auto sols = solve_steady_states(p, d);
    if (sols.size() != 1 || !sols[0].stable) return std::nullopt;
    return sols[0];
}

// Largest flux on a bisection between 0 and flux_hi for which the state at
// `delta` stays single and stable (approach to the instability boundary).
inline double stability_edge(const DimerParams& p, double delta, double flux_hi, int iters = 60) {
    double lo = 0.0, hi = flux_hi;
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        (single_stable(p, delta, mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace bhd::test

namespace bhd::test {

// A random lossless (or lossy) dimer with a stable pumped steady state.
struct PumpedConfig {
    DimerParams params;
    Drive drive;
    SteadyState state;
};

template <class Rng>
PumpedConfig random_pumped(Rng& rng, bool lossy = false) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    while (true) {
        DimerParams p = scaled_dimer(0.3 + 0.7 * u(rng), -1e-3 * (0.5 + u(rng)));
        p.omega_R = p.omega_L + (u(rng) - 0.5);
        p.U_R = p.U_L * (0.5 + u(rng));
        if (lossy) {
            p.kappa_R = 0.2 * u(rng);
            p.kappa_int_L = 0.1 * u(rng);
            p.kappa_int_R = 0.1 * u(rng);
        }
        const double delta = -1.5 + 2.5 * u(rng);
        const double flux = 250.0 * u(rng);
        const Drive d = Drive::from_flux(pump_from_detuning(p, delta), flux, 6.0 * u(rng));
        for (const auto& s : solve_steady_states(p, d))
            if (s.stable && s.n_L > 1.0) return {p, d, s};
    }
}

}  // namespace bhd::test
