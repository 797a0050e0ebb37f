#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bhdimer/core_model.hpp"
#include "bhdimer/polynomial.hpp"

namespace bhd {

// One classical fixed point of the driven dimer with its linear stability.
struct SteadyState {
    cplx alpha_L;
    cplx alpha_R;
    double n_L = 0.0;
    double n_R = 0.0;
    double omega_p = 0.0;  // pump the state was solved for
    DriftMatrix drift;
    std::array<cplx, 4> eigenvalues;
    bool stable = false;
    // |max Re(lambda)| within the stability tolerance; reported, not silently classified.
    bool marginal = false;

    ModeAmplitudes amplitudes() const { return {alpha_L, alpha_R}; }
    double max_real_eigenvalue() const;
};

struct SolverOptions {
    // Eigenvalues with |Re| below stability_tol_rel * kappa are marginal.
    double stability_tol_rel = 1e-6;
    // Polynomial roots with |Im| < root_imag_tol * max(1, |root|) count as real.
    double root_imag_tol = 1e-7;
    // Negative real roots down to -n_tol (scaled occupation) are clipped to 0.
    double n_tol = 1e-9;
};

// All classical steady states, sorted by n_L then n_R. Eliminates alpha_L via
// the right-mode equation, reduces to a real polynomial in n_R, takes every
// real non-negative root, reconstructs and Newton-polishes the amplitudes.
// J == 0 is solved as an isolated single Kerr mode (cubic in n_L).
// Throws NoConvergence when a candidate cannot be polished to a fixed point.
std::vector<SteadyState> solve_steady_states(const DimerParams& p, const Drive& d,
                                             const SolverOptions& opt = {});

// The real polynomial in the scaled right-mode occupation whose non-negative
// roots are the steady states; exposed for inspection and tests.
struct SteadyStatePolynomial {
    RealPolynomial poly;
    double occupation_scale;  // n = occupation_scale * x
    bool single_mode;         // J == 0: the variable is n_L
};

SteadyStatePolynomial steady_state_polynomial(const DimerParams& p, const Drive& d);

// Builds a SteadyState (drift matrix, eigenvalues, verdict) from amplitudes
// that already satisfy the equations of motion.
SteadyState make_steady_state(const DimerParams& p, const Drive& d, const ModeAmplitudes& a,
                              const SolverOptions& opt = {});

enum class Region { S, M, P };
std::string to_string(Region r);

struct PhasePoint {
    double delta = 0.0;  // omega_p - omega_0 (rad/s)
    double flux = 0.0;   // photons/s
    std::vector<SteadyState> solutions;
    Region region = Region::S;
    int n_stable = 0;
    // M assigned although no solution is stable.
    bool ambiguous = false;
    bool marginal = false;
    // Set when the solver failed at this point; region is then meaningless.
    std::optional<std::string> error;
};

PhasePoint classify_phase(const DimerParams& p, const Drive& d, const SolverOptions& opt = {});

struct PhaseDiagram {
    std::vector<double> deltas;
    std::vector<double> fluxes;
    std::vector<PhasePoint> points;  // index = i_delta * fluxes.size() + i_flux

    const PhasePoint& at(std::size_t i_delta, std::size_t i_flux) const {
        return points[i_delta * fluxes.size() + i_flux];
    }
    std::array<std::size_t, 3> region_counts() const;  // S, M, P (errors excluded)
};

// Classifies every grid point. Points are independent and evaluated on
// `threads` workers (0 = hardware concurrency); per-point failures are stored
// in PhasePoint::error.
PhaseDiagram phase_diagram(const DimerParams& p, const std::vector<double>& delta_grid,
                           const std::vector<double>& flux_grid, unsigned threads = 1,
                           const SolverOptions& opt = {});

// Drive flux at which an exact alpha_L = 0 solution exists for drive detuning
// `delta`; none when the required n_R would be negative. Requires a lossless
// right mode.
std::optional<double> vanishing_left_locus(const DimerParams& p, double delta);

// Drive-shifted mode frequencies (lower, upper) in rad/s, from the
// positive-norm Bogoliubov eigenvalues of the drift matrix with its damping
// removed: omega = omega_p - Im(lambda). Inside a parametric gain region the
// conservative pair has collided and both values coincide.
std::pair<double, double> shifted_eigenfrequencies(const SteadyState& ss, double omega_p);

// Undriven hybridized frequencies omega_0 -+ sqrt(J^2 + (omega_L - omega_R)^2 / 4).
std::pair<double, double> hybridized_frequencies(const DimerParams& p);

}  // namespace bhd
