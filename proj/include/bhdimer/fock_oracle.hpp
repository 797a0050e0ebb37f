#pragma once

#include <Eigen/Dense>

#include "bhdimer/core_model.hpp"

namespace bhd {

struct FockConfig {
    int n_max_L = 12;
    int n_max_R = 12;
    // Maximum allowed population of the highest retained Fock layer.
    double truncation_tol = 1e-6;

    int dimension() const { return (n_max_L + 1) * (n_max_R + 1); }
    // Throws InvalidParams when the product space exceeds 400 states.
    void validate() const;
};

inline constexpr int kMaxFockStates = 400;

struct QuantumSteadyState {
    Eigen::MatrixXcd rho;  // basis index = n_L * (n_max_R + 1) + n_R
    FockConfig config;
    cplx a_L{0.0, 0.0};
    cplx a_R{0.0, 0.0};
    double n_L = 0.0;
    double n_R = 0.0;
    cplx a_L_a_R{0.0, 0.0};
    double top_layer_population = 0.0;
    double trace_error = 0.0;
    double hermiticity_error = 0.0;
    double min_eigenvalue = 0.0;
};

// Steady state of the Lindblad master equation for the driven dimer in the
// pump frame, solved directly from the sparse vectorized Liouvillian with one
// row replaced by the trace condition.
// Throws TruncationError when the top Fock layer holds more than
// cfg.truncation_tol and SolveFailure when the linear solve breaks down.
QuantumSteadyState lindblad_steady_state(const DimerParams& p, const Drive& d, const FockConfig& cfg = {});

// Gamma = 1 - sqrt(kappa) <a_L> / alpha_in from the oracle steady state.
cplx oracle_reflection(const DimerParams& p, const Drive& d, const FockConfig& cfg = {});

}  // namespace bhd
