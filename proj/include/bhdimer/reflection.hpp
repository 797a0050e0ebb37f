#pragma once

#include <string>
#include <vector>

#include "bhdimer/core_model.hpp"
#include "bhdimer/errors.hpp"

namespace bhd {

// Linear-response reflection coefficient of the undriven dimer at probe
// frequency omega (rad/s), with a_out = a_in - sqrt(kappa) a_L.
cplx reflection_model(const DimerParams& p, double omega);

// Total unwrapped change of Arg[Gamma] across a frequency grid.
double phase_winding(const std::vector<cplx>& gamma);

// Arg[Gamma] samples along increasing probe frequency.
struct ReflectionTrace {
    std::vector<double> omega;  // rad/s, strictly increasing
    std::vector<double> phase;  // wrapped, rad
    double noise_rad = 0.0;     // informational

    void validate() const;
};

ReflectionTrace synthetic_trace(const DimerParams& p, const std::vector<double>& omega, double noise_rad = 0.0,
                                unsigned long long seed = 0);

// Circular distance between two angles, in (-pi, pi].
double angle_difference(double a, double b);

struct FitParameters {
    double omega_L;
    double omega_R;
    double kappa;
    double J;
};

struct FitResult {
    FitParameters params{};
    // Sum of squared wrap-aware phase residuals (rad^2).
    double residual = 0.0;
    // 1-sigma intervals from the residual curvature, same order as params.
    std::array<double, 4> stderr_{};
    int evaluations = 0;
    int starts = 0;
    bool converged = false;
    // Other local minima found by the multi-start, best first.
    std::vector<std::pair<FitParameters, double>> alternatives;

    DimerParams to_dimer() const;
};

// Two physically distinct minima with residuals within 2x of each other.
class AmbiguousFit : public Error {
public:
    AmbiguousFit(const std::string& what, FitResult best, FitResult other)
        : Error("Ambiguous", what), best_(std::move(best)), other_(std::move(other)) {}
    const FitResult& best() const { return best_; }
    const FitResult& other() const { return other_; }

private:
    FitResult best_;
    FitResult other_;
};

struct ReflectionFitOptions {
    // Multi-start over a coarse grid when the rms phase residual from the
    // initial guess exceeds this (rad).
    double stall_rms = 0.05;
    double f_rel_tol = 1e-10;
};

// Least-squares fit of (omega_L, omega_R, kappa, J) to wrapped phase data.
// Throws FitDiverged when no start reduces the residual, AmbiguousFit when the
// best two distinct minima are within a factor of 2.
FitResult fit_reflection(const ReflectionTrace& trace, const DimerParams& initial_guess,
                         const ReflectionFitOptions& opt = {});

// Sum of squared circular phase residuals of a parameter set against a trace.
double phase_residual(const ReflectionTrace& trace, const FitParameters& q);

}  // namespace bhd
