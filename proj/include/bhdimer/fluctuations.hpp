#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bhdimer/core_model.hpp"
#include "bhdimer/fitting.hpp"
#include "bhdimer/semiclassical.hpp"

namespace bhd {

// An input port feeding one of the two modes.
struct Channel {
    std::string name;  // "line", "int_L", "ext_R", "int_R"
    int mode;          // 0 = left, 1 = right
    double rate;       // rad/s
};

// Every channel with a non-zero rate; the transmission line is always first.
std::vector<Channel> input_channels(const DimerParams& p);

// Frequency-resolved map from the doubled input vector
// (a_c(Delta), a_c^dag(-Delta)) for each channel c to (a_out(Delta), a_out^dag(-Delta)).
struct ScatteringRecord {
    double Delta = 0.0;
    std::vector<Channel> channels;
    Eigen::Matrix<cplx, 2, Eigen::Dynamic> S;

    double signal_gain() const { return std::norm(S(0, 0)); }
    double idler_gain() const { return std::norm(S(0, 1)); }
    // sum_c |S_{0,2c}|^2 - |S_{0,2c+1}|^2 - 1; zero for a commutator-preserving map.
    double symplectic_defect() const;
};

// S(Delta) = I - C (-i Delta I - A)^{-1} B over all input channels.
// Throws PreconditionViolation on an unstable state and SingularResolvent when
// the resolvent is numerically singular.
ScatteringRecord scattering_matrix(const SteadyState& ss, const DimerParams& p, double Delta);

struct GainPoint {
    double Delta;
    double signal;  // G_s, linear
    double idler;   // G_i, linear
};

struct GainSpectrum {
    std::vector<GainPoint> points;
    double omega_p = 0.0;
    LorentzianFit fit;             // fit of G_s(Delta)
    double peak_gain = 0.0;        // max G_s on the grid
    double gain_bandwidth = 0.0;   // sqrt(fitted peak height + baseline) * FWHM, rad/s
};

GainSpectrum gain_spectrum(const SteadyState& ss, const DimerParams& p, const std::vector<double>& Delta_grid);

struct GainPeak {
    double Delta = 0.0;
    double gain = 1.0;  // G_s at Delta, linear
};

// Maximum of G_s over [Delta_min, Delta_max]: grid search, then Brent refinement.
GainPeak signal_gain_peak(const SteadyState& ss, const DimerParams& p, double Delta_min, double Delta_max,
                          int grid = 401);

// A pumped configuration on the low-amplitude branch.
// Full width of G_s at half its peak value, from bisection on the two
// half-maximum crossings around `peak`.
double signal_gain_fwhm(const SteadyState& ss, const DimerParams& p, const GainPeak& peak);

struct OperatingPoint {
    Drive drive;
    SteadyState state;
    GainPeak peak;
};

// Follows the branch connected to vacuum at drive detuning `delta` upward in
// flux and bisects for the flux where the peak signal gain over
// [-Delta_span, Delta_span] reaches target_gain (linear). Throws NoConvergence
// when the branch stays below the target up to flux_max.
OperatingPoint operating_point_for_gain(const DimerParams& p, double delta, double target_gain, double flux_max,
                                        double Delta_span);

// High-gain limit of sqrt(G_peak) * FWHM: twice the line-channel residue of
// the least-damped drift eigenmode, 2 kappa |v_L w_L| with w = V^{-1}.
double critical_mode_gain_bandwidth(const SteadyState& ss, const DimerParams& p);

// Normalized (vacuum = 1) symmetric-ordered noise of
// e^{-i phi} a_out(Delta) + e^{i phi} a_out^dag(-Delta) for vacuum inputs,
// after a detection beamsplitter of efficiency eta.
double squeezing_value(const ScatteringRecord& rec, double phi, double eta = 1.0);

struct SqueezingSpectrum {
    std::vector<double> deltas;
    std::vector<double> phis;
    std::vector<double> values;  // index = i_delta * phis.size() + i_phi

    double at(std::size_t i_delta, std::size_t i_phi) const { return values[i_delta * phis.size() + i_phi]; }
};

SqueezingSpectrum squeezing_spectrum(const SteadyState& ss, const DimerParams& p, const std::vector<double>& Delta_grid,
                                     const std::vector<double>& phi_grid, double eta = 1.0);

// c0 + c1 cos(2 phi + c2)
struct SinusoidFit {
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    // max |fit - value| / max |value|
    double rel_residual = 0.0;
};

struct PhaseSlice {
    double Delta = 0.0;
    std::vector<std::pair<double, double>> values;  // (phi, S)
    SinusoidFit fit;
};

PhaseSlice squeezing_vs_phase(const SteadyState& ss, const DimerParams& p, double Delta,
                              const std::vector<double>& phi_grid, double eta = 1.0);

// Extremes over phi at one sideband, in closed form from the sinusoid.
struct SqueezingExtremes {
    double min;
    double max;
    double phi_min;
};
SqueezingExtremes squeezing_extremes(const ScatteringRecord& rec, double eta = 1.0);

// Second moments of rectangular-band filtered output modes a_+ (signal band)
// and a_- (idler band), each normalized so [a, a^dag] = 1.
struct FilteredModeMoments {
    double n_signal = 0.0;     // <a_+^dag a_+>
    double n_idler = 0.0;      // <a_-^dag a_->
    cplx pair{0.0, 0.0};       // <a_+ a_->
};

FilteredModeMoments filtered_mode_moments(const SteadyState& ss, const DimerParams& p, double filter_center_s,
                                          double filter_center_i, double bandwidth, double eta = 1.0);

// Symmetric-ordered covariance of (X_+, P_+, X_-, P_-) with X = (a + a^dag)/sqrt2,
// vacuum = I/2. Throws FilterOverlap when the bands intersect and
// PreconditionViolation when they are not mirror images about the pump.
Eigen::Matrix4d output_covariance(const SteadyState& ss, const DimerParams& p, double filter_center_s,
                                  double filter_center_i, double bandwidth, double eta = 1.0);

Eigen::Matrix4d covariance_from_moments(const FilteredModeMoments& m);

// Symplectic eigenvalues (ascending) of a two-mode covariance in (X1, P1, X2, P2) order.
std::array<double, 2> symplectic_eigenvalues(const Eigen::Matrix4d& cov);

}  // namespace bhd
