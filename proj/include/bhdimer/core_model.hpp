#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace bhd {

using cplx = std::complex<double>;
using Matrix4c = Eigen::Matrix<cplx, 4, 4>;
using Vector4c = Eigen::Matrix<cplx, 4, 1>;

// Physical model of the driven dimer. All rates are angular (rad/s). The left
// mode couples to the transmission line at `kappa`; the right mode couples to
// the left mode only (plus optional loss channels).
struct DimerParams {
    double omega_L = 0.0;
    double omega_R = 0.0;
    double kappa = 1.0;
    double kappa_R = 0.0;
    double kappa_int_L = 0.0;
    double kappa_int_R = 0.0;
    double J = 0.0;
    double U_L = 0.0;
    double U_R = 0.0;

    double kappa_total_L() const { return kappa + kappa_int_L; }
    double kappa_total_R() const { return kappa_R + kappa_int_R; }
    // Mean bare frequency, the reference for the drive detuning.
    double omega_0() const { return 0.5 * (omega_L + omega_R); }
    bool lossless() const { return kappa_R == 0.0 && kappa_int_L == 0.0 && kappa_int_R == 0.0; }

    // Throws InvalidParams when a field violates its invariant.
    void validate() const;
};

// Coherent pump. |alpha_in|^2 is the incident photon flux (photons/s).
struct Drive {
    double omega_p = 0.0;
    cplx alpha_in{0.0, 0.0};

    double flux() const { return std::norm(alpha_in); }
    static Drive from_flux(double omega_p, double flux, double phase = 0.0);
};

// Rotating-frame helpers. The frame rotates at omega_p; the drive detuning
// delta is measured from omega_0 = (omega_L + omega_R) / 2.
struct Detunings {
    double delta_L;  // omega_L - omega_p
    double delta_R;  // omega_R - omega_p
};

Detunings frame_detunings(const DimerParams& p, double omega_p);
double drive_detuning(const DimerParams& p, double omega_p);      // omega_p - omega_0
double pump_from_detuning(const DimerParams& p, double delta);    // omega_0 + delta

struct ModeAmplitudes {
    cplx alpha_L;
    cplx alpha_R;
};

// Semiclassical time derivatives (d alpha_L/dt, d alpha_R/dt) in the pump frame.
ModeAmplitudes equations_of_motion(const DimerParams& p, const Drive& d, const ModeAmplitudes& a);

// Scale used to judge whether `a` is a fixed point: max(kappa, |delta|, |U| n) * |alpha|.
double residual_scale(const DimerParams& p, const Drive& d, const ModeAmplitudes& a);
double steady_state_residual(const DimerParams& p, const Drive& d, const ModeAmplitudes& a);

// Linearized fluctuation dynamics around a steady state, acting on
// (d_L, d_L^dag, d_R, d_R^dag).
struct DriftMatrix {
    Matrix4c A;
    ModeAmplitudes steady_state;
};

inline constexpr double kSteadyStateRelTol = 1e-9;

// Throws NotSteadyState when the residual exceeds kSteadyStateRelTol * residual_scale.
DriftMatrix drift_matrix(const DimerParams& p, const Drive& d, const ModeAmplitudes& ss);
// Same construction without the fixed-point check.
DriftMatrix drift_matrix_unchecked(const DimerParams& p, const Drive& d, const ModeAmplitudes& ss);

}  // namespace bhd
