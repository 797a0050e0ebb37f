#include "bhdimer/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bhdimer/errors.hpp"

namespace bhd {

namespace {
constexpr cplx kI{0.0, 1.0};
}

void DimerParams::validate() const {
    auto fail = [](const std::string& what) { throw InvalidParams(what); };
    for (double v : {omega_L, omega_R, kappa, kappa_R, kappa_int_L, kappa_int_R, J, U_L, U_R}) {
        if (!std::isfinite(v)) fail("dimer parameters must be finite");
    }
    if (!(kappa > 0.0)) fail("kappa must be positive");
    if (kappa_R < 0.0 || kappa_int_L < 0.0 || kappa_int_R < 0.0) fail("loss rates must be non-negative");
    if (J < 0.0) fail("hopping J must be non-negative");
}

Drive Drive::from_flux(double omega_p, double flux, double phase) {
    return Drive{omega_p, std::polar(std::sqrt(std::max(flux, 0.0)), phase)};
}

Detunings frame_detunings(const DimerParams& p, double omega_p) {
    return {p.omega_L - omega_p, p.omega_R - omega_p};
}

double drive_detuning(const DimerParams& p, double omega_p) { return omega_p - p.omega_0(); }
double pump_from_detuning(const DimerParams& p, double delta) { return p.omega_0() + delta; }

ModeAmplitudes equations_of_motion(const DimerParams& p, const Drive& d, const ModeAmplitudes& a) {
    const auto [dL, dR] = frame_detunings(p, d.omega_p);
    const double nL = std::norm(a.alpha_L);
    const double nR = std::norm(a.alpha_R);
    const cplx dotL = -kI * (dL + p.U_L * nL) * a.alpha_L - kI * p.J * a.alpha_R -
                      0.5 * p.kappa_total_L() * a.alpha_L + std::sqrt(p.kappa) * d.alpha_in;
    const cplx dotR = -kI * (dR + p.U_R * nR) * a.alpha_R - kI * p.J * a.alpha_L -
                      0.5 * p.kappa_total_R() * a.alpha_R;
    return {dotL, dotR};
}

double residual_scale(const DimerParams& p, const Drive& d, const ModeAmplitudes& a) {
    const auto [dL, dR] = frame_detunings(p, d.omega_p);
    const double nL = std::norm(a.alpha_L);
    const double nR = std::norm(a.alpha_R);
    const double rate = std::max({p.kappa_total_L(), p.kappa_total_R(), std::abs(dL), std::abs(dR), p.J,
                                  std::abs(p.U_L) * nL, std::abs(p.U_R) * nR});
    const double amp = std::max(std::abs(a.alpha_L), std::abs(a.alpha_R));
    return rate * amp + std::sqrt(p.kappa) * std::abs(d.alpha_in);
}

double steady_state_residual(const DimerParams& p, const Drive& d, const ModeAmplitudes& a) {
    const auto f = equations_of_motion(p, d, a);
    return std::hypot(std::abs(f.alpha_L), std::abs(f.alpha_R));
}

DriftMatrix drift_matrix_unchecked(const DimerParams& p, const Drive& d, const ModeAmplitudes& ss) {
    const auto [dL, dR] = frame_detunings(p, d.omega_p);
    Matrix4c A = Matrix4c::Zero();

    auto fill_block = [&](int m, double delta, double U, double kappa_tot, cplx alpha) {
        const double n = std::norm(alpha);
        const cplx diag = -kI * (delta + 2.0 * U * n) - 0.5 * kappa_tot;
        const cplx anomalous = -kI * U * alpha * alpha;
        A(2 * m, 2 * m) = diag;
        A(2 * m, 2 * m + 1) = anomalous;
        A(2 * m + 1, 2 * m) = std::conj(anomalous);
        A(2 * m + 1, 2 * m + 1) = std::conj(diag);
    };
    fill_block(0, dL, p.U_L, p.kappa_total_L(), ss.alpha_L);
    fill_block(1, dR, p.U_R, p.kappa_total_R(), ss.alpha_R);

    const cplx hop = -kI * p.J;
    A(0, 2) = hop;
    A(2, 0) = hop;
    A(1, 3) = std::conj(hop);
    A(3, 1) = std::conj(hop);
    return {A, ss};
}

DriftMatrix drift_matrix(const DimerParams& p, const Drive& d, const ModeAmplitudes& ss) {
    const double res = steady_state_residual(p, d, ss);
    const double scale = residual_scale(p, d, ss);
    if (!(res <= kSteadyStateRelTol * scale)) {
        std::ostringstream os;
        os << "amplitudes are not a steady state: residual " << res << " exceeds " << kSteadyStateRelTol * scale;
        throw NotSteadyState(os.str());
    }
    return drift_matrix_unchecked(p, d, ss);
}

}  // namespace bhd
