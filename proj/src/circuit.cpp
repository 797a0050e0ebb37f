#include "bhdimer/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bhdimer/errors.hpp"
#include "bhdimer/units.hpp"

namespace bhd {

using units::kElementaryCharge;
using units::kFluxQuantum;
using units::kHbar;

void CircuitParams::validate() const {
    if (!(C_L > 0 && C_R > 0 && C_J > 0 && C_kappa > 0)) throw InvalidParams("capacitances must be positive");
    if (!(E_J1 > 0 && E_J2 > 0)) throw InvalidParams("Josephson energies must be positive");
    if (M < 1) throw InvalidParams("SQUID count must be at least 1");
    if (!(Z0 > 0)) throw InvalidParams("line impedance must be positive");
    if (!std::isfinite(phi_ext)) throw InvalidParams("external flux must be finite");
    const double d = asymmetry();
    if (!(d >= 0.0 && d < 1.0)) throw InvalidParams("junction asymmetry must lie in [0, 1); order E_J1 <= E_J2");
}

double squid_array_energy(double E_J1, double E_J2, double phi_ext) {
    const double d = (E_J2 - E_J1) / (E_J1 + E_J2);
    const double x = std::numbers::pi * phi_ext;
    const double c = std::cos(x), s = std::sin(x);
    return (E_J1 + E_J2) * std::sqrt(c * c + d * d * s * s);
}

double array_inductance(int M, double E_J) {
    return M * kFluxQuantum * kFluxQuantum / (4.0 * std::numbers::pi * std::numbers::pi * E_J);
}

double charging_energy(double C) { return kElementaryCharge * kElementaryCharge / (2.0 * C); }

DimerParams circuit_to_dimer(const CircuitParams& c) {
    c.validate();
    const double L = array_inductance(c.M, squid_array_energy(c.E_J1, c.E_J2, c.phi_ext));
    DimerParams p;
    p.omega_L = 1.0 / std::sqrt(L * c.C_L);
    p.omega_R = 1.0 / std::sqrt(L * c.C_R);
    const double M2 = static_cast<double>(c.M) * c.M;
    p.U_L = -charging_energy(c.C_L) / (kHbar * M2);
    p.U_R = -charging_energy(c.C_R) / (kHbar * M2);
    const double omega_0 = std::sqrt(p.omega_L * p.omega_R);
    p.J = c.C_J * omega_0 / (4.0 * c.C_R);
    p.kappa = p.omega_L * p.omega_L * c.C_kappa * c.C_kappa * c.Z0 / c.C_L;
    return p;
}

std::optional<std::string> coupling_regime_warning(const CircuitParams& c) {
    const DimerParams p = circuit_to_dimer(c);
    const double x = p.omega_L * c.C_kappa * c.Z0;
    if (x <= 0.1) return std::nullopt;
    std::ostringstream os;
    os << "UnphysicalRegime: omega C_kappa Z0 = " << x << " > 0.1, weak-coupling kappa formula is unreliable";
    return os.str();
}

TuningCurve flux_tuning_curve(const CircuitParams& c, const std::vector<double>& phi_grid) {
    if (!std::is_sorted(phi_grid.begin(), phi_grid.end()) && !std::is_sorted(phi_grid.rbegin(), phi_grid.rend()))
        throw PreconditionViolation("flux grid must be monotone");
    TuningCurve tc;
    double lo_L = INFINITY, hi_L = -INFINITY, lo_R = INFINITY, hi_R = -INFINITY;
    for (double phi : phi_grid) {
        CircuitParams at = c;
        at.phi_ext = phi;
        const DimerParams p = circuit_to_dimer(at);
        tc.points.push_back({phi, p.omega_L, p.omega_R});
        lo_L = std::min(lo_L, p.omega_L);
        hi_L = std::max(hi_L, p.omega_L);
        lo_R = std::min(lo_R, p.omega_R);
        hi_R = std::max(hi_R, p.omega_R);
    }
    if (!tc.points.empty()) {
        tc.range_L = hi_L - lo_L;
        tc.range_R = hi_R - lo_R;
    }
    return tc;
}

double capacitance_for_kerr(double U, int M) {
    return kElementaryCharge * kElementaryCharge / (2.0 * kHbar * static_cast<double>(M) * M * std::abs(U));
}

double josephson_energy_for_frequency(double omega, double C, int M) {
    // omega^2 = 1 / (L C), L = M Phi0^2 / (4 pi^2 E_J)
    return M * kFluxQuantum * kFluxQuantum * omega * omega * C / (4.0 * std::numbers::pi * std::numbers::pi);
}

CircuitParams design_circuit(const DesignTargets& t) {
    if (!(t.omega_L > 0 && t.omega_R > 0 && t.U_R < 0 && t.J > 0 && t.kappa > 0 && t.Z0 > 0))
        throw InvalidParams("design targets need positive frequencies and rates and a negative Kerr shift");
    if (t.M < 1 || !(t.asymmetry >= 0.0 && t.asymmetry < 1.0)) throw InvalidParams("invalid SQUID count or asymmetry");
    CircuitParams c;
    c.M = t.M;
    c.Z0 = t.Z0;
    c.C_R = capacitance_for_kerr(t.U_R, t.M);
    c.C_L = c.C_R * (t.omega_R / t.omega_L) * (t.omega_R / t.omega_L);
    const double E = josephson_energy_for_frequency(t.omega_R, c.C_R, t.M);
    c.E_J1 = 0.5 * E * (1.0 - t.asymmetry);
    c.E_J2 = 0.5 * E * (1.0 + t.asymmetry);
    c.C_J = 4.0 * c.C_R * t.J / std::sqrt(t.omega_L * t.omega_R);
    c.C_kappa = std::sqrt(t.kappa * c.C_L / (t.omega_L * t.omega_L * t.Z0));
    return c;
}

}  // namespace bhd
