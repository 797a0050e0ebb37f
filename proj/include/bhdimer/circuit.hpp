#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bhdimer/core_model.hpp"

namespace bhd {

// Lumped-element description of the two SQUID-array LC oscillators.
struct CircuitParams {
    double C_L = 0.0;      // F
    double C_R = 0.0;      // F
    double C_J = 0.0;      // coupling capacitance, F
    double C_kappa = 0.0;  // line coupling capacitance, F
    int M = 1;             // SQUIDs per array
    double E_J1 = 0.0;     // J, smaller junction
    double E_J2 = 0.0;     // J, larger junction
    double Z0 = 50.0;      // ohm
    double phi_ext = 0.0;  // external flux per SQUID, units of the flux quantum

    double asymmetry() const { return (E_J2 - E_J1) / (E_J1 + E_J2); }
    void validate() const;
};

// Effective Josephson energy of an asymmetric SQUID,
// (E_J1 + E_J2) sqrt(cos^2(pi phi) + d^2 sin^2(pi phi)); phi in flux quanta.
double squid_array_energy(double E_J1, double E_J2, double phi_ext);

// Inductance of M SQUIDs in series at effective energy E_J.
double array_inductance(int M, double E_J);

// Charging energy e^2 / 2C.
double charging_energy(double C);

// omega_X = 1/sqrt(L C_X), U_X = -E_c,X / (hbar M^2), J = C_J omega_0 / (4 C_R)
// with omega_0 = sqrt(omega_L omega_R), kappa = omega_L^2 C_kappa^2 Z0 / C_L.
DimerParams circuit_to_dimer(const CircuitParams& c);

// Non-empty when the weak-coupling kappa formula is outside its validity
// range (omega C_kappa Z0 > 0.1).
std::optional<std::string> coupling_regime_warning(const CircuitParams& c);

struct TuningPoint {
    double phi;
    double omega_L;
    double omega_R;
};

struct TuningCurve {
    std::vector<TuningPoint> points;
    double range_L = 0.0;  // max - min of omega_L over the grid
    double range_R = 0.0;
};

TuningCurve flux_tuning_curve(const CircuitParams& c, const std::vector<double>& phi_grid);

// Shunt capacitance and SQUID count that yield a target Kerr shift U (rad/s,
// negative) for a given M: C = e^2 / (2 hbar M^2 |U|).
double capacitance_for_kerr(double U, int M);
// Josephson energy per SQUID that places omega at the zero-flux point.
double josephson_energy_for_frequency(double omega, double C, int M);

struct DesignTargets {
    double omega_L = 0.0;  // zero-flux mode frequencies, rad/s
    double omega_R = 0.0;
    double U_R = 0.0;      // rad/s, negative
    double J = 0.0;        // rad/s
    double kappa = 0.0;    // rad/s
    int M = 1;
    double asymmetry = 0.5;
    double Z0 = 50.0;
};

// Closed-form inversion of circuit_to_dimer at zero flux. Both arrays share
// the same junctions, so C_L = C_R (omega_R / omega_L)^2.
CircuitParams design_circuit(const DesignTargets& t);

}  // namespace bhd
