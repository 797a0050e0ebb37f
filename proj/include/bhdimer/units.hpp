#pragma once

#include <numbers>

namespace bhd::units {

// CODATA 2018 exact SI values.
inline constexpr double kPlanck = 6.62607015e-34;
inline constexpr double kHbar = kPlanck / (2.0 * std::numbers::pi);
inline constexpr double kElementaryCharge = 1.602176634e-19;
inline constexpr double kFluxQuantum = kPlanck / (2.0 * kElementaryCharge);

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double ghz_to_rad(double f_ghz) { return kTwoPi * f_ghz * 1e9; }
constexpr double rad_to_ghz(double omega) { return omega / kTwoPi * 1e-9; }
constexpr double mhz_to_rad(double f_mhz) { return kTwoPi * f_mhz * 1e6; }
constexpr double rad_to_mhz(double omega) { return omega / kTwoPi * 1e-6; }
constexpr double hz_to_rad(double f_hz) { return kTwoPi * f_hz; }
constexpr double rad_to_hz(double omega) { return omega / kTwoPi; }

// Photon flux (photons/s) carried by a tone of power `power_dBm` at angular
// frequency `omega`. -inf dBm maps to zero flux.
double dbm_to_flux(double power_dBm, double omega);
double flux_to_dbm(double flux, double omega);

double to_db(double linear);
double from_db(double db);

}  // namespace bhd::units
