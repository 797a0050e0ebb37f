#include "bhdimer/units.hpp"

#include <cmath>
#include <limits>

namespace bhd::units {

double dbm_to_flux(double power_dBm, double omega) {
    if (std::isinf(power_dBm) && power_dBm < 0) return 0.0;
    const double watts = std::pow(10.0, (power_dBm - 30.0) / 10.0);
    return watts / (kHbar * omega);
}

double flux_to_dbm(double flux, double omega) {
    if (flux <= 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(flux * kHbar * omega) + 30.0;
}

double to_db(double linear) { return 10.0 * std::log10(linear); }
double from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace bhd::units
