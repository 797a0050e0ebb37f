#pragma once

#include <compare>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bhd {

// Exponents of (z+^*)^n z+^m (z-^*)^k z-^l.
struct Order {
    int n = 0, m = 0, k = 0, l = 0;

    int total() const { return n + m + k + l; }
    Order conjugate() const { return {m, n, l, k}; }
    std::string key() const;  // "n,m,k,l"
    static Order parse(const std::string& key);
    auto operator<=>(const Order&) const = default;
};

using MomentMap = std::map<Order, std::complex<double>>;

// Every order with 1 <= total <= max_order, in lexicographic order.
std::vector<Order> orders_up_to(int max_order);

// Joint cumulants from raw joint moments via the set-partition formula
// kappa = sum_pi (-1)^{|pi|-1} (|pi|-1)! prod_{B in pi} mu_B.
// Throws MissingMoment when a required lower-order moment is absent.
MomentMap moments_to_cumulants(const MomentMap& moments, int max_order);

// Inverse map: mu = sum_pi prod_{B in pi} kappa_B.
MomentMap cumulants_to_moments(const MomentMap& cumulants, int max_order);

// Number of set partitions visited for r items (Bell number); exposed for tests.
std::size_t set_partition_count(int r);

// Heterodyne amplitude pairs (z+, z-) with their generating metadata.
struct QuadratureSamples {
    std::vector<std::complex<double>> z_plus;
    std::vector<std::complex<double>> z_minus;
    double eta = 1.0;
    unsigned long long seed = 0;

    std::size_t size() const { return z_plus.size(); }
};

inline constexpr std::size_t kMinCumulantSamples = 10000;
inline constexpr int kCumulantBatches = 20;

// Draws N heterodyne samples of the filtered two-mode output with quadrature
// covariance eta * cov + (1 - eta)/2 I + 1/2 I, z = (x + i p)/sqrt2.
// Throws UnphysicalCovariance for non-symmetric, non-positive or
// uncertainty-violating covariances and for eta outside (0, 1].
QuadratureSamples sample_gaussian_output(const Eigen::Matrix4d& cov, double eta, std::size_t N,
                                         unsigned long long seed);

struct CumulantEntry {
    std::complex<double> value;
    // Standard errors of the real and imaginary parts.
    double stderr_re = 0.0;
    double stderr_im = 0.0;
};

using CumulantTable = std::map<Order, CumulantEntry>;

// Raw sample moments for all orders up to max_order.
MomentMap sample_moments(const QuadratureSamples& s, int max_order, std::size_t begin = 0,
                         std::size_t end = static_cast<std::size_t>(-1));

// Cumulants up to total order 4 with batch standard errors (20 batches).
// Throws InsufficientSamples below kMinCumulantSamples.
CumulantTable estimate_cumulants(const QuadratureSamples& s, int max_order = 4);

}  // namespace bhd
