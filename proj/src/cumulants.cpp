#include "bhdimer/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "bhdimer/errors.hpp"
#include "bhdimer/fluctuations.hpp"

namespace bhd {

using cplx = std::complex<double>;

std::string Order::key() const {
    std::ostringstream os;
    os << n << ',' << m << ',' << k << ',' << l;
    return os.str();
}

Order Order::parse(const std::string& key) {
    Order o;
    char c1, c2, c3;
    std::istringstream is(key);
    if (!(is >> o.n >> c1 >> o.m >> c2 >> o.k >> c3 >> o.l) || c1 != ',' || c2 != ',' || c3 != ',' || o.n < 0 ||
        o.m < 0 || o.k < 0 || o.l < 0)
        throw InvalidParams("malformed order key '" + key + "'");
    return o;
}

std::vector<Order> orders_up_to(int max_order) {
    std::vector<Order> out;
    for (int n = 0; n <= max_order; ++n)
        for (int m = 0; n + m <= max_order; ++m)
            for (int k = 0; n + m + k <= max_order; ++k)
                for (int l = 0; n + m + k + l <= max_order; ++l)
                    if (n + m + k + l > 0) out.push_back({n, m, k, l});
    return out;
}

namespace {

// Expands an order into its list of variable labels 0..3.
std::vector<int> expand(const Order& o) {
    std::vector<int> v;
    v.insert(v.end(), o.n, 0);
    v.insert(v.end(), o.m, 1);
    v.insert(v.end(), o.k, 2);
    v.insert(v.end(), o.l, 3);
    return v;
}

// Calls visit(block_of) for every set partition of r items, where
// block_of[i] is the block index of item i (restricted growth string).
void for_each_partition(int r, const std::function<void(const std::vector<int>&, int)>& visit) {
    std::vector<int> a(r, 0), maxv(r, 0);
    if (r == 0) return;
    while (true) {
        const int blocks = *std::max_element(a.begin(), a.end()) + 1;
        visit(a, blocks);
        int i = r - 1;
        while (i > 0 && a[i] == maxv[i - 1] + 1) --i;
        if (i == 0) return;
        ++a[i];
        maxv[i] = std::max(maxv[i - 1], a[i]);
        for (int j = i + 1; j < r; ++j) {
            a[j] = 0;
            maxv[j] = maxv[i];
        }
    }
}

std::vector<Order> block_orders(const std::vector<int>& labels, const std::vector<int>& block_of, int blocks) {
    std::vector<Order> b(blocks);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        Order& o = b[block_of[i]];
        switch (labels[i]) {
            case 0: ++o.n; break;
            case 1: ++o.m; break;
            case 2: ++o.k; break;
            default: ++o.l; break;
        }
    }
    return b;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

cplx lookup(const MomentMap& m, const Order& o, const char* what) {
    const auto it = m.find(o);
    if (it == m.end()) throw MissingMoment(std::string(what) + " for order (" + o.key() + ") is missing");
    return it->second;
}

}  // namespace

std::size_t set_partition_count(int r) {
    std::size_t c = 0;
    for_each_partition(r, [&](const std::vector<int>&, int) { ++c; });
    return c;
}

MomentMap moments_to_cumulants(const MomentMap& moments, int max_order) {
    MomentMap out;
    for (const Order& o : orders_up_to(max_order)) {
        const auto labels = expand(o);
        cplx acc{0.0, 0.0};
        for_each_partition(static_cast<int>(labels.size()), [&](const std::vector<int>& a, int blocks) {
            cplx prod{1.0, 0.0};
            for (const Order& b : block_orders(labels, a, blocks)) prod *= lookup(moments, b, "moment");
            const double w = ((blocks - 1) % 2 ? -1.0 : 1.0) * factorial(blocks - 1);
            acc += w * prod;
        });
        out[o] = acc;
    }
    return out;
}

MomentMap cumulants_to_moments(const MomentMap& cumulants, int max_order) {
    MomentMap out;
    for (const Order& o : orders_up_to(max_order)) {
        const auto labels = expand(o);
        cplx acc{0.0, 0.0};
        for_each_partition(static_cast<int>(labels.size()), [&](const std::vector<int>& a, int blocks) {
            cplx prod{1.0, 0.0};
            for (const Order& b : block_orders(labels, a, blocks)) prod *= lookup(cumulants, b, "cumulant");
            acc += prod;
        });
        out[o] = acc;
    }
    return out;
}

QuadratureSamples sample_gaussian_output(const Eigen::Matrix4d& cov, double eta, std::size_t N,
                                         unsigned long long seed) {
    if (!(eta > 0.0 && eta <= 1.0)) throw UnphysicalCovariance("detection efficiency must lie in (0, 1]");
    if (!cov.allFinite() || (cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * cov.cwiseAbs().maxCoeff())
        throw UnphysicalCovariance("covariance must be finite and symmetric");
    const auto nu = symplectic_eigenvalues(cov);
    if (nu[0] < 0.5 - 1e-9) throw UnphysicalCovariance("covariance violates the uncertainty principle");

    const Eigen::Matrix4d target = eta * cov + Eigen::Matrix4d::Identity() * (0.5 * (1.0 - eta) + 0.5);
    const Eigen::LLT<Eigen::Matrix4d> llt(target);
    if (llt.info() != Eigen::Success) throw UnphysicalCovariance("detected covariance is not positive definite");
    const Eigen::Matrix4d L = llt.matrixL();

    QuadratureSamples s;
    s.eta = eta;
    s.seed = seed;
    s.z_plus.resize(N);
    s.z_minus.resize(N);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double r = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < N; ++i) {
        Eigen::Vector4d g;
        for (int k = 0; k < 4; ++k) g(k) = gauss(rng);
        const Eigen::Vector4d x = L * g;
        s.z_plus[i] = r * cplx(x(0), x(1));
        s.z_minus[i] = r * cplx(x(2), x(3));
    }
    return s;
}

MomentMap sample_moments(const QuadratureSamples& s, int max_order, std::size_t begin, std::size_t end) {
    end = std::min(end, s.size());
    const auto orders = orders_up_to(max_order);
    std::vector<cplx> acc(orders.size(), {0.0, 0.0});
    std::vector<std::array<cplx, 4>> pw(max_order + 1);
    for (std::size_t i = begin; i < end; ++i) {
        const cplx v[4] = {std::conj(s.z_plus[i]), s.z_plus[i], std::conj(s.z_minus[i]), s.z_minus[i]};
        for (int k = 0; k < 4; ++k) {
            pw[0][k] = 1.0;
            for (int p = 1; p <= max_order; ++p) pw[p][k] = pw[p - 1][k] * v[k];
        }
        for (std::size_t j = 0; j < orders.size(); ++j) {
            const Order& o = orders[j];
            acc[j] += (pw[o.n][0] * pw[o.m][1]) * (pw[o.k][2] * pw[o.l][3]);
        }
    }
    MomentMap out;
    const double inv = 1.0 / static_cast<double>(end - begin);
    for (std::size_t j = 0; j < orders.size(); ++j) out[orders[j]] = acc[j] * inv;
    return out;
}

CumulantTable estimate_cumulants(const QuadratureSamples& s, int max_order) {
    if (s.size() < kMinCumulantSamples) {
        std::ostringstream os;
        os << "cumulant estimation needs at least " << kMinCumulantSamples << " samples, got " << s.size();
        throw InsufficientSamples(os.str());
    }
    const std::size_t N = s.size();
    std::vector<MomentMap> batch_cumulants;
    std::vector<MomentMap> batch_moments;
    for (int b = 0; b < kCumulantBatches; ++b) {
        const std::size_t lo = N * b / kCumulantBatches, hi = N * (b + 1) / kCumulantBatches;
        batch_moments.push_back(sample_moments(s, max_order, lo, hi));
        batch_cumulants.push_back(moments_to_cumulants(batch_moments.back(), max_order));
    }
    // Full-sample moments as the (size-weighted) mean of batch moments.
    MomentMap full;
    for (const Order& o : orders_up_to(max_order)) {
        cplx acc{0.0, 0.0};
        for (int b = 0; b < kCumulantBatches; ++b) {
            const double w = static_cast<double>(N * (b + 1) / kCumulantBatches - N * b / kCumulantBatches) / N;
            acc += w * batch_moments[b].at(o);
        }
        full[o] = acc;
    }
    const MomentMap cum = moments_to_cumulants(full, max_order);

    CumulantTable table;
    for (const Order& o : orders_up_to(max_order)) {
        const Order c = o.conjugate();
        if (c < o) continue;  // filled from its mirror below
        double mr = 0, mi = 0, vr = 0, vi = 0;
        for (const auto& bc : batch_cumulants) {
            mr += bc.at(o).real();
            mi += bc.at(o).imag();
        }
        mr /= kCumulantBatches;
        mi /= kCumulantBatches;
        for (const auto& bc : batch_cumulants) {
            vr += std::pow(bc.at(o).real() - mr, 2);
            vi += std::pow(bc.at(o).imag() - mi, 2);
        }
        const double B = kCumulantBatches;
        CumulantEntry e{cum.at(o), std::sqrt(vr / (B - 1.0) / B), std::sqrt(vi / (B - 1.0) / B)};
        if (c == o) {
            e.value = {e.value.real(), 0.0};  // self-conjugate correlators are real
            e.stderr_im = 0.0;
        }
        table[o] = e;
        if (c != o) table[c] = {std::conj(e.value), e.stderr_re, e.stderr_im};
    }
    return table;
}

}  // namespace bhd
