#include "bhdimer/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace bhd {

RealPolynomial abs_squared(const ComplexPolynomial& p) {
    const auto& c = p.coeffs();
    std::vector<double> r(2 * c.size() - 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = 0; j < c.size(); ++j) r[i + j] += (c[i] * std::conj(c[j])).real();
    return RealPolynomial(std::move(r));
}

RealPolynomial trimmed(const RealPolynomial& p, double rel_tol) {
    std::vector<double> c = p.coeffs();
    double cmax = 0.0;
    for (double v : c) cmax = std::max(cmax, std::abs(v));
    while (c.size() > 1 && std::abs(c.back()) <= rel_tol * cmax) c.pop_back();
    return RealPolynomial(std::move(c));
}

namespace {

// Parlett-Reinsch diagonal balancing of a square matrix, in place.
void balance(Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    constexpr double radix = 2.0;
    bool done = false;
    while (!done) {
        done = true;
        for (int i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix, f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                g = 1.0 / f;
                a.row(i) *= g;
                a.col(i) *= f;
            }
        }
    }
}

}  // namespace

std::vector<std::complex<double>> polynomial_roots(const RealPolynomial& poly) {
    const RealPolynomial p = trimmed(poly);
    const int n = p.degree();
    std::vector<std::complex<double>> roots;
    if (n < 1) return roots;

    // Factor out exact zero roots first; they are common (x = 0 solutions).
    int zeros = 0;
    while (zeros < n && p[zeros] == 0.0) ++zeros;
    roots.assign(zeros, {0.0, 0.0});
    const int m = n - zeros;
    if (m == 0) return roots;

    std::vector<double> c(p.coeffs().begin() + zeros, p.coeffs().end());
    RealPolynomial reduced(c);
    if (m == 1) {
        roots.emplace_back(-c[0] / c[1], 0.0);
        return roots;
    }

    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(m, m);
    for (int i = 1; i < m; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < m; ++i) comp(i, m - 1) = -c[i] / c[m];
    balance(comp);

    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    const RealPolynomial dp = reduced.derivative();
    for (int i = 0; i < m; ++i) {
        std::complex<double> z = es.eigenvalues()(i);
        for (int it = 0; it < 8; ++it) {
            const std::complex<double> f = reduced(z);
            const std::complex<double> df = dp(z);
            if (std::abs(df) == 0.0) break;
            const std::complex<double> step = f / df;
            const std::complex<double> znew = z - step;
            // Accept only improving steps; near multiple roots Newton can wander.
            if (!(std::abs(reduced(znew)) < std::abs(f))) break;
            z = znew;
            if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        roots.push_back(z);
    }
    return roots;
}

}  // namespace bhd
