#pragma once

#include <complex>
#include <vector>

namespace bhd {

// Dense polynomial with coefficients in ascending order: c[0] + c[1] x + ...
template <class T>
class Polynomial {
public:
    Polynomial() : c_{T(0)} {}
    explicit Polynomial(std::vector<T> coeffs) : c_(std::move(coeffs)) {
        if (c_.empty()) c_.push_back(T(0));
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<T>& coeffs() const { return c_; }
    T operator[](int i) const { return i < static_cast<int>(c_.size()) ? c_[i] : T(0); }

    template <class X>
    X operator()(const X& x) const {
        X acc = X(c_.back());
        for (int i = degree() - 1; i >= 0; --i) acc = acc * x + X(c_[i]);
        return acc;
    }

    Polynomial derivative() const {
        if (c_.size() <= 1) return Polynomial();
        std::vector<T> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * T(static_cast<double>(i));
        return Polynomial(std::move(d));
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<T> r(std::max(a.c_.size(), b.c_.size()), T(0));
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[static_cast<int>(i)] + b[static_cast<int>(i)];
        return Polynomial(std::move(r));
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + b * T(-1); }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        std::vector<T> r(a.c_.size() + b.c_.size() - 1, T(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return Polynomial(std::move(r));
    }
    friend Polynomial operator*(const Polynomial& a, T s) {
        std::vector<T> r = a.c_;
        for (auto& v : r) v *= s;
        return Polynomial(std::move(r));
    }

private:
    std::vector<T> c_;
};

using RealPolynomial = Polynomial<double>;
using ComplexPolynomial = Polynomial<std::complex<double>>;

// |p(x)|^2 for real x, as a real polynomial.
RealPolynomial abs_squared(const ComplexPolynomial& p);

// Drops leading coefficients whose magnitude is below rel_tol * max|c|.
RealPolynomial trimmed(const RealPolynomial& p, double rel_tol = 0.0);

// All complex roots, as eigenvalues of the balanced companion matrix, each
// refined by a few Newton steps on the polynomial itself. Returns an empty
// list for constant polynomials.
std::vector<std::complex<double>> polynomial_roots(const RealPolynomial& p);

}  // namespace bhd
