#include "bhdimer/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bhdimer/errors.hpp"

namespace bhd {

SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                          const SimplexOptions& opt) {
    const int n = static_cast<int>(x0.size());
    std::vector<Eigen::VectorXd> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    for (int i = 0; i < n; ++i) {
        const double h = x0(i) != 0.0 ? opt.initial_step * std::abs(x0(i)) : opt.initial_step;
        pts[i + 1](i) += h;
    }
    SimplexResult res;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++res.evaluations;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };
    for (int i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

    std::vector<int> order(n + 1);
    while (res.evaluations < opt.max_evaluations) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
        const int best = order.front(), worst = order.back(), second = order[n - 1];

        const double spread = std::abs(vals[worst] - vals[best]);
        double size = 0.0;
        for (int i = 0; i <= n; ++i) size = std::max(size, (pts[i] - pts[best]).cwiseAbs().maxCoeff());
        const double xscale = std::max(pts[best].cwiseAbs().maxCoeff(), 1e-300);
        if (spread <= opt.f_rel_tol * (std::abs(vals[best]) + std::abs(vals[worst])) + 1e-300 ||
            size <= opt.x_rel_tol * xscale) {
            res.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i <= n; ++i)
            if (i != worst) centroid += pts[i];
        centroid /= n;

        const Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
        const double fr = eval(xr);
        if (fr < vals[best]) {
            const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = xr;
            vals[worst] = fr;
            continue;
        }
        const bool outside = fr < vals[worst];
        const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                           : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
        const double fc = eval(xc);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = xc;
            vals[worst] = fc;
            continue;
        }
        for (int i = 0; i <= n; ++i) {
            if (i == best) continue;
            pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
            vals[i] = eval(pts[i]);
        }
    }
    const int best = static_cast<int>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    res.x = pts[best];
    res.f = vals[best];
    return res;
}

double LorentzianFit::operator()(double x) const {
    const double u = 2.0 * (x - center) / fwhm;
    return baseline + peak / (1.0 + u * u);
}

namespace {

double lorentz_sse(const std::vector<std::pair<double, double>>& xy, const Eigen::Vector4d& q) {
    // q = (baseline, peak, center, width)
    double s = 0.0;
    for (const auto& [x, y] : xy) {
        const double u = 2.0 * (x - q(2)) / q(3);
        const double r = q(0) + q(1) / (1.0 + u * u) - y;
        s += r * r;
    }
    return s;
}

}  // namespace

LorentzianFit fit_lorentzian(const std::vector<std::pair<double, double>>& xy) {
    if (xy.size() < 5) throw FitDiverged("Lorentzian fit needs at least 5 points");

    std::size_t imax = 0;
    double ymin = xy[0].second;
    for (std::size_t i = 0; i < xy.size(); ++i) {
        if (xy[i].second > xy[imax].second) imax = i;
        ymin = std::min(ymin, xy[i].second);
    }
    const double span = xy.back().first - xy.front().first;
    Eigen::Vector4d q(ymin, xy[imax].second - ymin, xy[imax].first, 0.0);

    // Half-maximum crossings on either side of the maximum.
    const double half = ymin + 0.5 * q(1);
    auto crossing = [&](int dir) -> double {
        for (int i = static_cast<int>(imax); i + dir >= 0 && i + dir < static_cast<int>(xy.size()); i += dir) {
            const auto& [x0, y0] = xy[i];
            const auto& [x1, y1] = xy[i + dir];
            if (y1 <= half) return y0 == y1 ? x1 : x0 + (half - y0) * (x1 - x0) / (y1 - y0);
        }
        return std::numeric_limits<double>::quiet_NaN();
    };
    const double left = crossing(-1), right = crossing(+1);
    if (std::isfinite(left) && std::isfinite(right)) q(3) = right - left;
    else if (std::isfinite(left)) q(3) = 2.0 * (q(2) - left);
    else if (std::isfinite(right)) q(3) = 2.0 * (right - q(2));
    else q(3) = std::abs(span);
    if (!(q(3) > 0.0)) q(3) = std::abs(span) > 0.0 ? std::abs(span) : 1.0;

    LorentzianFit out;
    if (q(1) == 0.0) {
        out = {q(2), q(3), 0.0, q(0), std::sqrt(lorentz_sse(xy, q) / xy.size())};
        return out;
    }

    double sse = lorentz_sse(xy, q);
    double lambda = 1e-3;
    for (int it = 0; it < 500; ++it) {
        Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
        Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
        for (const auto& [x, y] : xy) {
            const double u = 2.0 * (x - q(2)) / q(3);
            const double L = 1.0 / (1.0 + u * u);
            const double r = q(0) + q(1) * L - y;
            const Eigen::Vector4d g(1.0, L, 4.0 * q(1) * u * L * L / q(3), 2.0 * q(1) * u * u * L * L / q(3));
            jtj += g * g.transpose();
            jtr += g * r;
        }
        bool accepted = false;
        Eigen::Vector4d step = Eigen::Vector4d::Zero();
        for (int tries = 0; tries < 40 && !accepted; ++tries) {
            Eigen::Matrix4d m = jtj;
            const double floor = 1e-15 * jtj.diagonal().maxCoeff();
            for (int k = 0; k < 4; ++k) m(k, k) += lambda * (jtj(k, k) + floor);
            step = m.ldlt().solve(-jtr);
            Eigen::Vector4d trial = q + step;
            if (trial(3) <= 0.0) {
                lambda *= 10.0;
                continue;
            }
            const double s = lorentz_sse(xy, trial);
            if (std::isfinite(s) && s <= sse) {
                q = trial;
                const double prev = sse;
                sse = s;
                lambda = std::max(lambda / 10.0, 1e-15);
                accepted = true;
                if (prev - s <= 1e-30 * prev) it = 1000;  // no further progress
            } else {
                lambda *= 10.0;
            }
        }
        if (!accepted) break;
        if (step.cwiseAbs().maxCoeff() <= 1e-15 * q.cwiseAbs().maxCoeff()) break;
    }
    if (!q.allFinite()) throw FitDiverged("Lorentzian fit produced non-finite parameters");
    out = {q(2), q(3), q(1), q(0), std::sqrt(sse / xy.size())};
    return out;
}

}  // namespace bhd
