#include "bhdimer/fluctuations.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "bhdimer/errors.hpp"

namespace bhd {

namespace {
constexpr cplx kI{0.0, 1.0};
}

std::vector<Channel> input_channels(const DimerParams& p) {
    std::vector<Channel> ch{{"line", 0, p.kappa}};
    if (p.kappa_int_L > 0.0) ch.push_back({"int_L", 0, p.kappa_int_L});
    if (p.kappa_R > 0.0) ch.push_back({"ext_R", 1, p.kappa_R});
    if (p.kappa_int_R > 0.0) ch.push_back({"int_R", 1, p.kappa_int_R});
    return ch;
}

double ScatteringRecord::symplectic_defect() const {
    double s = -1.0;
    for (Eigen::Index c = 0; c < S.cols() / 2; ++c) s += std::norm(S(0, 2 * c)) - std::norm(S(0, 2 * c + 1));
    return s;
}

ScatteringRecord scattering_matrix(const SteadyState& ss, const DimerParams& p, double Delta) {
    if (!ss.stable) throw PreconditionViolation("scattering requires a stable steady state");
    if (!std::isfinite(Delta)) throw PreconditionViolation("sideband detuning must be finite");

    ScatteringRecord rec;
    rec.Delta = Delta;
    rec.channels = input_channels(p);
    const int nch = static_cast<int>(rec.channels.size());

    // Fluctuations obey d/dt x = A x + B u with u the doubled input vector.
    Eigen::Matrix<cplx, 4, Eigen::Dynamic> B = Eigen::Matrix<cplx, 4, Eigen::Dynamic>::Zero(4, 2 * nch);
    for (int c = 0; c < nch; ++c) {
        const double g = std::sqrt(rec.channels[c].rate);
        B(2 * rec.channels[c].mode, 2 * c) = g;
        B(2 * rec.channels[c].mode + 1, 2 * c + 1) = g;
    }

    const Matrix4c M = -kI * Delta * Matrix4c::Identity() - ss.drift.A;
    const Eigen::PartialPivLU<Matrix4c> lu(M);
    if (!(lu.rcond() > 1e-14)) throw SingularResolvent("resolvent is numerically singular at this sideband");
    const Eigen::Matrix<cplx, 4, Eigen::Dynamic> X = lu.solve(B);

    // a_out = a_in - sqrt(kappa) d_L on the line channel.
    rec.S = Eigen::Matrix<cplx, 2, Eigen::Dynamic>::Zero(2, 2 * nch);
    rec.S(0, 0) = 1.0;
    rec.S(1, 1) = 1.0;
    const double gl = std::sqrt(p.kappa);
    rec.S.row(0) -= gl * X.row(0);
    rec.S.row(1) -= gl * X.row(1);
    return rec;
}

GainSpectrum gain_spectrum(const SteadyState& ss, const DimerParams& p, const std::vector<double>& Delta_grid) {
    GainSpectrum g;
    g.omega_p = ss.omega_p;
    g.points.reserve(Delta_grid.size());
    std::vector<std::pair<double, double>> xy;
    for (double D : Delta_grid) {
        const auto rec = scattering_matrix(ss, p, D);
        g.points.push_back({D, rec.signal_gain(), rec.idler_gain()});
        xy.emplace_back(D, rec.signal_gain());
        g.peak_gain = std::max(g.peak_gain, rec.signal_gain());
    }
    if (xy.size() >= 5) {
        g.fit = fit_lorentzian(xy);
        g.gain_bandwidth = std::sqrt(g.fit.peak + g.fit.baseline) * g.fit.fwhm;
    }
    return g;
}

GainPeak signal_gain_peak(const SteadyState& ss, const DimerParams& p, double Delta_min, double Delta_max, int grid) {
    if (!(Delta_max > Delta_min) || grid < 3) throw PreconditionViolation("gain peak search needs a non-empty interval");
    const double h = (Delta_max - Delta_min) / (grid - 1);
    int best = 0;
    double g_best = -1.0;
    for (int i = 0; i < grid; ++i) {
        const double g = scattering_matrix(ss, p, Delta_min + i * h).signal_gain();
        if (g > g_best) {
            g_best = g;
            best = i;
        }
    }
    const double lo = Delta_min + std::max(best - 1, 0) * h;
    const double hi = Delta_min + std::min(best + 1, grid - 1) * h;
    auto neg = [&](double D) { return -scattering_matrix(ss, p, D).signal_gain(); };
    const auto [D, f] = boost::math::tools::brent_find_minima(neg, lo, hi, 50);
    if (-f >= g_best) return {D, -f};
    return {Delta_min + best * h, g_best};
}

namespace {

// State at `flux` nearest to `prev`, or none when it is not a continuation of
// prev (its susceptibility (n_L + n_R) / flux changed by a large factor, as
// when a fold is crossed) or has lost stability.
std::optional<SteadyState> follow_branch(const DimerParams& p, double omega_p, double flux, const SteadyState& prev,
                                         double prev_flux) {
    const auto sols = solve_steady_states(p, Drive::from_flux(omega_p, flux));
    const SteadyState* nearest = nullptr;
    double dist = INFINITY;
    for (const auto& s : sols) {
        const double d = std::abs(s.alpha_L - prev.alpha_L) + std::abs(s.alpha_R - prev.alpha_R);
        if (d < dist) {
            dist = d;
            nearest = &s;
        }
    }
    if (nearest == nullptr || !nearest->stable) return std::nullopt;
    if (prev_flux > 0.0) {
        const double ratio = ((nearest->n_L + nearest->n_R) / flux) / ((prev.n_L + prev.n_R) / prev_flux);
        if (!(ratio < 1.8 && ratio > 1.0 / 1.8)) return std::nullopt;
    }
    return *nearest;
}

}  // namespace

OperatingPoint operating_point_for_gain(const DimerParams& p, double delta, double target_gain, double flux_max,
                                        double Delta_span) {
    if (!(target_gain > 1.0)) throw PreconditionViolation("target gain must exceed 1");
    const double omega_p = pump_from_detuning(p, delta);
    auto peak_of = [&](const SteadyState& s) { return signal_gain_peak(s, p, -Delta_span, Delta_span); };

    // Adaptive continuation in flux: a rejected step is halved until it falls
    // below the resolution, so the walk ends just short of the flux where the
    // target is met (or the branch folds or destabilizes).
    const double h_max = flux_max / 200.0, h_min = 1e-13 * flux_max;
    double f = 0.0, h = h_max;
    SteadyState cur = solve_steady_states(p, Drive{omega_p, {0.0, 0.0}}).at(0);
    GainPeak pk{0.0, 1.0};
    while (h >= h_min) {
        const double f_next = f + h;
        if (f_next > flux_max) throw NoConvergence("branch stays below the target gain up to the maximum flux");
        const auto s = follow_branch(p, omega_p, f_next, cur, f);
        if (s) {
            const GainPeak next = peak_of(*s);
            if (next.gain < target_gain) {
                f = f_next;
                cur = *s;
                pk = next;
                h = std::min(2.0 * h, h_max);
                continue;
            }
        }
        h *= 0.5;
    }
    if (pk.gain < target_gain * (1.0 - 1e-6))
        throw NoConvergence("branch ends at peak gain " + std::to_string(pk.gain) + " below the target");
    return {Drive::from_flux(omega_p, f), cur, pk};
}

double signal_gain_fwhm(const SteadyState& ss, const DimerParams& p, const GainPeak& peak) {
    auto above = [&](double D) { return scattering_matrix(ss, p, D).signal_gain() > 0.5 * peak.gain; };
    double edges[2];
    for (int k = 0; k < 2; ++k) {
        const double dir = k ? 1.0 : -1.0;
        double a = peak.Delta, step = 1e-6 * p.kappa;
        for (int i = 0; i < 80 && above(peak.Delta + dir * step); ++i) step *= 2;
        double b = peak.Delta + dir * step;
        for (int i = 0; i < 100; ++i) {
            const double m = 0.5 * (a + b);
            (above(m) ? a : b) = m;
        }
        edges[k] = a;
    }
    return edges[1] - edges[0];
}

double critical_mode_gain_bandwidth(const SteadyState& ss, const DimerParams& p) {
    Eigen::ComplexEigenSolver<Matrix4c> es(ss.drift.A, true);
    const Matrix4c V = es.eigenvectors();
    const Matrix4c W = V.inverse();
    int k = 0;
    for (int i = 1; i < 4; ++i)
        if (es.eigenvalues()(i).real() > es.eigenvalues()(k).real()) k = i;
    return 2.0 * p.kappa * std::abs(V(0, k) * W(k, 0));
}

namespace {

// Rows of the detected output (a_out(Delta), a_out^dag(-Delta)) with the
// detection beamsplitter folded in as a weight.
struct Quadratic {
    double T;  // sum |r0|^2 + |r1|^2
    cplx X;    // sum r0 conj(r1)
};

Quadratic quadratic_form(const ScatteringRecord& rec) {
    Quadratic q{0.0, {0.0, 0.0}};
    for (Eigen::Index j = 0; j < rec.S.cols(); ++j) {
        q.T += std::norm(rec.S(0, j)) + std::norm(rec.S(1, j));
        q.X += rec.S(0, j) * std::conj(rec.S(1, j));
    }
    return q;
}

}  // namespace

double squeezing_value(const ScatteringRecord& rec, double phi, double eta) {
    const Quadratic q = quadratic_form(rec);
    const double sum = q.T + 2.0 * (std::exp(-2.0 * kI * phi) * q.X).real();
    return eta * 0.5 * sum + (1.0 - eta);
}

SqueezingExtremes squeezing_extremes(const ScatteringRecord& rec, double eta) {
    const Quadratic q = quadratic_form(rec);
    const double a = std::abs(q.X);
    return {eta * (0.5 * q.T - a) + (1.0 - eta), eta * (0.5 * q.T + a) + (1.0 - eta),
            0.5 * (std::arg(q.X) - std::numbers::pi)};
}

SqueezingSpectrum squeezing_spectrum(const SteadyState& ss, const DimerParams& p, const std::vector<double>& Delta_grid,
                                     const std::vector<double>& phi_grid, double eta) {
    SqueezingSpectrum out;
    out.deltas = Delta_grid;
    out.phis = phi_grid;
    out.values.reserve(Delta_grid.size() * phi_grid.size());
    for (double D : Delta_grid) {
        const auto rec = scattering_matrix(ss, p, D);
        for (double phi : phi_grid) out.values.push_back(squeezing_value(rec, phi, eta));
    }
    return out;
}

PhaseSlice squeezing_vs_phase(const SteadyState& ss, const DimerParams& p, double Delta,
                              const std::vector<double>& phi_grid, double eta) {
    PhaseSlice slice;
    slice.Delta = Delta;
    const auto rec = scattering_matrix(ss, p, Delta);
    for (double phi : phi_grid) slice.values.emplace_back(phi, squeezing_value(rec, phi, eta));

    if (phi_grid.size() >= 3) {
        Eigen::MatrixXd design(phi_grid.size(), 3);
        Eigen::VectorXd y(phi_grid.size());
        for (std::size_t i = 0; i < phi_grid.size(); ++i) {
            const double phi = slice.values[i].first;
            design.row(i) << 1.0, std::cos(2.0 * phi), std::sin(2.0 * phi);
            y(i) = slice.values[i].second;
        }
        const Eigen::Vector3d c = design.colPivHouseholderQr().solve(y);
        slice.fit.c0 = c(0);
        slice.fit.c1 = std::hypot(c(1), c(2));
        slice.fit.c2 = std::atan2(-c(2), c(1));
        const Eigen::VectorXd r = design * c - y;
        slice.fit.rel_residual = r.cwiseAbs().maxCoeff() / y.cwiseAbs().maxCoeff();
    }
    return slice;
}

FilteredModeMoments filtered_mode_moments(const SteadyState& ss, const DimerParams& p, double filter_center_s,
                                          double filter_center_i, double bandwidth, double eta) {
    if (!(bandwidth > 0.0)) throw PreconditionViolation("filter bandwidth must be positive");
    const double Ds = filter_center_s - ss.omega_p;
    const double Di = filter_center_i - ss.omega_p;
    const double tol = 1e-9 * std::max({std::abs(Ds), std::abs(Di), bandwidth});
    if (std::abs(Ds + Di) > tol)
        throw PreconditionViolation("signal and idler filters must be mirror images about the pump");
    if (std::abs(Ds - Di) < bandwidth) throw FilterOverlap("signal and idler bands overlap");

    // Per-frequency: <a^dag(D) a(D')> = N(D) delta(D - D'), <a(D) a(D')> = M(D) delta(D + D').
    auto N = [&](double D) {
        const auto rec = scattering_matrix(ss, p, D);
        double n = 0.0;
        for (Eigen::Index c = 0; c < rec.S.cols() / 2; ++c) n += std::norm(rec.S(0, 2 * c + 1));
        return n;
    };
    auto M = [&](double D) {
        const auto plus = scattering_matrix(ss, p, D);
        const auto minus = scattering_matrix(ss, p, -D);
        cplx m{0.0, 0.0};
        for (Eigen::Index c = 0; c < plus.S.cols() / 2; ++c) m += plus.S(0, 2 * c) * minus.S(0, 2 * c + 1);
        return m;
    };

    using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
    constexpr unsigned depth = 20;
    constexpr double rel = 1e-8;
    auto band_mean = [&](auto&& f, double center) {
        return Quad::integrate(f, center - 0.5 * bandwidth, center + 0.5 * bandwidth, depth, rel) / bandwidth;
    };

    FilteredModeMoments m;
    m.n_signal = eta * band_mean(N, Ds);
    m.n_idler = eta * band_mean(N, Di);
    const double re = band_mean([&](double D) { return M(D).real(); }, Ds);
    const double im = band_mean([&](double D) { return M(D).imag(); }, Ds);
    m.pair = eta * cplx(re, im);
    return m;
}

Eigen::Matrix4d covariance_from_moments(const FilteredModeMoments& m) {
    // Symmetrized correlations of (a+, a+^dag, a-, a-^dag).
    Eigen::Matrix4cd G = Eigen::Matrix4cd::Zero();
    G(0, 0) = G(1, 1) = m.n_signal + 0.5;
    G(2, 2) = G(3, 3) = m.n_idler + 0.5;
    G(0, 3) = m.pair;
    G(3, 0) = std::conj(m.pair);
    G(1, 2) = std::conj(m.pair);
    G(2, 1) = m.pair;

    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Matrix4cd T = Eigen::Matrix4cd::Zero();
    for (int k = 0; k < 2; ++k) {
        T(2 * k, 2 * k) = r;
        T(2 * k, 2 * k + 1) = r;
        T(2 * k + 1, 2 * k) = -kI * r;
        T(2 * k + 1, 2 * k + 1) = kI * r;
    }
    const Eigen::Matrix4cd sigma = T * G * T.adjoint();
    return sigma.real();
}

Eigen::Matrix4d output_covariance(const SteadyState& ss, const DimerParams& p, double filter_center_s,
                                  double filter_center_i, double bandwidth, double eta) {
    return covariance_from_moments(filtered_mode_moments(ss, p, filter_center_s, filter_center_i, bandwidth, eta));
}

std::array<double, 2> symplectic_eigenvalues(const Eigen::Matrix4d& cov) {
    Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
    omega(0, 1) = omega(2, 3) = 1.0;
    omega(1, 0) = omega(3, 2) = -1.0;
    Eigen::EigenSolver<Eigen::Matrix4d> es(omega * cov, false);
    std::array<double, 4> v;
    for (int i = 0; i < 4; ++i) v[i] = std::abs(es.eigenvalues()(i).imag());
    std::sort(v.begin(), v.end());
    // Eigenvalues come in +-i nu pairs.
    return {0.5 * (v[0] + v[1]), 0.5 * (v[2] + v[3])};
}

}  // namespace bhd
