#include "bhdimer/reflection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "bhdimer/fitting.hpp"

namespace bhd {

namespace {
constexpr cplx kI{0.0, 1.0};
constexpr double kPi = std::numbers::pi;
}  // namespace

cplx reflection_model(const DimerParams& p, double omega) {
    const cplx left = kI * (p.omega_L - omega) + 0.5 * p.kappa_total_L();
    if (p.J == 0.0) return 1.0 - p.kappa / left;  // decoupled right mode, even on its own resonance
    const cplx right = kI * (p.omega_R - omega) + 0.5 * p.kappa_total_R();
    return 1.0 - p.kappa / (left + p.J * p.J / right);
}

double phase_winding(const std::vector<cplx>& gamma) {
    double total = 0.0;
    for (std::size_t i = 1; i < gamma.size(); ++i) total += std::arg(gamma[i] / gamma[i - 1]);
    return total;
}

void ReflectionTrace::validate() const {
    if (omega.size() != phase.size()) throw InvalidParams("trace frequency and phase columns differ in length");
    if (omega.size() < 5) throw InvalidParams("trace needs at least 5 points");
    for (std::size_t i = 1; i < omega.size(); ++i)
        if (!(omega[i] > omega[i - 1])) throw InvalidParams("trace frequencies must be strictly increasing");
}

ReflectionTrace synthetic_trace(const DimerParams& p, const std::vector<double>& omega, double noise_rad,
                                unsigned long long seed) {
    ReflectionTrace t;
    t.omega = omega;
    t.noise_rad = noise_rad;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    t.phase.reserve(omega.size());
    for (double w : omega) {
        double ph = std::arg(reflection_model(p, w));
        if (noise_rad > 0.0) ph = std::remainder(ph + noise_rad * gauss(rng), 2.0 * kPi);
        t.phase.push_back(ph);
    }
    return t;
}

double angle_difference(double a, double b) {
    double d = std::remainder(a - b, 2.0 * kPi);
    if (d == -kPi) d = kPi;
    return d;
}

namespace {

DimerParams dimer_from(const FitParameters& q) {
    DimerParams p;
    p.omega_L = q.omega_L;
    p.omega_R = q.omega_R;
    p.kappa = std::abs(q.kappa);
    p.J = std::abs(q.J);
    return p;
}

// Fit coordinates: frequencies centred and scaled by the trace span.
struct Frame {
    double center;
    double width;

    Eigen::Vector4d to_x(const FitParameters& q) const {
        return {(q.omega_L - center) / width, (q.omega_R - center) / width, q.kappa / width, q.J / width};
    }
    FitParameters from_x(const Eigen::VectorXd& x) const {
        return {center + width * x(0), center + width * x(1), width * std::abs(x(2)), width * std::abs(x(3))};
    }
};

Eigen::VectorXd residual_vector(const ReflectionTrace& t, const FitParameters& q) {
    const DimerParams p = dimer_from(q);
    Eigen::VectorXd r(t.omega.size());
    for (std::size_t i = 0; i < t.omega.size(); ++i)
        r(i) = angle_difference(std::arg(reflection_model(p, t.omega[i])), t.phase[i]);
    return r;
}

// Levenberg-Marquardt refinement in fit coordinates with a central-difference
// Jacobian. Returns the refined point and the final Jacobian.
Eigen::Vector4d refine(const ReflectionTrace& t, const Frame& fr, Eigen::Vector4d x, Eigen::MatrixXd* jac_out) {
    auto res = [&](const Eigen::Vector4d& v) { return residual_vector(t, fr.from_x(v)); };
    auto jacobian = [&](const Eigen::Vector4d& v) {
        Eigen::MatrixXd jac(t.omega.size(), 4);
        for (int k = 0; k < 4; ++k) {
            const double h = 1e-7 * std::max(std::abs(v(k)), 1e-3);
            Eigen::Vector4d a = v, b = v;
            a(k) += h;
            b(k) -= h;
            jac.col(k) = (res(a) - res(b)) / (2.0 * h);
        }
        return jac;
    };
    Eigen::VectorXd r = res(x);
    double sse = r.squaredNorm();
    double lambda = 1e-6;
    Eigen::MatrixXd jac = jacobian(x);
    for (int it = 0; it < 50; ++it) {
        const Eigen::Matrix4d jtj = jac.transpose() * jac;
        const Eigen::Vector4d jtr = jac.transpose() * r;
        bool accepted = false;
        for (int tries = 0; tries < 20 && !accepted; ++tries) {
            Eigen::Matrix4d m = jtj;
            m.diagonal() *= (1.0 + lambda);
            const Eigen::Vector4d step = m.ldlt().solve(-jtr);
            const Eigen::Vector4d trial = x + step;
            const Eigen::VectorXd rt = res(trial);
            const double st = rt.squaredNorm();
            if (std::isfinite(st) && st < sse) {
                const bool tiny = sse - st <= 1e-14 * sse;
                x = trial;
                r = rt;
                sse = st;
                lambda = std::max(lambda * 0.1, 1e-12);
                accepted = true;
                if (tiny) it = 1000;
            } else {
                lambda *= 10.0;
            }
        }
        if (!accepted) break;
        jac = jacobian(x);
    }
    if (jac_out) *jac_out = jac;
    return x;
}

bool distinct(const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
    Eigen::Vector4d aa = a, bb = b;
    aa(2) = std::abs(aa(2));
    aa(3) = std::abs(aa(3));
    bb(2) = std::abs(bb(2));
    bb(3) = std::abs(bb(3));
    return (aa - bb).cwiseAbs().maxCoeff() > 1e-3;
}

}  // namespace

double phase_residual(const ReflectionTrace& trace, const FitParameters& q) {
    return residual_vector(trace, q).squaredNorm();
}

DimerParams FitResult::to_dimer() const { return dimer_from(params); }

FitResult fit_reflection(const ReflectionTrace& trace, const DimerParams& initial_guess,
                         const ReflectionFitOptions& opt) {
    trace.validate();
    const Frame fr{0.5 * (trace.omega.front() + trace.omega.back()), trace.omega.back() - trace.omega.front()};
    const std::size_t npts = trace.omega.size();

    struct Candidate {
        Eigen::Vector4d x;
        double f;
        int evals;
    };
    std::vector<Candidate> minima;
    int total_evals = 0;
    int starts = 0;

    auto objective = [&](const Eigen::VectorXd& x) { return residual_vector(trace, fr.from_x(x)).squaredNorm(); };
    SimplexOptions so;
    so.f_rel_tol = opt.f_rel_tol;
    so.initial_step = 0.05;
    auto run_start = [&](const FitParameters& q0) {
        ++starts;
        const Eigen::Vector4d x0 = fr.to_x(q0);
        const SimplexResult sr = nelder_mead(objective, x0, so);
        total_evals += sr.evaluations;
        if (!sr.x.allFinite()) return;
        Eigen::Vector4d x = refine(trace, fr, sr.x, nullptr);
        const double f = objective(x);
        if (std::isfinite(f)) minima.push_back({x, f, sr.evaluations});
    };

    const FitParameters guess{initial_guess.omega_L, initial_guess.omega_R, initial_guess.kappa, initial_guess.J};
    const double f_guess = objective(fr.to_x(guess));
    run_start(guess);
    run_start({guess.omega_R, guess.omega_L, guess.kappa, guess.J});

    auto best_rms = [&] {
        double b = std::numeric_limits<double>::infinity();
        for (const auto& m : minima) b = std::min(b, m.f);
        return std::sqrt(b / static_cast<double>(npts));
    };
    if (!(best_rms() <= opt.stall_rms)) {
        const double lo = trace.omega.front(), span = fr.width;
        for (int i = 1; i <= 5; ++i)
            for (int j = 1; j <= 5; ++j) {
                if (i == j) continue;
                for (double kf : {0.03, 0.1, 0.3})
                    for (double jf : {0.05, 0.15, 0.3})
                        run_start({lo + span * i / 6.0, lo + span * j / 6.0, kf * span, jf * span});
            }
    }

    std::sort(minima.begin(), minima.end(), [](const auto& a, const auto& b) { return a.f < b.f; });
    if (minima.empty() || minima.front().f > f_guess)
        throw FitDiverged("reflection fit did not reduce the phase residual");

    // Keep one representative per distinct minimum.
    std::vector<Candidate> unique;
    for (const auto& m : minima)
        if (std::all_of(unique.begin(), unique.end(), [&](const auto& u) { return distinct(u.x, m.x); }))
            unique.push_back(m);

    auto make_result = [&](const Candidate& c) {
        FitResult r;
        r.params = fr.from_x(c.x);
        r.residual = phase_residual(trace, r.params);
        r.evaluations = total_evals;
        r.starts = starts;
        r.converged = true;
        Eigen::MatrixXd jac;
        refine(trace, fr, c.x, &jac);
        const double dof = std::max<double>(1.0, static_cast<double>(npts) - 4.0);
        const double s2 = r.residual / dof;
        const Eigen::Matrix4d jtj = jac.transpose() * jac;
        const Eigen::Matrix4d cov = jtj.completeOrthogonalDecomposition().pseudoInverse() * s2;
        for (int k = 0; k < 4; ++k) r.stderr_[k] = fr.width * std::sqrt(std::max(cov(k, k), 0.0));
        return r;
    };

    FitResult best = make_result(unique.front());
    for (std::size_t i = 1; i < unique.size(); ++i)
        best.alternatives.emplace_back(fr.from_x(unique[i].x), unique[i].f);

    // Residuals at the numerical floor (rms 1e-9 rad) count as equal.
    const double floor = 1e-18 * static_cast<double>(npts);
    if (unique.size() > 1 && unique[1].f <= 2.0 * unique.front().f + floor) {
        throw AmbiguousFit("two distinct reflection-fit minima within a factor of 2 in residual", best,
                           make_result(unique[1]));
    }
    return best;
}

}  // namespace bhd
