#include "bhdimer/semiclassical.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "bhdimer/errors.hpp"

namespace bhd {

namespace {

constexpr cplx kI{0.0, 1.0};

struct Scales {
    double rate;       // s: rates are measured in units of s
    double occupation; // n0: occupations are measured in units of n0
};

Scales choose_scales(const DimerParams& p, const Drive& d) {
    Scales sc{};
    sc.rate = std::max({p.kappa_total_L(), p.kappa_total_R(), p.J});
    const double umax = std::max(std::abs(p.U_L), std::abs(p.U_R));
    if (umax > 0.0) {
        sc.occupation = sc.rate / umax;
    } else {
        // Linear system: the natural occupation is the driven response.
        const double lin = p.kappa * d.flux() / (sc.rate * sc.rate);
        sc.occupation = lin > 0.0 ? lin : 1.0;
    }
    return sc;
}

// Newton iteration on the complex equations of motion. The drift matrix is
// the Jacobian in the (alpha, alpha*) basis.
ModeAmplitudes polish(const DimerParams& p, const Drive& d, ModeAmplitudes a) {
    double res = steady_state_residual(p, d, a);
    for (int it = 0; it < 60; ++it) {
        if (res <= 1e-3 * kSteadyStateRelTol * residual_scale(p, d, a)) break;
        const auto f = equations_of_motion(p, d, a);
        const Matrix4c A = drift_matrix_unchecked(p, d, a).A;
        Vector4c rhs;
        rhs << -f.alpha_L, -std::conj(f.alpha_L), -f.alpha_R, -std::conj(f.alpha_R);
        const Vector4c step = A.fullPivLu().solve(rhs);
        if (!step.allFinite()) break;
        double t = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
            ModeAmplitudes trial{a.alpha_L + t * step(0), a.alpha_R + t * step(2)};
            const double r = steady_state_residual(p, d, trial);
            if (r < res) {
                a = trial;
                res = r;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    return a;
}

bool same_solution(const ModeAmplitudes& a, const ModeAmplitudes& b) {
    const double scale = std::max({1.0, std::abs(a.alpha_L), std::abs(a.alpha_R)});
    return std::abs(a.alpha_L - b.alpha_L) + std::abs(a.alpha_R - b.alpha_R) < 1e-7 * scale;
}

}  // namespace

double SteadyState::max_real_eigenvalue() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& l : eigenvalues) m = std::max(m, l.real());
    return m;
}

SteadyStatePolynomial steady_state_polynomial(const DimerParams& p, const Drive& d) {
    const Scales sc = choose_scales(p, d);
    const double s = sc.rate, n0 = sc.occupation;
    const auto [dL, dR] = frame_detunings(p, d.omega_p);
    const double forcing = p.kappa * d.flux() / (s * s * n0);

    if (p.J == 0.0) {
        // x ((delta + U n0 x)^2 + kappa^2/4) - F
        const RealPolynomial shift({dL / s, p.U_L * n0 / s});
        const double half_k = 0.5 * p.kappa_total_L() / s;
        const RealPolynomial x({0.0, 1.0});
        RealPolynomial poly = x * (shift * shift + RealPolynomial({half_k * half_k})) - RealPolynomial({forcing});
        return {poly, n0, true};
    }

    const double j = p.J / s;
    const ComplexPolynomial cR({cplx(dR / s, -0.5 * p.kappa_total_R() / s), cplx(p.U_R * n0 / s, 0.0)});
    const RealPolynomial x({0.0, 1.0});
    // n_L / n0 = |c_R|^2 x / j^2
    const RealPolynomial nL = abs_squared(cR) * x * (1.0 / (j * j));
    std::vector<cplx> cl(nL.coeffs().size());
    for (std::size_t i = 0; i < cl.size(); ++i) cl[i] = p.U_L * n0 / s * nL.coeffs()[i];
    cl[0] += cplx(dL / s, -0.5 * p.kappa_total_L() / s);
    const ComplexPolynomial cL(cl);
    const ComplexPolynomial gap = ComplexPolynomial({cplx(j * j, 0.0)}) - cL * cR;
    RealPolynomial poly = x * abs_squared(gap) - RealPolynomial({j * j * forcing});
    return {poly, n0, false};
}

SteadyState make_steady_state(const DimerParams& p, const Drive& d, const ModeAmplitudes& a,
                              const SolverOptions& opt) {
    SteadyState ss;
    ss.alpha_L = a.alpha_L;
    ss.alpha_R = a.alpha_R;
    ss.n_L = std::norm(a.alpha_L);
    ss.n_R = std::norm(a.alpha_R);
    ss.omega_p = d.omega_p;
    ss.drift = drift_matrix(p, d, a);

    Eigen::ComplexEigenSolver<Matrix4c> es(ss.drift.A, false);
    for (int i = 0; i < 4; ++i) ss.eigenvalues[i] = es.eigenvalues()(i);
    std::sort(ss.eigenvalues.begin(), ss.eigenvalues.end(), [](cplx x, cplx y) {
        return x.imag() != y.imag() ? x.imag() < y.imag() : x.real() < y.real();
    });

    double max_re;
    if (p.J == 0.0) {
        // Decoupled: only the driven left mode decides stability.
        Eigen::ComplexEigenSolver<Eigen::Matrix2cd> left(ss.drift.A.topLeftCorner<2, 2>(), false);
        max_re = std::max(left.eigenvalues()(0).real(), left.eigenvalues()(1).real());
    } else {
        max_re = ss.max_real_eigenvalue();
    }
    const double tol = opt.stability_tol_rel * p.kappa;
    ss.stable = max_re < -tol;
    ss.marginal = std::abs(max_re) <= tol;
    return ss;
}

std::vector<SteadyState> solve_steady_states(const DimerParams& p, const Drive& d, const SolverOptions& opt) {
    p.validate();
    const SteadyStatePolynomial sp = steady_state_polynomial(p, d);
    const auto roots = polynomial_roots(sp.poly);
    const double n0 = sp.occupation_scale;
    const double sqk = std::sqrt(p.kappa);
    const auto [dL, dR] = frame_detunings(p, d.omega_p);

    std::vector<ModeAmplitudes> found;
    for (const cplx& r : roots) {
        const double mag = std::max(1.0, std::abs(r));
        if (std::abs(r.imag()) >= opt.root_imag_tol * mag) continue;
        if (r.real() < -opt.n_tol * mag) continue;
        const double n = std::max(r.real(), 0.0) * n0;

        ModeAmplitudes a;
        if (sp.single_mode) {
            const cplx denom = kI * (dL + p.U_L * n) + 0.5 * p.kappa_total_L();
            a = {sqk * d.alpha_in / denom, cplx(0.0, 0.0)};
        } else {
            const cplx cR(dR + p.U_R * n, -0.5 * p.kappa_total_R());
            const double nL = std::norm(cR) * n / (p.J * p.J);
            const cplx cL(dL + p.U_L * nL, -0.5 * p.kappa_total_L());
            const cplx alphaR = sqk * d.alpha_in * p.J / (kI * (p.J * p.J - cL * cR));
            a = {-cR * alphaR / p.J, alphaR};
        }
        a = polish(p, d, a);

        const double res = steady_state_residual(p, d, a);
        const double scale = residual_scale(p, d, a);
        if (!(res <= kSteadyStateRelTol * scale)) {
            std::ostringstream os;
            os.precision(17);
            os << "root x = " << r << " (n = " << n << ") did not polish to a fixed point: residual " << res
               << " vs tolerance " << kSteadyStateRelTol * scale;
            throw NoConvergence(os.str());
        }
        if (std::none_of(found.begin(), found.end(), [&](const auto& b) { return same_solution(a, b); }))
            found.push_back(a);
    }

    std::vector<SteadyState> out;
    out.reserve(found.size());
    for (const auto& a : found) out.push_back(make_steady_state(p, d, a, opt));
    std::sort(out.begin(), out.end(), [](const SteadyState& x, const SteadyState& y) {
        return x.n_L != y.n_L ? x.n_L < y.n_L : x.n_R < y.n_R;
    });
    return out;
}

std::string to_string(Region r) {
    switch (r) {
        case Region::S: return "S";
        case Region::M: return "M";
        case Region::P: return "P";
    }
    return "?";
}

PhasePoint classify_phase(const DimerParams& p, const Drive& d, const SolverOptions& opt) {
    PhasePoint pt;
    pt.delta = drive_detuning(p, d.omega_p);
    pt.flux = d.flux();
    pt.solutions = solve_steady_states(p, d, opt);
    for (const auto& s : pt.solutions) {
        pt.n_stable += s.stable ? 1 : 0;
        pt.marginal = pt.marginal || s.marginal;
    }
    if (pt.solutions.size() >= 2) {
        pt.region = Region::M;
        pt.ambiguous = pt.n_stable == 0;
    } else if (pt.solutions.size() == 1) {
        pt.region = pt.n_stable == 1 ? Region::S : Region::P;
    } else {
        throw NoConvergence("no steady state found");
    }
    return pt;
}

std::array<std::size_t, 3> PhaseDiagram::region_counts() const {
    std::array<std::size_t, 3> c{0, 0, 0};
    for (const auto& pt : points) {
        if (pt.error) continue;
        ++c[static_cast<std::size_t>(pt.region)];
    }
    return c;
}

PhaseDiagram phase_diagram(const DimerParams& p, const std::vector<double>& delta_grid,
                           const std::vector<double>& flux_grid, unsigned threads, const SolverOptions& opt) {
    if (delta_grid.empty() || flux_grid.empty()) throw PreconditionViolation("phase diagram grids must be non-empty");
    auto monotone = [](const std::vector<double>& g) {
        return std::is_sorted(g.begin(), g.end()) || std::is_sorted(g.rbegin(), g.rend());
    };
    if (!monotone(delta_grid) || !monotone(flux_grid)) throw PreconditionViolation("phase diagram grids must be monotone");
    p.validate();

    PhaseDiagram pd;
    pd.deltas = delta_grid;
    pd.fluxes = flux_grid;
    pd.points.resize(delta_grid.size() * flux_grid.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < pd.points.size(); k = next++) {
            const double delta = delta_grid[k / flux_grid.size()];
            const double flux = flux_grid[k % flux_grid.size()];
            const Drive drv = Drive::from_flux(pump_from_detuning(p, delta), flux);
            try {
                pd.points[k] = classify_phase(p, drv, opt);
            } catch (const Error& e) {
                PhasePoint pt;
                pt.delta = delta;
                pt.flux = flux;
                pt.error = e.name() + ": " + e.what();
                pd.points[k] = std::move(pt);
            }
            pd.points[k].delta = delta;
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(pd.points.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return pd;
}

std::optional<double> vanishing_left_locus(const DimerParams& p, double delta) {
    if (p.kappa_R != 0.0 || p.kappa_int_R != 0.0)
        throw PreconditionViolation("alpha_L = 0 locus requires a lossless right mode");
    if (p.J == 0.0 || p.U_R == 0.0) return std::nullopt;
    const double delta_R = p.omega_R - pump_from_detuning(p, delta);
    const double nR = -delta_R / p.U_R;
    if (!(nR > 0.0)) return std::nullopt;
    return p.J * p.J * nR / p.kappa;
}

std::pair<double, double> shifted_eigenfrequencies(const SteadyState& ss, double omega_p) {
    if (!ss.stable) throw PreconditionViolation("shifted eigenfrequencies require a stable steady state");
    // Conservative part only: damping pulls complex eigenfrequencies of coupled
    // lossy modes together, which is not a shift of the mode frequencies.
    Matrix4c H = ss.drift.A;
    const double gL = -H(0, 0).real(), gR = -H(2, 2).real();
    for (int i = 0; i < 2; ++i) {
        H(i, i) += gL;
        H(2 + i, 2 + i) += gR;
    }
    Eigen::ComplexEigenSolver<Matrix4c> es(H, true);
    std::array<std::pair<double, double>, 4> by_norm;  // (Bogoliubov norm, frequency)
    for (int i = 0; i < 4; ++i) {
        const auto v = es.eigenvectors().col(i);
        const double norm = std::norm(v(0)) - std::norm(v(1)) + std::norm(v(2)) - std::norm(v(3));
        by_norm[i] = {norm, omega_p - es.eigenvalues()(i).imag()};
    }
    std::sort(by_norm.begin(), by_norm.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    const double w1 = by_norm[0].second, w2 = by_norm[1].second;
    return {std::min(w1, w2), std::max(w1, w2)};
}

std::pair<double, double> hybridized_frequencies(const DimerParams& p) {
    const double half_split = std::sqrt(p.J * p.J + 0.25 * (p.omega_L - p.omega_R) * (p.omega_L - p.omega_R));
    return {p.omega_0() - half_split, p.omega_0() + half_split};
}

}  // namespace bhd
