#include "bhdimer/fock_oracle.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "bhdimer/errors.hpp"

namespace bhd {

namespace {

using SpMat = Eigen::SparseMatrix<cplx, Eigen::ColMajor>;
using Triplet = Eigen::Triplet<cplx>;
constexpr cplx kI{0.0, 1.0};

SpMat identity(int n) {
    SpMat m(n, n);
    m.setIdentity();
    return m;
}

// Annihilation operator on a space truncated at n_max photons.
SpMat annihilation(int n_max) {
    std::vector<Triplet> t;
    for (int n = 1; n <= n_max; ++n) t.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
    SpMat a(n_max + 1, n_max + 1);
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

SpMat kron(const SpMat& A, const SpMat& B) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(A.nonZeros() * B.nonZeros()));
    for (int ja = 0; ja < A.outerSize(); ++ja)
        for (SpMat::InnerIterator ia(A, ja); ia; ++ia)
            for (int jb = 0; jb < B.outerSize(); ++jb)
                for (SpMat::InnerIterator ib(B, jb); ib; ++ib)
                    t.emplace_back(ia.row() * B.rows() + ib.row(), ia.col() * B.cols() + ib.col(),
                                   ia.value() * ib.value());
    SpMat k(A.rows() * B.rows(), A.cols() * B.cols());
    k.setFromTriplets(t.begin(), t.end());
    return k;
}

cplx expectation(const SpMat& op, const Eigen::MatrixXcd& rho) {
    // Tr(op rho) = sum_ij op_ij rho_ji
    cplx s{0.0, 0.0};
    for (int j = 0; j < op.outerSize(); ++j)
        for (SpMat::InnerIterator it(op, j); it; ++it) s += it.value() * rho(it.col(), it.row());
    return s;
}

Eigen::VectorXcd solve_direct(const SpMat& sys, const Eigen::VectorXcd& rhs) {
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(sys);
    if (lu.info() != Eigen::Success) throw SolveFailure("sparse LU factorization of the Liouvillian failed");
    Eigen::VectorXcd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !x.allFinite()) throw SolveFailure("Liouvillian solve failed");
    return x;
}

// Incomplete LU of the Liouvillian shifted by -shift*I. Populations of a
// lossless mode give zero diagonal entries, which unpivoted ILUT cannot
// handle; the shifted factor stays well defined and is still close enough to
// precondition the unshifted system.
class ShiftedILUT {
public:
    void setup(const SpMat& sys, double shift) {
        SpMat s = sys;
        for (int i = 0; i < s.rows(); ++i) s.coeffRef(i, i) -= shift;
        ilu_.setDroptol(1e-3);
        ilu_.setFillfactor(10);
        ilu_.compute(s);
    }
    template <class M> ShiftedILUT& analyzePattern(const M&) { return *this; }
    template <class M> ShiftedILUT& factorize(const M&) { return *this; }
    template <class M> ShiftedILUT& compute(const M&) { return *this; }
    template <class R> auto solve(const R& b) const { return ilu_.solve(b); }
    Eigen::ComputationInfo info() const { return ilu_.info(); }

private:
    Eigen::IncompleteLUT<cplx> ilu_;
};

// Direct sparse LU up to 100 states; beyond that LU fill-in on the four-index
// lattice is prohibitive and preconditioned BiCGSTAB is used, with LU only as
// a last resort.
Eigen::VectorXcd solve_sparse(const SpMat& sys, const Eigen::VectorXcd& rhs, int states) {
    if (states <= 100) return solve_direct(sys, rhs);
    for (double shift : {0.1, 0.5}) {
        Eigen::BiCGSTAB<SpMat, ShiftedILUT> it;
        it.preconditioner().setup(sys, shift);
        if (it.preconditioner().info() != Eigen::Success) continue;
        it.setTolerance(1e-12);
        it.setMaxIterations(2000);
        it.compute(sys);
        Eigen::VectorXcd x = it.solve(rhs);
        if (it.info() == Eigen::Success && x.allFinite()) return x;
    }
    return solve_direct(sys, rhs);
}

}  // namespace

void FockConfig::validate() const {
    if (n_max_L < 1 || n_max_R < 0) throw InvalidParams("Fock truncation levels must be positive");
    if (dimension() > kMaxFockStates) {
        std::ostringstream os;
        os << "Fock space of " << dimension() << " states exceeds the limit of " << kMaxFockStates;
        throw InvalidParams(os.str());
    }
}

QuantumSteadyState lindblad_steady_state(const DimerParams& p, const Drive& d, const FockConfig& cfg) {
    p.validate();
    cfg.validate();
    const int dimL = cfg.n_max_L + 1, dimR = cfg.n_max_R + 1;
    const int D = dimL * dimR;

    // Work in units of kappa so the Liouvillian entries are O(1).
    const double s = p.kappa;
    const auto [dL, dR] = frame_detunings(p, d.omega_p);

    const SpMat a = kron(annihilation(cfg.n_max_L), identity(dimR));
    const SpMat b = kron(identity(dimL), annihilation(cfg.n_max_R));
    const SpMat ad = SpMat(a.adjoint()), bd = SpMat(b.adjoint());
    const SpMat na = ad * a, nb = bd * b;

    const cplx drive = std::sqrt(p.kappa) * d.alpha_in / s;
    SpMat H = (dL / s) * na + (dR / s) * nb + (0.5 * p.U_L / s) * SpMat(ad * ad * a * a) +
              (0.5 * p.U_R / s) * SpMat(bd * bd * b * b) + (p.J / s) * SpMat(a * bd + ad * b) +
              kI * drive * ad - kI * std::conj(drive) * a;
    H.makeCompressed();

    const SpMat I = identity(D);
    // Column-stacked vec: vec(A rho B) = (B^T kron A) vec(rho).
    SpMat L = -kI * (kron(I, H) - kron(SpMat(H.transpose()), I));
    auto dissipate = [&](const SpMat& c, const SpMat& cd, double rate) {
        if (rate <= 0.0) return;
        const SpMat cdc = cd * c;
        L += (rate / s) * (kron(SpMat(c.conjugate()), c) - 0.5 * kron(I, cdc) - 0.5 * kron(SpMat(cdc.transpose()), I));
    };
    dissipate(a, ad, p.kappa_total_L());
    dissipate(b, bd, p.kappa_total_R());

    // Replace the equation for rho_00 with Tr(rho) = 1.
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(L.nonZeros() + D));
    for (int j = 0; j < L.outerSize(); ++j)
        for (SpMat::InnerIterator it(L, j); it; ++it)
            if (it.row() != 0) t.emplace_back(it.row(), it.col(), it.value());
    for (int i = 0; i < D; ++i) t.emplace_back(0, i * D + i, 1.0);
    SpMat sys(D * D, D * D);
    sys.setFromTriplets(t.begin(), t.end());
    sys.makeCompressed();

    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(D * D);
    rhs(0) = 1.0;
    const Eigen::VectorXcd x = solve_sparse(sys, rhs, D);
    const double lin_res = (sys * x - rhs).norm();
    if (!(lin_res < 1e-9)) {
        std::ostringstream os;
        os << "Liouvillian solve is ill-conditioned (residual " << lin_res << ")";
        throw SolveFailure(os.str());
    }

    QuantumSteadyState out;
    out.config = cfg;
    const Eigen::MatrixXcd raw = Eigen::Map<const Eigen::MatrixXcd>(x.data(), D, D);
    out.hermiticity_error = (raw - raw.adjoint()).cwiseAbs().maxCoeff();
    out.rho = 0.5 * (raw + raw.adjoint());
    out.trace_error = std::abs(out.rho.trace() - 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(out.rho, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = es.eigenvalues().minCoeff();

    out.a_L = expectation(a, out.rho);
    out.a_R = expectation(b, out.rho);
    out.n_L = expectation(na, out.rho).real();
    out.n_R = expectation(nb, out.rho).real();
    out.a_L_a_R = expectation(SpMat(a * b), out.rho);
    for (int iL = 0; iL < dimL; ++iL)
        for (int iR = 0; iR < dimR; ++iR)
            if (iL == cfg.n_max_L || iR == cfg.n_max_R) out.top_layer_population += out.rho(iL * dimR + iR, iL * dimR + iR).real();

    if (out.top_layer_population > cfg.truncation_tol) {
        std::ostringstream os;
        os << "top Fock layer holds population " << out.top_layer_population << " (limit " << cfg.truncation_tol
           << "); increase n_max";
        throw TruncationError(os.str());
    }
    return out;
}

cplx oracle_reflection(const DimerParams& p, const Drive& d, const FockConfig& cfg) {
    if (std::abs(d.alpha_in) == 0.0) throw PreconditionViolation("reflection needs a non-zero probe amplitude");
    const auto qs = lindblad_steady_state(p, d, cfg);
    return 1.0 - std::sqrt(p.kappa) * qs.a_L / d.alpha_in;
}

}  // namespace bhd
