#include "sdg/solver/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#ifdef SDG_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

namespace sdg::solver {

namespace {

constexpr double kDirectTol = 1e-10;

double relative_residual(const SpMat& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b)
{
    const double nb = b.norm();
    return (a * x - b).norm() / (nb > 0.0 ? nb : 1.0);
}

template <class Factor>
Eigen::VectorXd direct(Factor& lu, const SpMat& a, const Eigen::VectorXd& b, LinearStats& st)
{
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw FactorizationError("sparse LU factorization failed: matrix is singular");
    Eigen::VectorXd x = lu.solve(b);
    if (lu.info() != Eigen::Success || !x.allFinite()) throw FactorizationError("sparse LU solve produced non-finite values");
    st.rel_residual = relative_residual(a, x, b);
    // One step of iterative refinement when the first solve falls short.
    if (st.rel_residual > kDirectTol) {
        x += lu.solve(Eigen::VectorXd(b - a * x));
        st.rel_residual = relative_residual(a, x, b);
        st.iterations = 1;
    }
    if (!(st.rel_residual <= kDirectTol)) {
        throw FactorizationError("direct solve residual " + std::to_string(st.rel_residual) +
                                 " exceeds 1e-10: matrix is numerically singular");
    }
    return x;
}

}  // namespace

Eigen::VectorXd linear_solve(const SpMat& a, const Eigen::VectorXd& b, const LinearContract& contract, LinearStats* stats)
{
    if (a.rows() != a.cols()) throw InvalidArgument("linear_solve: matrix is not square");
    if (a.rows() != b.size()) throw InvalidArgument("linear_solve: right-hand side length mismatch");
    LinearStats st;
    Eigen::VectorXd x;
    if (contract.mode == LinearMode::Direct) {
#ifdef SDG_HAVE_UMFPACK
        st.backend = "umfpack";
        Eigen::UmfPackLU<SpMat> lu;
#else
        st.backend = "eigen-sparselu";
        Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
#endif
        x = direct(lu, a, b, st);
    } else {
        if (!(contract.tol > 0.0)) throw InvalidArgument("linear_solve: iterative tolerance must be positive");
        st.backend = "bicgstab-ilut";
        Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>> it;
        it.setTolerance(contract.tol);
        it.setMaxIterations(contract.max_iters);
        it.compute(a);
        if (it.info() != Eigen::Success) throw FactorizationError("incomplete LU preconditioner failed");
        x = it.solve(b);
        st.iterations = static_cast<int>(it.iterations());
        st.rel_residual = relative_residual(a, x, b);
        if (it.info() != Eigen::Success || !(st.rel_residual <= contract.tol)) {
            throw SolverError("iterative solve stagnated at relative residual " + std::to_string(st.rel_residual));
        }
    }
    if (stats != nullptr) *stats = st;
    return x;
}

}  // namespace sdg::solver
