#pragma once

/// @file solver.hpp
/// @brief Sparse linear solves and the Picard iteration for the coupled system.

#include "sdg/forms/field.hpp"
#include "sdg/forms/system.hpp"

#include <cstdint>

namespace sdg::solver {

using forms::SpMat;

enum class LinearMode { Direct, Iterative };

struct LinearContract {
    LinearMode mode = LinearMode::Direct;
    double tol = 1e-10;     ///< iterative mode only
    int max_iters = 20000;  ///< iterative mode only
};

struct LinearStats {
    std::string backend;
    int iterations = 0;
    double rel_residual = 0.0;  ///< ||Ax - b|| / ||b||
};

/// Singular or structurally deficient matrix.
class FactorizationError : public SolverError {
public:
    using SolverError::SolverError;
};

/// Direct mode checks ||Ax - b|| <= 1e-10 ||b|| after the solve; iterative
/// mode (BiCGSTAB, incomplete-LU preconditioned) throws on stagnation.
Eigen::VectorXd linear_solve(const SpMat& a, const Eigen::VectorXd& b, const LinearContract& contract = {},
                             LinearStats* stats = nullptr);

/// Eliminates the unknowns flagged in `eliminate`, whose diagonal block must
/// split into independent blocks of at most 256 unknowns, then solves the
/// Schur complement with linear_solve. stats->rel_residual refers to the full
/// system. Throws FactorizationError when a local block is singular.
Eigen::VectorXd solve_condensed(const SpMat& a, const Eigen::VectorXd& b, const std::vector<char>& eliminate,
                                const LinearContract& contract = {}, LinearStats* stats = nullptr);

enum class InitialGuess {
    Zero,         ///< u_D = 0
    DarcyLinear,  ///< first solve with beta frozen to 0
    Random,       ///< random u_D coefficients in [-1, 1]
};

InitialGuess parse_initial_guess(const std::string& name);
std::string to_string(InitialGuess g);

struct PicardSettings {
    double tol_rel = 1e-10;
    double tol_res = 1e-10;
    int max_iters = 50;
    InitialGuess initial_guess = InitialGuess::Zero;
    std::uint64_t seed = 1;  ///< Random initial guess
    double damping = 1.0;    ///< in (0, 1]
    LinearContract linear;

    /// Throws InvalidArgument on non-positive tolerances, max_iters < 1 or
    /// damping outside (0, 1].
    void validate() const;
};

struct PicardStep {
    double increment = 0.0;  ///< ||u_D^{m+1} - u_D^m|| / max(1, ||u_D^{m+1}||), L2
    double residual = 0.0;   ///< nonlinear residual relative to max(1, ||b||)
    LinearStats linear;
};

struct SolveTrace {
    std::vector<PicardStep> steps;
    bool converged = false;
    int iterations() const { return static_cast<int>(steps.size()); }
};

class NonConvergence : public SolverError {
public:
    NonConvergence(const std::string& what, SolveTrace trace) : SolverError(what), trace_(std::move(trace)) {}
    const SolveTrace& trace() const { return trace_; }

private:
    SolveTrace trace_;
};

/// The five discrete unknowns. sigma holds one V_S field per tensor row.
struct CoupledSolution {
    forms::DiscreteField sigma, uS, pS, uD, pD;
    Eigen::VectorXd full;  ///< stacked vector in the block layout
};

CoupledSolution split_solution(const forms::CoupledSpaces& sp, const Eigen::VectorXd& full);

/// Freezes |u_D| at the previous iterate, re-solves the full coupled system,
/// and stops once the residual (and, after the first step, the increment)
/// meets its tolerance. Throws NonConvergence carrying the trace when
/// max_iters is exhausted and FactorizationError on a singular system.
std::pair<CoupledSolution, SolveTrace> solve_coupled(const forms::CoupledSpaces& sp, const forms::BlockSystem& sys,
                                                     const forms::RhsData& rhs, const forms::PhysicalParams& params,
                                                     const PicardSettings& settings = {});

}  // namespace sdg::solver
