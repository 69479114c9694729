#include "sdg/solver/solver.hpp"

#include <random>

namespace sdg::solver {

InitialGuess parse_initial_guess(const std::string& name)
{
    if (name == "zero") return InitialGuess::Zero;
    if (name == "darcy-linear") return InitialGuess::DarcyLinear;
    if (name == "random") return InitialGuess::Random;
    throw InvalidArgument("unknown initial guess '" + name + "'");
}

std::string to_string(InitialGuess g)
{
    switch (g) {
    case InitialGuess::Zero: return "zero";
    case InitialGuess::DarcyLinear: return "darcy-linear";
    case InitialGuess::Random: return "random";
    }
    return "zero";
}

void PicardSettings::validate() const
{
    if (!(tol_rel > 0.0) || !(tol_res > 0.0)) throw InvalidArgument("Picard tolerances must be positive");
    if (max_iters < 1) throw InvalidArgument("Picard max_iters must be at least 1");
    if (!(damping > 0.0 && damping <= 1.0)) throw InvalidArgument("Picard damping must lie in (0, 1]");
}

CoupledSolution split_solution(const forms::CoupledSpaces& sp, const Eigen::VectorXd& full)
{
    const auto l = forms::layout_of(sp);
    if (full.size() != l.size()) throw InvalidArgument("split_solution: vector length mismatch");
    CoupledSolution s;
    s.sigma = forms::DiscreteField(sp.v_s, sp.bv_s, 2);
    s.uS = forms::DiscreteField(sp.u_s, sp.bu_s, 2);
    s.pS = forms::DiscreteField(sp.p_s, sp.bp_s, 1);
    s.uD = forms::DiscreteField(sp.v_d, sp.bv_d, 1);
    s.pD = forms::DiscreteField(sp.u_d, sp.bu_d, 1);
    s.sigma.coef = full.segment(l.sigma(), 2 * l.n_sigma);
    s.uS.coef = full.segment(l.us(), 2 * l.n_us);
    s.pS.coef = full.segment(l.ps(), l.n_ps);
    s.uD.coef = full.segment(l.ud(), l.n_ud);
    s.pD.coef = full.segment(l.pd(), l.n_pd);
    s.full = full;
    return s;
}

namespace {

/// The system restricted to free DOFs, with prescribed values moved to the right.
struct Reduced {
    std::vector<int> pos;   ///< full index -> free index or -1
    std::vector<int> dofs;  ///< free index -> full index
    SpMat a;                ///< static operator on free DOFs
    Eigen::VectorXd b;
    int ud_offset = 0;      ///< free index of the first u_D DOF
    std::vector<char> local;  ///< free DOFs coupled only within one cell: sigma, u_D
};

Reduced reduce(const forms::BlockSystem& sys, const forms::RhsData& rhs)
{
    const auto& l = sys.layout;
    const int n = l.size();
    Reduced r;
    r.pos.assign(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        if (!rhs.constrained[static_cast<std::size_t>(i)]) {
            r.pos[static_cast<std::size_t>(i)] = static_cast<int>(r.dofs.size());
            r.dofs.push_back(i);
        }
    }
    const int nf = static_cast<int>(r.dofs.size());
    r.b.resize(nf);
    for (int i = 0; i < nf; ++i) r.b(i) = rhs.load(r.dofs[static_cast<std::size_t>(i)]);
    const SpMat s = sys.static_matrix();
    std::vector<Eigen::Triplet<double>> tr;
    tr.reserve(static_cast<std::size_t>(s.nonZeros()));
    for (int o = 0; o < s.outerSize(); ++o) {
        for (SpMat::InnerIterator it(s, o); it; ++it) {
            const int pr = r.pos[static_cast<std::size_t>(it.row())];
            if (pr < 0) continue;
            const int pc = r.pos[static_cast<std::size_t>(it.col())];
            if (pc >= 0) {
                tr.emplace_back(pr, pc, it.value());
            } else {
                r.b(pr) -= it.value() * rhs.dirichlet(it.col());
            }
        }
    }
    r.a.resize(nf, nf);
    r.a.setFromTriplets(tr.begin(), tr.end());
    r.ud_offset = r.pos[static_cast<std::size_t>(l.ud())];
    for (int i = 0; i < l.n_ud; ++i) {
        if (r.pos[static_cast<std::size_t>(l.ud() + i)] != r.ud_offset + i) {
            throw AssemblyError("Darcy velocity unknowns must all be free");
        }
    }
    r.local.assign(static_cast<std::size_t>(nf), 0);
    for (int i = 0; i < 2 * l.n_sigma; ++i) {
        const int p = r.pos[static_cast<std::size_t>(l.sigma() + i)];
        if (p >= 0) r.local[static_cast<std::size_t>(p)] = 1;
    }
    for (int i = 0; i < l.n_ud; ++i) r.local[static_cast<std::size_t>(r.ud_offset + i)] = 1;
    return r;
}

SpMat with_darcy_block(const Reduced& r, const SpMat& m_a)
{
    std::vector<Eigen::Triplet<double>> tr;
    tr.reserve(static_cast<std::size_t>(m_a.nonZeros()));
    for (int o = 0; o < m_a.outerSize(); ++o) {
        for (SpMat::InnerIterator it(m_a, o); it; ++it) {
            tr.emplace_back(r.ud_offset + static_cast<int>(it.row()), r.ud_offset + static_cast<int>(it.col()), it.value());
        }
    }
    SpMat e(r.a.rows(), r.a.cols());
    e.setFromTriplets(tr.begin(), tr.end());
    return r.a + e;
}

double mass_norm(const SpMat& m, const Eigen::VectorXd& v) { return std::sqrt(std::max(0.0, v.dot(m * v))); }

}  // namespace

std::pair<CoupledSolution, SolveTrace> solve_coupled(const forms::CoupledSpaces& sp, const forms::BlockSystem& sys,
                                                     const forms::RhsData& rhs, const forms::PhysicalParams& params,
                                                     const PicardSettings& settings)
{
    settings.validate();
    const auto& l = sys.layout;
    if (rhs.load.size() != l.size() || rhs.dirichlet.size() != l.size() ||
        static_cast<int>(rhs.constrained.size()) != l.size()) {
        throw InvalidArgument("solve_coupled: right-hand side does not match the block layout");
    }
    const Reduced red = reduce(sys, rhs);
    const double b_scale = std::max(1.0, red.b.norm());

    Eigen::VectorXd u_prev = Eigen::VectorXd::Zero(l.n_ud);
    if (settings.initial_guess == InitialGuess::Random) {
        std::mt19937_64 rng(settings.seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (Eigen::Index i = 0; i < u_prev.size(); ++i) u_prev(i) = dist(rng);
    }
    forms::PhysicalParams first = params;
    if (settings.initial_guess == InitialGuess::DarcyLinear) first.beta = 0.0;
    SpMat m_a = forms::assemble_picard_darcy(sp, u_prev, first);

    Eigen::VectorXd x_free = Eigen::VectorXd::Zero(red.b.size());
    for (int i = 0; i < l.n_ud; ++i) x_free(red.ud_offset + i) = u_prev(i);

    SolveTrace trace;
    for (int m = 1; m <= settings.max_iters; ++m) {
        PicardStep step;
        Eigen::VectorXd x_new = solve_condensed(with_darcy_block(red, m_a), red.b, red.local, settings.linear, &step.linear);
        if (settings.damping < 1.0) x_new = settings.damping * x_new + (1.0 - settings.damping) * x_free;
        const Eigen::VectorXd u_new = x_new.segment(red.ud_offset, l.n_ud);
        step.increment = mass_norm(sys.mass_vd, u_new - u_prev) / std::max(1.0, mass_norm(sys.mass_vd, u_new));

        m_a = forms::assemble_picard_darcy(sp, u_new, params);
        step.residual = (with_darcy_block(red, m_a) * x_new - red.b).norm() / b_scale;
        trace.steps.push_back(step);
        x_free = x_new;
        u_prev = u_new;

        // The increment against an arbitrary starting guess carries no
        // information, so the first step is judged by its residual alone.
        const bool inc_ok = m == 1 || step.increment <= settings.tol_rel;
        if (step.residual <= settings.tol_res && inc_ok) {
            trace.converged = true;
            break;
        }
    }
    if (!trace.converged) {
        throw NonConvergence("Picard iteration did not converge in " + std::to_string(settings.max_iters) +
                                 " iterations (last increment " + std::to_string(trace.steps.back().increment) +
                                 ", residual " + std::to_string(trace.steps.back().residual) + ")",
                             trace);
    }

    Eigen::VectorXd full = rhs.dirichlet;
    for (std::size_t i = 0; i < red.dofs.size(); ++i) full(red.dofs[i]) = x_free(static_cast<Eigen::Index>(i));
    return {split_solution(sp, full), trace};
}

}  // namespace sdg::solver
