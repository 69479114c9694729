#include "sdg/verify/verify.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace sdg::verify {

RateFit fit_rate(const std::vector<std::pair<double, double>>& points)
{
    if (points.size() < 3) throw InvalidArgument("fit_rate: at least 3 levels are required");
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i].first < points[i - 1].first)) throw InvalidArgument("fit_rate: h must be strictly decreasing");
    }
    RateFit fit;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto [h, e] = points[i];
        if (!(h > 0.0)) throw InvalidArgument("fit_rate: h must be positive");
        if (!(e > 0.0)) {
            fit.notes.push_back("level " + std::to_string(i) + " excluded: non-positive error");
            continue;
        }
        fit.h.push_back(h);
        fit.error.push_back(e);
    }
    const std::size_t n = fit.h.size();
    if (n < 2) throw InvalidArgument("fit_rate: fewer than 2 positive errors remain");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(fit.h[i]);
        my += std::log(fit.error[i]);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(fit.h[i]) - mx;
        sxy += dx * (std::log(fit.error[i]) - my);
        sxx += dx * dx;
    }
    fit.slope = sxy / sxx;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        fit.step_rates.push_back(std::log(fit.error[i] / fit.error[i + 1]) / std::log(fit.h[i] / fit.h[i + 1]));
    }
    fit.last_rate = fit.step_rates.back();
    return fit;
}

std::string to_string(InfSupForm f) { return f == InfSupForm::bS ? "b_S" : "a_S"; }

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

Eigen::VectorXd wvec(const std::vector<double>& w)
{
    return Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

void scatter(Triplets& tr, std::span<const int> r, std::span<const int> c, const Eigen::MatrixXd& m)
{
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            tr.emplace_back(r[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(j)], m(i, j));
        }
    }
}

SpMat from(int n, const Triplets& tr)
{
    SpMat m(n, n);
    m.setFromTriplets(tr.begin(), tr.end());
    return m;
}

/// Rows and columns of `m` kept by the index lists.
Eigen::MatrixXd dense_sub(const SpMat& m, const std::vector<int>& rows, const std::vector<int>& cols)
{
    const Eigen::MatrixXd d(m);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d(rows[i], cols[j]);
        }
    }
    return out;
}

Eigen::MatrixXd blockdiag2(const Eigen::MatrixXd& a)
{
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * a.rows(), 2 * a.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(a.rows(), a.cols()) = a;
    return out;
}

double min_generalized(const Eigen::MatrixXd& b, const Eigen::MatrixXd& gv, const Eigen::MatrixXd& gq)
{
    const Eigen::LLT<Eigen::MatrixXd> lv(gv);
    if (lv.info() != Eigen::Success) throw AssemblyError("estimate_infsup: trial-space Gram matrix is not SPD");
    const Eigen::MatrixXd s = b * lv.solve(b.transpose());
    const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, gq, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw AssemblyError("estimate_infsup: test-space Gram matrix is not SPD");
    return std::sqrt(std::max(0.0, es.eigenvalues().minCoeff()));
}

}  // namespace

SpMat gram_zs(const forms::CoupledSpaces& sp)
{
    const auto& mesh = *sp.mesh_s;
    Triplets tr;
    std::vector<Vec2> pts;
    std::vector<double> w;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        fem::triangle_quadrature(mesh, t, fem::volume_degree(sp.k), pts, w);
        const auto v = sp.bu_s.eval_scalar(t, pts);
        const Eigen::VectorXd wv = wvec(w);
        scatter(tr, sp.u_s.local(t), sp.u_s.local(t),
                v.gx.transpose() * wv.asDiagonal() * v.gx + v.gy.transpose() * wv.asDiagonal() * v.gy);
    }
    for (int e : mesh.dual_edges()) {
        const auto& ed = mesh.edge(e);
        fem::edge_quadrature(mesh, e, fem::edge_degree(sp.k), pts, w);
        const Eigen::VectorXd wv = wvec(w) / ed.length;
        const Eigen::MatrixXd v[2] = {sp.bu_s.eval_scalar(ed.tri[0], pts).val, sp.bu_s.eval_scalar(ed.tri[1], pts).val};
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                const double s = a == b ? 1.0 : -1.0;
                scatter(tr, sp.u_s.local(ed.tri[static_cast<std::size_t>(a)]), sp.u_s.local(ed.tri[static_cast<std::size_t>(b)]),
                        s * (v[a].transpose() * wv.asDiagonal() * v[b]));
            }
        }
    }
    return from(sp.u_s.num_dofs(), tr);
}

SpMat gram_xs_prime(const forms::CoupledSpaces& sp)
{
    const auto& mesh = *sp.mesh_s;
    Triplets tr;
    std::vector<Vec2> pts;
    std::vector<double> w;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        fem::triangle_quadrature(mesh, t, fem::volume_degree(sp.k), pts, w);
        const auto v = sp.bv_s.eval_vector(t, pts);
        const Eigen::VectorXd wv = wvec(w);
        scatter(tr, sp.v_s.local(t), sp.v_s.local(t),
                v.vx.transpose() * wv.asDiagonal() * v.vx + v.vy.transpose() * wv.asDiagonal() * v.vy);
    }
    for (int e : mesh.dual_edges()) {
        const auto& ed = mesh.edge(e);
        fem::edge_quadrature(mesh, e, fem::edge_degree(sp.k), pts, w);
        const auto v = sp.bv_s.eval_vector(ed.tri[0], pts);
        const Eigen::MatrixXd vn = ed.normal.x() * v.vx + ed.normal.y() * v.vy;
        scatter(tr, sp.v_s.local(ed.tri[0]), sp.v_s.local(ed.tri[0]),
                ed.length * (vn.transpose() * wvec(w).asDiagonal() * vn));
    }
    return from(sp.v_s.num_dofs(), tr);
}

SpMat gram_p(const forms::CoupledSpaces& sp)
{
    const auto& mesh = *sp.mesh_s;
    Triplets tr;
    std::vector<Vec2> pts;
    std::vector<double> w;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        fem::triangle_quadrature(mesh, t, fem::volume_degree(sp.k), pts, w);
        const Eigen::MatrixXd v = sp.bp_s.eval_scalar(t, pts).val;
        scatter(tr, sp.p_s.local(t), sp.p_s.local(t), v.transpose() * wvec(w).asDiagonal() * v);
    }
    return from(sp.p_s.num_dofs(), tr);
}

InfSupEstimate estimate_infsup(const forms::CoupledSpaces& sp, InfSupForm form, int level)
{
    InfSupEstimate est;
    est.form = form;
    est.level = level;
    const std::vector<int>& free_u = sp.u_s.free_dofs();
    const Eigen::MatrixXd gzs = dense_sub(gram_zs(sp), free_u, free_u);
    const forms::BlockSystem sys = forms::assemble_linear_blocks(sp, forms::PhysicalParams{});
    if (form == InfSupForm::bS) {
        std::vector<int> cols = free_u;
        for (int d : free_u) cols.push_back(d + sp.u_s.num_dofs());
        std::vector<int> rows(static_cast<std::size_t>(sp.p_s.num_dofs()));
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
        const Eigen::MatrixXd b = dense_sub(sys.bS, rows, cols);
        est.rows = static_cast<int>(b.rows());
        est.cols = static_cast<int>(b.cols());
        est.constant = min_generalized(b, blockdiag2(gzs), Eigen::MatrixXd(gram_p(sp)));
    } else {
        // a_S is block diagonal over velocity components, so one suffices.
        std::vector<int> cols(static_cast<std::size_t>(sp.v_s.num_dofs()));
        for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = static_cast<int>(i);
        const Eigen::MatrixXd a = dense_sub(sys.aS, free_u, cols);
        est.rows = static_cast<int>(a.rows());
        est.cols = static_cast<int>(a.cols());
        est.constant = min_generalized(a, Eigen::MatrixXd(gram_xs_prime(sp)), gzs);
    }
    return est;
}

double AdjointReport::worst() const { return std::max({aS, aD, bS, interface}); }

namespace {

double rel_dev(const SpMat& a, const SpMat& b_transposed_expected, double sign)
{
    const SpMat bt = SpMat(b_transposed_expected.transpose());
    const double na = a.norm();
    const SpMat diff = a - sign * bt;
    return diff.norm() / (na > 0.0 ? na : 1.0);
}

/// a(q, phi_i) for the continuous field q and every basis function phi_i of U:
/// -sum_T (q, grad phi_i) + sum_{F_p} <q.n, [phi_i]>.
Eigen::VectorXd gradient_form_load(const mesh::StaggeredMesh& mesh, const fem::DofMap& du, const fem::LocalBasis& bu,
                                   const std::function<Vec2(const Vec2&)>& q, int k)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(du.num_dofs());
    std::vector<Vec2> pts;
    std::vector<double> w;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        fem::triangle_quadrature(mesh, t, fem::volume_degree(k), pts, w);
        const auto u = bu.eval_scalar(t, pts);
        Eigen::VectorXd qx(static_cast<Eigen::Index>(pts.size())), qy(qx.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const Vec2 v = q(pts[i]);
            qx(static_cast<Eigen::Index>(i)) = w[i] * v.x();
            qy(static_cast<Eigen::Index>(i)) = w[i] * v.y();
        }
        const Eigen::VectorXd loc = -(u.gx.transpose() * qx + u.gy.transpose() * qy);
        const auto ids = du.local(t);
        for (std::size_t i = 0; i < ids.size(); ++i) out(ids[i]) += loc(static_cast<Eigen::Index>(i));
    }
    for (int e : mesh.dual_edges()) {
        const auto& ed = mesh.edge(e);
        fem::edge_quadrature(mesh, e, fem::edge_degree(k), pts, w);
        Eigen::VectorXd qn(static_cast<Eigen::Index>(pts.size()));
        for (std::size_t i = 0; i < pts.size(); ++i) qn(static_cast<Eigen::Index>(i)) = w[i] * ed.normal.dot(q(pts[i]));
        for (int side = 0; side < 2; ++side) {
            const int t = ed.tri[static_cast<std::size_t>(side)];
            const Eigen::VectorXd loc = (side == 0 ? 1.0 : -1.0) * (bu.eval_scalar(t, pts).val.transpose() * qn);
            const auto ids = du.local(t);
            for (std::size_t i = 0; i < ids.size(); ++i) out(ids[i]) += loc(static_cast<Eigen::Index>(i));
        }
    }
    return out;
}

Eigen::VectorXd jh_coefficients(const fem::DofMap& dv, const fem::LocalBasis& bv, const mesh::StaggeredMesh& mesh,
                                const std::function<Vec2(const Vec2&)>& q)
{
    Eigen::VectorXd c = Eigen::VectorXd::Zero(dv.num_dofs());
    const fem::VectorSampler s = [&q](const std::vector<Vec2>& pts) {
        Eigen::MatrixXd fx(static_cast<Eigen::Index>(pts.size()), 1), fy(fx.rows(), 1);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const Vec2 v = q(pts[i]);
            fx(static_cast<Eigen::Index>(i), 0) = v.x();
            fy(static_cast<Eigen::Index>(i), 0) = v.y();
        }
        return std::make_pair(fx, fy);
    };
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Eigen::MatrixXd loc = bv.functionals(t, s);
        const auto ids = dv.local(t);
        for (std::size_t i = 0; i < ids.size(); ++i) c(ids[i]) = loc(static_cast<Eigen::Index>(i), 0);
    }
    return c;
}

double worst_projection(const Eigen::VectorXd& r, int samples, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        double v = 0.0;
        for (Eigen::Index i = 0; i < r.size(); ++i) v += dist(rng) * r(i);
        worst = std::max(worst, std::abs(v));
    }
    return worst;
}

}  // namespace

AdjointReport check_adjoints(const forms::BlockSystem& sys)
{
    AdjointReport r;
    r.aS = rel_dev(sys.aS, sys.aS_star, 1.0);
    r.aD = rel_dev(sys.aD, sys.aD_star, 1.0);
    r.bS = rel_dev(sys.bS, sys.bS_star, 1.0);
    r.interface = rel_dev(sys.C_uS_qD, sys.C_pD_vS, -1.0);
    return r;
}

OrthogonalityReport check_orthogonality(const forms::CoupledSpaces& sp, const forms::BlockSystem& sys, int samples,
                                        std::uint64_t seed)
{
    if (samples < 1) throw InvalidArgument("check_orthogonality: samples must be positive");
    std::mt19937_64 rng(seed);
    OrthogonalityReport rep;
    const auto ud = [](const Vec2& x) { return Vec2(std::sin(1.3 * x.x() + 0.7 * x.y()), std::cos(0.9 * x.x() - 1.1 * x.y())); };
    const Eigen::VectorXd rd = gradient_form_load(*sp.mesh_d, sp.u_d, sp.bu_d, ud, sp.k) -
                               sys.aD * jh_coefficients(sp.v_d, sp.bv_d, *sp.mesh_d, ud);
    rep.darcy = worst_projection(rd, samples, rng);

    const std::function<Vec2(const Vec2&)> rows[2] = {
        [](const Vec2& x) { return Vec2(std::exp(0.5 * x.x()) * std::cos(x.y()), x.x() * x.y() * x.y()); },
        [](const Vec2& x) { return Vec2(std::sin(2.0 * x.y() - x.x()), 1.0 + x.x() * x.x() * x.x()); }};
    const int nu = sp.u_s.num_dofs();
    const int nv = sp.v_s.num_dofs();
    Eigen::VectorXd coef(2 * nv), load(2 * nu);
    for (int c = 0; c < 2; ++c) {
        coef.segment(c * nv, nv) = jh_coefficients(sp.v_s, sp.bv_s, *sp.mesh_s, rows[c]);
        load.segment(c * nu, nu) = gradient_form_load(*sp.mesh_s, sp.u_s, sp.bu_s, rows[c], sp.k);
    }
    rep.stokes = worst_projection(load - sys.aS * coef, samples, rng);
    return rep;
}

std::optional<PairMargin> monotonicity_pair(const Vec2& u, const Vec2& v, const forms::PhysicalParams& params,
                                            const Mat2& k_inv)
{
    const Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (k_inv + k_inv.transpose()));
    const double lmin = es.eigenvalues().minCoeff();
    const double knorm = es.eigenvalues().cwiseAbs().maxCoeff();
    if (!(lmin > 0.0)) throw InvalidArgument("monotonicity: K^{-1} is not positive definite");
    const Vec2 d = u - v;
    if (d.squaredNorm() == 0.0) return std::nullopt;
    const Vec2 da = forms::apply_A(u, params, k_inv) - forms::apply_A(v, params, k_inv);
    const double lin = params.mu / params.rho;
    const double bound = lin * knorm * d.norm() + params.beta / params.rho * d.norm() * (u.norm() + v.norm());
    return PairMargin{da.dot(d) / (lin * lmin * d.squaredNorm()), da.norm() / bound};
}

MonotonicityReport check_monotonicity(const forms::PhysicalParams& params, int samples, std::uint64_t seed,
                                      const Mat2& k_inv)
{
    if (samples < 1) throw InvalidArgument("check_monotonicity: samples must be positive");
    params.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    MonotonicityReport rep;
    rep.min_margin = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        const Vec2 u(dist(rng), dist(rng));
        const Vec2 v(dist(rng), dist(rng));
        const auto m = monotonicity_pair(u, v, params, k_inv);
        if (!m) {
            ++rep.skipped;
            continue;
        }
        rep.min_margin = std::min(rep.min_margin, m->margin);
        rep.max_continuity = std::max(rep.max_continuity, m->continuity);
        ++rep.pairs;
    }
    return rep;
}

std::vector<NegativeControl> run_negative_controls(const forms::CoupledSpaces& sp, const forms::PhysicalParams& params)
{
    const std::pair<forms::Fault, const char*> faults[] = {{forms::Fault::JumpOrientation, "jump-orientation"},
                                                           {forms::Fault::AdjointSign, "adjoint-sign"},
                                                           {forms::Fault::InterfaceSign, "interface-sign"}};
    std::vector<NegativeControl> out;
    for (const auto& [fault, name] : faults) {
        NegativeControl nc;
        nc.fault = fault;
        nc.name = name;
        forms::AssemblyOptions opts;
        opts.fault = fault;
        nc.deviation = check_adjoints(forms::assemble_linear_blocks(sp, params, opts)).worst();
        nc.detected = nc.deviation > 1e-6;
        out.push_back(nc);
    }
    return out;
}

}  // namespace sdg::verify
