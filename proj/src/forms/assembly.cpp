#include "sdg/forms/system.hpp"

#include <Eigen/LU>

#include <ostream>

namespace sdg::forms {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;
using fem::LocalBasis;
using fem::DofMap;
using mesh::StaggeredMesh;

void scatter(Triplets& out, std::span<const int> rows, std::span<const int> cols, const Eigen::MatrixXd& local,
             int row_off = 0, int col_off = 0)
{
    for (Eigen::Index j = 0; j < local.cols(); ++j) {
        for (Eigen::Index i = 0; i < local.rows(); ++i) {
            const double v = local(i, j);
            if (v != 0.0) out.emplace_back(row_off + rows[static_cast<std::size_t>(i)], col_off + cols[static_cast<std::size_t>(j)], v);
        }
    }
}

SpMat build(int rows, int cols, const Triplets& t)
{
    SpMat m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

Eigen::VectorXd weights(const std::vector<double>& w)
{
    return Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

struct Subdomain {
    const StaggeredMesh& mesh;
    const DofMap& dv;
    const LocalBasis& bv;
    const DofMap& du;
    const LocalBasis& bu;
    int k;
};

/// a(tau, w) = -sum_T (tau, grad w) + sum_{F_p} <tau.n, [w]>; rows U, columns V.
SpMat gradient_form(const Subdomain& s, double jump_sign)
{
    Triplets tr;
    std::vector<Vec2> pts;
    std::vector<double> w;
    for (int t = 0; t < s.mesh.num_triangles(); ++t) {
        fem::triangle_quadrature(s.mesh, t, fem::volume_degree(s.k), pts, w);
        const auto v = s.bv.eval_vector(t, pts);
        const auto u = s.bu.eval_scalar(t, pts);
        const Eigen::VectorXd wv = weights(w);
        const Eigen::MatrixXd local = -(u.gx.transpose() * wv.asDiagonal() * v.vx + u.gy.transpose() * wv.asDiagonal() * v.vy);
        scatter(tr, s.du.local(t), s.dv.local(t), local);
    }
    for (int e : s.mesh.dual_edges()) {
        const auto& ed = s.mesh.edge(e);
        fem::edge_quadrature(s.mesh, e, fem::edge_degree(s.k), pts, w);
        const auto v0 = s.bv.eval_vector(ed.tri[0], pts);
        const Eigen::MatrixXd vn = ed.normal.x() * v0.vx + ed.normal.y() * v0.vy;
        const Eigen::VectorXd wv = weights(w);
        for (int side = 0; side < 2; ++side) {
            const int t = ed.tri[static_cast<std::size_t>(side)];
            const Eigen::MatrixXd u = s.bu.eval_scalar(t, pts).val;
            const double sign = (side == 0 ? 1.0 : -1.0) * jump_sign;
            scatter(tr, s.du.local(t), s.dv.local(ed.tri[0]), sign * (u.transpose() * wv.asDiagonal() * vn));
        }
    }
    return build(s.du.num_dofs(), s.dv.num_dofs(), tr);
}

/// a*(w, tau) = -sum_{F_u} <w, [tau.n]> + sum_T (div tau, w); rows V, columns U.
SpMat adjoint_form(const Subdomain& s, double interior_edge_sign)
{
    Triplets tr;
    std::vector<Vec2> pts;
    std::vector<double> w;
    for (int t = 0; t < s.mesh.num_triangles(); ++t) {
        fem::triangle_quadrature(s.mesh, t, fem::volume_degree(s.k), pts, w);
        const auto v = s.bv.eval_vector(t, pts);
        const auto u = s.bu.eval_scalar(t, pts);
        scatter(tr, s.dv.local(t), s.du.local(t), v.div.transpose() * weights(w).asDiagonal() * u.val);
    }
    for (int e : s.mesh.primal_edges()) {
        const auto& ed = s.mesh.edge(e);
        fem::edge_quadrature(s.mesh, e, fem::edge_degree(s.k), pts, w);
        const Eigen::MatrixXd u0 = s.bu.eval_scalar(ed.tri[0], pts).val;
        const Eigen::VectorXd wv = weights(w);
        const double esign = ed.boundary() ? 1.0 : interior_edge_sign;
        for (int side = 0; side < 2; ++side) {
            const int t = ed.tri[static_cast<std::size_t>(side)];
            if (t < 0) continue;
            const auto v = s.bv.eval_vector(t, pts);
            const Eigen::MatrixXd vn = ed.normal.x() * v.vx + ed.normal.y() * v.vy;
            const double sign = (side == 0 ? -1.0 : 1.0) * esign;
            scatter(tr, s.dv.local(t), s.du.local(ed.tri[0]), sign * (vn.transpose() * wv.asDiagonal() * u0));
        }
    }
    return build(s.dv.num_dofs(), s.du.num_dofs(), tr);
}

SpMat vector_mass(const StaggeredMesh& mesh, const DofMap& dv, const LocalBasis& bv, int degree, double scale)
{
    Triplets tr;
    std::vector<Vec2> pts;
    std::vector<double> w;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        fem::triangle_quadrature(mesh, t, degree, pts, w);
        const auto v = bv.eval_vector(t, pts);
        const Eigen::VectorXd wv = weights(w);
        const Eigen::MatrixXd local = scale * (v.vx.transpose() * wv.asDiagonal() * v.vx + v.vy.transpose() * wv.asDiagonal() * v.vy);
        scatter(tr, dv.local(t), dv.local(t), local);
    }
    return build(dv.num_dofs(), dv.num_dofs(), tr);
}

SpMat two_copies(const SpMat& m)
{
    Triplets tr;
    for (int c = 0; c < 2; ++c) {
        for (int o = 0; o < m.outerSize(); ++o) {
            for (SpMat::InnerIterator it(m, o); it; ++it) {
                tr.emplace_back(static_cast<int>(it.row()) + c * static_cast<int>(m.rows()),
                                static_cast<int>(it.col()) + c * static_cast<int>(m.cols()), it.value());
            }
        }
    }
    return build(2 * static_cast<int>(m.rows()), 2 * static_cast<int>(m.cols()), tr);
}

void append(Triplets& tr, const SpMat& m, int row_off, int col_off, double scale)
{
    for (int o = 0; o < m.outerSize(); ++o) {
        for (SpMat::InnerIterator it(m, o); it; ++it) {
            tr.emplace_back(row_off + static_cast<int>(it.row()), col_off + static_cast<int>(it.col()), scale * it.value());
        }
    }
}

}  // namespace

CoupledSpaces::CoupledSpaces(std::shared_ptr<const mesh::StaggeredMesh> stokes,
                             std::shared_ptr<const mesh::StaggeredMesh> darcy, int degree)
    : mesh_s(std::move(stokes)),
      mesh_d(std::move(darcy)),
      glue(mesh::build_interface_glue(*mesh_s, *mesh_d)),
      k(degree),
      v_s(*mesh_s, fem::SpaceKind::V, degree),
      u_s(*mesh_s, fem::SpaceKind::U, degree, {mesh::BoundaryTag::GammaS}),
      p_s(*mesh_s, fem::SpaceKind::P, degree),
      v_d(*mesh_d, fem::SpaceKind::V, degree),
      u_d(*mesh_d, fem::SpaceKind::U, degree, {mesh::BoundaryTag::GammaD}),
      bv_s(*mesh_s, fem::SpaceKind::V, degree),
      bu_s(*mesh_s, fem::SpaceKind::U, degree),
      bp_s(*mesh_s, fem::SpaceKind::P, degree),
      bv_d(*mesh_d, fem::SpaceKind::V, degree),
      bu_d(*mesh_d, fem::SpaceKind::U, degree)
{
    if (mesh_s->subdomain() != mesh::Subdomain::Stokes || mesh_d->subdomain() != mesh::Subdomain::Darcy) {
        throw InvalidArgument("CoupledSpaces: expected a Stokes mesh and a Darcy mesh");
    }
}

BlockLayout layout_of(const CoupledSpaces& sp)
{
    BlockLayout l;
    l.n_sigma = sp.v_s.num_dofs();
    l.n_us = sp.u_s.num_dofs();
    l.n_ps = sp.p_s.num_dofs();
    l.n_ud = sp.v_d.num_dofs();
    l.n_pd = sp.u_d.num_dofs();
    return l;
}

BlockSystem assemble_linear_blocks(const CoupledSpaces& sp, const PhysicalParams& params, const AssemblyOptions& opts)
{
    params.validate();
    BlockSystem sys;
    sys.layout = layout_of(sp);
    const int k = sp.k;
    const Subdomain st{*sp.mesh_s, sp.v_s, sp.bv_s, sp.u_s, sp.bu_s, k};
    const Subdomain da{*sp.mesh_d, sp.v_d, sp.bv_d, sp.u_d, sp.bu_d, k};
    const int nus = sp.u_s.num_dofs(), nps = sp.p_s.num_dofs(), nud = sp.u_d.num_dofs();

    sys.sigma_mass = two_copies(vector_mass(*sp.mesh_s, sp.v_s, sp.bv_s, fem::volume_degree(k), 1.0 / params.nu));
    sys.aS = two_copies(gradient_form(st, opts.fault == Fault::JumpOrientation ? -1.0 : 1.0));
    sys.aS_star = two_copies(adjoint_form(st, 1.0));
    sys.aD = gradient_form(da, 1.0);
    sys.aD_star = adjoint_form(da, opts.fault == Fault::AdjointSign ? -1.0 : 1.0);
    sys.mass_vd = vector_mass(*sp.mesh_d, sp.v_d, sp.bv_d, fem::volume_degree(k), 1.0);

    // b_S(v, q) = -sum_{F_u} <v.n, [q]> + sum_T (v, grad q) and its adjoint, per velocity component.
    {
        const auto& mesh = *sp.mesh_s;
        Triplets tb, tbs;
        std::vector<Vec2> pts;
        std::vector<double> w;
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            fem::triangle_quadrature(mesh, t, fem::volume_degree(k), pts, w);
            const auto u = sp.bu_s.eval_scalar(t, pts);
            const auto p = sp.bp_s.eval_scalar(t, pts);
            const Eigen::VectorXd wv = weights(w);
            for (int c = 0; c < 2; ++c) {
                const Eigen::MatrixXd& dp = c == 0 ? p.gx : p.gy;
                const Eigen::MatrixXd& du = c == 0 ? u.gx : u.gy;
                scatter(tb, sp.p_s.local(t), sp.u_s.local(t), dp.transpose() * wv.asDiagonal() * u.val, 0, c * nus);
                scatter(tbs, sp.u_s.local(t), sp.p_s.local(t), -(du.transpose() * wv.asDiagonal() * p.val), c * nus, 0);
            }
        }
        for (int e : mesh.primal_edges()) {
            const auto& ed = mesh.edge(e);
            fem::edge_quadrature(mesh, e, fem::edge_degree(k), pts, w);
            const Eigen::MatrixXd u0 = sp.bu_s.eval_scalar(ed.tri[0], pts).val;
            const Eigen::VectorXd wv = weights(w);
            for (int side = 0; side < 2; ++side) {
                const int t = ed.tri[static_cast<std::size_t>(side)];
                if (t < 0) continue;
                const Eigen::MatrixXd p = sp.bp_s.eval_scalar(t, pts).val;
                const Eigen::MatrixXd m = p.transpose() * wv.asDiagonal() * u0;
                const double sign = side == 0 ? -1.0 : 1.0;
                for (int c = 0; c < 2; ++c) {
                    scatter(tb, sp.p_s.local(t), sp.u_s.local(ed.tri[0]), sign * ed.normal(c) * m, 0, c * nus);
                }
            }
        }
        for (int e : mesh.dual_edges()) {
            const auto& ed = mesh.edge(e);
            fem::edge_quadrature(mesh, e, fem::edge_degree(k), pts, w);
            const Eigen::MatrixXd p0 = sp.bp_s.eval_scalar(ed.tri[0], pts).val;
            const Eigen::VectorXd wv = weights(w);
            for (int side = 0; side < 2; ++side) {
                const int t = ed.tri[static_cast<std::size_t>(side)];
                const Eigen::MatrixXd u = sp.bu_s.eval_scalar(t, pts).val;
                const Eigen::MatrixXd m = u.transpose() * wv.asDiagonal() * p0;
                const double sign = side == 0 ? 1.0 : -1.0;
                for (int c = 0; c < 2; ++c) {
                    scatter(tbs, sp.u_s.local(t), sp.p_s.local(ed.tri[0]), sign * ed.normal(c) * m, c * nus, 0);
                }
            }
        }
        sys.bS = build(nps, 2 * nus, tb);
        sys.bS_star = build(2 * nus, nps, tbs);
    }

    // Interface coupling over the glue sub-segments.
    {
        Triplets tc, tq, tg;
        const auto& rule = fem::segment_rule(fem::edge_degree(k));
        const double iface_sign = opts.fault == Fault::InterfaceSign ? 1.0 : -1.0;
        for (const auto& seg : sp.glue.segments()) {
            std::vector<Vec2> pts(rule.size());
            Eigen::VectorXd wv(static_cast<Eigen::Index>(rule.size()));
            for (std::size_t q = 0; q < rule.size(); ++q) {
                pts[q] = seg.point(rule.points[q]);
                wv(static_cast<Eigen::Index>(q)) = rule.weights[q] * seg.length;
            }
            const Eigen::MatrixXd us = sp.bu_s.eval_scalar(seg.stokes_tri, pts).val;
            const Eigen::MatrixXd ud = sp.bu_d.eval_scalar(seg.darcy_tri, pts).val;
            const Eigen::MatrixXd sd = us.transpose() * wv.asDiagonal() * ud;
            const Eigen::MatrixXd ss = us.transpose() * wv.asDiagonal() * us;
            const auto rs = sp.u_s.local(seg.stokes_tri);
            const auto rd = sp.u_d.local(seg.darcy_tri);
            for (int c = 0; c < 2; ++c) {
                scatter(tc, rs, rd, seg.normal(c) * sd, c * nus, 0);
                scatter(tq, rd, rs, iface_sign * seg.normal(c) * sd.transpose(), 0, c * nus);
                for (int d = 0; d < 2; ++d) {
                    scatter(tg, rs, rs, params.G * seg.tangent(c) * seg.tangent(d) * ss, c * nus, d * nus);
                }
            }
        }
        sys.C_pD_vS = build(2 * nus, nud, tc);
        sys.C_uS_qD = build(nud, 2 * nus, tq);
        sys.C_BJS = build(2 * nus, 2 * nus, tg);
    }

    // Integrity: every row of the full operator needs support.
    const SpMat full = sys.static_matrix() + sys.embed_darcy(sys.mass_vd);
    Eigen::VectorXi count = Eigen::VectorXi::Zero(full.rows());
    for (int o = 0; o < full.outerSize(); ++o) {
        for (SpMat::InnerIterator it(full, o); it; ++it) {
            if (it.value() != 0.0) ++count(it.row());
        }
    }
    for (Eigen::Index i = 0; i < count.size(); ++i) {
        if (count(i) == 0) throw AssemblyError("row " + std::to_string(i) + " of the coupled system is empty");
    }
    return sys;
}

SpMat BlockSystem::static_matrix() const
{
    const auto& l = layout;
    Triplets tr;
    append(tr, sigma_mass, l.sigma(), l.sigma(), 1.0);
    append(tr, aS_star, l.sigma(), l.us(), -1.0);
    append(tr, aS, l.us(), l.sigma(), 1.0);
    append(tr, C_BJS, l.us(), l.us(), 1.0);
    append(tr, bS_star, l.us(), l.ps(), 1.0);
    append(tr, C_pD_vS, l.us(), l.pd(), 1.0);
    append(tr, bS, l.ps(), l.us(), 1.0);
    append(tr, aD_star, l.ud(), l.pd(), -1.0);
    append(tr, aD, l.pd(), l.ud(), 1.0);
    append(tr, C_uS_qD, l.pd(), l.us(), 1.0);
    return build(l.size(), l.size(), tr);
}

SpMat BlockSystem::embed_darcy(const SpMat& m_a) const
{
    Triplets tr;
    append(tr, m_a, layout.ud(), layout.ud(), 1.0);
    return build(layout.size(), layout.size(), tr);
}

std::map<std::string, const SpMat*> BlockSystem::named() const
{
    return {{"A_S", &sigma_mass}, {"aS", &aS},           {"aS*", &aS_star},   {"bS", &bS},
            {"bS*", &bS_star},    {"aD", &aD},           {"aD*", &aD_star},   {"C_pD_vS", &C_pD_vS},
            {"C_uS_qD", &C_uS_qD}, {"C_BJS", &C_BJS},   {"M_VD", &mass_vd}};
}

SpMat assemble_picard_darcy(const CoupledSpaces& sp, const Eigen::VectorXd& u_prev, const PhysicalParams& params)
{
    if (u_prev.size() != sp.v_d.num_dofs()) throw InvalidArgument("assemble_picard_darcy: coefficient length mismatch");
    if (!u_prev.allFinite()) throw InvalidArgument("assemble_picard_darcy: previous iterate is not finite");
    const auto& mesh = *sp.mesh_d;
    Triplets tr;
    std::vector<Vec2> pts;
    std::vector<double> w;
    const double lin = params.mu / params.rho, nl = params.beta / params.rho;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        fem::triangle_quadrature(mesh, t, fem::nonlinear_degree(sp.k), pts, w);
        const auto v = sp.bv_d.eval_vector(t, pts);
        const auto ids = sp.v_d.local(t);
        Eigen::VectorXd c(static_cast<Eigen::Index>(ids.size()));
        for (std::size_t i = 0; i < ids.size(); ++i) c(static_cast<Eigen::Index>(i)) = u_prev(ids[i]);
        const Eigen::VectorXd ux = v.vx * c, uy = v.vy * c;
        Eigen::MatrixXd local = Eigen::MatrixXd::Zero(v.vx.cols(), v.vx.cols());
        for (std::size_t q = 0; q < pts.size(); ++q) {
            const auto qi = static_cast<Eigen::Index>(q);
            const Mat2 ki = params.k_inv(pts[q]);
            if (!(std::abs(ki.determinant()) > 0.0) || !ki.allFinite()) {
                throw AssemblyError("inverse permeability is singular at a quadrature point");
            }
            const Mat2 coef = lin * ki + nl * std::hypot(ux(qi), uy(qi)) * Mat2::Identity();
            const Eigen::RowVectorXd ax = coef(0, 0) * v.vx.row(qi) + coef(0, 1) * v.vy.row(qi);
            const Eigen::RowVectorXd ay = coef(1, 0) * v.vx.row(qi) + coef(1, 1) * v.vy.row(qi);
            local.noalias() += w[q] * (v.vx.row(qi).transpose() * ax + v.vy.row(qi).transpose() * ay);
        }
        scatter(tr, ids, ids, local);
    }
    return build(sp.v_d.num_dofs(), sp.v_d.num_dofs(), tr);
}

RhsData assemble_rhs(const CoupledSpaces& sp, const cases::ManufacturedCase& c)
{
    const BlockLayout l = layout_of(sp);
    const int k = sp.k;
    const int nus = l.n_us;
    RhsData r;
    r.load = Eigen::VectorXd::Zero(l.size());
    r.dirichlet = Eigen::VectorXd::Zero(l.size());
    r.constrained.assign(static_cast<std::size_t>(l.size()), 0);
    std::vector<Vec2> pts;
    std::vector<double> w;

    const auto& ms = *sp.mesh_s;
    for (int t = 0; t < ms.num_triangles(); ++t) {
        fem::triangle_quadrature(ms, t, fem::volume_degree(k), pts, w);
        const Eigen::MatrixXd u = sp.bu_s.eval_scalar(t, pts).val;
        Eigen::MatrixXd f(static_cast<Eigen::Index>(pts.size()), 2);
        for (std::size_t q = 0; q < pts.size(); ++q) f.row(static_cast<Eigen::Index>(q)) = w[q] * c.sources.fS(pts[q]).transpose();
        const Eigen::MatrixXd loc = u.transpose() * f;
        const auto ids = sp.u_s.local(t);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            for (int comp = 0; comp < 2; ++comp) r.load(l.us() + comp * nus + ids[i]) += loc(static_cast<Eigen::Index>(i), comp);
        }
    }
    const auto& rule = fem::segment_rule(fem::edge_degree(k));
    for (const auto& seg : sp.glue.segments()) {
        pts.resize(rule.size());
        Eigen::MatrixXd f(static_cast<Eigen::Index>(rule.size()), 2);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            pts[q] = seg.point(rule.points[q]);
            const double g1 = c.sources.g1(pts[q], seg.normal, seg.tangent);
            const double g2 = c.sources.g2(pts[q], seg.normal, seg.tangent);
            f.row(static_cast<Eigen::Index>(q)) = -(rule.weights[q] * seg.length) * (g1 * seg.normal + g2 * seg.tangent).transpose();
        }
        const Eigen::MatrixXd u = sp.bu_s.eval_scalar(seg.stokes_tri, pts).val;
        const Eigen::MatrixXd loc = u.transpose() * f;
        const auto ids = sp.u_s.local(seg.stokes_tri);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            for (int comp = 0; comp < 2; ++comp) r.load(l.us() + comp * nus + ids[i]) += loc(static_cast<Eigen::Index>(i), comp);
        }
    }

    const auto& md = *sp.mesh_d;
    for (int t = 0; t < md.num_triangles(); ++t) {
        fem::triangle_quadrature(md, t, fem::volume_degree(k), pts, w);
        const Eigen::MatrixXd u = sp.bu_d.eval_scalar(t, pts).val;
        const auto v = sp.bv_d.eval_vector(t, pts);
        Eigen::VectorXd fd(static_cast<Eigen::Index>(pts.size())), gx(fd.size()), gy(fd.size());
        for (std::size_t q = 0; q < pts.size(); ++q) {
            const auto qi = static_cast<Eigen::Index>(q);
            fd(qi) = w[q] * c.sources.fD(pts[q]);
            const Vec2 g = c.sources.gD(pts[q]);
            gx(qi) = w[q] * g.x();
            gy(qi) = w[q] * g.y();
        }
        const Eigen::VectorXd lq = u.transpose() * fd;
        const Eigen::VectorXd lv = v.vx.transpose() * gx + v.vy.transpose() * gy;
        const auto iq = sp.u_d.local(t);
        const auto iv = sp.v_d.local(t);
        for (std::size_t i = 0; i < iq.size(); ++i) r.load(l.pd() + iq[i]) += lq(static_cast<Eigen::Index>(i));
        for (std::size_t i = 0; i < iv.size(); ++i) r.load(l.ud() + iv[i]) += lv(static_cast<Eigen::Index>(i));
    }

    // Strong boundary values: edge-moment interpolants of the exact traces.
    for (int dof = 0; dof < sp.u_s.num_dofs(); ++dof) {
        if (!sp.u_s.constrained(dof)) continue;
        const auto& info = sp.u_s.info(dof);
        for (int comp = 0; comp < 2; ++comp) {
            const Eigen::VectorXd m = fem::edge_moments(ms, info.entity, k, [&](const Vec2& x) { return c.uS(x)(comp); });
            const int g = l.us() + comp * nus + dof;
            r.dirichlet(g) = m(info.moment);
            r.constrained[static_cast<std::size_t>(g)] = 1;
        }
    }
    for (int dof = 0; dof < sp.u_d.num_dofs(); ++dof) {
        if (!sp.u_d.constrained(dof)) continue;
        const auto& info = sp.u_d.info(dof);
        const Eigen::VectorXd m = fem::edge_moments(md, info.entity, k, [&](const Vec2& x) { return c.pD(x); });
        const int g = l.pd() + dof;
        r.dirichlet(g) = m(info.moment);
        r.constrained[static_cast<std::size_t>(g)] = 1;
    }
    return r;
}

void write_blocks_coo(std::ostream& out, const BlockSystem& sys)
{
    out.precision(17);
    for (const auto& [name, m] : sys.named()) {
        out << "# " << name << ' ' << m->rows() << ' ' << m->cols() << '\n';
        for (int o = 0; o < m->outerSize(); ++o) {
            for (SpMat::InnerIterator it(*m, o); it; ++it) out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
        }
    }
}

}  // namespace sdg::forms
