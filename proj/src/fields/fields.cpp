#include "sdg/fields/fields.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace sdg::fields {

using fem::SpaceKind;
using mesh::StaggeredMesh;

NormKind parse_norm_kind(const std::string& name)
{
    if (name == "L2") return NormKind::L2;
    if (name == "H" || name == "h") return NormKind::H;
    if (name == "ZS") return NormKind::ZS;
    if (name == "ZD") return NormKind::ZD;
    if (name == "XS'" || name == "XSPrime") return NormKind::XSPrime;
    if (name == "P") return NormKind::P;
    throw InvalidArgument("unknown norm kind '" + name + "'");
}

std::string to_string(NormKind kind)
{
    switch (kind) {
    case NormKind::L2: return "L2";
    case NormKind::H: return "H";
    case NormKind::ZS: return "ZS";
    case NormKind::ZD: return "ZD";
    case NormKind::XSPrime: return "XS'";
    case NormKind::P: return "P";
    }
    return "L2";
}

namespace {

fem::ScalarSampler scalar_sampler(const std::vector<ScalarFn>& comps)
{
    return [&comps](const std::vector<Vec2>& pts) {
        Eigen::MatrixXd v(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(comps.size()));
        for (std::size_t q = 0; q < pts.size(); ++q) {
            for (std::size_t c = 0; c < comps.size(); ++c) {
                v(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(c)) = comps[c](pts[q]);
            }
        }
        return v;
    };
}

void store(DiscreteField& f, int t, const Eigen::MatrixXd& local)
{
    const auto ids = f.dofs->local(t);
    const Eigen::Index n = f.num_dofs();
    for (Eigen::Index c = 0; c < local.cols(); ++c) {
        for (std::size_t i = 0; i < ids.size(); ++i) f.coef(c * n + ids[i]) = local(static_cast<Eigen::Index>(i), c);
    }
}

void require(bool ok, const std::string& what)
{
    if (!ok) throw InvalidArgument(what);
}

Eigen::VectorXd wvec(const std::vector<double>& w)
{
    return Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

/// Field values (and gradients for scalar spaces) of one component at points.
struct Sample {
    Eigen::VectorXd v, gx, gy;  ///< scalar spaces
    Eigen::VectorXd vx, vy;     ///< V
};

Sample sample(const DiscreteField& f, int t, int comp, const std::vector<Vec2>& pts)
{
    Sample s;
    const Eigen::VectorXd c = f.local(t, comp);
    if (f.kind() == SpaceKind::V) {
        const auto v = f.basis->eval_vector(t, pts);
        s.vx = v.vx * c;
        s.vy = v.vy * c;
    } else {
        const auto v = f.basis->eval_scalar(t, pts);
        s.v = v.val * c;
        s.gx = v.gx * c;
        s.gy = v.gy * c;
    }
    return s;
}

/// Subtracts the reference at the points (value, gradient or vector).
void subtract(Sample& s, const Reference& ref, int comp, const std::vector<Vec2>& pts, bool want_grad)
{
    const auto c = static_cast<std::size_t>(comp);
    for (std::size_t q = 0; q < pts.size(); ++q) {
        const auto qi = static_cast<Eigen::Index>(q);
        if (c < ref.value.size() && ref.value[c] && s.v.size() > 0) s.v(qi) -= ref.value[c](pts[q]);
        if (want_grad && c < ref.grad.size() && ref.grad[c] && s.gx.size() > 0) {
            const Vec2 g = ref.grad[c](pts[q]);
            s.gx(qi) -= g.x();
            s.gy(qi) -= g.y();
        }
        if (c < ref.vec.size() && ref.vec[c] && s.vx.size() > 0) {
            const Vec2 g = ref.vec[c](pts[q]);
            s.vx(qi) -= g.x();
            s.vy(qi) -= g.y();
        }
    }
}

void check_reference(const DiscreteField& f, const Reference& ref, bool need_grad)
{
    const auto n = static_cast<std::size_t>(f.components);
    if (f.kind() == SpaceKind::V) {
        require(ref.value.empty() && ref.grad.empty(), "compute_norm: vector field takes a vector reference");
        require(ref.vec.empty() || ref.vec.size() == n, "compute_norm: reference component count mismatch");
    } else {
        require(ref.vec.empty(), "compute_norm: scalar field takes a scalar reference");
        require(ref.value.empty() || ref.value.size() == n, "compute_norm: reference component count mismatch");
        if (need_grad) {
            require(ref.value.empty() == ref.grad.empty(), "compute_norm: this norm needs the reference gradient");
            require(ref.grad.empty() || ref.grad.size() == n, "compute_norm: reference component count mismatch");
        }
    }
}

}  // namespace

DiscreteField interpolate_Ih(const fem::DofMap& dofs, const fem::LocalBasis& basis, const std::vector<ScalarFn>& comps)
{
    require(dofs.kind() == SpaceKind::U && basis.kind() == SpaceKind::U, "interpolate_Ih: U space expected");
    require(!comps.empty(), "interpolate_Ih: no components");
    DiscreteField f(dofs, basis, static_cast<int>(comps.size()));
    const auto sampler = scalar_sampler(comps);
    for (int t = 0; t < basis.mesh().num_triangles(); ++t) store(f, t, basis.functionals(t, sampler));
    return f;
}

DiscreteField interpolate_Jh(const fem::DofMap& dofs, const fem::LocalBasis& basis, const std::vector<VectorFn>& comps)
{
    require(dofs.kind() == SpaceKind::V && basis.kind() == SpaceKind::V, "interpolate_Jh: V space expected");
    require(!comps.empty(), "interpolate_Jh: no components");
    DiscreteField f(dofs, basis, static_cast<int>(comps.size()));
    const fem::VectorSampler sampler = [&comps](const std::vector<Vec2>& pts) {
        const auto np = static_cast<Eigen::Index>(pts.size()), nc = static_cast<Eigen::Index>(comps.size());
        Eigen::MatrixXd fx(np, nc), fy(np, nc);
        for (Eigen::Index q = 0; q < np; ++q) {
            for (Eigen::Index c = 0; c < nc; ++c) {
                const Vec2 v = comps[static_cast<std::size_t>(c)](pts[static_cast<std::size_t>(q)]);
                fx(q, c) = v.x();
                fy(q, c) = v.y();
            }
        }
        return std::make_pair(fx, fy);
    };
    for (int t = 0; t < basis.mesh().num_triangles(); ++t) store(f, t, basis.functionals(t, sampler));
    return f;
}

DiscreteField interpolate_pih(const fem::DofMap& dofs, const fem::LocalBasis& basis, const std::vector<ScalarFn>& comps)
{
    require(dofs.kind() == SpaceKind::U && basis.kind() == SpaceKind::U, "interpolate_pih: U space expected");
    require(!comps.empty(), "interpolate_pih: no components");
    const auto& mesh = basis.mesh();
    const int k = basis.degree();
    const int dim = fem::poly_dim(k);
    DiscreteField f(dofs, basis, static_cast<int>(comps.size()));
    std::vector<double> val(static_cast<std::size_t>(dim));
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const fem::AffineFrame frame = fem::triangle_frame(mesh, t);
        const Vec2 a = mesh.triangle_vertex(t, 0), b = mesh.triangle_vertex(t, 1), c = mesh.triangle_vertex(t, 2);
        Eigen::MatrixXd vand(dim, dim), rhs(dim, static_cast<Eigen::Index>(comps.size()));
        int row = 0;
        for (int i = 0; i <= k; ++i) {
            for (int j = 0; j <= k - i; ++j) {
                const Vec2 x = a + (static_cast<double>(i) / k) * (b - a) + (static_cast<double>(j) / k) * (c - a);
                fem::monomials(k, frame.local(x), val.data(), nullptr, nullptr);
                for (int m = 0; m < dim; ++m) vand(row, m) = val[static_cast<std::size_t>(m)];
                for (std::size_t q = 0; q < comps.size(); ++q) rhs(row, static_cast<Eigen::Index>(q)) = comps[q](x);
                ++row;
            }
        }
        const Eigen::MatrixXd coef = vand.partialPivLu().solve(rhs);
        const fem::ScalarSampler lagrange = [&](const std::vector<Vec2>& pts) {
            Eigen::MatrixXd out(static_cast<Eigen::Index>(pts.size()), coef.cols());
            for (std::size_t q = 0; q < pts.size(); ++q) {
                fem::monomials(k, frame.local(pts[q]), val.data(), nullptr, nullptr);
                const Eigen::Map<const Eigen::RowVectorXd> mv(val.data(), dim);
                out.row(static_cast<Eigen::Index>(q)) = mv * coef;
            }
            return out;
        };
        store(f, t, basis.functionals(t, lagrange));
    }
    return f;
}

DiscreteField project_P(const fem::DofMap& dofs, const fem::LocalBasis& basis, const ScalarFn& fn)
{
    require(dofs.kind() == SpaceKind::P && basis.kind() == SpaceKind::P, "project_P: P space expected");
    DiscreteField f(dofs, basis, 1);
    const std::vector<ScalarFn> comps{fn};
    const auto sampler = scalar_sampler(comps);
    const auto& mesh = basis.mesh();
    for (int c = 0; c < mesh.num_cells(); ++c) store(f, mesh.cell_triangles(c).front(), basis.cell_moments(c, sampler));
    return f;
}

double compute_norm(const DiscreteField& f, NormKind kind, const Reference& ref)
{
    f.check();
    const StaggeredMesh& mesh = f.basis->mesh();
    const int k = f.degree();
    const bool stokes = mesh.subdomain() == mesh::Subdomain::Stokes;
    const SpaceKind sk = f.kind();
    switch (kind) {
    case NormKind::L2: break;
    case NormKind::H:
    case NormKind::ZS:
        require(sk == SpaceKind::U && stokes, "compute_norm: " + to_string(kind) + " applies to Stokes U fields");
        require(kind == NormKind::H || f.components == 1, "compute_norm: ZS takes a single component");
        break;
    case NormKind::ZD:
        require(sk == SpaceKind::U && !stokes && f.components == 1, "compute_norm: ZD applies to scalar Darcy U fields");
        break;
    case NormKind::XSPrime:
        require(sk == SpaceKind::V && stokes, "compute_norm: XS' applies to Stokes V fields");
        break;
    case NormKind::P:
        require(sk == SpaceKind::P && stokes, "compute_norm: P applies to Stokes P_h fields");
        break;
    }
    const bool grad_norm = kind == NormKind::H || kind == NormKind::ZS || kind == NormKind::ZD;
    check_reference(f, ref, grad_norm);

    const double power = kind == NormKind::ZD ? 1.5 : 2.0;
    double vol = 0.0, edge = 0.0;
    std::vector<Vec2> pts;
    std::vector<double> w;
    for (int c = 0; c < f.components; ++c) {
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            fem::triangle_quadrature(mesh, t, fem::volume_degree(k), pts, w);
            Sample s = sample(f, t, c, pts);
            subtract(s, ref, c, pts, grad_norm);
            Eigen::ArrayXd integrand;
            if (grad_norm) {
                integrand = (s.gx.array().square() + s.gy.array().square()).sqrt().pow(power);
            } else if (sk == SpaceKind::V) {
                integrand = s.vx.array().square() + s.vy.array().square();
            } else {
                integrand = s.v.array().square();
            }
            vol += (wvec(w).array() * integrand).sum();
        }
        if (kind == NormKind::L2) continue;
        for (int e : mesh.dual_edges()) {
            const auto& ed = mesh.edge(e);
            fem::edge_quadrature(mesh, e, fem::edge_degree(k), pts, w);
            Sample s0 = sample(f, ed.tri[0], c, pts);
            Eigen::ArrayXd integrand;
            double scale = 1.0;
            if (grad_norm) {
                // The reference is continuous, so the jump is that of the field.
                const Sample s1 = sample(f, ed.tri[1], c, pts);
                integrand = (s0.v - s1.v).array().abs().pow(power);
                scale = std::pow(ed.length, kind == NormKind::ZD ? -0.5 : -1.0);
            } else if (sk == SpaceKind::V) {
                subtract(s0, ref, c, pts, false);
                integrand = (ed.normal.x() * s0.vx + ed.normal.y() * s0.vy).array().square();
                scale = ed.length;
            } else {
                subtract(s0, ref, c, pts, false);
                integrand = s0.v.array().square();
                scale = ed.length;
            }
            edge += scale * (wvec(w).array() * integrand).sum();
        }
    }
    return std::pow(vol + edge, 1.0 / power);
}

double lp_norm(const DiscreteField& f, double p)
{
    f.check();
    require(p >= 1.0, "lp_norm: p must be at least 1");
    const StaggeredMesh& mesh = f.basis->mesh();
    double sum = 0.0;
    std::vector<Vec2> pts;
    std::vector<double> w;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        fem::triangle_quadrature(mesh, t, fem::volume_degree(f.degree()), pts, w);
        Eigen::ArrayXd mag2 = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(pts.size()));
        for (int c = 0; c < f.components; ++c) {
            const Sample s = sample(f, t, c, pts);
            mag2 += f.kind() == SpaceKind::V ? (s.vx.array().square() + s.vy.array().square()).eval() : s.v.array().square().eval();
        }
        sum += (wvec(w).array() * mag2.sqrt().pow(p)).sum();
    }
    return std::pow(sum, 1.0 / p);
}

DiscreteField difference(const DiscreteField& a, const DiscreteField& b)
{
    a.check();
    b.check();
    require(a.dofs == b.dofs && a.components == b.components, "difference: fields live on different spaces");
    DiscreteField d = a;
    d.coef -= b.coef;
    return d;
}

namespace {

std::vector<ScalarFn> uS_components(const cases::ManufacturedCase& c)
{
    return {[&c](const Vec2& x) { return c.uS(x).x(); }, [&c](const Vec2& x) { return c.uS(x).y(); }};
}

std::vector<VectorFn> sigma_rows(const cases::ManufacturedCase& c)
{
    const double nu = c.params.nu;
    return {[&c, nu](const Vec2& x) { return Vec2(-nu * c.grad_uS(x).row(0).transpose()); },
            [&c, nu](const Vec2& x) { return Vec2(-nu * c.grad_uS(x).row(1).transpose()); }};
}

}  // namespace

ErrorRecord compute_errors(const solver::CoupledSolution& sol, const cases::ManufacturedCase& c,
                           const forms::CoupledSpaces& sp)
{
    if (!c.has_exact) throw InvalidArgument("compute_errors: case '" + c.name + "' has no exact solution");
    ErrorRecord r;
    const auto us = uS_components(c);
    const std::vector<VectorFn> us_grad{[&c](const Vec2& x) { return Vec2(c.grad_uS(x).row(0).transpose()); },
                                        [&c](const Vec2& x) { return Vec2(c.grad_uS(x).row(1).transpose()); }};
    const ScalarFn pS = [&c](const Vec2& x) { return c.pS(x); };
    const ScalarFn pD = [&c](const Vec2& x) { return c.pD(x); };
    const VectorFn grad_pD = [&c](const Vec2& x) { return c.grad_pD(x); };
    const VectorFn uD = [&c](const Vec2& x) { return c.uD(x); };

    r.sigma_L2 = compute_norm(sol.sigma, NormKind::L2, Reference::vector(sigma_rows(c)));
    r.uS_L2 = compute_norm(sol.uS, NormKind::L2, Reference::scalar(us));
    r.pS_L2 = compute_norm(sol.pS, NormKind::L2, Reference::scalar({pS}));
    r.uD_L2 = compute_norm(sol.uD, NormKind::L2, Reference::vector({uD}));
    r.pD_L2 = compute_norm(sol.pD, NormKind::L2, Reference::scalar({pD}));
    r.uS_h = compute_norm(sol.uS, NormKind::H, Reference::scalar(us, us_grad));
    r.pD_ZD = compute_norm(sol.pD, NormKind::ZD, Reference::scalar({pD}, {grad_pD}));
    r.super_uS = compute_norm(difference(interpolate_Ih(sp.u_s, sp.bu_s, us), sol.uS), NormKind::H);
    r.super_pD = compute_norm(difference(interpolate_Ih(sp.u_d, sp.bu_d, {pD}), sol.pD), NormKind::ZD);
    return r;
}

solver::CoupledSolution interpolate_exact(const cases::ManufacturedCase& c, const forms::CoupledSpaces& sp)
{
    const auto l = forms::layout_of(sp);
    Eigen::VectorXd full(l.size());
    full.segment(l.sigma(), 2 * l.n_sigma) = interpolate_Jh(sp.v_s, sp.bv_s, sigma_rows(c)).coef;
    full.segment(l.us(), 2 * l.n_us) = interpolate_Ih(sp.u_s, sp.bu_s, uS_components(c)).coef;
    full.segment(l.ps(), l.n_ps) = project_P(sp.p_s, sp.bp_s, [&c](const Vec2& x) { return c.pS(x); }).coef;
    full.segment(l.ud(), l.n_ud) = interpolate_Jh(sp.v_d, sp.bv_d, {[&c](const Vec2& x) { return c.uD(x); }}).coef;
    full.segment(l.pd(), l.n_pd) = interpolate_Ih(sp.u_d, sp.bu_d, {[&c](const Vec2& x) { return c.pD(x); }}).coef;
    return solver::split_solution(sp, full);
}

}  // namespace sdg::fields
