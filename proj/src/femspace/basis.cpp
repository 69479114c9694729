#include "sdg/femspace/basis.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace sdg::fem {

AffineFrame triangle_frame(const mesh::StaggeredMesh& mesh, int t)
{
    const Vec2 a = mesh.triangle_vertex(t, 0);
    Mat2 j;
    j.col(0) = mesh.triangle_vertex(t, 1) - a;
    j.col(1) = mesh.triangle_vertex(t, 2) - a;
    AffineFrame f;
    f.origin = a;
    f.inv = j.inverse();
    return f;
}

void triangle_quadrature(const mesh::StaggeredMesh& mesh, int t, int degree, std::vector<Vec2>& pts,
                         std::vector<double>& wts)
{
    const TriangleRule& r = triangle_rule(degree);
    const Vec2 a = mesh.triangle_vertex(t, 0);
    const Vec2 b = mesh.triangle_vertex(t, 1) - a;
    const Vec2 c = mesh.triangle_vertex(t, 2) - a;
    const double jac = 2.0 * mesh.triangle(t).area;
    pts.resize(r.size());
    wts.resize(r.size());
    for (std::size_t q = 0; q < r.size(); ++q) {
        pts[q] = a + r.points[q].x() * b + r.points[q].y() * c;
        wts[q] = r.weights[q] * jac;
    }
}

void edge_quadrature(const mesh::StaggeredMesh& mesh, int e, int degree, std::vector<Vec2>& pts,
                     std::vector<double>& wts, std::vector<double>* s)
{
    const SegmentRule& r = segment_rule(degree);
    const double len = mesh.edge(e).length;
    pts.resize(r.size());
    wts.resize(r.size());
    if (s) s->resize(r.size());
    for (std::size_t q = 0; q < r.size(); ++q) {
        pts[q] = mesh.edge_point(e, r.points[q]);
        wts[q] = r.weights[q] * len;
        if (s) (*s)[q] = r.points[q];
    }
}

Eigen::VectorXd edge_moments(const mesh::StaggeredMesh& mesh, int e, int k, const std::function<double(const Vec2&)>& f)
{
    std::vector<Vec2> pts;
    std::vector<double> wts, s;
    edge_quadrature(mesh, e, edge_degree(k), pts, wts, &s);
    const double scale = 1.0 / std::sqrt(mesh.edge(e).length);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(k + 1);
    for (std::size_t q = 0; q < pts.size(); ++q) {
        const double fq = f(pts[q]);
        for (int m = 0; m <= k; ++m) out(m) += wts[q] * scale * legendre01(m, s[q]) * fq;
    }
    return out;
}

namespace {

/// Physical orthonormal modal set of degree k on triangle t.
PolySet modal_set(const mesh::StaggeredMesh& mesh, int t, int k)
{
    PolySet ps;
    ps.frame = triangle_frame(mesh, t);
    ps.k = k;
    ps.coef = reference_modal(k) / std::sqrt(2.0 * mesh.triangle(t).area);
    return ps;
}

double condition(const Eigen::MatrixXd& d)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(d);
    const auto& sv = svd.singularValues();
    return sv(0) / sv(sv.size() - 1);
}

}  // namespace

LocalBasis::LocalBasis(const mesh::StaggeredMesh& mesh, SpaceKind kind, int k) : mesh_(&mesh), kind_(kind), k_(k)
{
    if (k < kMinDegree || k > kMaxDegree) {
        throw InvalidArgument("polynomial degree " + std::to_string(k) + " unsupported (1..3)");
    }
    const int dim = poly_dim(k);
    if (kind == SpaceKind::P) {
        nloc_ = dim;
        const auto& pm = mesh.primal();
        for (int c = 0; c < mesh.num_cells(); ++c) {
            PolySet raw;
            raw.k = k;
            raw.frame.origin = pm.cell_centroid(c);
            raw.frame.inv = Mat2::Identity() / pm.cell_diameter(c);
            raw.coef = Eigen::MatrixXd::Identity(dim, dim);
            Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
            std::vector<Vec2> pts;
            std::vector<double> wts;
            Eigen::MatrixXd val;
            for (int t : mesh.cell_triangles(c)) {
                triangle_quadrature(mesh, t, 2 * k, pts, wts);
                raw.eval(pts, val);
                for (std::size_t q = 0; q < pts.size(); ++q) {
                    gram.noalias() += wts[q] * val.row(static_cast<Eigen::Index>(q)).transpose() *
                                      val.row(static_cast<Eigen::Index>(q));
                }
            }
            Eigen::LLT<Eigen::MatrixXd> llt(gram);
            if (llt.info() != Eigen::Success) throw AssemblyError("cell " + std::to_string(c) + ": singular P mass matrix");
            const Eigen::MatrixXd l = llt.matrixL();
            raw.coef = l.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(dim, dim));
            max_cond_ = std::max(max_cond_, condition(gram));
            sets_.push_back(std::move(raw));
        }
        return;
    }

    nloc_ = kind == SpaceKind::U ? dim : 2 * dim;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const PolySet modal = modal_set(mesh, t, k);
        Eigen::MatrixXd d;
        if (kind == SpaceKind::U) {
            d = functionals(t, ScalarSampler([&](const std::vector<Vec2>& p) {
                Eigen::MatrixXd v;
                modal.eval(p, v);
                return v;
            }));
        } else {
            d = functionals(t, VectorSampler([&](const std::vector<Vec2>& p) {
                Eigen::MatrixXd v;
                modal.eval(p, v);
                const Eigen::Index n = v.rows();
                Eigen::MatrixXd fx = Eigen::MatrixXd::Zero(n, 2 * dim), fy = Eigen::MatrixXd::Zero(n, 2 * dim);
                fx.leftCols(dim) = v;
                fy.rightCols(dim) = v;
                return std::make_pair(fx, fy);
            }));
        }
        max_cond_ = std::max(max_cond_, condition(d));
        const Eigen::MatrixXd x = d.partialPivLu().inverse();
        if (kind == SpaceKind::U) {
            PolySet s = modal;
            s.coef = x.transpose() * modal.coef;
            sets_.push_back(std::move(s));
        } else {
            PolySet sx = modal, sy = modal;
            sx.coef = x.topRows(dim).transpose() * modal.coef;
            sy.coef = x.bottomRows(dim).transpose() * modal.coef;
            sets_.push_back(std::move(sx));
            sets_.push_back(std::move(sy));
        }
    }
}

const PolySet& LocalBasis::scalar_set(int t) const
{
    if (kind_ == SpaceKind::V) throw InvalidArgument("scalar_set: V is a vector space");
    if (t < 0 || t >= mesh_->num_triangles()) throw InvalidArgument("unknown triangle id " + std::to_string(t));
    const int idx = kind_ == SpaceKind::P ? mesh_->triangle(t).cell : t;
    return sets_[static_cast<std::size_t>(idx)];
}

const PolySet& LocalBasis::vector_set(int t, int comp) const
{
    if (kind_ != SpaceKind::V) throw InvalidArgument("vector_set: not a V space");
    if (t < 0 || t >= mesh_->num_triangles()) throw InvalidArgument("unknown triangle id " + std::to_string(t));
    return sets_[static_cast<std::size_t>(2 * t + comp)];
}

ScalarValues LocalBasis::eval_scalar(int t, const std::vector<Vec2>& pts) const
{
    ScalarValues out;
    scalar_set(t).eval(pts, out.val, &out.gx, &out.gy);
    return out;
}

VectorValues LocalBasis::eval_vector(int t, const std::vector<Vec2>& pts) const
{
    VectorValues out;
    Eigen::MatrixXd xx, yy;
    vector_set(t, 0).eval(pts, out.vx, &xx, nullptr);
    vector_set(t, 1).eval(pts, out.vy, nullptr, &yy);
    out.div = xx + yy;
    return out;
}

ScalarValues LocalBasis::eval_basis(int t, const std::vector<Vec2>& ref_pts) const
{
    if (t < 0 || t >= mesh_->num_triangles()) throw InvalidArgument("unknown triangle id " + std::to_string(t));
    const Vec2 a = mesh_->triangle_vertex(t, 0);
    const Vec2 b = mesh_->triangle_vertex(t, 1) - a;
    const Vec2 c = mesh_->triangle_vertex(t, 2) - a;
    std::vector<Vec2> pts;
    for (const auto& r : ref_pts) {
        if (r.x() < -1e-14 || r.y() < -1e-14 || r.x() + r.y() > 1.0 + 1e-14) {
            throw InvalidArgument("reference point outside the reference triangle");
        }
        pts.push_back(a + r.x() * b + r.y() * c);
    }
    if (kind_ == SpaceKind::V) {
        const VectorValues v = eval_vector(t, pts);
        return {v.vx, v.vy, v.div};
    }
    return eval_scalar(t, pts);
}

Eigen::MatrixXd LocalBasis::functionals(int t, const ScalarSampler& f) const
{
    if (kind_ != SpaceKind::U) throw InvalidArgument("scalar functionals exist for U only");
    const auto& tri = mesh_->triangle(t);
    const int ne = k_ + 1;
    const int ni = poly_dim(k_ - 1);
    std::vector<Vec2> pts;
    std::vector<double> wts, s;

    edge_quadrature(*mesh_, tri.primal_edge, edge_degree(k_), pts, wts, &s);
    const Eigen::MatrixXd fe = f(pts);
    Eigen::MatrixXd out(nloc_, fe.cols());
    const double scale = 1.0 / std::sqrt(mesh_->edge(tri.primal_edge).length);
    for (int m = 0; m < ne; ++m) {
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(fe.cols());
        for (std::size_t q = 0; q < pts.size(); ++q) {
            acc += (wts[q] * scale * legendre01(m, s[q])) * fe.row(static_cast<Eigen::Index>(q));
        }
        out.row(m) = acc;
    }

    triangle_quadrature(*mesh_, t, volume_degree(k_), pts, wts);
    const Eigen::MatrixXd fi = f(pts);
    const PolySet modal = modal_set(*mesh_, t, k_ - 1);
    Eigen::MatrixXd mv;
    modal.eval(pts, mv);
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(wts.data(), static_cast<Eigen::Index>(wts.size()));
    out.bottomRows(ni) = mv.transpose() * w.asDiagonal() * fi;
    return out;
}

Eigen::MatrixXd LocalBasis::functionals(int t, const VectorSampler& f) const
{
    if (kind_ != SpaceKind::V) throw InvalidArgument("vector functionals exist for V only");
    const auto& tri = mesh_->triangle(t);
    const int ne = k_ + 1;
    const int ni = poly_dim(k_ - 1);
    std::vector<Vec2> pts;
    std::vector<double> wts, s;
    Eigen::MatrixXd out;

    for (int j = 0; j < 2; ++j) {
        const int e = tri.dual_edges[static_cast<std::size_t>(j)];
        const auto& edge = mesh_->edge(e);
        edge_quadrature(*mesh_, e, edge_degree(k_), pts, wts, &s);
        const auto [fx, fy] = f(pts);
        if (out.size() == 0) out.resize(nloc_, fx.cols());
        const Eigen::MatrixXd fn = edge.normal.x() * fx + edge.normal.y() * fy;
        const double scale = 1.0 / std::sqrt(edge.length);
        for (int m = 0; m < ne; ++m) {
            Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(fn.cols());
            for (std::size_t q = 0; q < pts.size(); ++q) {
                acc += (wts[q] * scale * legendre01(m, s[q])) * fn.row(static_cast<Eigen::Index>(q));
            }
            out.row(j * ne + m) = acc;
        }
    }

    triangle_quadrature(*mesh_, t, volume_degree(k_), pts, wts);
    const auto [fx, fy] = f(pts);
    const PolySet modal = modal_set(*mesh_, t, k_ - 1);
    Eigen::MatrixXd mv;
    modal.eval(pts, mv);
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(wts.data(), static_cast<Eigen::Index>(wts.size()));
    const Eigen::MatrixXd mw = mv.transpose() * w.asDiagonal();
    out.middleRows(2 * ne, ni) = mw * fx;
    out.bottomRows(ni) = mw * fy;
    return out;
}

Eigen::MatrixXd LocalBasis::cell_moments(int c, const ScalarSampler& f) const
{
    if (kind_ != SpaceKind::P) throw InvalidArgument("cell_moments exist for P only");
    const PolySet& set = sets_[static_cast<std::size_t>(c)];
    Eigen::MatrixXd out;
    std::vector<Vec2> pts;
    std::vector<double> wts;
    Eigen::MatrixXd val;
    for (int t : mesh_->cell_triangles(c)) {
        triangle_quadrature(*mesh_, t, volume_degree(k_), pts, wts);
        const Eigen::MatrixXd fv = f(pts);
        set.eval(pts, val);
        const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(wts.data(), static_cast<Eigen::Index>(wts.size()));
        const Eigen::MatrixXd part = val.transpose() * w.asDiagonal() * fv;
        if (out.size() == 0) {
            out = part;
        } else {
            out += part;
        }
    }
    return out;
}

}  // namespace sdg::fem
