#include "sdg/femspace/basis.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace sdg;
using namespace sdg::fem;
using namespace sdg::mesh;
using sdg::test::box_spec;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

std::shared_ptr<const StaggeredMesh> distorted(int n, std::uint64_t seed = 3)
{
    return sdg::test::staggered(box_spec(MeshKind::Distorted, n, n, {}, Subdomain::Stokes, Side::None, 0.3, seed));
}

/// Samples a closed-form scalar function.
ScalarSampler scalar_of(const std::function<double(const Vec2&)>& f)
{
    return [f](const std::vector<Vec2>& p) {
        Eigen::MatrixXd v(static_cast<Eigen::Index>(p.size()), 1);
        for (std::size_t q = 0; q < p.size(); ++q) v(static_cast<Eigen::Index>(q), 0) = f(p[q]);
        return v;
    };
}

VectorSampler vector_of(const std::function<Vec2(const Vec2&)>& f)
{
    return [f](const std::vector<Vec2>& p) {
        Eigen::MatrixXd x(static_cast<Eigen::Index>(p.size()), 1), y(static_cast<Eigen::Index>(p.size()), 1);
        for (std::size_t q = 0; q < p.size(); ++q) {
            const Vec2 v = f(p[q]);
            x(static_cast<Eigen::Index>(q), 0) = v.x();
            y(static_cast<Eigen::Index>(q), 0) = v.y();
        }
        return std::make_pair(x, y);
    };
}

}  // namespace

TEST(Quadrature, SmallExamples)
{
    double s = 0.0;
    for (double w : triangle_rule(1).weights) s += w;
    EXPECT_NEAR(s, 0.5, 1e-15);
    const auto& r2 = triangle_rule(2);
    double ix = 0.0;
    for (std::size_t q = 0; q < r2.size(); ++q) ix += r2.weights[q] * r2.points[q].x();
    EXPECT_NEAR(ix, 1.0 / 6.0, 1e-15);
    const auto& s3 = segment_rule(3);
    double i3 = 0.0;
    for (std::size_t q = 0; q < s3.size(); ++q) i3 += s3.weights[q] * std::pow(s3.points[q], 3);
    EXPECT_NEAR(i3, 0.25, 1e-14);
}

TEST(Quadrature, ExactnessUpToStatedDegree)
{
    for (int d = 0; d <= kMaxQuadDegree; ++d) {
        const auto& tr = triangle_rule(d);
        const auto& sr = segment_rule(d);
        for (double w : tr.weights) EXPECT_GT(w, 0.0);
        for (double w : sr.weights) EXPECT_GT(w, 0.0);
        for (std::size_t q = 0; q < tr.size(); ++q) {
            EXPECT_GE(tr.points[q].x(), 0.0);
            EXPECT_GE(tr.points[q].y(), 0.0);
            EXPECT_LE(tr.points[q].x() + tr.points[q].y(), 1.0);
        }
        for (int a = 0; a <= d; ++a) {
            double si = 0.0;
            for (std::size_t q = 0; q < sr.size(); ++q) si += sr.weights[q] * std::pow(sr.points[q], a);
            EXPECT_NEAR(si, 1.0 / (a + 1), 1e-13) << "segment degree " << d << " power " << a;
            for (int b = 0; a + b <= d; ++b) {
                double ti = 0.0;
                for (std::size_t q = 0; q < tr.size(); ++q) {
                    ti += tr.weights[q] * std::pow(tr.points[q].x(), a) * std::pow(tr.points[q].y(), b);
                }
                EXPECT_NEAR(ti, factorial(a) * factorial(b) / factorial(a + b + 2), 1e-13)
                    << "triangle degree " << d << " x^" << a << " y^" << b;
            }
        }
    }
}

TEST(Quadrature, UnsupportedDegree)
{
    EXPECT_THROW(triangle_rule(21), InvalidArgument);
    EXPECT_THROW(segment_rule(-1), InvalidArgument);
}

TEST(Polynomial, ModalFrameIsOrthonormalAndGraded)
{
    for (int k = 0; k <= 4; ++k) {
        const auto& r = reference_modal(k);
        const auto& rule = triangle_rule(2 * k);
        const int n = poly_dim(k);
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
        std::vector<double> v(static_cast<std::size_t>(n));
        for (std::size_t q = 0; q < rule.size(); ++q) {
            monomials(k, rule.points[q], v.data(), nullptr, nullptr);
            const Eigen::VectorXd phi = r * Eigen::Map<Eigen::VectorXd>(v.data(), n);
            g += rule.weights[q] * phi * phi.transpose();
        }
        EXPECT_LT((g - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-10);
        for (int j = 0; j <= k; ++j) {
            EXPECT_EQ(r.topRightCorner(poly_dim(j), n - poly_dim(j)).norm(), 0.0);
        }
    }
}

TEST(Polynomial, LegendreOrthonormalOnUnitInterval)
{
    const auto& r = segment_rule(12);
    for (int m = 0; m <= 5; ++m) {
        for (int n = 0; n <= 5; ++n) {
            double s = 0.0;
            for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * legendre01(m, r.points[q]) * legendre01(n, r.points[q]);
            EXPECT_NEAR(s, m == n ? 1.0 : 0.0, 1e-14);
        }
    }
}

TEST(DofMap, TwoByTwoCounts)
{
    const auto s = sdg::test::staggered(box_spec(MeshKind::Rectangular, 2, 2));
    const DofMap u(*s, SpaceKind::U, 1, {BoundaryTag::GammaS});
    EXPECT_EQ(u.num_free(), 24);
    EXPECT_EQ(u.num_dofs(), 12 * 2 + 16);
    const DofMap v(*s, SpaceKind::V, 1);
    EXPECT_EQ(v.num_dofs(), 64);
    EXPECT_EQ(v.num_free(), 64);
    const DofMap p(*s, SpaceKind::P, 1);
    EXPECT_EQ(p.num_dofs(), 12);
}

TEST(DofMap, LocalCountsMatchPolynomialDimension)
{
    const auto s = distorted(3);
    for (int k = 1; k <= 3; ++k) {
        EXPECT_EQ(DofMap(*s, SpaceKind::U, k).num_local(), poly_dim(k));
        EXPECT_EQ(DofMap(*s, SpaceKind::V, k).num_local(), 2 * poly_dim(k));
        EXPECT_EQ(DofMap(*s, SpaceKind::P, k).num_local(), poly_dim(k));
    }
}

TEST(DofMap, DegreeZeroRejected)
{
    const auto s = distorted(2);
    EXPECT_THROW(DofMap(*s, SpaceKind::U, 0), InvalidArgument);
    EXPECT_THROW(LocalBasis(*s, SpaceKind::V, 0), InvalidArgument);
    EXPECT_THROW(DofMap(*s, SpaceKind::P, 4), InvalidArgument);
}

TEST(DofMap, EdgeDofsSharedExactlyByAdjacentTriangles)
{
    const auto s = distorted(3);
    for (auto kind : {SpaceKind::U, SpaceKind::V}) {
        const DofMap d(*s, kind, 2);
        std::vector<std::vector<int>> owners(static_cast<std::size_t>(d.num_dofs()));
        for (int t = 0; t < s->num_triangles(); ++t) {
            for (int g : d.local(t)) owners[static_cast<std::size_t>(g)].push_back(t);
        }
        for (int g = 0; g < d.num_dofs(); ++g) {
            const auto& info = d.info(g);
            if (info.edge) {
                const auto& e = s->edge(info.entity);
                std::vector<int> expect{e.tri[0]};
                if (e.tri[1] >= 0) expect.push_back(e.tri[1]);
                std::sort(expect.begin(), expect.end());
                EXPECT_EQ(owners[static_cast<std::size_t>(g)], expect);
            } else {
                EXPECT_EQ(owners[static_cast<std::size_t>(g)].size(), 1u);
            }
        }
    }
}

TEST(LocalBasis, UnisolvenceOnRandomTriangles)
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int checked = 0;
    while (checked < 100) {
        std::vector<Vec2> vs{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
        if (cross2(vs[1] - vs[0], vs[2] - vs[0]) < 0) std::swap(vs[1], vs[2]);
        if (std::abs(cross2(vs[1] - vs[0], vs[2] - vs[0])) < 0.05) continue;
        auto pm = std::make_shared<const PrimalMesh>(
            sdg::test::tagged_mesh(vs, {{0, 1, 2}}, Subdomain::Stokes, BoundaryTag::GammaS));
        const StaggeredMesh s(pm);
        for (int k = 1; k <= 3; ++k) {
            const LocalBasis bu(s, SpaceKind::U, k), bv(s, SpaceKind::V, k);
            EXPECT_LT(bu.max_condition(), 1e8);
            EXPECT_LT(bv.max_condition(), 1e8);
            for (int t = 0; t < s.num_triangles(); ++t) {
                const Eigen::MatrixXd du = bu.functionals(t, ScalarSampler([&](const std::vector<Vec2>& p) {
                    return bu.eval_scalar(t, p).val;
                }));
                EXPECT_LT((du - Eigen::MatrixXd::Identity(du.rows(), du.cols())).cwiseAbs().maxCoeff(), 1e-9);
                const Eigen::MatrixXd dv = bv.functionals(t, VectorSampler([&](const std::vector<Vec2>& p) {
                    const auto v = bv.eval_vector(t, p);
                    return std::make_pair(v.vx, v.vy);
                }));
                EXPECT_LT((dv - Eigen::MatrixXd::Identity(dv.rows(), dv.cols())).cwiseAbs().maxCoeff(), 1e-9);
            }
        }
        ++checked;
    }
}

TEST(LocalBasis, ConstantsAndLinearsReproduced)
{
    const auto s = distorted(3);
    const LocalBasis b(*s, SpaceKind::U, 1);
    for (int t = 0; t < s->num_triangles(); ++t) {
        const Eigen::VectorXd one = b.functionals(t, scalar_of([](const Vec2&) { return 1.0; }));
        const Eigen::VectorXd lin = b.functionals(t, scalar_of([](const Vec2& x) { return x.x(); }));
        const Vec2 c = (s->triangle_vertex(t, 0) + s->triangle_vertex(t, 1) + s->triangle_vertex(t, 2)) / 3.0;
        const auto vals = b.eval_scalar(t, {s->triangle_vertex(t, 1), c});
        for (int q = 0; q < 2; ++q) {
            EXPECT_NEAR(vals.val.row(q).dot(one), 1.0, 1e-12);
            EXPECT_NEAR(vals.gx.row(q).dot(one), 0.0, 1e-10);
            EXPECT_NEAR(vals.gy.row(q).dot(one), 0.0, 1e-10);
        }
        EXPECT_NEAR(vals.val.row(1).dot(lin), c.x(), 1e-12);
        EXPECT_NEAR(vals.gx.row(1).dot(lin), 1.0, 1e-10);
    }
}

TEST(LocalBasis, ReferencePointEvaluation)
{
    const auto s = distorted(2);
    const LocalBasis b(*s, SpaceKind::U, 2);
    const Eigen::VectorXd c = b.functionals(3, scalar_of([](const Vec2& x) { return x.x() * x.y(); }));
    const auto r = b.eval_basis(3, {Vec2(0, 0), Vec2(1.0 / 3, 1.0 / 3)});
    const Vec2 v0 = s->triangle_vertex(3, 0);
    EXPECT_NEAR(r.val.row(0).dot(c), v0.x() * v0.y(), 1e-12);
    EXPECT_NEAR(r.gx.row(0).dot(c), v0.y(), 1e-10);
    EXPECT_THROW(b.eval_basis(-1, {Vec2(0, 0)}), InvalidArgument);
    EXPECT_THROW(b.eval_basis(s->num_triangles(), {Vec2(0, 0)}), InvalidArgument);
    EXPECT_THROW(b.eval_basis(0, {Vec2(0.8, 0.8)}), InvalidArgument);
}

TEST(LocalBasis, PolynomialReproductionAllDegrees)
{
    const auto s = distorted(3, 5);
    for (int k = 1; k <= 3; ++k) {
        const LocalBasis bu(*s, SpaceKind::U, k), bv(*s, SpaceKind::V, k), bp(*s, SpaceKind::P, k);
        const auto f = [k](const Vec2& x) { return std::pow(x.x() - 0.3, k) + 2.0 * std::pow(x.y(), k - 1) * x.x() - 0.5; };
        const auto g = [k](const Vec2& x) { return Vec2(std::pow(x.y(), k), std::pow(x.x() + x.y(), k) - 1.0); };
        for (int t = 0; t < s->num_triangles(); ++t) {
            const Eigen::VectorXd cu = bu.functionals(t, scalar_of(f));
            const Eigen::VectorXd cv = bv.functionals(t, vector_of(g));
            const Vec2 p = 0.2 * s->triangle_vertex(t, 0) + 0.5 * s->triangle_vertex(t, 1) + 0.3 * s->triangle_vertex(t, 2);
            EXPECT_NEAR(bu.eval_scalar(t, {p}).val.row(0).dot(cu), f(p), 1e-11);
            const auto vv = bv.eval_vector(t, {p});
            EXPECT_NEAR(vv.vx.row(0).dot(cv), g(p).x(), 1e-11);
            EXPECT_NEAR(vv.vy.row(0).dot(cv), g(p).y(), 1e-11);
        }
        for (int c = 0; c < s->num_cells(); ++c) {
            const Eigen::VectorXd cp = bp.cell_moments(c, scalar_of(f));
            const int t = s->cell_triangles(c)[1];
            const Vec2 p = (s->triangle_vertex(t, 0) + s->triangle_vertex(t, 1) + s->triangle_vertex(t, 2)) / 3.0;
            EXPECT_NEAR(bp.eval_scalar(t, {p}).val.row(0).dot(cp), f(p), 1e-11);
        }
    }
}

TEST(LocalBasis, StaggeredContinuityOfRandomFields)
{
    const auto s = distorted(4, 9);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    for (int k = 1; k <= 2; ++k) {
        const DofMap du(*s, SpaceKind::U, k), dv(*s, SpaceKind::V, k);
        const LocalBasis bu(*s, SpaceKind::U, k), bv(*s, SpaceKind::V, k);
        Eigen::VectorXd xu(du.num_dofs()), xv(dv.num_dofs());
        for (auto& c : xu) c = nd(rng);
        for (auto& c : xv) c = nd(rng);
        const auto local = [](const DofMap& d, const Eigen::VectorXd& x, int t) {
            Eigen::VectorXd c(d.num_local());
            const auto ids = d.local(t);
            for (int i = 0; i < d.num_local(); ++i) c(i) = x(ids[static_cast<std::size_t>(i)]);
            return c;
        };
        for (int e : s->interior_primal_edges()) {
            const auto& se = s->edge(e);
            const std::vector<Vec2> pts{s->edge_point(e, 0.1), s->edge_point(e, 0.77)};
            const Eigen::VectorXd a = bu.eval_scalar(se.tri[0], pts).val * local(du, xu, se.tri[0]);
            const Eigen::VectorXd b = bu.eval_scalar(se.tri[1], pts).val * local(du, xu, se.tri[1]);
            EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-11);
        }
        for (int e : s->dual_edges()) {
            const auto& se = s->edge(e);
            const std::vector<Vec2> pts{s->edge_point(e, 0.25), s->edge_point(e, 0.9)};
            const auto va = bv.eval_vector(se.tri[0], pts), vb = bv.eval_vector(se.tri[1], pts);
            const Eigen::VectorXd ca = local(dv, xv, se.tri[0]), cb = local(dv, xv, se.tri[1]);
            const Eigen::VectorXd na = se.normal.x() * (va.vx * ca) + se.normal.y() * (va.vy * ca);
            const Eigen::VectorXd nb = se.normal.x() * (vb.vx * cb) + se.normal.y() * (vb.vy * cb);
            EXPECT_LT((na - nb).cwiseAbs().maxCoeff(), 1e-11);
        }
    }
}
