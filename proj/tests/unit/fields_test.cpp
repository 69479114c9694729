#include "sdg/fields/fields.hpp"
#include "sdg/verify/verify.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace sdg {
namespace {

using fields::NormKind;
using fields::Reference;
constexpr double kPi = std::numbers::pi;

TEST(NormKind, Names)
{
    for (auto k : {NormKind::L2, NormKind::H, NormKind::ZS, NormKind::ZD, NormKind::XSPrime, NormKind::P}) {
        EXPECT_EQ(fields::parse_norm_kind(fields::to_string(k)), k);
    }
    EXPECT_THROW(fields::parse_norm_kind("H2"), InvalidArgument);
}

class Interp : public ::testing::TestWithParam<int> {};

TEST_P(Interp, IhReproducesPolynomials)
{
    const int k = GetParam();
    const auto pr = test::problem(cases::example_case(1), 3, k);
    const auto f = [k](const Vec2& x) { return 1.0 + 2.0 * x.x() - x.y() + (k >= 2 ? x.x() * x.y() : 0.0); };
    const auto g = [k](const Vec2& x) { return Vec2(2.0 + (k >= 2 ? x.y() : 0.0), -1.0 + (k >= 2 ? x.x() : 0.0)); };
    const auto u = fields::interpolate_Ih(pr.sp->u_s, pr.sp->bu_s, {f});
    EXPECT_LT(fields::compute_norm(u, NormKind::L2, Reference::scalar({f})), 1e-11);
    EXPECT_LT(fields::compute_norm(u, NormKind::ZS, Reference::scalar({f}, {g})), 1e-10);
}

TEST_P(Interp, JhReproducesVectorPolynomials)
{
    const int k = GetParam();
    const auto pr = test::problem(cases::example_case(1), 3, k);
    const auto q = [k](const Vec2& x) {
        return Vec2(1.0 - x.y() + (k >= 2 ? x.x() * x.x() : 0.0), 0.5 + 3.0 * x.x() * (k >= 2 ? x.y() : 1.0));
    };
    const auto v = fields::interpolate_Jh(pr.sp->v_d, pr.sp->bv_d, {q});
    EXPECT_LT(fields::compute_norm(v, NormKind::L2, Reference::vector({q})), 1e-11);
}

TEST_P(Interp, PihExactOnPolynomialsAndAtVertices)
{
    const int k = GetParam();
    const auto pr = test::problem(cases::example_case(1), 3, k);
    const auto poly = [k](const Vec2& x) { return 0.3 - x.x() + 2.0 * x.y() + (k >= 2 ? x.y() * x.y() : 0.0); };
    const auto u = fields::interpolate_pih(pr.sp->u_s, pr.sp->bu_s, {poly});
    EXPECT_LT(fields::compute_norm(u, NormKind::L2, Reference::scalar({poly})), 1e-11);

    const auto smooth = [](const Vec2& x) { return std::sin(2.0 * x.x()) * std::exp(x.y()); };
    const auto s = fields::interpolate_pih(pr.sp->u_s, pr.sp->bu_s, {smooth});
    const auto& m = *pr.sp->mesh_s;
    for (int t = 0; t < m.num_triangles(); ++t) {
        std::vector<Vec2> pts;
        for (int i = 0; i < 3; ++i) pts.push_back(m.triangle_vertex(t, i));
        const auto vals = pr.sp->bu_s.eval_scalar(t, pts);
        const Eigen::VectorXd c = s.local(t);
        for (int i = 0; i < 3; ++i) EXPECT_NEAR(vals.val.row(i).dot(c), smooth(pts[static_cast<std::size_t>(i)]), 1e-12);
    }
}

TEST_P(Interp, ProjectionReproducesPolynomials)
{
    const int k = GetParam();
    const auto pr = test::problem(cases::example_case(2), 3, k);
    const auto f = [](const Vec2& x) { return 4.0 - x.x() + 0.5 * x.y(); };
    const auto p = fields::project_P(pr.sp->p_s, pr.sp->bp_s, f);
    EXPECT_LT(fields::compute_norm(p, NormKind::L2, Reference::scalar({f})), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Degrees, Interp, ::testing::Values(1, 2, 3));

TEST(Interp, EdgeMomentsOfIhVanish)
{
    const auto pr = test::problem(cases::example_case(1), 4, 2);
    const auto f = [](const Vec2& x) { return std::sin(kPi * x.x()); };
    const auto u = fields::interpolate_Ih(pr.sp->u_s, pr.sp->bu_s, {f});
    const auto& m = *pr.sp->mesh_s;
    double worst = 0.0;
    for (int e : m.primal_edges()) {
        const int t = m.edge(e).tri[0];
        const Eigen::VectorXd c = u.local(t);
        const auto discrete = [&](const Vec2& x) { return pr.sp->bu_s.eval_scalar(t, {x}).val.row(0).dot(c); };
        const Eigen::VectorXd r = fem::edge_moments(m, e, 2, discrete) - fem::edge_moments(m, e, 2, f);
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(Interp, JhNormalMomentsVanish)
{
    const auto pr = test::problem(cases::example_case(1), 4, 1);
    const auto q = [](const Vec2& x) { return Vec2(std::cos(3.0 * x.y()), x.x() * std::exp(x.y())); };
    const auto v = fields::interpolate_Jh(pr.sp->v_d, pr.sp->bv_d, {q});
    const auto& m = *pr.sp->mesh_d;
    double worst = 0.0;
    for (int e : m.dual_edges()) {
        const auto& ed = m.edge(e);
        for (int side = 0; side < 2; ++side) {
            const int t = ed.tri[static_cast<std::size_t>(side)];
            const Eigen::VectorXd c = v.local(t);
            const auto normal = [&](const Vec2& x) {
                const auto vals = pr.sp->bv_d.eval_vector(t, {x});
                return ed.normal.x() * vals.vx.row(0).dot(c) + ed.normal.y() * vals.vy.row(0).dot(c) - ed.normal.dot(q(x));
            };
            worst = std::max(worst, fem::edge_moments(m, e, 1, normal).cwiseAbs().maxCoeff());
        }
    }
    EXPECT_LT(worst, 1e-12);
}

std::vector<std::pair<double, double>> interpolation_series(const std::function<double(int)>& err)
{
    std::vector<std::pair<double, double>> pts;
    for (int nx : {4, 8, 16}) pts.emplace_back(1.0 / nx, err(nx));
    return pts;
}

TEST(Interp, ConvergenceSlopesOnExample1)
{
    const auto c = cases::example_case(1);
    const auto pD = [&](const Vec2& x) { return c.pD(x); };
    const auto pS = [&](const Vec2& x) { return c.pS(x); };
    const auto uD = [&](const Vec2& x) { return c.uD(x); };
    for (int k : {1, 2}) {
        const auto ih = verify::fit_rate(interpolation_series([&](int nx) {
            const auto pr = test::problem(c, nx, k);
            return fields::compute_norm(fields::interpolate_Ih(pr.sp->u_d, pr.sp->bu_d, {pD}), NormKind::L2,
                                        Reference::scalar({pD}));
        }));
        const auto jh = verify::fit_rate(interpolation_series([&](int nx) {
            const auto pr = test::problem(c, nx, k);
            return fields::compute_norm(fields::interpolate_Jh(pr.sp->v_d, pr.sp->bv_d, {uD}), NormKind::L2,
                                        Reference::vector({uD}));
        }));
        const auto pih = verify::fit_rate(interpolation_series([&](int nx) {
            const auto pr = test::problem(c, nx, k);
            return fields::compute_norm(fields::interpolate_pih(pr.sp->u_s, pr.sp->bu_s, {pS}), NormKind::L2,
                                        Reference::scalar({pS}));
        }));
        EXPECT_NEAR(ih.slope, k + 1, 0.2) << k;
        EXPECT_NEAR(jh.slope, k + 1, 0.2) << k;
        EXPECT_NEAR(pih.slope, k + 1, 0.2) << k;
    }
}

TEST(Norms, ConstantHasZeroZS)
{
    const auto pr = test::problem(cases::example_case(1), 4, 2);
    const auto u = fields::interpolate_Ih(pr.sp->u_s, pr.sp->bu_s, {[](const Vec2&) { return 3.7; }});
    EXPECT_LT(fields::compute_norm(u, NormKind::ZS), 1e-12);
}

TEST(Norms, UnitJumpOnEachDualEdge)
{
    // The constant 1 on a single boundary triangle, 0 elsewhere: unit jumps
    // across its two dual edges, each contributing h_e^{-1} * h_e = 1.
    const auto pr = test::problem(cases::example_case(1), 3, 1);
    const auto& m = *pr.sp->mesh_s;
    int t = -1;
    for (int s = 0; s < m.num_triangles() && t < 0; ++s) {
        if (m.edge(m.triangle(s).primal_edge).boundary()) t = s;
    }
    ASSERT_GE(t, 0);
    forms::DiscreteField u(pr.sp->u_s, pr.sp->bu_s, 1);
    const Eigen::MatrixXd loc = pr.sp->bu_s.functionals(
        t, fem::ScalarSampler([](const std::vector<Vec2>& p) {
            return Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(p.size()), 1);
        }));
    const auto ids = pr.sp->u_s.local(t);
    for (std::size_t i = 0; i < ids.size(); ++i) u.coef(ids[i]) = loc(static_cast<Eigen::Index>(i), 0);
    EXPECT_NEAR(std::pow(fields::compute_norm(u, NormKind::ZS), 2), 2.0, 1e-12);
}

TEST(Norms, Homogeneity)
{
    const auto pr = test::problem(cases::example_case(1), 3, 2);
    const auto& sp = *pr.sp;
    const auto f = [](const Vec2& x) { return std::sin(3 * x.x()) * x.y(); };
    const auto us = fields::interpolate_Ih(sp.u_s, sp.bu_s, {f});
    const auto ud = fields::interpolate_Ih(sp.u_d, sp.bu_d, {f});
    const auto vs = fields::interpolate_Jh(sp.v_s, sp.bv_s, {[](const Vec2& x) { return Vec2(x.y(), std::cos(x.x())); }});
    const auto ps = fields::project_P(sp.p_s, sp.bp_s, f);
    const double c = -2.5;
    const auto scaled = [c](forms::DiscreteField g) {
        g.coef *= c;
        return g;
    };
    const std::vector<std::pair<const forms::DiscreteField*, NormKind>> cases_{
        {&us, NormKind::L2}, {&us, NormKind::H}, {&us, NormKind::ZS}, {&ud, NormKind::ZD},
        {&vs, NormKind::XSPrime}, {&ps, NormKind::P}};
    for (const auto& [g, kind] : cases_) {
        const double a = fields::compute_norm(*g, kind);
        const double b = fields::compute_norm(scaled(*g), kind);
        EXPECT_GT(a, 0.0);
        EXPECT_NEAR(b, std::abs(c) * a, 1e-12 * b) << fields::to_string(kind);
    }
    const double a = std::pow(fields::compute_norm(ud, NormKind::ZD), 1.5);
    const double b = std::pow(fields::compute_norm(scaled(ud), NormKind::ZD), 1.5);
    EXPECT_NEAR(b, std::pow(std::abs(c), 1.5) * a, 1e-12 * b);
}

TEST(Norms, TriangleInequality)
{
    const auto pr = test::problem(cases::example_case(1), 3, 1);
    std::srand(3);
    for (int trial = 0; trial < 10; ++trial) {
        forms::DiscreteField a(pr.sp->u_s, pr.sp->bu_s, 2), b(pr.sp->u_s, pr.sp->bu_s, 2);
        a.coef.setRandom();
        b.coef.setRandom();
        forms::DiscreteField s = a;
        s.coef += b.coef;
        for (auto kind : {NormKind::L2, NormKind::H}) {
            EXPECT_LE(fields::compute_norm(s, kind),
                      fields::compute_norm(a, kind) + fields::compute_norm(b, kind) + 1e-13);
        }
    }
}

TEST(Norms, IncompatibleKindsRejected)
{
    const auto pr = test::problem(cases::example_case(1), 2);
    forms::DiscreteField us(pr.sp->u_s, pr.sp->bu_s, 1);
    forms::DiscreteField vd(pr.sp->v_d, pr.sp->bv_d, 1);
    EXPECT_THROW(fields::compute_norm(us, NormKind::ZD), InvalidArgument);
    EXPECT_THROW(fields::compute_norm(vd, NormKind::ZS), InvalidArgument);
    EXPECT_THROW(fields::compute_norm(vd, NormKind::P), InvalidArgument);
    forms::DiscreteField bad = us;
    bad.coef.resize(3);
    EXPECT_THROW(fields::compute_norm(bad, NormKind::L2), InvalidArgument);
}

TEST(Norms, DarcyVelocityNormOfExample1)
{
    const auto c = cases::example_case(1);
    const auto pr = test::problem(c, 8, 3);
    forms::DiscreteField zero(pr.sp->v_d, pr.sp->bv_d, 1);
    const double n = fields::compute_norm(zero, NormKind::L2, Reference::vector({[&](const Vec2& x) { return c.uD(x); }}));
    EXPECT_NEAR(n * n, 7.0 * std::pow(kPi, 4) / 384.0 + kPi * kPi / 32.0, 1e-10);
}

TEST(Errors, ZeroCaseZeroSolution)
{
    const auto pr = test::problem(cases::zero_case(), 3);
    const auto sol = solver::split_solution(*pr.sp, Eigen::VectorXd::Zero(pr.sys.layout.size()));
    const auto e = fields::compute_errors(sol, pr.c, *pr.sp);
    for (double v : {e.sigma_L2, e.uS_L2, e.pS_L2, e.uD_L2, e.pD_L2, e.uS_h, e.pD_ZD, e.super_uS, e.super_pD}) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(Errors, InjectedExactSolutionGivesInterpolationErrors)
{
    const auto c = cases::example_case(1);
    const auto pr = test::problem(c, 4);
    const auto sol = fields::interpolate_exact(c, *pr.sp);
    const auto e = fields::compute_errors(sol, c, *pr.sp);
    EXPECT_LT(e.super_uS, 1e-13);
    EXPECT_LT(e.super_pD, 1e-13);
    const auto pD = [&](const Vec2& x) { return c.pD(x); };
    EXPECT_DOUBLE_EQ(e.pD_L2, fields::compute_norm(fields::interpolate_Ih(pr.sp->u_d, pr.sp->bu_d, {pD}), NormKind::L2,
                                                   Reference::scalar({pD})));
    EXPECT_GT(e.uS_L2, 0.0);
}

TEST(Orthogonality, InterpolationErrorsAreInvisible)
{
    for (bool nonmatching : {false, true}) {
        harness::MeshOptions o;
        o.nonmatching = nonmatching;
        const auto pr = test::problem(cases::example_case(1), 4, 1, o);
        const auto rep = verify::check_orthogonality(*pr.sp, pr.sys, 20, 9);
        EXPECT_LT(rep.darcy, 1e-11);
        EXPECT_LT(rep.stokes, 1e-11);
    }
}

}  // namespace
}  // namespace sdg
