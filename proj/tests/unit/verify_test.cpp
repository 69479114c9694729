#include "sdg/verify/verify.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

namespace sdg {
namespace {

TEST(FitRate, GeometricSequence)
{
    const auto r = verify::fit_rate({{0.25, 1e-2}, {0.125, 2.5e-3}, {0.0625, 6.25e-4}});
    EXPECT_NEAR(r.slope, 2.0, 1e-12);
    EXPECT_NEAR(r.last_rate, 2.0, 1e-12);
    ASSERT_EQ(r.step_rates.size(), 2u);
    EXPECT_TRUE(r.notes.empty());
}

TEST(FitRate, ConstantErrors)
{
    EXPECT_NEAR(verify::fit_rate({{0.5, 3.0}, {0.25, 3.0}, {0.125, 3.0}, {0.0625, 3.0}}).slope, 0.0, 1e-14);
}

TEST(FitRate, Preconditions)
{
    EXPECT_THROW(verify::fit_rate({{0.5, 1.0}, {0.25, 0.5}}), InvalidArgument);
    EXPECT_THROW(verify::fit_rate({{0.5, 1.0}, {0.5, 0.5}, {0.25, 0.1}}), InvalidArgument);
    EXPECT_THROW(verify::fit_rate({{0.5, 0.0}, {0.25, -1.0}, {0.125, 0.1}}), InvalidArgument);
}

TEST(FitRate, ExactHitIsDroppedWithNote)
{
    const auto r = verify::fit_rate({{0.5, 4e-2}, {0.25, 1e-2}, {0.125, 0.0}});
    EXPECT_EQ(r.h.size(), 2u);
    EXPECT_EQ(r.notes.size(), 1u);
    EXPECT_NEAR(r.slope, 2.0, 1e-12);
}

TEST(Monotonicity, UnitPairMargin)
{
    const auto m = verify::monotonicity_pair({1.0, 0.0}, {0.0, 0.0}, forms::PhysicalParams{});
    ASSERT_TRUE(m.has_value());
    EXPECT_NEAR(m->margin, 2.0, 1e-15);
    EXPECT_LE(m->continuity, 1.0);
}

TEST(Monotonicity, EqualPairSkipped)
{
    EXPECT_FALSE(verify::monotonicity_pair({0.3, -2.0}, {0.3, -2.0}, forms::PhysicalParams{}).has_value());
}

TEST(Monotonicity, LinearCaseMarginIsOne)
{
    forms::PhysicalParams p;
    p.beta = 0.0;
    const auto r = verify::check_monotonicity(p, 1000, 4);
    EXPECT_GE(r.min_margin, 1.0 - 1e-12);
    EXPECT_LE(r.min_margin, 1.0 + 1e-12);
    EXPECT_LE(r.max_continuity, 1.0 + 1e-12);
}

TEST(Monotonicity, RandomPairsRespectBounds)
{
    forms::PhysicalParams p;
    p.mu = 2.0;
    p.rho = 3.0;
    p.beta = 5.0;
    Mat2 kinv;
    kinv << 2.0, 0.5, 0.5, 1.0;
    const auto r = verify::check_monotonicity(p, 1000, 17, kinv);
    EXPECT_EQ(r.pairs + r.skipped, 1000);
    EXPECT_GE(r.min_margin, 1.0 - 1e-12);
    EXPECT_LE(r.max_continuity, 1.0 + 1e-12);
}

TEST(Monotonicity, IntegratedFormThroughPicardBlock)
{
    // (M_A(u) u - M_A(v) v).(u - v) >= (mu/rho) ||u - v||^2 for K = I.
    const auto pr = test::problem(cases::example_case(1), 3);
    const forms::PhysicalParams p;
    std::srand(2);
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::VectorXd u = 3.0 * Eigen::VectorXd::Random(pr.sp->v_d.num_dofs());
        const Eigen::VectorXd v = 3.0 * Eigen::VectorXd::Random(pr.sp->v_d.num_dofs());
        const Eigen::VectorXd au = forms::assemble_picard_darcy(*pr.sp, u, p) * u;
        const Eigen::VectorXd av = forms::assemble_picard_darcy(*pr.sp, v, p) * v;
        const Eigen::VectorXd d = u - v;
        EXPECT_GE((au - av).dot(d), (1.0 - 1e-12) * d.dot(pr.sys.mass_vd * d));
    }
}

TEST(Monotonicity, RejectsIndefiniteTensor)
{
    EXPECT_THROW(verify::check_monotonicity(forms::PhysicalParams{}, 10, 1, -Mat2::Identity()), InvalidArgument);
    EXPECT_THROW(verify::check_monotonicity(forms::PhysicalParams{}, 0, 1), InvalidArgument);
}

TEST(Adjoints, NonmatchingGlue)
{
    harness::MeshOptions o;
    o.nonmatching = true;
    const auto pr = test::problem(cases::example_case(1), 4, 1, o);
    EXPECT_LT(verify::check_adjoints(pr.sys).worst(), 1e-12);
}

TEST(Adjoints, SeededFaultsAreDetected)
{
    const auto pr = test::problem(cases::example_case(1), 4);
    const auto controls = verify::run_negative_controls(*pr.sp, pr.c.params);
    ASSERT_EQ(controls.size(), 3u);
    for (const auto& c : controls) {
        EXPECT_TRUE(c.detected) << c.name;
        EXPECT_GT(c.deviation, 1e-6) << c.name;
    }
}

TEST(Adjoints, PerturbedEntryIsDetected)
{
    auto pr = test::problem(cases::example_case(1), 4);
    ASSERT_GT(pr.sys.bS.nonZeros(), 0);
    pr.sys.bS.valuePtr()[pr.sys.bS.nonZeros() / 2] += 1.0;
    EXPECT_GT(verify::check_adjoints(pr.sys).bS, 1e-6);
}

TEST(InfSup, PressureFormIsUniform)
{
    std::vector<double> c;
    for (int nx : {2, 4, 8}) {
        const auto pr = test::problem(cases::example_case(1), nx);
        const auto e = verify::estimate_infsup(*pr.sp, verify::InfSupForm::bS, nx);
        EXPECT_GT(e.constant, 0.0);
        c.push_back(e.constant);
    }
    EXPECT_LT(*std::max_element(c.begin(), c.end()) / *std::min_element(c.begin(), c.end()), 2.0);
}

TEST(InfSup, StressFormIsPositive)
{
    const auto pr = test::problem(cases::example_case(1), 2);
    const auto e = verify::estimate_infsup(*pr.sp, verify::InfSupForm::aS, 2);
    EXPECT_GT(e.constant, 0.0);
    EXPECT_GT(e.rows, 0);
    EXPECT_GT(e.cols, 0);
}

TEST(InfSup, GramMatricesAreSymmetric)
{
    const auto pr = test::problem(cases::example_case(1), 2);
    for (const auto& g : {verify::gram_zs(*pr.sp), verify::gram_xs_prime(*pr.sp), verify::gram_p(*pr.sp)}) {
        EXPECT_LT(forms::SpMat(g - forms::SpMat(g.transpose())).norm(), 1e-13 * g.norm());
    }
}

TEST(InfSup, DegenerateCellRejectedBeforeEstimation)
{
    std::vector<Vec2> vs{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {2, 0}};
    // Cell {1, 4, 1} style collapse: three collinear vertices.
    EXPECT_THROW(test::tagged_mesh(vs, {{0, 1, 2, 3}, {1, 4, 4}}, mesh::Subdomain::Stokes, mesh::BoundaryTag::GammaS),
                 MeshError);
    std::vector<Vec2> col{{0, 0}, {1, 0}, {2, 0}};
    EXPECT_THROW(test::tagged_mesh(col, {{0, 1, 2}}, mesh::Subdomain::Stokes, mesh::BoundaryTag::GammaS), MeshError);
}

}  // namespace
}  // namespace sdg
