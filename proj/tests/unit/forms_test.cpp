#include "sdg/fields/fields.hpp"
#include "sdg/forms/system.hpp"
#include "sdg/verify/verify.hpp"
#include "test_util.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <map>
#include <sstream>

namespace sdg {
namespace {

using forms::SpMat;

double rel_dev(const SpMat& a, const SpMat& b)
{
    const double n = std::max(a.norm(), b.norm());
    return n == 0.0 ? 0.0 : SpMat(a - b).norm() / n;
}

TEST(ApplyA, Examples)
{
    forms::PhysicalParams p;
    EXPECT_TRUE(forms::apply_A({3.0, 4.0}, p, Mat2::Identity()).isApprox(Vec2(18.0, 24.0), 1e-15));
    EXPECT_EQ(forms::apply_A({0.0, 0.0}, p, Mat2::Identity()).norm(), 0.0);
    p.beta = 0.0;
    const Vec2 v = forms::apply_A({1.0, 0.0}, p, (2.0 * Mat2::Identity()).inverse());
    EXPECT_NEAR(v.x(), 0.5, 1e-15);
    EXPECT_EQ(v.y(), 0.0);
}

TEST(PhysicalParams, Validation)
{
    forms::PhysicalParams p;
    EXPECT_NO_THROW(p.validate());
    p.nu = 0.0;
    EXPECT_THROW(p.validate(), InvalidArgument);
    p = {};
    p.beta = -1.0;
    EXPECT_THROW(p.validate(), InvalidArgument);
    p = {};
    p.K_inv = [](const Vec2&) { return Mat2(Mat2::Identity() * -1.0); };
    EXPECT_THROW(p.validate({Vec2(0.5, 1.5)}), InvalidArgument);
}

TEST(Blocks, AdjointsAreTransposes)
{
    for (int k : {1, 2}) {
        const auto pr = test::problem(cases::example_case(1), 4, k);
        EXPECT_LT(rel_dev(pr.sys.aS, SpMat(pr.sys.aS_star.transpose())), 1e-12);
        EXPECT_LT(rel_dev(pr.sys.aD, SpMat(pr.sys.aD_star.transpose())), 1e-12);
        EXPECT_LT(rel_dev(pr.sys.bS, SpMat(pr.sys.bS_star.transpose())), 1e-12);
        EXPECT_LT(verify::check_adjoints(pr.sys).worst(), 1e-12);
    }
}

TEST(Blocks, AdjointsOnEveryMeshKind)
{
    harness::MeshOptions rect;
    rect.stokes_kind = rect.darcy_kind = mesh::MeshKind::Rectangular;
    harness::MeshOptions dist;
    dist.stokes_kind = dist.darcy_kind = mesh::MeshKind::Distorted;
    dist.distortion = 0.3;
    dist.nonmatching = true;
    for (const auto& o : {rect, dist}) {
        const auto pr = test::problem(cases::example_case(1), 3, 2, o);
        EXPECT_LT(verify::check_adjoints(pr.sys).worst(), 1e-12);
    }
}

TEST(Blocks, ZeroSlipGivesZeroBlock)
{
    const auto pr = test::problem(cases::example_case(1, 0.0), 4);
    EXPECT_EQ(pr.sys.C_BJS.norm(), 0.0);
    const auto pr1 = test::problem(cases::example_case(1, 2.0), 4);
    EXPECT_GT(pr1.sys.C_BJS.norm(), 0.0);
}

TEST(Blocks, ViscosityScalesOnlyStressMass)
{
    auto c = cases::example_case(1);
    const auto a = test::problem(c, 3);
    c.params.nu = 4.0;
    const auto b = test::problem(c, 3);
    EXPECT_LT(rel_dev(SpMat(4.0 * b.sys.sigma_mass), a.sys.sigma_mass), 1e-15);
    for (const auto& [name, m] : a.sys.named()) {
        if (name == "A_S") continue;
        EXPECT_EQ(rel_dev(*m, *b.sys.named().at(name)), 0.0) << name;
    }
}

TEST(Blocks, ConstantPressureSeesOnlyBoundaryFlux)
{
    const auto pr = test::problem(cases::example_case(1), 4);
    const auto& sp = *pr.sp;
    const auto bubble = [](const Vec2& x) { return x.x() * (1 - x.x()) * x.y() * (1 - x.y()); };
    const auto v = fields::interpolate_Ih(sp.u_s, sp.bu_s, {bubble, [&](const Vec2& x) { return 2.0 * bubble(x); }});
    const auto one = fields::project_P(sp.p_s, sp.bp_s, [](const Vec2&) { return 1.0; });
    const double value = one.coef.dot(pr.sys.bS * v.coef);
    EXPECT_NEAR(value, 0.0, 1e-12);
}

TEST(Blocks, AssemblyIsDeterministic)
{
    const auto a = test::problem(cases::example_case(3), 3, 2);
    const auto b = test::problem(cases::example_case(3), 3, 2);
    for (const auto& [name, m] : a.sys.named()) {
        const SpMat& n = *b.sys.named().at(name);
        ASSERT_EQ(m->nonZeros(), n.nonZeros()) << name;
        EXPECT_EQ(SpMat(*m - n).norm(), 0.0) << name;
    }
}

/// Interface blocks rebuilt edge by edge from coincident Stokes and Darcy
/// edges, without the glue.
struct DirectInterface {
    SpMat pd_vs, us_qd, bjs;
};

DirectInterface direct_interface(const forms::CoupledSpaces& sp, double G)
{
    const auto& ms = *sp.mesh_s;
    const auto& md = *sp.mesh_d;
    const int nus = sp.u_s.num_dofs(), nud = sp.u_d.num_dofs();
    std::vector<Eigen::Triplet<double>> a, b, c;
    for (int es : ms.primal_edges()) {
        const auto& se = ms.edge(es);
        if (!se.tag || *se.tag != mesh::BoundaryTag::Interface) continue;
        int ed = -1;
        for (int e : md.primal_edges()) {
            const auto& de = md.edge(e);
            if (!de.tag || *de.tag != mesh::BoundaryTag::Interface) continue;
            const Vec2 p = md.node(de.node[0]), q = md.node(de.node[1]);
            const Vec2 s0 = ms.node(se.node[0]), s1 = ms.node(se.node[1]);
            if (((p - s0).norm() < 1e-12 && (q - s1).norm() < 1e-12) ||
                ((p - s1).norm() < 1e-12 && (q - s0).norm() < 1e-12)) {
                ed = e;
            }
        }
        EXPECT_GE(ed, 0);
        std::vector<Vec2> pts;
        std::vector<double> w;
        fem::edge_quadrature(ms, es, fem::edge_degree(sp.k) + 2, pts, w);
        const int ts = se.tri[0], td = md.edge(ed).tri[0];
        const auto vs = sp.bu_s.eval_scalar(ts, pts);
        const auto qd = sp.bu_d.eval_scalar(td, pts);
        const auto ls = sp.u_s.local(ts);
        const auto ld = sp.u_d.local(td);
        const Vec2 n = se.normal, t(n.y(), -n.x());
        for (int comp = 0; comp < 2; ++comp) {
            for (std::size_t i = 0; i < ls.size(); ++i) {
                const int row = comp * nus + ls[i];
                for (std::size_t j = 0; j < ld.size(); ++j) {
                    double s = 0.0;
                    for (std::size_t q = 0; q < pts.size(); ++q) {
                        s += w[q] * vs.val(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(i)) *
                             qd.val(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(j)) * n(comp);
                    }
                    a.emplace_back(row, ld[j], s);
                    b.emplace_back(ld[j], row, -s);
                }
                for (int comp2 = 0; comp2 < 2; ++comp2) {
                    for (std::size_t j = 0; j < ls.size(); ++j) {
                        double s = 0.0;
                        for (std::size_t q = 0; q < pts.size(); ++q) {
                            s += w[q] * vs.val(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(i)) *
                                 vs.val(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(j)) * t(comp) * t(comp2);
                        }
                        c.emplace_back(row, comp2 * nus + ls[j], G * s);
                    }
                }
            }
        }
    }
    DirectInterface d;
    d.pd_vs.resize(2 * nus, nud);
    d.pd_vs.setFromTriplets(a.begin(), a.end());
    d.us_qd.resize(nud, 2 * nus);
    d.us_qd.setFromTriplets(b.begin(), b.end());
    d.bjs.resize(2 * nus, 2 * nus);
    d.bjs.setFromTriplets(c.begin(), c.end());
    return d;
}

TEST(Blocks, GlueMatchesDirectEdgeQuadratureOnMatchingGrids)
{
    for (int k : {1, 2}) {
        const auto pr = test::problem(cases::example_case(1, 1.7), 4, k);
        const auto d = direct_interface(*pr.sp, 1.7);
        EXPECT_LT(SpMat(d.pd_vs - pr.sys.C_pD_vS).norm(), 1e-13);
        EXPECT_LT(SpMat(d.us_qd - pr.sys.C_uS_qD).norm(), 1e-13);
        EXPECT_LT(SpMat(d.bjs - pr.sys.C_BJS).norm(), 1e-13);
    }
}

TEST(Blocks, NamedBlocksAndDump)
{
    const auto pr = test::problem(cases::example_case(1), 2);
    const auto named = pr.sys.named();
    for (const char* n : {"A_S", "aS", "aS*", "bS", "bS*", "aD", "aD*", "C_pD_vS", "C_uS_qD", "C_BJS", "M_VD"}) {
        EXPECT_EQ(named.count(n), 1u) << n;
    }
    std::ostringstream out;
    forms::write_blocks_coo(out, pr.sys);
    std::istringstream in(out.str());
    std::string line;
    int headers = 0;
    long entries = 0;
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0) {
            ++headers;
            continue;
        }
        std::istringstream ls(line);
        long i = 0, j = 0;
        double v = 0.0;
        ASSERT_TRUE(static_cast<bool>(ls >> i >> j >> v)) << line;
        ++entries;
    }
    EXPECT_EQ(headers, static_cast<int>(named.size()));
    long nnz = 0;
    for (const auto& [name, m] : named) nnz += m->nonZeros();
    EXPECT_EQ(entries, nnz);
}

TEST(PicardBlock, LinearIdentityCaseIsMass)
{
    const auto pr = test::problem(cases::example_case(1), 3);
    forms::PhysicalParams p;
    p.beta = 0.0;
    const Eigen::VectorXd u = Eigen::VectorXd::Random(pr.sp->v_d.num_dofs());
    EXPECT_LT(rel_dev(forms::assemble_picard_darcy(*pr.sp, u, p), pr.sys.mass_vd), 1e-14);
}

TEST(PicardBlock, ConstantVelocityScalesMass)
{
    const auto pr = test::problem(cases::example_case(1), 3);
    const auto u = fields::interpolate_Jh(pr.sp->v_d, pr.sp->bv_d, {[](const Vec2&) { return Vec2(3.0, 4.0); }});
    const SpMat m = forms::assemble_picard_darcy(*pr.sp, u.coef, forms::PhysicalParams{});
    EXPECT_LT(rel_dev(m, SpMat(6.0 * pr.sys.mass_vd)), 1e-12);
}

TEST(PicardBlock, PositiveDefiniteOnCoarseMesh)
{
    const auto pr = test::problem(cases::example_case(1), 2);
    const Eigen::VectorXd u = Eigen::VectorXd::Random(pr.sp->v_d.num_dofs());
    const Eigen::MatrixXd m = Eigen::MatrixXd(forms::assemble_picard_darcy(*pr.sp, u, forms::PhysicalParams{}));
    EXPECT_LT((m - m.transpose()).norm(), 1e-14 * m.norm());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST(PicardBlock, NonFiniteVelocityRejected)
{
    const auto pr = test::problem(cases::example_case(1), 2);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(pr.sp->v_d.num_dofs());
    u(0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(forms::assemble_picard_darcy(*pr.sp, u, forms::PhysicalParams{}), Error);
}

TEST(Rhs, ZeroCaseGivesZeroVector)
{
    const auto pr = test::problem(cases::zero_case(), 3);
    const auto rhs = forms::assemble_rhs(*pr.sp, pr.c);
    EXPECT_EQ(rhs.load.norm(), 0.0);
    EXPECT_EQ(rhs.dirichlet.norm(), 0.0);
}

TEST(Rhs, UnitDivergenceSourceIntegratesToArea)
{
    auto c = cases::zero_case();
    c.sources.fD = [](const Vec2&) { return 1.0; };
    const auto pr = test::problem(c, 4);
    const auto rhs = forms::assemble_rhs(*pr.sp, pr.c);
    const auto l = pr.sys.layout;
    const auto one = fields::interpolate_Ih(pr.sp->u_d, pr.sp->bu_d, {[](const Vec2&) { return 1.0; }});
    EXPECT_NEAR(one.coef.dot(rhs.load.segment(l.pd(), l.n_pd)), pr.c.darcy_box.area(), 1e-12);
}

TEST(Rhs, FirstExampleHasNoInterfaceLoad)
{
    const auto pr = test::problem(cases::example_case(1), 4);
    const auto with = forms::assemble_rhs(*pr.sp, pr.c);
    auto c = pr.c;
    c.sources.g1 = [](const Vec2&, const Vec2&, const Vec2&) { return 0.0; };
    c.sources.g2 = c.sources.g1;
    const auto without = forms::assemble_rhs(*pr.sp, c);
    EXPECT_LT((with.load - without.load).norm(), 1e-13 * with.load.norm());
}

TEST(Rhs, StrongValuesAreEdgeMoments)
{
    const auto pr = test::problem(cases::example_case(1), 3);
    const auto rhs = forms::assemble_rhs(*pr.sp, pr.c);
    const auto& ms = *pr.sp->mesh_s;
    const auto l = pr.sys.layout;
    int checked = 0;
    for (int e : ms.primal_edges()) {
        const auto& ed = ms.edge(e);
        if (!ed.tag || *ed.tag != mesh::BoundaryTag::GammaS) continue;
        const Eigen::VectorXd m = fem::edge_moments(ms, e, 1, [&](const Vec2& x) { return pr.c.uS(x).x(); });
        for (int j = 0; j < 2; ++j) {
            const int dof = l.us() + pr.sp->u_s.edge_dof(e, j);
            EXPECT_TRUE(rhs.constrained[static_cast<std::size_t>(dof)]);
            EXPECT_NEAR(rhs.dirichlet(dof), m(j), 1e-14);
            ++checked;
        }
    }
    EXPECT_GT(checked, 0);
}

}  // namespace
}  // namespace sdg
