#include "sdg/harness/suites.hpp"

#include "sdg/harness/harness.hpp"

#include <json.hpp>

#include <ostream>

namespace sdg::harness {

bool SuiteResult::pass() const
{
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::vector<std::string> suite_names() { return {"algebra", "monotone", "infsup"}; }

namespace {

Check below(std::string name, double value, double limit)
{
    return {std::move(name), value, limit, "<", value < limit};
}

Check at_least(std::string name, double value, double limit)
{
    return {std::move(name), value, limit, ">=", value >= limit};
}

Check at_most(std::string name, double value, double limit)
{
    return {std::move(name), value, limit, "<=", value <= limit};
}

Check above(std::string name, double value, double limit)
{
    return {std::move(name), value, limit, ">", value > limit};
}

void algebra(SuiteResult& r)
{
    const auto c = cases::example_case(1);
    struct Variant {
        const char* label;
        mesh::MeshKind kind;
        bool nonmatching;
        int k;
    };
    const Variant variants[] = {{"triangular/matching/k1", mesh::MeshKind::Triangular, false, 1},
                                {"triangular/nonmatching/k1", mesh::MeshKind::Triangular, true, 1},
                                {"rectangular/matching/k2", mesh::MeshKind::Rectangular, false, 2},
                                {"distorted/nonmatching/k2", mesh::MeshKind::Distorted, true, 2}};
    for (const auto& v : variants) {
        MeshOptions mo;
        mo.stokes_kind = mo.darcy_kind = v.kind;
        mo.distortion = 0.3;
        mo.nonmatching = v.nonmatching;
        const MeshPair m = build_meshes(c, mo, 4);
        const forms::CoupledSpaces sp(m.stokes, m.darcy, v.k);
        const auto sys = forms::assemble_linear_blocks(sp, c.params);
        const std::string tag = std::string(v.label) + ": ";
        const auto adj = verify::check_adjoints(sys);
        r.checks.push_back(below(tag + "adjoint a_S", adj.aS, 1e-12));
        r.checks.push_back(below(tag + "adjoint a_D", adj.aD, 1e-12));
        r.checks.push_back(below(tag + "adjoint b_S", adj.bS, 1e-12));
        r.checks.push_back(below(tag + "interface coupling", adj.interface, 1e-12));
        const auto orth = verify::check_orthogonality(sp, sys, 20, 7);
        r.checks.push_back(below(tag + "orthogonality a_D(u - J_h u, q)", orth.darcy, 1e-11));
        r.checks.push_back(below(tag + "orthogonality a_S(sigma - J_h sigma, v)", orth.stokes, 1e-11));
        for (const auto& nc : verify::run_negative_controls(sp, c.params)) {
            r.checks.push_back(above(tag + "fault detected: " + nc.name, nc.deviation, 1e-6));
        }
    }
}

void monotone(SuiteResult& r)
{
    struct Variant {
        const char* label;
        double beta;
        Mat2 k_inv;
    };
    Mat2 aniso;
    aniso << 3.0, 0.5, 0.5, 0.25;
    const Variant variants[] = {{"K=I, beta=1", 1.0, Mat2::Identity()},
                                {"K=I, beta=0", 0.0, Mat2::Identity()},
                                {"anisotropic K, beta=2", 2.0, aniso}};
    for (const auto& v : variants) {
        forms::PhysicalParams p;
        p.beta = v.beta;
        const auto rep = verify::check_monotonicity(p, 1000, 11, v.k_inv);
        r.checks.push_back(at_least(std::string(v.label) + ": monotonicity margin", rep.min_margin, 1.0 - 1e-12));
        r.checks.push_back(at_most(std::string(v.label) + ": continuity ratio", rep.max_continuity, 1.0 + 1e-12));
    }
}

void infsup(SuiteResult& r)
{
    const auto c = cases::example_case(1);
    for (auto form : {verify::InfSupForm::bS, verify::InfSupForm::aS}) {
        std::vector<double> consts;
        for (int nx : {2, 4, 8}) {
            const MeshPair m = build_meshes(c, MeshOptions{}, nx);
            const forms::CoupledSpaces sp(m.stokes, m.darcy, 1);
            const auto est = verify::estimate_infsup(sp, form, nx);
            consts.push_back(est.constant);
            r.checks.push_back(above(verify::to_string(form) + " constant at nx=" + std::to_string(nx), est.constant, 0.0));
        }
        const auto [lo, hi] = std::minmax_element(consts.begin(), consts.end());
        r.checks.push_back(below(verify::to_string(form) + " max/min ratio over levels", *hi / *lo, 2.0));
    }
}

}  // namespace

SuiteResult run_suite(const std::string& name)
{
    SuiteResult r;
    r.suite = name;
    if (name == "algebra") {
        algebra(r);
    } else if (name == "monotone") {
        monotone(r);
    } else if (name == "infsup") {
        infsup(r);
    } else {
        throw InvalidArgument("unknown verification suite '" + name + "'");
    }
    return r;
}

void write_suite_json(std::ostream& out, const std::vector<SuiteResult>& results)
{
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& s : results) {
        nlohmann::ordered_json checks = nlohmann::ordered_json::array();
        for (const auto& c : s.checks) {
            checks.push_back({{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"limit", c.limit}, {"pass", c.pass}});
        }
        j.push_back({{"suite", s.suite}, {"pass", s.pass()}, {"checks", checks}});
    }
    out << j.dump(2) << '\n';
}

}  // namespace sdg::harness
