// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "sdg/harness/harness.hpp"
#include "sdg/harness/suites.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace sdg;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

void note(const std::string& s) { std::printf("    %s\n", s.c_str()); }

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

harness::RunConfig study(const std::string& case_id, mesh::MeshKind kind)
{
    harness::RunConfig cfg;
    cfg.case_id = case_id;
    cfg.mesh.stokes_kind = cfg.mesh.darcy_kind = kind;
    cfg.levels = {4, 8, 16, 32};
    cfg.k = 1;
    cfg.picard.max_iters = 200;
    cfg.write_vtk = false;
    cfg.timing = false;
    cfg.rate_windows = harness::theory_windows(1);
    return cfg;
}

/// Runs a study and reports every window; passes when all windows hold.
bool rate_study(const std::string& label, const harness::RunConfig& cfg, double* elapsed = nullptr)
{
    const auto t0 = Clock::now();
    const auto rep = harness::run_convergence(cfg);
    const double secs = seconds_since(t0);
    if (elapsed != nullptr) *elapsed = secs;
    int iters = 0;
    for (const auto& r : rep.rows) {
        if (!r.failure.empty()) note(label + ": " + r.failure);
        iters = std::max(iters, r.picard_iters);
    }
    std::ostringstream line;
    line << label << ": " << rep.windows.size() << " windows, max Picard iterations " << iters << ", "
         << fmt("%.1f s", secs);
    note(line.str());
    for (const auto& w : rep.windows) {
        note("  " + std::string(w.pass ? "ok  " : "BAD ") + w.column + fmt(" slope %.3f", w.slope) +
             fmt(" in [%.2f,", w.window.lo) + fmt(" %.2f]", w.window.hi));
    }
    return rep.ok() && rep.windows.size() == harness::theory_windows(1).size();
}

Outcome criterion_rates()
{
    double secs = 0.0;
    const bool ok = rate_study("ex1 triangular", study("ex1", mesh::MeshKind::Triangular), &secs);
    return {ok && secs < 300.0, "Example 1, triangular, levels 4..32, k = 1" + fmt(", %.1f s", secs)};
}

Outcome criterion_mesh_robustness()
{
    auto distorted = study("ex1", mesh::MeshKind::Distorted);
    distorted.mesh.distortion = 0.3;
    distorted.mesh.seed = 7;
    bool ok = rate_study("ex1 rectangular", study("ex1", mesh::MeshKind::Rectangular));
    ok = rate_study("ex1 distorted 0.3", distorted) && ok;
    ok = rate_study("ex2 triangular", study("ex2", mesh::MeshKind::Triangular)) && ok;
    ok = rate_study("ex3 triangular", study("ex3", mesh::MeshKind::Triangular)) && ok;
    return {ok, "rectangular and distorted Example 1, triangular Examples 2 and 3"};
}

Outcome criterion_nonmatching()
{
    auto cfg = study("ex1", mesh::MeshKind::Triangular);
    cfg.mesh.nonmatching = true;
    return {rate_study("ex1 nonmatching", cfg), "Example 1 with nx + 1 Darcy cells along the interface"};
}

Outcome suite_outcome(const std::string& name, double* elapsed = nullptr)
{
    const auto t0 = Clock::now();
    const auto r = harness::run_suite(name);
    if (elapsed != nullptr) *elapsed = seconds_since(t0);
    int failed = 0;
    for (const auto& c : r.checks) {
        if (!c.pass) {
            ++failed;
            note("BAD " + c.name + fmt(" = %.3e", c.value) + " " + c.relation + fmt(" %.3e", c.limit));
        }
    }
    return {r.pass(), std::to_string(r.checks.size()) + " checks, " + std::to_string(failed) + " failed"};
}

Outcome criterion_algebra()
{
    auto o = suite_outcome("algebra");
    o.detail = "adjoints, orthogonality and seeded faults: " + o.detail;
    return o;
}

Outcome criterion_monotone()
{
    double secs = 0.0;
    auto o = suite_outcome("monotone", &secs);
    o.pass = o.pass && secs < 1.0;
    o.detail = "1000-sample margins: " + o.detail + fmt(", %.3f s", secs);
    return o;
}

Outcome criterion_picard()
{
    auto linear = cases::example_case(1);
    linear.params.beta = 0.0;
    linear.sources = cases::manufacture_sources(linear.exact, linear.params, linear.stokes_box, linear.darcy_box);
    auto c = cases::example_case(1);

    const auto setup = [](const cases::ManufacturedCase& cs) {
        const auto m = harness::build_meshes(cs, {}, 8);
        return std::make_unique<forms::CoupledSpaces>(m.stokes, m.darcy, 1);
    };
    bool ok = true;

    {
        const auto sp = setup(linear);
        const auto sys = forms::assemble_linear_blocks(*sp, linear.params);
        const auto rhs = forms::assemble_rhs(*sp, linear);
        const auto [sol, trace] = solver::solve_coupled(*sp, sys, rhs, linear.params);
        const bool one = trace.converged && trace.iterations() == 1;
        note(std::string(one ? "ok  " : "BAD ") + "beta = 0: " + std::to_string(trace.iterations()) + " iteration(s)");
        ok = ok && one;
    }

    const auto sp = setup(c);
    const auto sys = forms::assemble_linear_blocks(*sp, c.params);
    const auto rhs = forms::assemble_rhs(*sp, c);
    std::vector<std::pair<solver::InitialGuess, std::pair<solver::CoupledSolution, solver::SolveTrace>>> runs;
    for (auto g : {solver::InitialGuess::Zero, solver::InitialGuess::DarcyLinear, solver::InitialGuess::Random}) {
        solver::PicardSettings s;
        s.max_iters = 200;
        s.initial_guess = g;
        runs.emplace_back(g, solver::solve_coupled(*sp, sys, rhs, c.params, s));
    }
    const auto& ref = runs.front().second.first;
    double worst = 0.0;
    for (const auto& [g, run] : runs) {
        const auto& sol = run.first;
        for (const auto& [a, b] : {std::pair{&ref.uS, &sol.uS}, std::pair{&ref.pS, &sol.pS},
                                   std::pair{&ref.uD, &sol.uD}, std::pair{&ref.pD, &sol.pD}}) {
            worst = std::max(worst, fields::compute_norm(fields::difference(*a, *b), fields::NormKind::L2));
        }
    }
    const bool unique = worst <= 1e-9;
    note(std::string(unique ? "ok  " : "BAD ") + "starting guesses agree" + fmt(": max L2 difference %.2e", worst) +
         " <= 1e-9");
    ok = ok && unique;

    int most = 0;
    for (const auto& [g, run] : runs) {
        const int n = run.second.iterations();
        most = std::max(most, n);
        note(std::string(n <= 15 ? "ok  " : "BAD ") + solver::to_string(g) + " start: " + std::to_string(n) +
             fmt(" iterations at tol %.0e", 1e-10) + " (limit 15)");
    }
    ok = ok && most <= 15;
    return {ok, "Example 1, 8 x 8 triangular, tol 1e-10"};
}

Outcome criterion_infsup()
{
    auto o = suite_outcome("infsup");
    o.detail = "b_S and a_S on three levels: " + o.detail;
    return o;
}

Outcome criterion_determinism()
{
    auto cfg = study("ex1", mesh::MeshKind::Distorted);
    cfg.mesh.distortion = 0.3;
    cfg.mesh.seed = 7;
    cfg.levels = {4, 8, 16};
    std::string first;
    bool same = true;
    for (int rep = 0; rep < 2; ++rep) {
        std::ostringstream out;
        harness::write_csv(out, harness::run_convergence(cfg));
        if (rep == 0) first = out.str();
        else same = out.str() == first;
    }
    const std::size_t hash = std::hash<std::string>{}(first);
    return {same && !first.empty(),
            "two runs of a seeded distorted study, " + std::to_string(first.size()) + " bytes, hash " +
                std::to_string(hash)};
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"rate reproduction", criterion_rates},
        {"mesh robustness", criterion_mesh_robustness},
        {"nonmatching interface", criterion_nonmatching},
        {"algebraic identities", criterion_algebra},
        {"monotonicity and continuity", criterion_monotone},
        {"Picard behavior", criterion_picard},
        {"inf-sup evidence", criterion_infsup},
        {"determinism", criterion_determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
    return failed == 0 ? 0 : 1;
}
