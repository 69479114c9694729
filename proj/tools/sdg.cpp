#include "sdg/harness/harness.hpp"
#include "sdg/harness/suites.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

using namespace sdg;

int cmd_run(const std::string& config, bool parallel, const std::string& out_dir)
{
    harness::RunConfig cfg = harness::load_config(config);
    if (parallel) cfg.parallel_levels = true;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    const auto rep = harness::run_convergence(cfg);
    harness::write_csv(std::cout, rep);
    for (const auto& r : rep.rows) {
        if (!r.failure.empty()) std::cerr << "FAILED " << r.failure << '\n';
    }
    for (const auto& [col, fit] : rep.rates) std::printf("rate %-12s %.3f\n", col.c_str(), fit.slope);
    for (const auto& w : rep.windows) {
        std::printf("%s %-12s slope %.3f in [%.2f, %.2f]\n", w.pass ? "PASS" : "FAIL", w.column.c_str(), w.slope,
                    w.window.lo, w.window.hi);
    }
    return rep.ok() ? 0 : 1;
}

int cmd_verify(const std::vector<std::string>& suites, const std::string& report)
{
    std::vector<harness::SuiteResult> results;
    bool ok = true;
    for (const auto& s : suites) {
        results.push_back(harness::run_suite(s));
        for (const auto& c : results.back().checks) {
            std::printf("%s %s: %.3e %s %.3e\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value, c.relation.c_str(),
                        c.limit);
        }
        ok = ok && results.back().pass();
    }
    if (!report.empty()) {
        std::ofstream out(report);
        if (!out) throw Error("cannot write '" + report + "'");
        harness::write_suite_json(out, results);
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Staggered DG solver for coupled Stokes and Darcy-Forchheimer flow"};
    app.require_subcommand(1);

    std::string config, out_dir;
    bool parallel = false;
    auto* run = app.add_subcommand("run", "Run a refinement study from an INI config");
    run->add_option("--config", config, "configuration file")->required()->check(CLI::ExistingFile);
    run->add_flag("--parallel-levels", parallel, "solve refinement levels concurrently");
    run->add_option("--output", out_dir, "override [output] dir");

    std::vector<std::string> suites;
    std::string report;
    auto* ver = app.add_subcommand("verify", "Run verification suites");
    ver->add_option("--suite", suites, "algebra, monotone or infsup (repeatable)")
        ->required()
        ->check(CLI::IsMember(sdg::harness::suite_names()));
    ver->add_option("--report", report, "write a JSON report");

    std::string kind = "triangular", sd = "stokes", side = "top", out;
    int nx = 4, ny = 4;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1, distortion = 0.0;
    std::uint64_t seed = 1;
    auto* msh = app.add_subcommand("mesh", "Write a generated primal mesh in poly2d format");
    msh->add_option("--kind", kind, "triangular, rectangular or distorted")->required();
    msh->add_option("--nx", nx)->check(CLI::PositiveNumber);
    msh->add_option("--ny", ny)->check(CLI::PositiveNumber);
    msh->add_option("--x0", x0);
    msh->add_option("--x1", x1);
    msh->add_option("--y0", y0);
    msh->add_option("--y1", y1);
    msh->add_option("--distortion", distortion);
    msh->add_option("--seed", seed);
    msh->add_option("--subdomain", sd)->check(CLI::IsMember({"stokes", "darcy"}));
    msh->add_option("--interface-side", side)->check(CLI::IsMember({"none", "bottom", "right", "top", "left"}));
    msh->add_option("--out", out, "output file")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return cmd_run(config, parallel, out_dir);
        if (*ver) return cmd_verify(suites, report);
        mesh::PrimalSpec spec;
        spec.kind = mesh::parse_mesh_kind(kind);
        if (spec.kind == mesh::MeshKind::PolygonalFile) throw InvalidArgument("mesh: choose a generated kind");
        spec.nx = nx;
        spec.ny = ny;
        spec.box = {x0, x1, y0, y1};
        spec.distortion = distortion;
        spec.seed = seed;
        spec.subdomain = sd == "stokes" ? mesh::Subdomain::Stokes : mesh::Subdomain::Darcy;
        const std::map<std::string, mesh::Side> sides = {{"none", mesh::Side::None},   {"bottom", mesh::Side::Bottom},
                                                         {"right", mesh::Side::Right}, {"top", mesh::Side::Top},
                                                         {"left", mesh::Side::Left}};
        spec.interface_side = sides.at(side);
        std::ofstream f(out);
        if (!f) throw Error("cannot write '" + out + "'");
        mesh::write_poly2d(f, mesh::generate_primal(spec));
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "sdg: " << e.what() << '\n';
        return 2;
    }
}
