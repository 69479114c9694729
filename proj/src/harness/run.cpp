#include "sdg/harness/harness.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>

namespace sdg::harness {

MeshPair build_meshes(const cases::ManufacturedCase& c, const MeshOptions& opts, int nx, int level)
{
    if (nx < 1) throw InvalidArgument("build_meshes: nx must be positive");
    const auto primal = [&](mesh::Subdomain sd) {
        const bool stokes = sd == mesh::Subdomain::Stokes;
        mesh::PrimalSpec spec;
        spec.kind = stokes ? opts.stokes_kind : opts.darcy_kind;
        spec.box = stokes ? c.stokes_box : c.darcy_box;
        spec.nx = !stokes && opts.nonmatching ? nx + 1 : nx;
        spec.ny = std::max(1, static_cast<int>(std::lround(spec.nx * spec.box.height() / spec.box.width())));
        spec.distortion = spec.kind == mesh::MeshKind::Distorted ? opts.distortion : 0.0;
        spec.seed = opts.seed + (stokes ? 0U : 1U);
        spec.subdomain = sd;
        spec.interface_side = stokes ? c.stokes_interface : c.darcy_interface;
        if (spec.kind == mesh::MeshKind::PolygonalFile) {
            const auto& files = stokes ? opts.stokes_files : opts.darcy_files;
            if (level < 0 || static_cast<std::size_t>(level) >= files.size()) {
                throw InvalidArgument("build_meshes: no polygonal file for level " + std::to_string(level));
            }
            spec.path = files[static_cast<std::size_t>(level)];
        }
        auto pm = std::make_shared<mesh::PrimalMesh>(mesh::generate_primal(spec));
        if (!stokes && c.darcy_neumann) pm->retag_boundary(mesh::BoundaryTag::GammaD, mesh::BoundaryTag::Neumann, c.darcy_neumann);
        return std::make_shared<const mesh::StaggeredMesh>(std::shared_ptr<const mesh::PrimalMesh>(std::move(pm)),
                                                           opts.point_rule);
    };
    return {primal(mesh::Subdomain::Stokes), primal(mesh::Subdomain::Darcy)};
}

const std::vector<std::string>& error_columns()
{
    static const std::vector<std::string> cols = {"e_sigma_L2", "e_uS_L2", "e_pS_L2",    "e_uD_L2",   "e_pD_L2",
                                                  "e_uS_h",     "e_pD_ZD", "e_super_uS", "e_super_pD"};
    return cols;
}

std::string csv_header()
{
    std::string h = "level,h,ndof_sigma,ndof_uS,ndof_pS,ndof_uD,ndof_pD";
    for (const auto& c : error_columns()) h += "," + c;
    return h + ",picard_iters,seconds";
}

double column_value(const LevelRow& row, const std::string& column)
{
    const auto& e = row.errors;
    if (column == "e_sigma_L2") return e.sigma_L2;
    if (column == "e_uS_L2") return e.uS_L2;
    if (column == "e_pS_L2") return e.pS_L2;
    if (column == "e_uD_L2") return e.uD_L2;
    if (column == "e_pD_L2") return e.pD_L2;
    if (column == "e_uS_h") return e.uS_h;
    if (column == "e_pD_ZD") return e.pD_ZD;
    if (column == "e_super_uS") return e.super_uS;
    if (column == "e_super_pD") return e.super_pD;
    throw InvalidArgument("unknown error column '" + column + "'");
}

bool ConvergenceReport::ok() const
{
    for (const auto& r : rows) {
        if (!r.failure.empty()) return false;
    }
    for (const auto& w : windows) {
        if (!w.pass) return false;
    }
    return true;
}

namespace {

std::string level_vtk_path(const RunConfig& cfg, int nx)
{
    return (std::filesystem::path(cfg.output_dir) / ("level_" + std::to_string(nx) + ".vtk")).string();
}

void set_nominal_h(LevelRow& row, const cases::ManufacturedCase& c, const MeshOptions& opts)
{
    row.h_stokes = c.stokes_box.width() / row.nx;
    row.h_darcy = c.darcy_box.width() / (opts.nonmatching ? row.nx + 1 : row.nx);
}

}  // namespace

LevelRow run_level(const RunConfig& cfg, const cases::ManufacturedCase& c, int level)
{
    const int nx = cfg.levels.at(static_cast<std::size_t>(level));
    LevelRow row;
    row.level = level;
    row.nx = nx;
    set_nominal_h(row, c, cfg.mesh);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const MeshPair meshes = build_meshes(c, cfg.mesh, nx, level);
        const forms::CoupledSpaces sp(meshes.stokes, meshes.darcy, cfg.k);
        row.h = std::max(meshes.stokes->h(), meshes.darcy->h());
        row.ndof_sigma = 2 * sp.v_s.num_dofs();
        row.ndof_uS = 2 * sp.u_s.num_dofs();
        row.ndof_pS = sp.p_s.num_dofs();
        row.ndof_uD = sp.v_d.num_dofs();
        row.ndof_pD = sp.u_d.num_dofs();
        const forms::BlockSystem sys = forms::assemble_linear_blocks(sp, c.params);
        const forms::RhsData rhs = forms::assemble_rhs(sp, c);
        const auto [sol, trace] = solver::solve_coupled(sp, sys, rhs, c.params, cfg.picard);
        row.picard_iters = trace.iterations();
        if (c.has_exact) {
            row.errors = fields::compute_errors(sol, c, sp);
            row.has_errors = true;
        }
        if (cfg.write_vtk && !cfg.output_dir.empty()) emit_vtk(level_vtk_path(cfg, nx), sol, sp);
    } catch (const std::exception& e) {
        throw Error("level " + std::to_string(level) + " (nx = " + std::to_string(nx) + "): " + e.what());
    }
    if (cfg.timing) row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

ConvergenceReport run_convergence(const RunConfig& cfg)
{
    cfg.validate();
    const cases::ManufacturedCase c = cases::case_by_name(cfg.case_id, cfg.G);
    if (!cfg.output_dir.empty()) std::filesystem::create_directories(cfg.output_dir);

    ConvergenceReport rep;
    rep.case_id = c.name;
    const auto guarded = [&](int level) {
        try {
            return run_level(cfg, c, level);
        } catch (const std::exception& e) {
            LevelRow row;
            row.level = level;
            row.nx = cfg.levels[static_cast<std::size_t>(level)];
            set_nominal_h(row, c, cfg.mesh);
            row.failure = e.what();
            return row;
        }
    };
    const int n = static_cast<int>(cfg.levels.size());
    if (cfg.parallel_levels) {
        std::vector<std::future<LevelRow>> jobs;
        for (int l = 0; l < n; ++l) jobs.push_back(std::async(std::launch::async, guarded, l));
        for (auto& j : jobs) rep.rows.push_back(j.get());
    } else {
        for (int l = 0; l < n; ++l) rep.rows.push_back(guarded(l));
    }

    std::vector<const LevelRow*> good;
    for (const auto& r : rep.rows) {
        if (r.failure.empty() && r.has_errors) good.push_back(&r);
    }
    if (good.size() >= 3) {
        for (const auto& col : error_columns()) {
            std::vector<std::pair<double, double>> pts;
            const bool darcy = col == "e_uD_L2" || col == "e_pD_L2" || col == "e_pD_ZD" || col == "e_super_pD";
            for (const LevelRow* r : good) pts.emplace_back(darcy ? r->h_darcy : r->h_stokes, column_value(*r, col));
            try {
                rep.rates.emplace(col, verify::fit_rate(pts));
            } catch (const InvalidArgument&) {
                // Too few positive errors for a fit; the window check below fails.
            }
        }
        for (const auto& [col, w] : cfg.rate_windows) {
            WindowCheck chk;
            chk.column = col;
            chk.window = w;
            const auto it = rep.rates.find(col);
            chk.slope = it == rep.rates.end() ? std::nan("") : it->second.slope;
            chk.pass = it != rep.rates.end() && chk.slope >= w.lo && chk.slope <= w.hi;
            rep.windows.push_back(chk);
        }
    } else if (rep.rows.size() >= 3 || !c.has_exact) {
        // Requested windows cannot be checked without three successful levels.
        for (const auto& [col, w] : cfg.rate_windows) rep.windows.push_back({col, w, std::nan(""), false});
    }

    if (!cfg.output_dir.empty()) {
        std::ofstream csv(std::filesystem::path(cfg.output_dir) / "convergence.csv");
        write_csv(csv, rep);
        std::ofstream js(std::filesystem::path(cfg.output_dir) / "rates.json");
        write_rates_json(js, rep);
        if (!csv || !js) throw Error("cannot write reports into '" + cfg.output_dir + "'");
    }
    return rep;
}

namespace {

std::string fmt(double v)
{
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10e", v);
    return buf;
}

}  // namespace

void write_csv(std::ostream& out, const ConvergenceReport& report)
{
    out << csv_header() << '\n';
    for (const auto& r : report.rows) {
        out << r.level << ',' << fmt(r.h) << ',' << r.ndof_sigma << ',' << r.ndof_uS << ',' << r.ndof_pS << ','
            << r.ndof_uD << ',' << r.ndof_pD;
        for (const auto& c : error_columns()) out << ',' << (r.has_errors ? fmt(column_value(r, c)) : "nan");
        out << ',' << (r.failure.empty() ? r.picard_iters : -1) << ',' << fmt(r.seconds) << '\n';
    }
}

void write_rates_json(std::ostream& out, const ConvergenceReport& report)
{
    nlohmann::ordered_json j;
    j["case"] = report.case_id;
    j["ok"] = report.ok();
    nlohmann::ordered_json rates = nlohmann::ordered_json::object();
    for (const auto& col : error_columns()) {
        const auto it = report.rates.find(col);
        if (it == report.rates.end()) continue;
        rates[col] = {{"slope", it->second.slope}, {"step_rates", it->second.step_rates}, {"notes", it->second.notes}};
    }
    j["rates"] = rates;
    nlohmann::ordered_json windows = nlohmann::ordered_json::array();
    for (const auto& w : report.windows) {
        windows.push_back({{"column", w.column},
                           {"lo", w.window.lo},
                           {"hi", w.window.hi},
                           {"slope", std::isnan(w.slope) ? nlohmann::ordered_json() : nlohmann::ordered_json(w.slope)},
                           {"pass", w.pass}});
    }
    j["windows"] = windows;
    nlohmann::ordered_json failures = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        if (!r.failure.empty()) failures.push_back(r.failure);
    }
    j["failures"] = failures;
    out << j.dump(2) << '\n';
}

namespace {

/// Cell averages of one component over every triangle.
std::vector<double> cell_average(const forms::DiscreteField& f, int comp, int which)
{
    const auto& mesh = f.basis->mesh();
    std::vector<double> out(static_cast<std::size_t>(mesh.num_triangles()));
    std::vector<Vec2> pts;
    std::vector<double> w;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        fem::triangle_quadrature(mesh, t, fem::volume_degree(f.degree()), pts, w);
        const Eigen::VectorXd c = f.local(t, comp);
        Eigen::VectorXd v;
        if (f.kind() == fem::SpaceKind::V) {
            const auto vv = f.basis->eval_vector(t, pts);
            v = (which == 0 ? vv.vx : vv.vy) * c;
        } else {
            v = f.basis->eval_scalar(t, pts).val * c;
        }
        double s = 0.0, a = 0.0;
        for (std::size_t q = 0; q < pts.size(); ++q) {
            s += w[q] * v(static_cast<Eigen::Index>(q));
            a += w[q];
        }
        out[static_cast<std::size_t>(t)] = s / a;
    }
    return out;
}

}  // namespace

void emit_vtk(std::ostream& out, const solver::CoupledSolution& sol, const forms::CoupledSpaces& sp)
{
    const auto& ms = *sp.mesh_s;
    const auto& md = *sp.mesh_d;
    const int nps = static_cast<int>(ms.nodes().size());
    const int nts = ms.num_triangles(), ntd = md.num_triangles();
    out << "# vtk DataFile Version 3.0\ncoupled Stokes-Darcy solution\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << ms.nodes().size() + md.nodes().size() << " double\n";
    char buf[96];
    for (const auto* m : {&ms, &md}) {
        for (const Vec2& x : m->nodes()) {
            std::snprintf(buf, sizeof buf, "%.12e %.12e 0\n", x.x(), x.y());
            out << buf;
        }
    }
    out << "CELLS " << nts + ntd << ' ' << 4 * (nts + ntd) << '\n';
    for (const auto& t : ms.triangles()) out << "3 " << t.node[0] << ' ' << t.node[1] << ' ' << t.node[2] << '\n';
    for (const auto& t : md.triangles()) {
        out << "3 " << t.node[0] + nps << ' ' << t.node[1] + nps << ' ' << t.node[2] + nps << '\n';
    }
    out << "CELL_TYPES " << nts + ntd << '\n';
    for (int i = 0; i < nts + ntd; ++i) out << "5\n";

    const std::vector<double> zs(static_cast<std::size_t>(nts), 0.0), zd(static_cast<std::size_t>(ntd), 0.0);
    const std::pair<const char*, std::pair<std::vector<double>, std::vector<double>>> data[] = {
        {"uS_x", {cell_average(sol.uS, 0, 0), zd}}, {"uS_y", {cell_average(sol.uS, 1, 0), zd}},
        {"pS", {cell_average(sol.pS, 0, 0), zd}},   {"uD_x", {zs, cell_average(sol.uD, 0, 0)}},
        {"uD_y", {zs, cell_average(sol.uD, 0, 1)}}, {"pD", {zs, cell_average(sol.pD, 0, 0)}}};
    out << "CELL_DATA " << nts + ntd << '\n';
    for (const auto& [name, vals] : data) {
        out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (const auto* part : {&vals.first, &vals.second}) {
            for (double v : *part) {
                std::snprintf(buf, sizeof buf, "%.12e\n", v == 0.0 ? 0.0 : v);
                out << buf;
            }
        }
    }
}

void emit_vtk(const std::string& path, const solver::CoupledSolution& sol, const forms::CoupledSpaces& sp)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    emit_vtk(out, sol, sp);
    if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace sdg::harness
