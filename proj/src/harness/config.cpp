#include "sdg/harness/harness.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <sstream>

namespace sdg::harness {

namespace pt = boost::property_tree;

void RunConfig::validate() const
{
    if (k < fem::kMinDegree || k > fem::kMaxDegree) throw InvalidArgument("config: k must lie in [1, 3]");
    if (levels.empty()) throw InvalidArgument("config: no refinement levels");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] < 1) throw InvalidArgument("config: levels must be positive");
        if (i > 0 && levels[i] <= levels[i - 1]) throw InvalidArgument("config: levels must be strictly increasing");
    }
    const bool files = mesh.stokes_kind == mesh::MeshKind::PolygonalFile || mesh.darcy_kind == mesh::MeshKind::PolygonalFile;
    if (files && (mesh.stokes_files.size() < levels.size() || mesh.darcy_files.size() < levels.size())) {
        throw InvalidArgument("config: polygonal-file meshes need one Stokes and one Darcy file per level");
    }
    for (const auto& [name, w] : rate_windows) {
        if (!(w.lo <= w.hi)) throw InvalidArgument("config: empty rate window for " + name);
    }
    picard.validate();
}

std::map<std::string, RateWindow> theory_windows(int k)
{
    const double hi = k + 1.0, lo = k;
    return {{"e_sigma_L2", {hi - 0.2, hi + 0.2}}, {"e_uS_L2", {hi - 0.2, hi + 0.2}}, {"e_pS_L2", {hi - 0.2, hi + 0.2}},
            {"e_uD_L2", {hi - 0.2, hi + 0.2}},    {"e_pD_L2", {hi - 0.2, hi + 0.2}}, {"e_uS_h", {lo - 0.2, lo + 0.2}},
            {"e_pD_ZD", {lo - 0.2, lo + 0.2}},    {"e_super_uS", {hi - 0.2, hi + 0.2}},
            {"e_super_pD", {hi - 0.2, hi + 0.2}}};
}

namespace {

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> parts;
    boost::split(parts, s, boost::is_any_of(", \t"), boost::token_compress_on);
    std::vector<std::string> out;
    for (auto& p : parts) {
        boost::trim(p);
        if (!p.empty()) out.push_back(p);
    }
    return out;
}

bool parse_bool(const std::string& s)
{
    const std::string v = boost::to_lower_copy(boost::trim_copy(s));
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw InvalidArgument("config: expected a boolean, got '" + s + "'");
}

template <class T>
T number(const std::string& key, const std::string& s)
{
    std::istringstream in(s);
    T v{};
    if (!(in >> v) || !(in >> std::ws).eof()) throw InvalidArgument("config: bad value '" + s + "' for " + key);
    return v;
}

}  // namespace

RunConfig parse_config(std::istream& in)
{
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
    static const std::map<std::string, std::vector<std::string>> known = {
        {"case", {"id", "G"}},
        {"mesh", {"kind", "stokes_kind", "darcy_kind", "levels", "distortion", "seed", "nonmatching", "point_rule",
                  "stokes_files", "darcy_files"}},
        {"space", {"k"}},
        {"solver", {"tol_rel", "tol_res", "max_iters", "initial_guess", "seed", "damping", "linear", "linear_tol"}},
        {"output", {"dir", "vtk", "timing", "parallel_levels"}},
        {"rates", {}},
    };
    RunConfig cfg;
    bool theory = false;
    for (const auto& [section, body] : tree) {
        const auto it = known.find(section);
        if (it == known.end()) throw InvalidArgument("config: unknown section [" + section + "]");
        for (const auto& [key, node] : body) {
            const std::string v = boost::trim_copy(node.data());
            const std::string where = section + "." + key;
            if (section == "rates") {
                if (key == "expected") {
                    if (v == "theory") {
                        theory = true;
                    } else if (v != "none") {
                        throw InvalidArgument("config: rates.expected must be 'theory' or 'none'");
                    }
                    continue;
                }
                const auto& cols = error_columns();
                if (std::find(cols.begin(), cols.end(), key) == cols.end()) {
                    throw InvalidArgument("config: unknown rate column '" + key + "'");
                }
                const auto parts = split_list(v);
                if (parts.size() != 2) throw InvalidArgument("config: " + where + " needs 'lo hi'");
                cfg.rate_windows[key] = {number<double>(where, parts[0]), number<double>(where, parts[1])};
                continue;
            }
            const auto& keys = it->second;
            if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
                throw InvalidArgument("config: unknown key '" + where + "'");
            }
            if (where == "case.id") cfg.case_id = v;
            else if (where == "case.G") cfg.G = number<double>(where, v);
            else if (where == "mesh.kind") cfg.mesh.stokes_kind = cfg.mesh.darcy_kind = mesh::parse_mesh_kind(v);
            else if (where == "mesh.stokes_kind") cfg.mesh.stokes_kind = mesh::parse_mesh_kind(v);
            else if (where == "mesh.darcy_kind") cfg.mesh.darcy_kind = mesh::parse_mesh_kind(v);
            else if (where == "mesh.levels") {
                cfg.levels.clear();
                for (const auto& p : split_list(v)) cfg.levels.push_back(number<int>(where, p));
            }
            else if (where == "mesh.distortion") cfg.mesh.distortion = number<double>(where, v);
            else if (where == "mesh.seed") cfg.mesh.seed = number<std::uint64_t>(where, v);
            else if (where == "mesh.nonmatching") cfg.mesh.nonmatching = parse_bool(v);
            else if (where == "mesh.point_rule") cfg.mesh.point_rule = mesh::parse_point_rule(v);
            else if (where == "mesh.stokes_files") cfg.mesh.stokes_files = split_list(v);
            else if (where == "mesh.darcy_files") cfg.mesh.darcy_files = split_list(v);
            else if (where == "space.k") cfg.k = number<int>(where, v);
            else if (where == "solver.tol_rel") cfg.picard.tol_rel = number<double>(where, v);
            else if (where == "solver.tol_res") cfg.picard.tol_res = number<double>(where, v);
            else if (where == "solver.max_iters") cfg.picard.max_iters = number<int>(where, v);
            else if (where == "solver.initial_guess") cfg.picard.initial_guess = solver::parse_initial_guess(v);
            else if (where == "solver.seed") cfg.picard.seed = number<std::uint64_t>(where, v);
            else if (where == "solver.damping") cfg.picard.damping = number<double>(where, v);
            else if (where == "solver.linear") {
                if (v == "direct") cfg.picard.linear.mode = solver::LinearMode::Direct;
                else if (v == "iterative") cfg.picard.linear.mode = solver::LinearMode::Iterative;
                else throw InvalidArgument("config: solver.linear must be 'direct' or 'iterative'");
            }
            else if (where == "solver.linear_tol") cfg.picard.linear.tol = number<double>(where, v);
            else if (where == "output.dir") cfg.output_dir = v;
            else if (where == "output.vtk") cfg.write_vtk = parse_bool(v);
            else if (where == "output.timing") cfg.timing = parse_bool(v);
            else if (where == "output.parallel_levels") cfg.parallel_levels = parse_bool(v);
        }
    }
    // Explicit windows override the theoretical ones; k may appear after [rates].
    if (theory) {
        for (const auto& [c, w] : theory_windows(cfg.k)) cfg.rate_windows.emplace(c, w);
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidArgument("config: cannot open '" + path + "'");
    return parse_config(in);
}

}  // namespace sdg::harness
