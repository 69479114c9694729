#pragma once

/// @file harness.hpp
/// @brief Run configuration, mesh-pair construction, refinement studies and
/// their CSV, VTK and rate-summary outputs.

#include "sdg/fields/fields.hpp"
#include "sdg/mesh/staggered_mesh.hpp"
#include "sdg/verify/verify.hpp"

#include <iosfwd>
#include <map>
#include <optional>

namespace sdg::harness {

struct MeshOptions {
    mesh::MeshKind stokes_kind = mesh::MeshKind::Triangular;
    mesh::MeshKind darcy_kind = mesh::MeshKind::Triangular;
    double distortion = 0.0;
    std::uint64_t seed = 1;
    bool nonmatching = false;  ///< Darcy grid uses nx + 1 cells along the interface
    mesh::PointRule point_rule = mesh::PointRule::Centroid;
    std::vector<std::string> stokes_files, darcy_files;  ///< polygonal-file kind, one per level
};

struct MeshPair {
    std::shared_ptr<const mesh::StaggeredMesh> stokes, darcy;
};

/// Structured grids with ny = round(nx * height / width) per subdomain, or
/// the `level`-th polygonal files. Darcy boundary edges selected by the
/// case's Neumann predicate are re-tagged Neumann.
MeshPair build_meshes(const cases::ManufacturedCase& c, const MeshOptions& opts, int nx, int level = 0);

struct RateWindow {
    double lo = 0.0, hi = 0.0;
};

struct RunConfig {
    std::string case_id = "ex1";
    std::optional<double> G;
    MeshOptions mesh;
    std::vector<int> levels{4, 8, 16, 32};
    int k = 1;
    solver::PicardSettings picard;
    std::string output_dir;  ///< empty: nothing written
    bool write_vtk = true;
    bool timing = true;      ///< false writes seconds = 0 for byte-stable CSVs
    bool parallel_levels = false;
    std::map<std::string, RateWindow> rate_windows;  ///< keyed by CSV column

    /// Throws InvalidArgument unless levels are strictly increasing and
    /// k is in [1, 3].
    void validate() const;
};

/// The expected windows for degree k: L2 columns and the superconvergent
/// columns at k+1, the h and ZD error columns at k, each +-0.2.
std::map<std::string, RateWindow> theory_windows(int k);

/// INI sections [case] [mesh] [space] [solver] [output] [rates].
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

struct LevelRow {
    int level = 0;
    int nx = 0;
    double h = 0.0;          ///< max triangle diameter over both subdomains
    double h_stokes = 0.0;  ///< Stokes width / nx; rate-fit axis of Stokes columns
    double h_darcy = 0.0;   ///< Darcy width / Darcy nx; rate-fit axis of Darcy columns
    int ndof_sigma = 0, ndof_uS = 0, ndof_pS = 0, ndof_uD = 0, ndof_pD = 0;
    fields::ErrorRecord errors;
    bool has_errors = false;
    int picard_iters = 0;
    double seconds = 0.0;
    std::string failure;  ///< empty on success
};

struct WindowCheck {
    std::string column;
    RateWindow window;
    double slope = 0.0;
    bool pass = false;
};

struct ConvergenceReport {
    std::string case_id;
    std::vector<LevelRow> rows;  ///< decreasing h
    std::map<std::string, verify::RateFit> rates;
    std::vector<WindowCheck> windows;
    bool ok() const;  ///< every level succeeded and every window passed
};

const std::vector<std::string>& error_columns();
std::string csv_header();
/// Error column value of a row by CSV name.
double column_value(const LevelRow& row, const std::string& column);

/// One level: meshes, glue, assembly, Picard solve, errors and optional VTK.
/// Errors are re-thrown with the level in the message.
LevelRow run_level(const RunConfig& cfg, const cases::ManufacturedCase& c, int level);

/// Runs every level (concurrently with parallel_levels), fits rates when
/// there are at least 3 successful levels, and writes convergence.csv and
/// rates.json into output_dir when it is set. Failed levels stay in the
/// report with their message.
ConvergenceReport run_convergence(const RunConfig& cfg);

void write_csv(std::ostream& out, const ConvergenceReport& report);
void write_rates_json(std::ostream& out, const ConvergenceReport& report);

/// Legacy text VTK of both subdomains: triangles as cells with cell averages
/// of uS_x, uS_y, pS, uD_x, uD_y, pD (zero outside their subdomain).
void emit_vtk(std::ostream& out, const solver::CoupledSolution& sol, const forms::CoupledSpaces& sp);
void emit_vtk(const std::string& path, const solver::CoupledSolution& sol, const forms::CoupledSpaces& sp);

}  // namespace sdg::harness
