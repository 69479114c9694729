#pragma once

/// @file primal_mesh.hpp
/// @brief Initial polygonal partition of one subdomain, with boundary tags.

#include "sdg/types.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sdg::mesh {

enum class Subdomain { Stokes, Darcy };

/// Boundary classification. Neumann marks the part of the Darcy boundary
/// where u_D.n = 0 is imposed naturally instead of a pressure value.
enum class BoundaryTag { GammaS, GammaD, Interface, Neumann };

std::string to_string(BoundaryTag tag);
BoundaryTag parse_boundary_tag(const std::string& name);
std::string to_string(Subdomain sd);

/// Axis-aligned rectangle.
struct Box {
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
};

enum class Side { None, Bottom, Right, Top, Left };

struct TaggedEdge {
    int a = -1;
    int b = -1;
    BoundaryTag tag = BoundaryTag::GammaS;
};

/// Unique primal edge. Vertices are stored lower index first.
struct PrimalEdge {
    std::array<int, 2> v{-1, -1};
    std::array<int, 2> cell{-1, -1};  ///< cell[1] < 0 on the boundary
    std::optional<BoundaryTag> tag;   ///< set exactly for boundary edges
    bool boundary() const { return cell[1] < 0; }
};

class PrimalMesh {
public:
    /// Validates the input and builds edge connectivity. Interface vertices
    /// within 1e-10 of the interface line are snapped onto it.
    PrimalMesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells, Subdomain subdomain,
               const std::vector<TaggedEdge>& boundary_tags);

    const std::vector<Vec2>& vertices() const { return vertices_; }
    const std::vector<std::vector<int>>& cells() const { return cells_; }
    const std::vector<PrimalEdge>& edges() const { return edges_; }
    Subdomain subdomain() const { return subdomain_; }

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_cells() const { return static_cast<int>(cells_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    /// Edge id of the (unordered) vertex pair, if it exists.
    std::optional<int> find_edge(int a, int b) const;
    /// Edge ids of the cell in local order: local edge i joins vertex i and i+1.
    const std::vector<int>& cell_edges(int c) const { return cell_edges_[static_cast<std::size_t>(c)]; }

    double cell_area(int c) const;
    Vec2 cell_centroid(int c) const;
    double cell_diameter(int c) const;
    double area() const;

    /// Re-tag boundary edges whose midpoint satisfies `pred` (used to split
    /// Dirichlet and Neumann parts of an outer boundary).
    template <class Pred>
    void retag_boundary(BoundaryTag from, BoundaryTag to, Pred pred)
    {
        for (auto& e : edges_) {
            if (e.tag && *e.tag == from) {
                const Vec2 mid = 0.5 * (vertices_[e.v[0]] + vertices_[e.v[1]]);
                if (pred(mid)) e.tag = to;
            }
        }
    }

private:
    void build_edges(const std::vector<TaggedEdge>& tags);
    void validate_cells() const;
    void snap_interface();

    std::vector<Vec2> vertices_;
    std::vector<std::vector<int>> cells_;
    std::vector<std::vector<int>> cell_edges_;
    std::vector<PrimalEdge> edges_;
    std::map<std::pair<int, int>, int> edge_index_;
    Subdomain subdomain_;
};

enum class MeshKind { Triangular, Rectangular, Distorted, PolygonalFile };

MeshKind parse_mesh_kind(const std::string& name);
std::string to_string(MeshKind kind);

/// Parameters of the structured primal generators.
struct PrimalSpec {
    MeshKind kind = MeshKind::Rectangular;
    int nx = 1;
    int ny = 1;
    Box box{};
    double distortion = 0.0;  ///< fraction of min(dx, dy), in [0, 0.5)
    std::uint64_t seed = 0;
    Subdomain subdomain = Subdomain::Stokes;
    Side interface_side = Side::None;
    std::string path;  ///< only for PolygonalFile
};

/// Builds a conforming primal mesh of `spec.box`. Boundary edges on
/// `interface_side` are tagged Interface, the rest GammaS or GammaD by subdomain.
PrimalMesh generate_primal(const PrimalSpec& spec);

/// poly2d text format: `poly2d nv nc`, nv coordinate lines, nc cell lines
/// `k i1 .. ik`, then `edge i j TAG` lines for every boundary edge.
PrimalMesh read_poly2d(std::istream& in, Subdomain subdomain);
PrimalMesh read_poly2d_file(const std::string& path, Subdomain subdomain);
void write_poly2d(std::ostream& out, const PrimalMesh& mesh);

}  // namespace sdg::mesh
