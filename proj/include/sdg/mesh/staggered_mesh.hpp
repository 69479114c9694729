#pragma once

/// @file staggered_mesh.hpp
/// @brief Two-level staggered mesh: every primal cell S(nu) is split into
/// triangles by joining an interior point nu to its vertices.
///
/// Edge numbering: ids [0, num_primal_edges) are the primal edges F_u (same
/// ids as in the PrimalMesh), the remaining ids are the dual edges F_p.
/// Each edge stores a fixed unit normal n_e and its adjacent triangles with
/// tri[0] the triangle whose outward normal is n_e, so that the jump reads
/// [v] = v|tri[0] - v|tri[1]. Boundary normals point out of the subdomain.

#include "sdg/mesh/primal_mesh.hpp"

#include <memory>

namespace sdg::mesh {

enum class PointRule { Centroid, KernelIncenter };

PointRule parse_point_rule(const std::string& name);

enum class EdgeKind { Primal, Dual };

struct StaggeredEdge {
    EdgeKind kind = EdgeKind::Primal;
    std::array<int, 2> node{-1, -1};  ///< staggered node ids, lower id first
    double length = 0.0;
    Vec2 normal = Vec2::Zero();
    std::array<int, 2> tri{-1, -1};
    std::optional<BoundaryTag> tag;  ///< primal boundary edges only
    int cell = -1;                   ///< owning cell of a dual edge
    bool boundary() const { return tri[1] < 0; }
};

struct Triangle {
    std::array<int, 3> node{};  ///< counter-clockwise: v_i, v_{i+1}, nu
    int cell = -1;
    int primal_edge = -1;                ///< its single F_u edge
    std::array<int, 2> dual_edges{-1, -1};  ///< F_p edges (nu,v_i), (nu,v_{i+1})
    double area = 0.0;
    double diameter = 0.0;
};

class StaggeredMesh {
public:
    /// Throws MeshError naming the cell when the chosen point is not strictly
    /// inside the cell kernel (the cell is not star-shaped about it).
    StaggeredMesh(std::shared_ptr<const PrimalMesh> primal, PointRule rule = PointRule::Centroid);

    const PrimalMesh& primal() const { return *primal_; }
    std::shared_ptr<const PrimalMesh> primal_ptr() const { return primal_; }
    Subdomain subdomain() const { return primal_->subdomain(); }

    const std::vector<Vec2>& nodes() const { return nodes_; }
    const Vec2& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const Triangle& triangle(int t) const { return triangles_[static_cast<std::size_t>(t)]; }
    const std::vector<StaggeredEdge>& edges() const { return edges_; }
    const StaggeredEdge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }

    int num_triangles() const { return static_cast<int>(triangles_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_cells() const { return primal_->num_cells(); }

    const std::vector<int>& primal_edges() const { return fu_; }           ///< F_u
    const std::vector<int>& interior_primal_edges() const { return fu0_; }  ///< F_u^0
    const std::vector<int>& dual_edges() const { return fp_; }             ///< F_p
    /// S(nu): triangles of a primal cell, in local edge order.
    const std::vector<int>& cell_triangles(int c) const { return cell_tris_[static_cast<std::size_t>(c)]; }
    const Vec2& interior_point(int c) const { return nodes_[static_cast<std::size_t>(primal_->num_vertices() + c)]; }

    Vec2 edge_point(int e, double s) const;  ///< s in [0,1] from node[0] to node[1]
    Vec2 triangle_vertex(int t, int i) const { return node(triangle(t).node[static_cast<std::size_t>(i)]); }

    double h() const { return h_; }  ///< max triangle diameter

private:
    std::shared_ptr<const PrimalMesh> primal_;
    std::vector<Vec2> nodes_;
    std::vector<Triangle> triangles_;
    std::vector<StaggeredEdge> edges_;
    std::vector<int> fu_, fu0_, fp_;
    std::vector<std::vector<int>> cell_tris_;
    double h_ = 0.0;
};

/// Chebyshev centre and radius of the kernel of a counter-clockwise polygon,
/// i.e. the largest ball the polygon is star-shaped with respect to.
struct KernelBall {
    Vec2 center = Vec2::Zero();
    double radius = 0.0;
};
KernelBall kernel_ball(const std::vector<Vec2>& polygon);

struct RegularityReport {
    double min_edge_ratio = 0.0;  ///< min h_e / h_E
    double min_ball_ratio = 0.0;  ///< min kernel-ball radius / h_E
    double threshold = 0.0;
    bool pass = false;
};

RegularityReport check_regularity(const StaggeredMesh& mesh, double rho_threshold);

}  // namespace sdg::mesh
