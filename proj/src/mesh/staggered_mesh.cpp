#include "sdg/mesh/staggered_mesh.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace sdg::mesh {

PointRule parse_point_rule(const std::string& name)
{
    if (name == "centroid") return PointRule::Centroid;
    if (name == "incenter-of-kernel" || name == "kernel") return PointRule::KernelIncenter;
    throw InvalidArgument("unknown interior point rule '" + name + "'");
}

KernelBall kernel_ball(const std::vector<Vec2>& polygon)
{
    // max r  s.t.  n_i . x + r <= n_i . a_i  for every edge; the optimum sits on
    // a vertex of the (x, r) feasible set, so enumerate active triples.
    const std::size_t n = polygon.size();
    std::vector<Vec2> normals;
    std::vector<double> offsets;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 d = polygon[(i + 1) % n] - polygon[i];
        const double len = d.norm();
        if (len == 0.0) continue;
        const Vec2 nrm(d.y() / len, -d.x() / len);
        normals.push_back(nrm);
        offsets.push_back(nrm.dot(polygon[i]));
    }
    const std::size_t m = normals.size();
    KernelBall best;
    best.radius = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            for (std::size_t k = j + 1; k < m; ++k) {
                Eigen::Matrix3d a;
                Eigen::Vector3d b;
                const std::size_t idx[3] = {i, j, k};
                for (int r = 0; r < 3; ++r) {
                    a.row(r) << normals[idx[r]].x(), normals[idx[r]].y(), 1.0;
                    b(r) = offsets[idx[r]];
                }
                Eigen::FullPivLU<Eigen::Matrix3d> lu(a);
                if (!lu.isInvertible()) continue;
                const Eigen::Vector3d s = lu.solve(b);
                bool feasible = true;
                for (std::size_t q = 0; q < m && feasible; ++q) {
                    feasible = normals[q].dot(s.head<2>()) + s(2) <= offsets[q] + 1e-12 * (1.0 + std::abs(offsets[q]));
                }
                if (feasible && s(2) > best.radius) {
                    best.center = s.head<2>();
                    best.radius = s(2);
                }
            }
        }
    }
    if (!(best.radius > 0.0)) best.radius = 0.0;
    return best;
}

StaggeredMesh::StaggeredMesh(std::shared_ptr<const PrimalMesh> primal, PointRule rule) : primal_(std::move(primal))
{
    const PrimalMesh& pm = *primal_;
    const int nv = pm.num_vertices();
    const int nc = pm.num_cells();
    nodes_ = pm.vertices();
    nodes_.reserve(static_cast<std::size_t>(nv + nc));

    for (int c = 0; c < nc; ++c) {
        const auto& cell = pm.cells()[static_cast<std::size_t>(c)];
        std::vector<Vec2> poly;
        for (int v : cell) poly.push_back(pm.vertices()[static_cast<std::size_t>(v)]);
        Vec2 p = rule == PointRule::Centroid ? pm.cell_centroid(c) : kernel_ball(poly).center;
        const double hE = pm.cell_diameter(c);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Vec2& a = poly[i];
            const Vec2& b = poly[(i + 1) % poly.size()];
            if (!(cross2(b - a, p - a) > 1e-12 * hE * (b - a).norm())) {
                throw MeshError("cell " + std::to_string(c) +
                                ": interior point lies outside the cell kernel (cell not star-shaped about it)");
            }
        }
        nodes_.push_back(p);
    }

    // Primal edges keep their ids; dual edges follow, one per (cell, vertex).
    edges_.resize(static_cast<std::size_t>(pm.num_edges()));
    for (int e = 0; e < pm.num_edges(); ++e) {
        const auto& pe = pm.edges()[static_cast<std::size_t>(e)];
        auto& se = edges_[static_cast<std::size_t>(e)];
        se.kind = EdgeKind::Primal;
        se.node = pe.v;
        se.tag = pe.tag;
    }
    std::vector<int> dual_base(static_cast<std::size_t>(nc));
    for (int c = 0; c < nc; ++c) {
        dual_base[static_cast<std::size_t>(c)] = static_cast<int>(edges_.size());
        for (int v : pm.cells()[static_cast<std::size_t>(c)]) {
            StaggeredEdge se;
            se.kind = EdgeKind::Dual;
            se.node = {v, nv + c};
            se.cell = c;
            edges_.push_back(se);
        }
    }

    cell_tris_.assign(static_cast<std::size_t>(nc), {});
    for (int c = 0; c < nc; ++c) {
        const auto& cell = pm.cells()[static_cast<std::size_t>(c)];
        const int n = static_cast<int>(cell.size());
        for (int i = 0; i < n; ++i) {
            Triangle t;
            t.node = {cell[static_cast<std::size_t>(i)], cell[static_cast<std::size_t>((i + 1) % n)], nv + c};
            t.cell = c;
            t.primal_edge = pm.cell_edges(c)[static_cast<std::size_t>(i)];
            t.dual_edges = {dual_base[static_cast<std::size_t>(c)] + i, dual_base[static_cast<std::size_t>(c)] + (i + 1) % n};
            const Vec2 &a = node(t.node[0]), &b = node(t.node[1]), &q = node(t.node[2]);
            t.area = 0.5 * cross2(b - a, q - a);
            t.diameter = std::max({(b - a).norm(), (q - b).norm(), (a - q).norm()});
            h_ = std::max(h_, t.diameter);
            cell_tris_[static_cast<std::size_t>(c)].push_back(static_cast<int>(triangles_.size()));
            triangles_.push_back(t);
        }
    }

    // Attach triangles to edges and fix normals.
    const auto attach = [this](int e, int t) {
        auto& se = edges_[static_cast<std::size_t>(e)];
        if (se.tri[0] < 0) {
            se.tri[0] = t;
        } else if (se.tri[1] < 0) {
            se.tri[1] = t;
        } else {
            throw MeshError("staggered edge " + std::to_string(e) + " has more than two triangles");
        }
    };
    for (int t = 0; t < num_triangles(); ++t) {
        attach(triangles_[static_cast<std::size_t>(t)].primal_edge, t);
        attach(triangles_[static_cast<std::size_t>(t)].dual_edges[0], t);
        attach(triangles_[static_cast<std::size_t>(t)].dual_edges[1], t);
    }
    for (int e = 0; e < num_edges(); ++e) {
        auto& se = edges_[static_cast<std::size_t>(e)];
        const Vec2& a = node(se.node[0]);
        const Vec2& b = node(se.node[1]);
        const Vec2 d = b - a;
        se.length = d.norm();
        se.normal = Vec2(d.y(), -d.x()) / se.length;
        const Vec2 mid = 0.5 * (a + b);
        const auto centroid = [this](int t) {
            const auto& tr = triangles_[static_cast<std::size_t>(t)];
            return (node(tr.node[0]) + node(tr.node[1]) + node(tr.node[2])) / 3.0;
        };
        if (se.kind == EdgeKind::Dual && se.tri[1] < 0) {
            throw MeshError("dual edge " + std::to_string(e) + " is not shared by two triangles");
        }
        if (se.tri[1] < 0) {
            if (se.normal.dot(mid - centroid(se.tri[0])) < 0.0) se.normal = -se.normal;
        } else if (se.normal.dot(mid - centroid(se.tri[0])) < 0.0) {
            std::swap(se.tri[0], se.tri[1]);
        }
        if (se.kind == EdgeKind::Primal) {
            fu_.push_back(e);
            if (!se.boundary()) fu0_.push_back(e);
        } else {
            fp_.push_back(e);
        }
    }
}

Vec2 StaggeredMesh::edge_point(int e, double s) const
{
    const auto& se = edge(e);
    return (1.0 - s) * node(se.node[0]) + s * node(se.node[1]);
}

RegularityReport check_regularity(const StaggeredMesh& mesh, double rho_threshold)
{
    const PrimalMesh& pm = mesh.primal();
    RegularityReport rep;
    rep.threshold = rho_threshold;
    rep.min_edge_ratio = 1.0;
    rep.min_ball_ratio = 1.0;
    for (int c = 0; c < pm.num_cells(); ++c) {
        const auto& cell = pm.cells()[static_cast<std::size_t>(c)];
        const double hE = pm.cell_diameter(c);
        std::vector<Vec2> poly;
        for (int v : cell) poly.push_back(pm.vertices()[static_cast<std::size_t>(v)]);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const double he = (poly[(i + 1) % poly.size()] - poly[i]).norm();
            rep.min_edge_ratio = std::min(rep.min_edge_ratio, he / hE);
        }
        rep.min_ball_ratio = std::min(rep.min_ball_ratio, kernel_ball(poly).radius / hE);
    }
    rep.pass = rep.min_edge_ratio >= rho_threshold && rep.min_ball_ratio >= rho_threshold;
    return rep;
}

}  // namespace sdg::mesh
