#include "sdg/femspace/dofmap.hpp"

#include "sdg/femspace/polynomial.hpp"

#include <algorithm>

namespace sdg::fem {

std::string to_string(SpaceKind kind)
{
    switch (kind) {
    case SpaceKind::U: return "U";
    case SpaceKind::V: return "V";
    case SpaceKind::P: return "P";
    }
    return "?";
}

DofMap::DofMap(const mesh::StaggeredMesh& mesh, SpaceKind kind, int k,
               const std::vector<mesh::BoundaryTag>& strong_zero_tags)
    : kind_(kind), k_(k), n_primal_edges_(mesh.primal().num_edges())
{
    if (k < kMinDegree || k > kMaxDegree) {
        throw InvalidArgument("polynomial degree " + std::to_string(k) + " unsupported (1..3)");
    }
    const int ne = k + 1;
    const int ni = poly_dim(k - 1);
    const int nt = mesh.num_triangles();

    if (kind == SpaceKind::P) {
        nloc_ = poly_dim(k);
        for (int c = 0; c < mesh.num_cells(); ++c) {
            for (int m = 0; m < nloc_; ++m) info_.push_back({false, c, m});
        }
        for (int t = 0; t < nt; ++t) {
            const int c = mesh.triangle(t).cell;
            for (int m = 0; m < nloc_; ++m) local_.push_back(c * nloc_ + m);
        }
    } else if (kind == SpaceKind::U) {
        nloc_ = ne + ni;
        for (int e : mesh.primal_edges()) {
            for (int m = 0; m < ne; ++m) info_.push_back({true, e, m});
        }
        const int base = static_cast<int>(info_.size());
        for (int t = 0; t < nt; ++t) {
            for (int m = 0; m < ni; ++m) info_.push_back({false, t, m});
        }
        for (int t = 0; t < nt; ++t) {
            const int e = mesh.triangle(t).primal_edge;
            for (int m = 0; m < ne; ++m) local_.push_back(e * ne + m);
            for (int m = 0; m < ni; ++m) local_.push_back(base + t * ni + m);
        }
    } else {
        nloc_ = 2 * ne + 2 * ni;
        const int nfp = static_cast<int>(mesh.dual_edges().size());
        for (int e : mesh.dual_edges()) {
            for (int m = 0; m < ne; ++m) info_.push_back({true, e, m});
        }
        const int base = nfp * ne;
        for (int t = 0; t < nt; ++t) {
            for (int m = 0; m < 2 * ni; ++m) info_.push_back({false, t, m});
        }
        for (int t = 0; t < nt; ++t) {
            for (int j = 0; j < 2; ++j) {
                const int e = mesh.triangle(t).dual_edges[static_cast<std::size_t>(j)];
                for (int m = 0; m < ne; ++m) local_.push_back((e - n_primal_edges_) * ne + m);
            }
            for (int m = 0; m < 2 * ni; ++m) local_.push_back(base + t * 2 * ni + m);
        }
    }

    constrained_.assign(info_.size(), 0);
    if (kind == SpaceKind::U) {
        for (std::size_t i = 0; i < info_.size(); ++i) {
            if (!info_[i].edge) continue;
            const auto& tag = mesh.edge(info_[i].entity).tag;
            if (tag && std::find(strong_zero_tags.begin(), strong_zero_tags.end(), *tag) != strong_zero_tags.end()) {
                constrained_[i] = 1;
            }
        }
    }
    free_pos_.assign(info_.size(), -1);
    for (std::size_t i = 0; i < info_.size(); ++i) {
        if (!constrained_[i]) {
            free_pos_[i] = static_cast<int>(free_.size());
            free_.push_back(static_cast<int>(i));
        }
    }
}

int DofMap::edge_dof(int e, int m) const
{
    if (kind_ == SpaceKind::U) return e * (k_ + 1) + m;
    if (kind_ == SpaceKind::V) return (e - n_primal_edges_) * (k_ + 1) + m;
    throw InvalidArgument("edge_dof: space P has no edge moments");
}

}  // namespace sdg::fem
