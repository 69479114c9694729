#pragma once

/// @file dofmap.hpp
/// @brief Global numbering of the staggered spaces U (scalar, continuous
/// across primal edges), V (vector, normal-continuous across dual edges)
/// and P (discontinuous polynomials on primal cells).

#include "sdg/mesh/staggered_mesh.hpp"

#include <span>

namespace sdg::fem {

enum class SpaceKind { U, V, P };

std::string to_string(SpaceKind kind);

constexpr int kMinDegree = 1;
constexpr int kMaxDegree = 3;

struct DofInfo {
    bool edge = false;  ///< edge moment or interior/modal moment
    int entity = -1;    ///< edge id, triangle id, or cell id (P)
    int moment = 0;     ///< moment index within the entity
};

/// Local order per triangle:
///   U: k+1 moments on its primal edge, then poly_dim(k-1) interior moments;
///   V: k+1 normal moments on each of its two dual edges, then the interior
///      moments for the x component, then for the y component;
///   P: the poly_dim(k) modal coefficients of the owning cell.
class DofMap {
public:
    /// Throws InvalidArgument for k outside [1, 3]. Edge DOFs of U on edges
    /// tagged in `strong_zero_tags` are constrained; V and P have none.
    DofMap(const mesh::StaggeredMesh& mesh, SpaceKind kind, int k,
           const std::vector<mesh::BoundaryTag>& strong_zero_tags = {});

    SpaceKind kind() const { return kind_; }
    int degree() const { return k_; }
    int num_dofs() const { return static_cast<int>(info_.size()); }
    int num_local() const { return nloc_; }
    int num_free() const { return static_cast<int>(free_.size()); }

    std::span<const int> local(int t) const
    {
        return {local_.data() + static_cast<std::size_t>(t) * static_cast<std::size_t>(nloc_),
                static_cast<std::size_t>(nloc_)};
    }
    const DofInfo& info(int dof) const { return info_[static_cast<std::size_t>(dof)]; }
    bool constrained(int dof) const { return constrained_[static_cast<std::size_t>(dof)] != 0; }
    const std::vector<int>& free_dofs() const { return free_; }
    /// Position of `dof` among the free DOFs, or -1 when constrained.
    int free_index(int dof) const { return free_pos_[static_cast<std::size_t>(dof)]; }

    /// Global id of moment m on edge e (U: primal edge, V: dual edge).
    int edge_dof(int e, int m) const;

private:
    SpaceKind kind_;
    int k_;
    int nloc_ = 0;
    int n_primal_edges_ = 0;
    std::vector<int> local_;
    std::vector<DofInfo> info_;
    std::vector<char> constrained_;
    std::vector<int> free_;
    std::vector<int> free_pos_;
};

}  // namespace sdg::fem
