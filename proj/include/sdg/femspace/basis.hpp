#pragma once

/// @file basis.hpp
/// @brief Shape functions dual to the DOF functionals, plus physical
/// quadrature helpers shared by assembly and interpolation.

#include "sdg/femspace/dofmap.hpp"
#include "sdg/femspace/polynomial.hpp"
#include "sdg/femspace/quadrature.hpp"

#include <functional>
#include <utility>

namespace sdg::fem {

/// Quadrature exactness used throughout: volume and interpolation, the
/// nonlinear Darcy term, and edges.
inline int volume_degree(int k) { return 2 * k + 4; }
inline int nonlinear_degree(int k) { return 3 * k + 4; }
inline int edge_degree(int k) { return 2 * k + 3; }

AffineFrame triangle_frame(const mesh::StaggeredMesh& mesh, int t);

/// Physical points and weights of the reference rule mapped to triangle t.
void triangle_quadrature(const mesh::StaggeredMesh& mesh, int t, int degree, std::vector<Vec2>& pts,
                         std::vector<double>& wts);
/// Points from node[0] to node[1] of edge e; `s` receives the [0,1] parameter.
void edge_quadrature(const mesh::StaggeredMesh& mesh, int e, int degree, std::vector<Vec2>& pts,
                     std::vector<double>& wts, std::vector<double>* s = nullptr);

/// Moments int_e f L_m ds, m = 0..k, against the orthonormal Legendre
/// frame of edge e (the U edge functionals).
Eigen::VectorXd edge_moments(const mesh::StaggeredMesh& mesh, int e, int k, const std::function<double(const Vec2&)>& f);

/// Samples nfun scalar functions at points: result (npts x nfun).
using ScalarSampler = std::function<Eigen::MatrixXd(const std::vector<Vec2>&)>;
/// Samples nfun vector functions at points: x and y components (npts x nfun).
using VectorSampler = std::function<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>(const std::vector<Vec2>&)>;

struct ScalarValues {
    Eigen::MatrixXd val, gx, gy;  ///< (npts x nlocal)
};

struct VectorValues {
    Eigen::MatrixXd vx, vy, div;  ///< (npts x nlocal)
};

class LocalBasis {
public:
    LocalBasis(const mesh::StaggeredMesh& mesh, SpaceKind kind, int k);

    const mesh::StaggeredMesh& mesh() const { return *mesh_; }
    SpaceKind kind() const { return kind_; }
    int degree() const { return k_; }
    int num_local() const { return nloc_; }
    /// Largest 2-norm condition number of the local functional matrices.
    double max_condition() const { return max_cond_; }

    /// U and P at physical points of triangle t.
    ScalarValues eval_scalar(int t, const std::vector<Vec2>& pts) const;
    /// V at physical points of triangle t.
    VectorValues eval_vector(int t, const std::vector<Vec2>& pts) const;
    /// Reference-coordinate variant; throws InvalidArgument on a bad id.
    ScalarValues eval_basis(int t, const std::vector<Vec2>& ref_pts) const;

    /// Local DOF functionals of triangle t applied to sampled functions,
    /// result (nlocal x nfun). U and V only.
    Eigen::MatrixXd functionals(int t, const ScalarSampler& f) const;
    Eigen::MatrixXd functionals(int t, const VectorSampler& f) const;
    /// Modal moments over a whole primal cell (P only), result (nlocal x nfun).
    Eigen::MatrixXd cell_moments(int c, const ScalarSampler& f) const;

    const PolySet& scalar_set(int t) const;  ///< U: per triangle, P: per owning cell
    const PolySet& vector_set(int t, int comp) const;

private:
    const mesh::StaggeredMesh* mesh_;
    SpaceKind kind_;
    int k_;
    int nloc_;
    double max_cond_ = 1.0;
    std::vector<PolySet> sets_;  ///< U: triangle, P: cell, V: 2 per triangle
};

}  // namespace sdg::fem
