#pragma once

/// @file system.hpp
/// @brief Coupled discrete spaces and the named-block saddle-point system.
///
/// Unknown layout (also the test-function layout of the rows):
///   [ sigma_S (2 x V_S) | u_S (2 x U_S) | p_S (P) | u_D (V_D) | p_D (U_D) ]
/// Every block is assembled over all DOFs, constrained ones included, so the
/// adjoint pairs are exact transposes; strong boundary values are then
/// eliminated column-wise.

#include "sdg/cases/cases.hpp"
#include "sdg/femspace/basis.hpp"
#include "sdg/mesh/interface_glue.hpp"

#include <Eigen/SparseCore>

#include <iosfwd>
#include <map>
#include <memory>

namespace sdg::forms {

using SpMat = Eigen::SparseMatrix<double>;

/// Meshes, glue, DOF maps and bases of both subdomains.
struct CoupledSpaces {
    CoupledSpaces(std::shared_ptr<const mesh::StaggeredMesh> stokes, std::shared_ptr<const mesh::StaggeredMesh> darcy,
                  int k);

    std::shared_ptr<const mesh::StaggeredMesh> mesh_s, mesh_d;
    mesh::InterfaceGlue glue;
    int k;
    fem::DofMap v_s, u_s, p_s, v_d, u_d;
    fem::LocalBasis bv_s, bu_s, bp_s, bv_d, bu_d;
};

struct BlockLayout {
    int n_sigma = 0, n_us = 0, n_ps = 0, n_ud = 0, n_pd = 0;  ///< per-space scalar DOF counts
    int sigma() const { return 0; }
    int us() const { return 2 * n_sigma; }
    int ps() const { return us() + 2 * n_us; }
    int ud() const { return ps() + n_ps; }
    int pd() const { return ud() + n_ud; }
    int size() const { return pd() + n_pd; }
};

BlockLayout layout_of(const CoupledSpaces& sp);

/// Seeded assembly bugs for negative controls.
enum class Fault {
    None,
    JumpOrientation,  ///< dual-edge jumps of a_S taken with the wrong sign
    AdjointSign,      ///< interior-edge terms of a_D* with the wrong sign
    InterfaceSign,    ///< Darcy-side interface coupling with the wrong sign
};

struct AssemblyOptions {
    Fault fault = Fault::None;
};

struct BlockSystem {
    BlockLayout layout;
    SpMat sigma_mass;  ///< nu^{-1} mass on sigma, (2 n_sigma)^2
    SpMat aS;          ///< rows u_S tests, columns sigma
    SpMat aS_star;     ///< rows sigma tests, columns u_S
    SpMat bS;          ///< rows p_S tests, columns u_S
    SpMat bS_star;     ///< rows u_S tests, columns p_S
    SpMat aD;          ///< rows p_D tests, columns u_D
    SpMat aD_star;     ///< rows u_D tests, columns p_D
    SpMat C_pD_vS;     ///< <p_D, v_S.n_S> on Gamma
    SpMat C_uS_qD;     ///< -<u_S.n_S, q_D> on Gamma
    SpMat C_BJS;       ///< G <u_S.t, v_S.t> on Gamma
    SpMat mass_vd;     ///< plain V_D mass matrix (norms, Picard increments)

    /// Full-size operator of everything except the Picard block M_A.
    SpMat static_matrix() const;
    /// Embeds an n_ud x n_ud block at the (u_D, u_D) position.
    SpMat embed_darcy(const SpMat& m_a) const;
    std::map<std::string, const SpMat*> named() const;
};

/// Throws AssemblyError when a DOF receives no quadrature contribution.
BlockSystem assemble_linear_blocks(const CoupledSpaces& sp, const PhysicalParams& params,
                                   const AssemblyOptions& opts = {});

/// M_A(v, w) = int [(mu/rho) K^{-1} v + (beta/rho) |u_prev| v] . w over the
/// Darcy region, with u_prev given by V_D coefficients.
SpMat assemble_picard_darcy(const CoupledSpaces& sp, const Eigen::VectorXd& u_prev, const PhysicalParams& params);

struct RhsData {
    Eigen::VectorXd load;             ///< full-size right-hand side before elimination
    Eigen::VectorXd dirichlet;        ///< prescribed values at constrained positions, 0 elsewhere
    std::vector<char> constrained;    ///< full-size mask
};

/// Loads for f_S, f_D, g_D, the interface data g1 and g2, and the
/// edge-moment interpolants of the exact traces on strong boundaries.
RhsData assemble_rhs(const CoupledSpaces& sp, const cases::ManufacturedCase& c);

/// Coordinate dump `i j value` per named block, preceded by `# name rows cols`.
void write_blocks_coo(std::ostream& out, const BlockSystem& sys);

}  // namespace sdg::forms
