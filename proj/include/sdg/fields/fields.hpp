#pragma once

/// @file fields.hpp
/// @brief Interpolation operators, mesh-dependent norms and error records.

#include "sdg/cases/cases.hpp"
#include "sdg/solver/solver.hpp"

namespace sdg::fields {

using cases::ScalarFn;
using cases::VectorFn;
using forms::DiscreteField;

/// L2; H = broken H1 of all components of a U_S field; ZS = one component of
/// it; ZD = the 3/2-power norm on U_D; XSPrime = L2 plus scaled normal traces
/// on V_S; P = L2 plus scaled traces on P_h.
enum class NormKind { L2, H, ZS, ZD, XSPrime, P };

NormKind parse_norm_kind(const std::string& name);
std::string to_string(NormKind kind);

/// I_h: edge moments on primal edges and interior moments, per component.
DiscreteField interpolate_Ih(const fem::DofMap& dofs, const fem::LocalBasis& basis, const std::vector<ScalarFn>& comps);
/// J_h: normal moments on dual edges and interior vector moments, per component.
DiscreteField interpolate_Jh(const fem::DofMap& dofs, const fem::LocalBasis& basis, const std::vector<VectorFn>& comps);
/// pi_h: the degree-k Lagrange interpolant on every triangle, which is
/// continuous and therefore lies in U.
DiscreteField interpolate_pih(const fem::DofMap& dofs, const fem::LocalBasis& basis, const std::vector<ScalarFn>& comps);
/// L2 projection onto the cellwise polynomials P_h.
DiscreteField project_P(const fem::DofMap& dofs, const fem::LocalBasis& basis, const ScalarFn& f);

/// Exact reference subtracted from a field before taking a norm. Scalar
/// spaces use `value` and `grad`, vector spaces use `vec`; one entry per
/// component, or empty for the field itself.
struct Reference {
    std::vector<ScalarFn> value;
    std::vector<VectorFn> grad;
    std::vector<VectorFn> vec;

    static Reference scalar(std::vector<ScalarFn> v, std::vector<VectorFn> g = {})
    {
        Reference r;
        r.value = std::move(v);
        r.grad = std::move(g);
        return r;
    }
    static Reference vector(std::vector<VectorFn> v)
    {
        Reference r;
        r.vec = std::move(v);
        return r;
    }
};

/// Throws InvalidArgument when the norm does not apply to the field's space
/// or subdomain (for instance ZD on a Stokes field).
double compute_norm(const DiscreteField& f, NormKind kind, const Reference& ref = {});

/// (int |f|^p)^{1/p} over the field's subdomain, all components together.
double lp_norm(const DiscreteField& f, double p);

/// Difference of two fields on the same DOF map.
DiscreteField difference(const DiscreteField& a, const DiscreteField& b);

struct ErrorRecord {
    double sigma_L2 = 0.0, uS_L2 = 0.0, pS_L2 = 0.0, uD_L2 = 0.0, pD_L2 = 0.0;
    double uS_h = 0.0;        ///< ||u_S - u_{S,h}||_h
    double pD_ZD = 0.0;       ///< ||p_D - p_{D,h}||_{Z_D}
    double super_uS = 0.0;    ///< ||I_h u_S - u_{S,h}||_h
    double super_pD = 0.0;    ///< ||I_h p_D - p_{D,h}||_{Z_D}
};

/// sigma_S is compared with -nu grad u_S over the Stokes region.
ErrorRecord compute_errors(const solver::CoupledSolution& sol, const cases::ManufacturedCase& c,
                           const forms::CoupledSpaces& sp);

/// The exact solution written into the discrete spaces (I_h for u_S and
/// p_D, J_h for sigma_S and u_D, L2 projection for p_S).
solver::CoupledSolution interpolate_exact(const cases::ManufacturedCase& c, const forms::CoupledSpaces& sp);

}  // namespace sdg::fields
