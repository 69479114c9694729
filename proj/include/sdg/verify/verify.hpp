#pragma once

/// @file verify.hpp
/// @brief Rate fitting, discrete inf-sup estimates, and the algebraic and
/// monotonicity checks of the discretization.

#include "sdg/forms/system.hpp"

#include <cstdint>
#include <optional>

namespace sdg::verify {

using forms::SpMat;

struct RateFit {
    std::vector<double> h, error;  ///< the points used, in input order
    double slope = 0.0;            ///< least squares of log(error) against log(h)
    std::vector<double> step_rates;  ///< log(e_i / e_{i+1}) / log(h_i / h_{i+1})
    double last_rate = 0.0;
    std::vector<std::string> notes;  ///< excluded points
};

/// Needs at least 3 points with h strictly decreasing. Points with a
/// non-positive error are dropped with a note; fewer than 2 remaining
/// points throws InvalidArgument.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

enum class InfSupForm { bS, aS };
std::string to_string(InfSupForm f);

struct InfSupEstimate {
    InfSupForm form = InfSupForm::bS;
    int level = 0;
    double constant = 0.0;
    int rows = 0, cols = 0;  ///< dimensions of the form matrix used
};

/// Square root of the smallest generalized eigenvalue of B G_v^{-1} B^T
/// against G_q. b_S pairs the h-norm on free [U_S]^2 with L2 on P_h; a_S
/// pairs the XS' norm on V_S with the ZS norm on free U_S. Dense, so meant
/// for a few thousand DOFs. Throws AssemblyError if a Gram matrix is not SPD.
InfSupEstimate estimate_infsup(const forms::CoupledSpaces& sp, InfSupForm form, int level = 0);

/// Gram matrices of one scalar component: ZS on U_S, XS' on V_S, L2 on P_h.
SpMat gram_zs(const forms::CoupledSpaces& sp);
SpMat gram_xs_prime(const forms::CoupledSpaces& sp);
SpMat gram_p(const forms::CoupledSpaces& sp);

/// Relative Frobenius deviations of the adjoint pairs.
struct AdjointReport {
    double aS = 0.0, aD = 0.0, bS = 0.0;
    double interface = 0.0;  ///< C_uS_qD + C_pD_vS^T
    double worst() const;
};
AdjointReport check_adjoints(const forms::BlockSystem& sys);

/// Orthogonality of the interpolation errors: a_D(u - J_h u, q) over U_D and
/// a_S(sigma - J_h sigma, v) over [U_S]^2 for fixed smooth fields, tested
/// against `samples` random discrete functions. Values are absolute.
struct OrthogonalityReport {
    double darcy = 0.0, stokes = 0.0;
    double worst() const { return std::max(darcy, stokes); }
};
OrthogonalityReport check_orthogonality(const forms::CoupledSpaces& sp, const forms::BlockSystem& sys, int samples,
                                        std::uint64_t seed);

/// Pointwise monotonicity margin (A(u) - A(v)).(u - v) / ((mu/rho) lambda_min(K^{-1}) |u - v|^2)
/// and continuity ratio |A(u) - A(v)| / bound, over random pairs; equal pairs are skipped.
struct MonotonicityReport {
    double min_margin = 0.0;
    double max_continuity = 0.0;
    int pairs = 0;
    int skipped = 0;
};
/// One pair; nullopt when u == v.
struct PairMargin {
    double margin = 0.0;
    double continuity = 0.0;
};
std::optional<PairMargin> monotonicity_pair(const Vec2& u, const Vec2& v, const forms::PhysicalParams& params,
                                            const Mat2& k_inv = Mat2::Identity());
MonotonicityReport check_monotonicity(const forms::PhysicalParams& params, int samples, std::uint64_t seed,
                                      const Mat2& k_inv = Mat2::Identity());

/// Re-assembles with each seeded fault and records whether the adjoint
/// check flags it (deviation above 1e-6).
struct NegativeControl {
    forms::Fault fault = forms::Fault::None;
    std::string name;
    double deviation = 0.0;
    bool detected = false;
};
std::vector<NegativeControl> run_negative_controls(const forms::CoupledSpaces& sp, const forms::PhysicalParams& params);

}  // namespace sdg::verify
