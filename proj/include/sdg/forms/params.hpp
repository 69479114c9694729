#pragma once

/// @file params.hpp
/// @brief Physical coefficients and the pointwise Forchheimer map.

#include "sdg/types.hpp"

#include <functional>

namespace sdg::forms {

using TensorField = std::function<Mat2(const Vec2&)>;

struct PhysicalParams {
    double mu = 1.0;    ///< dynamic viscosity in the porous region
    double rho = 1.0;   ///< density
    double beta = 1.0;  ///< Forchheimer coefficient, >= 0
    double nu = 1.0;    ///< Stokes viscosity
    double G = 1.0;     ///< slip coefficient of the interface law
    TensorField K_inv;  ///< inverse permeability; empty means identity

    Mat2 k_inv(const Vec2& x) const { return K_inv ? K_inv(x) : Mat2::Identity(); }

    /// Throws InvalidArgument on non-positive coefficients, or when K^{-1}
    /// is not symmetric positive definite at one of the sample points.
    void validate(const std::vector<Vec2>& samples = {}) const;
};

/// (mu/rho) K^{-1} u + (beta/rho) |u| u.
Vec2 apply_A(const Vec2& u, const PhysicalParams& p, const Mat2& k_inv);

}  // namespace sdg::forms
