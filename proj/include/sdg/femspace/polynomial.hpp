#pragma once

/// @file polynomial.hpp
/// @brief Monomial tables, orthonormal modal frames and edge Legendre frames.
///
/// Monomials are ordered by total degree, then by decreasing x-power:
/// 1, x, y, x^2, xy, y^2, ...

#include "sdg/types.hpp"

#include <Eigen/Core>

namespace sdg::fem {

inline int poly_dim(int k) { return k < 0 ? 0 : (k + 1) * (k + 2) / 2; }

/// Values and first derivatives of all monomials of degree <= k at xi.
void monomials(int k, const Vec2& xi, double* val, double* dx, double* dy);

/// Rows are the monomial coefficients of polynomials orthonormal on the
/// reference triangle (area 1/2), graded by degree: the first poly_dim(j)
/// rows span P_j for every j <= k.
const Eigen::MatrixXd& reference_modal(int k);

/// Legendre polynomial of degree m orthonormal on [0, 1].
double legendre01(int m, double s);

/// Affine coordinates xi = inv * (x - origin); gradients map by inv^T.
struct AffineFrame {
    Vec2 origin = Vec2::Zero();
    Mat2 inv = Mat2::Identity();
    Vec2 local(const Vec2& x) const { return inv * (x - origin); }
};

/// Polynomials of degree <= k written in an affine frame.
/// coef(j, a) is the coefficient of monomial a in function j.
struct PolySet {
    AffineFrame frame;
    int k = 0;
    Eigen::MatrixXd coef;

    int size() const { return static_cast<int>(coef.rows()); }
    /// val(q, j), grad components gx(q, j), gy(q, j) at each point.
    void eval(const std::vector<Vec2>& pts, Eigen::MatrixXd& val, Eigen::MatrixXd* gx = nullptr,
              Eigen::MatrixXd* gy = nullptr) const;
};

}  // namespace sdg::fem
