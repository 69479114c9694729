#pragma once

/// @file quadrature.hpp
/// @brief Gauss rules on [0,1] and on the reference triangle {x, y >= 0, x + y <= 1}.

#include "sdg/types.hpp"

#include <vector>

namespace sdg::fem {

constexpr int kMaxQuadDegree = 20;

struct SegmentRule {
    std::vector<double> points;  ///< in [0, 1]
    std::vector<double> weights;  ///< sum to 1
    int degree = 0;
    std::size_t size() const { return points.size(); }
};

struct TriangleRule {
    std::vector<Vec2> points;     ///< reference coordinates
    std::vector<double> weights;  ///< sum to 1/2
    int degree = 0;
    std::size_t size() const { return points.size(); }
};

/// Nodes and weights of the n-point Gauss-Jacobi rule for (1-t)^alpha (1+t)^beta on [-1, 1].
void gauss_jacobi(int n, double alpha, double beta, std::vector<double>& nodes, std::vector<double>& weights);

/// Cached rules exact for polynomials of total degree <= `degree`.
/// Throws InvalidArgument for degree < 0 or degree > 20.
const SegmentRule& segment_rule(int degree);
/// Collapsed (Duffy) product of Gauss-Legendre and Gauss-Jacobi(1, 0) rules.
const TriangleRule& triangle_rule(int degree);

}  // namespace sdg::fem
