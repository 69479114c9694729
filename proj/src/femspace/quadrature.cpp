#include "sdg/femspace/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace sdg::fem {

void gauss_jacobi(int n, double alpha, double beta, std::vector<double>& nodes, std::vector<double>& weights)
{
    if (n < 1) throw InvalidArgument("gauss_jacobi: need at least one node");
    // Golub-Welsch on the symmetric Jacobi matrix of the monic recurrence.
    Eigen::MatrixXd jm = Eigen::MatrixXd::Zero(n, n);
    const double ab = alpha + beta;
    for (int i = 0; i < n; ++i) {
        const double two_n = 2.0 * i + ab;
        if (i == 0) {
            jm(0, 0) = (beta - alpha) / (ab + 2.0);
        } else {
            jm(i, i) = (beta * beta - alpha * alpha) / (two_n * (two_n + 2.0));
        }
        if (i + 1 < n) {
            const double m = i + 1.0;
            const double t = 2.0 * m + ab;
            const double b = std::sqrt(4.0 * m * (m + alpha) * (m + beta) * (m + ab) / (t * t * (t + 1.0) * (t - 1.0)));
            jm(i, i + 1) = b;
            jm(i + 1, i) = b;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jm);
    const double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) / std::tgamma(ab + 2.0);
    nodes.resize(static_cast<std::size_t>(n));
    weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        nodes[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
    }
}

namespace {

void check_degree(int degree)
{
    if (degree < 0 || degree > kMaxQuadDegree) {
        throw InvalidArgument("quadrature degree " + std::to_string(degree) + " unsupported (0.." +
                              std::to_string(kMaxQuadDegree) + ")");
    }
}

int points_for(int degree) { return std::max(1, (degree + 2) / 2); }

SegmentRule make_segment(int degree)
{
    SegmentRule r;
    r.degree = degree;
    std::vector<double> t, w;
    gauss_jacobi(points_for(degree), 0.0, 0.0, t, w);
    for (std::size_t i = 0; i < t.size(); ++i) {
        r.points.push_back(0.5 * (t[i] + 1.0));
        r.weights.push_back(0.5 * w[i]);
    }
    return r;
}

TriangleRule make_triangle(int degree)
{
    // x = u, y = v (1 - u); the Jacobian (1 - u) is absorbed by the Jacobi weight.
    TriangleRule r;
    r.degree = degree;
    const int n = points_for(degree);
    std::vector<double> tu, wu, tv, wv;
    gauss_jacobi(n, 1.0, 0.0, tu, wu);
    gauss_jacobi(n, 0.0, 0.0, tv, wv);
    for (int i = 0; i < n; ++i) {
        const double u = 0.5 * (tu[static_cast<std::size_t>(i)] + 1.0);
        for (int j = 0; j < n; ++j) {
            const double v = 0.5 * (tv[static_cast<std::size_t>(j)] + 1.0);
            r.points.emplace_back(u, v * (1.0 - u));
            r.weights.push_back(0.125 * wu[static_cast<std::size_t>(i)] * wv[static_cast<std::size_t>(j)]);
        }
    }
    return r;
}

}  // namespace

const SegmentRule& segment_rule(int degree)
{
    check_degree(degree);
    static const std::vector<SegmentRule> rules = [] {
        std::vector<SegmentRule> out;
        for (int d = 0; d <= kMaxQuadDegree; ++d) out.push_back(make_segment(d));
        return out;
    }();
    return rules[static_cast<std::size_t>(degree)];
}

const TriangleRule& triangle_rule(int degree)
{
    check_degree(degree);
    static const std::vector<TriangleRule> rules = [] {
        std::vector<TriangleRule> out;
        for (int d = 0; d <= kMaxQuadDegree; ++d) out.push_back(make_triangle(d));
        return out;
    }();
    return rules[static_cast<std::size_t>(degree)];
}

}  // namespace sdg::fem
