#include "sdg/forms/params.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace sdg::forms {

void PhysicalParams::validate(const std::vector<Vec2>& samples) const
{
    if (!(mu > 0.0) || !(rho > 0.0) || !(nu > 0.0)) throw InvalidArgument("mu, rho and nu must be positive");
    if (!(beta >= 0.0)) throw InvalidArgument("beta must be non-negative");
    if (!(G >= 0.0)) throw InvalidArgument("G must be non-negative");
    for (const auto& x : samples) {
        const Mat2 k = k_inv(x);
        if (std::abs(k(0, 1) - k(1, 0)) > 1e-12 * k.norm()) throw InvalidArgument("permeability is not symmetric");
        Eigen::SelfAdjointEigenSolver<Mat2> es(k);
        if (!(es.eigenvalues()(0) > 0.0)) throw InvalidArgument("permeability is not positive definite");
    }
}

Vec2 apply_A(const Vec2& u, const PhysicalParams& p, const Mat2& k_inv)
{
    return (p.mu / p.rho) * (k_inv * u) + (p.beta / p.rho) * u.norm() * u;
}

}  // namespace sdg::forms
