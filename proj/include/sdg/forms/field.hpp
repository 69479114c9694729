#pragma once

/// @file field.hpp
/// @brief Coefficient vectors bound to a DOF map and its basis.

#include "sdg/femspace/basis.hpp"

namespace sdg::forms {

/// `components` copies of one scalar or vector space, stored component-major:
/// u_S and sigma_S (one V field per tensor row) use two components.
struct DiscreteField {
    const fem::DofMap* dofs = nullptr;
    const fem::LocalBasis* basis = nullptr;
    int components = 1;
    Eigen::VectorXd coef;

    DiscreteField() = default;
    DiscreteField(const fem::DofMap& d, const fem::LocalBasis& b, int ncomp)
        : dofs(&d), basis(&b), components(ncomp), coef(Eigen::VectorXd::Zero(ncomp * d.num_dofs()))
    {
    }

    int num_dofs() const { return dofs->num_dofs(); }
    fem::SpaceKind kind() const { return dofs->kind(); }
    int degree() const { return dofs->degree(); }

    /// Coefficients of one component on triangle t, in local order.
    Eigen::VectorXd local(int t, int comp = 0) const
    {
        const auto ids = dofs->local(t);
        Eigen::VectorXd out(static_cast<Eigen::Index>(ids.size()));
        const Eigen::Index off = static_cast<Eigen::Index>(comp) * num_dofs();
        for (std::size_t i = 0; i < ids.size(); ++i) out(static_cast<Eigen::Index>(i)) = coef(off + ids[i]);
        return out;
    }

    /// Throws InvalidArgument when the coefficient length does not match.
    void check() const
    {
        if (dofs == nullptr || basis == nullptr) throw InvalidArgument("DiscreteField: unbound field");
        if (coef.size() != static_cast<Eigen::Index>(components) * num_dofs()) {
            throw InvalidArgument("DiscreteField: coefficient length does not match its DOF map");
        }
    }
};

}  // namespace sdg::forms
