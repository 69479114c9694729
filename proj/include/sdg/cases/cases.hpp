#pragma once

/// @file cases.hpp
/// @brief Manufactured and benchmark problems on two stacked rectangles.

#include "sdg/cases/jet.hpp"
#include "sdg/forms/params.hpp"
#include "sdg/mesh/primal_mesh.hpp"

#include <array>
#include <functional>
#include <optional>
#include <vector>

namespace sdg::cases {

using ScalarJetFn = std::function<Jet(const Jet& x, const Jet& y)>;
using VectorJetFn = std::function<std::array<Jet, 2>(const Jet& x, const Jet& y)>;

/// Closed-form fields written once over Jet so that every derivative used
/// by the sources is exact.
struct ExactFields {
    VectorJetFn uS, uD;
    ScalarJetFn pS, pD;
};

using ScalarFn = std::function<double(const Vec2&)>;
using VectorFn = std::function<Vec2(const Vec2&)>;
/// Interface data at x for the Stokes outward normal n and tangent t.
using InterfaceFn = std::function<double(const Vec2& x, const Vec2& n, const Vec2& t)>;

struct Sources {
    VectorFn fS;  ///< -nu lap u_S + grad p_S
    ScalarFn fD;  ///< div u_D
    VectorFn gD;  ///< A(u_D) + grad p_D
    InterfaceFn g1;  ///< p_S - nu n.(grad u_S) n - p_D
    InterfaceFn g2;  ///< -nu t.(grad u_S) n - G u_S.t
};

/// Builds the sources from the exact fields. Derivatives are cross-checked
/// against central differences at sample points of the two boxes; a
/// mismatch above 1e-5 (relative) throws InvalidArgument.
Sources manufacture_sources(const ExactFields& fields, const forms::PhysicalParams& params, const mesh::Box& stokes,
                            const mesh::Box& darcy);

enum class PermeabilityKind { Identity, Oscillatory, HighContrast };

/// Permeability K = I, K^{-1} = rho(x) I, or K = rho(x) I with rho piecewise
/// constant over a union of rectangles.
class PermeabilityField {
public:
    static PermeabilityField identity();
    static PermeabilityField oscillatory(double eps);
    static PermeabilityField high_contrast(std::vector<mesh::Box> region, double value);

    PermeabilityKind kind() const { return kind_; }
    double eps() const { return eps_; }
    /// The scalar profile: K^{-1} = rho I (oscillatory) or K = rho I (high contrast).
    double profile(const Vec2& x) const;
    Mat2 K(const Vec2& x) const;
    Mat2 K_inv(const Vec2& x) const;
    bool in_region(const Vec2& x) const;

private:
    PermeabilityKind kind_ = PermeabilityKind::Identity;
    double eps_ = 0.0;
    double value_ = 1.0;
    std::vector<mesh::Box> region_;
};

Mat2 eval_permeability(const PermeabilityField& field, double x, double y);

struct ManufacturedCase {
    int id = 0;
    std::string name;
    mesh::Box stokes_box, darcy_box;
    mesh::Side stokes_interface = mesh::Side::Top;
    mesh::Side darcy_interface = mesh::Side::Bottom;
    forms::PhysicalParams params;
    PermeabilityField permeability = PermeabilityField::identity();
    /// False when the fields only supply boundary data (no error columns).
    bool has_exact = true;
    ExactFields exact;
    Sources sources;
    /// Darcy outer boundary edges whose midpoint satisfies this predicate
    /// carry u_D.n = 0 instead of a pressure value.
    std::function<bool(const Vec2&)> darcy_neumann;

    Vec2 uS(const Vec2& x) const;
    Mat2 grad_uS(const Vec2& x) const;  ///< (i, j) = d u_i / d x_j
    double pS(const Vec2& x) const;
    Vec2 uD(const Vec2& x) const;
    double pD(const Vec2& x) const;
    Vec2 grad_pD(const Vec2& x) const;
};

/// Examples 1-4 of the coupled benchmark set. `G` overrides the slip
/// coefficient (default 1); the interface data are rebuilt accordingly.
/// Throws InvalidArgument for an unknown id.
ManufacturedCase example_case(int id, std::optional<double> G = std::nullopt);
/// Registry lookup: "ex1".."ex4" (or "1".."4").
ManufacturedCase case_by_name(const std::string& name, std::optional<double> G = std::nullopt);
std::vector<std::string> case_names();

/// A case with all fields identically zero on the Example 1 geometry.
ManufacturedCase zero_case();

/// Maximum strong-form residuals of a case with exact fields, measured with
/// an independent sixth-order finite-difference oracle.
struct ResidualReport {
    double stokes_momentum = 0.0;
    double stokes_mass = 0.0;
    double darcy_mass = 0.0;
    double darcy_momentum = 0.0;
    double interface_g1 = 0.0;
    double interface_g2 = 0.0;
    double normal_flux = 0.0;  ///< |u_S.n - u_D.n| on the interface
    double max() const;
};
ResidualReport strong_residuals(const ManufacturedCase& c, int interior_points, int interface_points,
                                std::uint64_t seed);

}  // namespace sdg::cases
