#pragma once

/// @file interface_glue.hpp
/// @brief Common refinement of the Stokes and Darcy interface edge partitions.

#include "sdg/mesh/staggered_mesh.hpp"

namespace sdg::mesh {

struct GlueSegment {
    int stokes_edge = -1;
    int darcy_edge = -1;
    int stokes_tri = -1;
    int darcy_tri = -1;
    Vec2 a = Vec2::Zero();  ///< endpoints, ordered along the interface parameter
    Vec2 b = Vec2::Zero();
    double s0 = 0.0;
    double s1 = 0.0;
    double length = 0.0;
    Vec2 normal = Vec2::Zero();   ///< n_S, out of the Stokes region
    Vec2 tangent = Vec2::Zero();  ///< t = (n_S.y, -n_S.x)

    Vec2 point(double s) const { return (1.0 - s) * a + s * b; }
};

class InterfaceGlue {
public:
    InterfaceGlue() = default;
    InterfaceGlue(std::vector<GlueSegment> segments, Vec2 origin, Vec2 direction, double length)
        : segments_(std::move(segments)), origin_(origin), direction_(direction), length_(length)
    {
    }

    const std::vector<GlueSegment>& segments() const { return segments_; }
    int size() const { return static_cast<int>(segments_.size()); }
    const Vec2& origin() const { return origin_; }
    const Vec2& direction() const { return direction_; }
    double length() const { return length_; }  ///< |Gamma|

private:
    std::vector<GlueSegment> segments_;
    Vec2 origin_ = Vec2::Zero();
    Vec2 direction_ = Vec2::UnitX();
    double length_ = 0.0;
};

/// Throws MeshError when either side has no interface edges or when the two
/// traces do not cover the same segment (gap above 1e-10).
InterfaceGlue build_interface_glue(const StaggeredMesh& stokes, const StaggeredMesh& darcy);

}  // namespace sdg::mesh
