#include "sdg/mesh/interface_glue.hpp"

#include <algorithm>
#include <cmath>

namespace sdg::mesh {

namespace {

constexpr double kGapTol = 1e-10;

struct Interval {
    double s0, s1;
    int edge;
};

std::vector<int> interface_edges(const StaggeredMesh& m)
{
    std::vector<int> out;
    for (int e : m.primal_edges()) {
        const auto& se = m.edge(e);
        if (se.tag && *se.tag == BoundaryTag::Interface) out.push_back(e);
    }
    return out;
}

std::vector<Interval> project(const StaggeredMesh& m, const std::vector<int>& edges, const Vec2& origin,
                              const Vec2& dir, const char* side)
{
    std::vector<Interval> out;
    for (int e : edges) {
        const auto& se = m.edge(e);
        double s[2];
        for (int i = 0; i < 2; ++i) {
            const Vec2 d = m.node(se.node[static_cast<std::size_t>(i)]) - origin;
            if (std::abs(cross2(dir, d)) > kGapTol) {
                throw MeshError(std::string(side) + " interface edge " + std::to_string(e) +
                                " is off the interface line");
            }
            s[i] = dir.dot(d);
        }
        out.push_back({std::min(s[0], s[1]), std::max(s[0], s[1]), e});
    }
    std::sort(out.begin(), out.end(), [](const Interval& x, const Interval& y) { return x.s0 < y.s0; });
    return out;
}

void check_cover(const std::vector<Interval>& iv, double length, const char* side)
{
    double cursor = 0.0;
    for (const auto& i : iv) {
        if (std::abs(i.s0 - cursor) > kGapTol) {
            throw MeshError(std::string("interface geometry mismatch: ") + side + " trace has a gap or overlap at s = " +
                            std::to_string(cursor));
        }
        cursor = i.s1;
    }
    if (std::abs(cursor - length) > kGapTol) {
        throw MeshError(std::string("interface geometry mismatch: ") + side + " trace ends at s = " +
                        std::to_string(cursor) + " instead of " + std::to_string(length));
    }
}

}  // namespace

InterfaceGlue build_interface_glue(const StaggeredMesh& stokes, const StaggeredMesh& darcy)
{
    const auto es = interface_edges(stokes);
    const auto ed = interface_edges(darcy);
    if (es.empty() || ed.empty()) throw MeshError("interface glue: a subdomain has no Interface-tagged edges");

    // Parametrize along the Stokes trace: s = (x - origin) . dir.
    std::vector<Vec2> pts;
    for (int e : es) {
        pts.push_back(stokes.node(stokes.edge(e).node[0]));
        pts.push_back(stokes.node(stokes.edge(e).node[1]));
    }
    Vec2 p0 = pts[0], p1 = pts[0];
    double best = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double d = (pts[i] - pts[j]).squaredNorm();
            if (d > best) {
                best = d;
                p0 = pts[i];
                p1 = pts[j];
            }
        }
    }
    if (p1.x() < p0.x() || (p1.x() == p0.x() && p1.y() < p0.y())) std::swap(p0, p1);
    const double length = (p1 - p0).norm();
    const Vec2 dir = (p1 - p0) / length;

    const auto is = project(stokes, es, p0, dir, "Stokes");
    const auto id = project(darcy, ed, p0, dir, "Darcy");
    check_cover(is, length, "Stokes");
    check_cover(id, length, "Darcy");

    std::vector<GlueSegment> segs;
    std::size_t i = 0, j = 0;
    while (i < is.size() && j < id.size()) {
        const double lo = std::max(is[i].s0, id[j].s0);
        const double hi = std::min(is[i].s1, id[j].s1);
        if (hi - lo >= 1e-12 * length) {
            GlueSegment g;
            g.stokes_edge = is[i].edge;
            g.darcy_edge = id[j].edge;
            g.stokes_tri = stokes.edge(g.stokes_edge).tri[0];
            g.darcy_tri = darcy.edge(g.darcy_edge).tri[0];
            g.s0 = lo;
            g.s1 = hi;
            g.a = p0 + lo * dir;
            g.b = p0 + hi * dir;
            g.length = hi - lo;
            g.normal = stokes.edge(g.stokes_edge).normal;
            g.tangent = Vec2(g.normal.y(), -g.normal.x());
            segs.push_back(g);
        }
        if (is[i].s1 < id[j].s1) {
            ++i;
        } else {
            ++j;
        }
    }
    return InterfaceGlue(std::move(segs), p0, dir, length);
}

}  // namespace sdg::mesh
