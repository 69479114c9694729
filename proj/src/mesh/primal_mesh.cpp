#include "sdg/mesh/primal_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

namespace sdg::mesh {

namespace {

constexpr double kSnapTol = 1e-10;

double signed_area(const std::vector<Vec2>& xs, const std::vector<int>& cell)
{
    double a = 0.0;
    const std::size_t n = cell.size();
    for (std::size_t i = 0; i < n; ++i) {
        a += cross2(xs[cell[i]], xs[cell[(i + 1) % n]]);
    }
    return 0.5 * a;
}

// Proper or touching intersection of closed segments [p1,p2] and [q1,q2].
bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2, double tol)
{
    const auto orient = [](const Vec2& a, const Vec2& b, const Vec2& c) { return cross2(b - a, c - a); };
    const double d1 = orient(q1, q2, p1);
    const double d2 = orient(q1, q2, p2);
    const double d3 = orient(p1, p2, q1);
    const double d4 = orient(p1, p2, q2);
    if (((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) &&
        ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol))) {
        return true;
    }
    const auto on_segment = [tol](const Vec2& a, const Vec2& b, const Vec2& c) {
        return std::abs(cross2(b - a, c - a)) <= tol && c.x() <= std::max(a.x(), b.x()) + tol &&
               c.x() >= std::min(a.x(), b.x()) - tol && c.y() <= std::max(a.y(), b.y()) + tol &&
               c.y() >= std::min(a.y(), b.y()) - tol;
    };
    return on_segment(q1, q2, p1) || on_segment(q1, q2, p2) || on_segment(p1, p2, q1) ||
           on_segment(p1, p2, q2);
}

// Unit-interval double from the top 53 bits; keeps the stream identical
// across standard library implementations.
double unit_double(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::string to_string(BoundaryTag tag)
{
    switch (tag) {
    case BoundaryTag::GammaS: return "GammaS";
    case BoundaryTag::GammaD: return "GammaD";
    case BoundaryTag::Interface: return "Interface";
    case BoundaryTag::Neumann: return "Neumann";
    }
    return "?";
}

BoundaryTag parse_boundary_tag(const std::string& name)
{
    if (name == "GammaS") return BoundaryTag::GammaS;
    if (name == "GammaD") return BoundaryTag::GammaD;
    if (name == "Interface") return BoundaryTag::Interface;
    if (name == "Neumann") return BoundaryTag::Neumann;
    throw InvalidArgument("unknown boundary tag '" + name + "'");
}

std::string to_string(Subdomain sd) { return sd == Subdomain::Stokes ? "stokes" : "darcy"; }

MeshKind parse_mesh_kind(const std::string& name)
{
    if (name == "triangular") return MeshKind::Triangular;
    if (name == "rectangular") return MeshKind::Rectangular;
    if (name == "distorted") return MeshKind::Distorted;
    if (name == "polygonal-file" || name == "file") return MeshKind::PolygonalFile;
    throw InvalidArgument("unknown mesh kind '" + name + "'");
}

std::string to_string(MeshKind kind)
{
    switch (kind) {
    case MeshKind::Triangular: return "triangular";
    case MeshKind::Rectangular: return "rectangular";
    case MeshKind::Distorted: return "distorted";
    case MeshKind::PolygonalFile: return "polygonal-file";
    }
    return "?";
}

PrimalMesh::PrimalMesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells, Subdomain subdomain,
                       const std::vector<TaggedEdge>& boundary_tags)
    : vertices_(std::move(vertices)), cells_(std::move(cells)), subdomain_(subdomain)
{
    if (cells_.empty()) throw MeshError("primal mesh has no cells");
    validate_cells();
    build_edges(boundary_tags);
    snap_interface();
}

void PrimalMesh::validate_cells() const
{
    double scale = 0.0;
    for (const auto& v : vertices_) scale = std::max(scale, v.cwiseAbs().maxCoeff());
    scale = std::max(scale, 1.0);
    const double tol = 1e-14 * scale * scale;

    for (std::size_t c = 0; c < cells_.size(); ++c) {
        const auto& cell = cells_[c];
        const std::string name = "cell " + std::to_string(c);
        if (cell.size() < 3) throw MeshError(name + " has fewer than 3 vertices");
        for (int v : cell) {
            if (v < 0 || v >= num_vertices()) throw MeshError(name + " references a missing vertex");
        }
        const double a = signed_area(vertices_, cell);
        if (!(a > tol)) throw MeshError(name + " is inverted or degenerate (signed area " + std::to_string(a) + ")");
        const std::size_t n = cell.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (cell[i] == cell[(i + 1) % n]) throw MeshError(name + " repeats a vertex");
            for (std::size_t j = i + 2; j < n; ++j) {
                if (i == 0 && j == n - 1) continue;  // adjacent through wrap-around
                const Vec2& p1 = vertices_[cell[i]];
                const Vec2& p2 = vertices_[cell[(i + 1) % n]];
                const Vec2& q1 = vertices_[cell[j]];
                const Vec2& q2 = vertices_[cell[(j + 1) % n]];
                if (segments_intersect(p1, p2, q1, q2, 1e-14 * scale)) {
                    throw MeshError(name + " is self-intersecting");
                }
            }
        }
    }
}

void PrimalMesh::build_edges(const std::vector<TaggedEdge>& tags)
{
    auto& index = edge_index_;
    cell_edges_.assign(cells_.size(), {});
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        const auto& cell = cells_[c];
        const std::size_t n = cell.size();
        for (std::size_t i = 0; i < n; ++i) {
            const int a = cell[i];
            const int b = cell[(i + 1) % n];
            const auto key = std::minmax(a, b);
            auto it = index.find(key);
            if (it == index.end()) {
                PrimalEdge e;
                e.v = {key.first, key.second};
                e.cell = {static_cast<int>(c), -1};
                it = index.emplace(key, static_cast<int>(edges_.size())).first;
                edges_.push_back(e);
            } else {
                auto& e = edges_[it->second];
                if (e.cell[1] >= 0) {
                    throw MeshError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                                    ") is shared by more than two cells");
                }
                if (e.cell[0] == static_cast<int>(c)) throw MeshError("cell " + std::to_string(c) + " repeats an edge");
                e.cell[1] = static_cast<int>(c);
            }
            cell_edges_[c].push_back(it->second);
        }
    }
    for (const auto& t : tags) {
        const auto it = index.find(std::minmax(t.a, t.b));
        if (it == index.end()) {
            throw MeshError("tagged edge (" + std::to_string(t.a) + "," + std::to_string(t.b) + ") does not exist");
        }
        auto& e = edges_[it->second];
        if (!e.boundary()) {
            throw MeshError("tagged edge (" + std::to_string(t.a) + "," + std::to_string(t.b) + ") is interior");
        }
        if (e.tag && *e.tag != t.tag) {
            throw MeshError("edge (" + std::to_string(t.a) + "," + std::to_string(t.b) + ") carries two tags");
        }
        e.tag = t.tag;
    }
    for (const auto& e : edges_) {
        if (e.boundary() && !e.tag) {
            throw MeshError("boundary edge (" + std::to_string(e.v[0]) + "," + std::to_string(e.v[1]) +
                            ") has no tag");
        }
    }
}

void PrimalMesh::snap_interface()
{
    std::vector<int> iv;
    for (const auto& e : edges_) {
        if (e.tag && *e.tag == BoundaryTag::Interface) {
            iv.push_back(e.v[0]);
            iv.push_back(e.v[1]);
        }
    }
    if (iv.empty()) return;
    std::sort(iv.begin(), iv.end());
    iv.erase(std::unique(iv.begin(), iv.end()), iv.end());
    // Interface line through the two mutually farthest interface vertices.
    int ia = iv.front(), ib = iv.front();
    double best = -1.0;
    for (int a : iv) {
        for (int b : iv) {
            const double d = (vertices_[a] - vertices_[b]).squaredNorm();
            if (d > best) {
                best = d;
                ia = a;
                ib = b;
            }
        }
    }
    const Vec2 p0 = vertices_[ia];
    const Vec2 dir = (vertices_[ib] - p0).normalized();
    for (int v : iv) {
        const Vec2 r = vertices_[v] - p0;
        const double off = cross2(dir, r);
        if (std::abs(off) > kSnapTol) {
            throw MeshError("interface vertex " + std::to_string(v) + " is off the interface line by " +
                            std::to_string(off));
        }
        if (off != 0.0) vertices_[v] = p0 + dir * dir.dot(r);
    }
}

std::optional<int> PrimalMesh::find_edge(int a, int b) const
{
    const auto it = edge_index_.find(std::minmax(a, b));
    if (it == edge_index_.end()) return std::nullopt;
    return it->second;
}

double PrimalMesh::cell_area(int c) const { return signed_area(vertices_, cells_[static_cast<std::size_t>(c)]); }

Vec2 PrimalMesh::cell_centroid(int c) const
{
    const auto& cell = cells_[static_cast<std::size_t>(c)];
    const std::size_t n = cell.size();
    Vec2 acc = Vec2::Zero();
    double a2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = vertices_[cell[i]];
        const Vec2& q = vertices_[cell[(i + 1) % n]];
        const double w = cross2(p, q);
        acc += w * (p + q);
        a2 += w;
    }
    return acc / (3.0 * a2);
}

double PrimalMesh::cell_diameter(int c) const
{
    const auto& cell = cells_[static_cast<std::size_t>(c)];
    double d = 0.0;
    for (std::size_t i = 0; i < cell.size(); ++i) {
        for (std::size_t j = i + 1; j < cell.size(); ++j) {
            d = std::max(d, (vertices_[cell[i]] - vertices_[cell[j]]).norm());
        }
    }
    return d;
}

double PrimalMesh::area() const
{
    double a = 0.0;
    for (int c = 0; c < num_cells(); ++c) a += cell_area(c);
    return a;
}

PrimalMesh generate_primal(const PrimalSpec& spec)
{
    if (spec.kind == MeshKind::PolygonalFile) return read_poly2d_file(spec.path, spec.subdomain);
    if (spec.nx < 1 || spec.ny < 1) throw InvalidArgument("generate_primal: nx and ny must be >= 1");
    if (!(spec.distortion >= 0.0 && spec.distortion < 0.5)) {
        throw InvalidArgument("generate_primal: distortion must lie in [0, 0.5)");
    }
    const int nx = spec.nx, ny = spec.ny;
    const double dx = spec.box.width() / nx;
    const double dy = spec.box.height() / ny;
    const auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };

    std::vector<Vec2> xs;
    xs.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            // Exact end coordinates so neighbouring subdomains share them bit for bit.
            const double x = i == nx ? spec.box.x1 : spec.box.x0 + i * dx;
            const double y = j == ny ? spec.box.y1 : spec.box.y0 + j * dy;
            xs.emplace_back(x, y);
        }
    }
    if (spec.kind == MeshKind::Distorted && spec.distortion > 0.0) {
        std::mt19937_64 rng(spec.seed);
        const double amp = spec.distortion * std::min(dx, dy);
        for (int j = 0; j <= ny; ++j) {
            for (int i = 0; i <= nx; ++i) {
                // Draw for every vertex so the stream does not depend on which are interior.
                const double rx = 2.0 * unit_double(rng) - 1.0;
                const double ry = 2.0 * unit_double(rng) - 1.0;
                if (i == 0 || j == 0 || i == nx || j == ny) continue;
                xs[static_cast<std::size_t>(vid(i, j))] += amp * Vec2(rx, ry);
            }
        }
    }

    std::vector<std::vector<int>> cells;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int v00 = vid(i, j), v10 = vid(i + 1, j), v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
            if (spec.kind == MeshKind::Triangular) {
                cells.push_back({v00, v10, v11});
                cells.push_back({v00, v11, v01});
            } else {
                cells.push_back({v00, v10, v11, v01});
            }
        }
    }

    const BoundaryTag outer = spec.subdomain == Subdomain::Stokes ? BoundaryTag::GammaS : BoundaryTag::GammaD;
    const auto tag_for = [&](Side s) { return s == spec.interface_side ? BoundaryTag::Interface : outer; };
    std::vector<TaggedEdge> tags;
    for (int i = 0; i < nx; ++i) {
        tags.push_back({vid(i, 0), vid(i + 1, 0), tag_for(Side::Bottom)});
        tags.push_back({vid(i, ny), vid(i + 1, ny), tag_for(Side::Top)});
    }
    for (int j = 0; j < ny; ++j) {
        tags.push_back({vid(0, j), vid(0, j + 1), tag_for(Side::Left)});
        tags.push_back({vid(nx, j), vid(nx, j + 1), tag_for(Side::Right)});
    }
    return PrimalMesh(std::move(xs), std::move(cells), spec.subdomain, tags);
}

PrimalMesh read_poly2d(std::istream& in, Subdomain subdomain)
{
    std::string magic;
    int nv = 0, nc = 0;
    if (!(in >> magic >> nv >> nc) || magic != "poly2d" || nv < 3 || nc < 1) {
        throw MeshError("poly2d: malformed header");
    }
    std::vector<Vec2> xs(static_cast<std::size_t>(nv));
    for (auto& x : xs) {
        std::string sx, sy;
        if (!(in >> sx >> sy)) throw MeshError("poly2d: truncated vertex list");
        x = Vec2(std::stod(sx), std::stod(sy));
    }
    std::vector<std::vector<int>> cells(static_cast<std::size_t>(nc));
    for (auto& cell : cells) {
        int k = 0;
        if (!(in >> k) || k < 3) throw MeshError("poly2d: malformed cell line");
        cell.resize(static_cast<std::size_t>(k));
        for (auto& v : cell) {
            if (!(in >> v)) throw MeshError("poly2d: truncated cell line");
        }
    }
    std::vector<TaggedEdge> tags;
    std::string word;
    while (in >> word) {
        if (word != "edge") throw MeshError("poly2d: expected 'edge', got '" + word + "'");
        TaggedEdge t;
        std::string tag;
        if (!(in >> t.a >> t.b >> tag)) throw MeshError("poly2d: malformed edge line");
        t.tag = parse_boundary_tag(tag);
        tags.push_back(t);
    }
    return PrimalMesh(std::move(xs), std::move(cells), subdomain, tags);
}

PrimalMesh read_poly2d_file(const std::string& path, Subdomain subdomain)
{
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open mesh file '" + path + "'");
    return read_poly2d(in, subdomain);
}

void write_poly2d(std::ostream& out, const PrimalMesh& mesh)
{
    out << "poly2d " << mesh.num_vertices() << ' ' << mesh.num_cells() << '\n';
    out << std::setprecision(17);
    for (const auto& x : mesh.vertices()) out << x.x() << ' ' << x.y() << '\n';
    for (const auto& cell : mesh.cells()) {
        out << cell.size();
        for (int v : cell) out << ' ' << v;
        out << '\n';
    }
    for (const auto& e : mesh.edges()) {
        if (e.tag) out << "edge " << e.v[0] << ' ' << e.v[1] << ' ' << to_string(*e.tag) << '\n';
    }
}

}  // namespace sdg::mesh
