#include "sdg/cases/cases.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sdg::cases {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec2 value(const std::array<Jet, 2>& u) { return {u[0].v, u[1].v}; }

Mat2 jacobian(const std::array<Jet, 2>& u)
{
    Mat2 j;
    j.row(0) = u[0].g.transpose();
    j.row(1) = u[1].g.transpose();
    return j;
}

std::array<Jet, 2> eval(const VectorJetFn& f, const Vec2& x) { return f(Jet::x(x.x()), Jet::y(x.y())); }
Jet eval(const ScalarJetFn& f, const Vec2& x) { return f(Jet::x(x.x()), Jet::y(x.y())); }

Vec2 interface_normal(mesh::Side stokes_side) { return stokes_side == mesh::Side::Top ? Vec2(0, 1) : Vec2(0, -1); }

// Sixth-order central differences, used only as an independent oracle.
constexpr double kStep = 1e-3;

template <class F>
double fd_first(const F& f, const Vec2& x, const Vec2& d)
{
    const double h = kStep;
    return (-f(x - 3 * h * d) + 9 * f(x - 2 * h * d) - 45 * f(x - h * d) + 45 * f(x + h * d) - 9 * f(x + 2 * h * d) +
            f(x + 3 * h * d)) /
           (60 * h);
}

template <class F>
double fd_second(const F& f, const Vec2& x, const Vec2& d)
{
    const double h = kStep;
    return (2 * f(x - 3 * h * d) - 27 * f(x - 2 * h * d) + 270 * f(x - h * d) - 490 * f(x) + 270 * f(x + h * d) -
            27 * f(x + 2 * h * d) + 2 * f(x + 3 * h * d)) /
           (180 * h * h);
}

struct FdField {
    std::function<double(const Vec2&)> f;
    Vec2 grad(const Vec2& x) const { return {fd_first(f, x, Vec2::UnitX()), fd_first(f, x, Vec2::UnitY())}; }
    double lap(const Vec2& x) const { return fd_second(f, x, Vec2::UnitX()) + fd_second(f, x, Vec2::UnitY()); }
};

FdField component(const VectorJetFn& u, int i)
{
    return {[u, i](const Vec2& x) { return u(Jet(x.x()), Jet(x.y()))[static_cast<std::size_t>(i)].v; }};
}
FdField scalar(const ScalarJetFn& p)
{
    return {[p](const Vec2& x) { return p(Jet(x.x()), Jet(x.y())).v; }};
}

Vec2 sample(std::mt19937_64& rng, const mesh::Box& b)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double sx = u(rng), sy = u(rng);
    return {b.x0 + sx * b.width(), b.y0 + sy * b.height()};
}

}  // namespace

Sources manufacture_sources(const ExactFields& fields, const forms::PhysicalParams& params, const mesh::Box& stokes,
                            const mesh::Box& darcy)
{
    // Cross-check the AD derivatives against the finite-difference oracle.
    std::mt19937_64 rng(12345);
    const auto check = [](double ad, double fd, const char* what) {
        if (!std::isfinite(ad) || std::abs(ad - fd) > 1e-5 * std::max(1.0, std::abs(fd))) {
            throw InvalidArgument(std::string("manufactured field is not smooth: derivative mismatch in ") + what);
        }
    };
    for (int s = 0; s < 8; ++s) {
        const Vec2 xs = sample(rng, stokes), xd = sample(rng, darcy);
        for (int i = 0; i < 2; ++i) {
            const auto us = eval(fields.uS, xs)[static_cast<std::size_t>(i)];
            const auto ud = eval(fields.uD, xd)[static_cast<std::size_t>(i)];
            const FdField fs = component(fields.uS, i), fdd = component(fields.uD, i);
            check(us.laplacian(), fs.lap(xs), "u_S");
            check(us.g.x(), fs.grad(xs).x(), "u_S");
            check(ud.g.y(), fdd.grad(xd).y(), "u_D");
        }
        check(eval(fields.pS, xs).g.x(), scalar(fields.pS).grad(xs).x(), "p_S");
        check(eval(fields.pD, xd).g.y(), scalar(fields.pD).grad(xd).y(), "p_D");
    }

    Sources s;
    const double nu = params.nu;
    s.fS = [f = fields, nu](const Vec2& x) {
        const auto u = eval(f.uS, x);
        const Jet p = eval(f.pS, x);
        return Vec2(-nu * u[0].laplacian() + p.g.x(), -nu * u[1].laplacian() + p.g.y());
    };
    s.fD = [f = fields](const Vec2& x) {
        const auto u = eval(f.uD, x);
        return u[0].g.x() + u[1].g.y();
    };
    s.gD = [f = fields, params](const Vec2& x) {
        const Vec2 u = value(eval(f.uD, x));
        return forms::apply_A(u, params, params.k_inv(x)) + eval(f.pD, x).g;
    };
    s.g1 = [f = fields, nu](const Vec2& x, const Vec2& n, const Vec2&) {
        const Mat2 j = jacobian(eval(f.uS, x));
        return eval(f.pS, x).v - nu * n.dot(j * n) - eval(f.pD, x).v;
    };
    const double G = params.G;
    s.g2 = [f = fields, nu, G](const Vec2& x, const Vec2& n, const Vec2& t) {
        const auto u = eval(f.uS, x);
        return -nu * t.dot(jacobian(u) * n) - G * value(u).dot(t);
    };
    return s;
}

PermeabilityField PermeabilityField::identity() { return {}; }

PermeabilityField PermeabilityField::oscillatory(double eps)
{
    if (!(eps > 0.0)) throw InvalidArgument("oscillatory permeability needs eps > 0");
    PermeabilityField f;
    f.kind_ = PermeabilityKind::Oscillatory;
    f.eps_ = eps;
    return f;
}

PermeabilityField PermeabilityField::high_contrast(std::vector<mesh::Box> region, double value)
{
    if (!(value > 0.0)) throw InvalidArgument("high-contrast permeability must be positive");
    PermeabilityField f;
    f.kind_ = PermeabilityKind::HighContrast;
    f.region_ = std::move(region);
    f.value_ = value;
    return f;
}

bool PermeabilityField::in_region(const Vec2& x) const
{
    return std::any_of(region_.begin(), region_.end(), [&](const mesh::Box& b) {
        return x.x() >= b.x0 && x.x() <= b.x1 && x.y() >= b.y0 && x.y() <= b.y1;
    });
}

double PermeabilityField::profile(const Vec2& x) const
{
    switch (kind_) {
    case PermeabilityKind::Identity: return 1.0;
    case PermeabilityKind::Oscillatory: {
        const double sx = std::sin(2 * kPi * x.x() / eps_);
        const double sy = std::sin(2 * kPi * x.y() / eps_);
        const double cx = std::cos(2 * kPi * x.x() / eps_);
        return (2 + 1.8 * sx) / (2 + 1.8 * sy) + (2 + 1.8 * sy) / (2 + 1.8 * cx);
    }
    case PermeabilityKind::HighContrast: return in_region(x) ? value_ : 1.0;
    }
    return 1.0;
}

Mat2 PermeabilityField::K(const Vec2& x) const
{
    const double r = profile(x);
    return (kind_ == PermeabilityKind::Oscillatory ? 1.0 / r : r) * Mat2::Identity();
}

Mat2 PermeabilityField::K_inv(const Vec2& x) const
{
    const double r = profile(x);
    return (kind_ == PermeabilityKind::Oscillatory ? r : 1.0 / r) * Mat2::Identity();
}

Mat2 eval_permeability(const PermeabilityField& field, double x, double y) { return field.K(Vec2(x, y)); }

Vec2 ManufacturedCase::uS(const Vec2& x) const { return value(eval(exact.uS, x)); }
Mat2 ManufacturedCase::grad_uS(const Vec2& x) const { return jacobian(eval(exact.uS, x)); }
double ManufacturedCase::pS(const Vec2& x) const { return eval(exact.pS, x).v; }
Vec2 ManufacturedCase::uD(const Vec2& x) const { return value(eval(exact.uD, x)); }
double ManufacturedCase::pD(const Vec2& x) const { return eval(exact.pD, x).v; }
Vec2 ManufacturedCase::grad_pD(const Vec2& x) const { return eval(exact.pD, x).g; }

namespace {

ExactFields example1()
{
    ExactFields f;
    f.uS = [](const Jet& x, const Jet& y) {
        const Jet c = cos(kPi * y / 2.0);
        return std::array<Jet, 2>{-(c * c) * sin(kPi * x / 2.0), 0.25 * cos(kPi * x / 2.0) * (sin(kPi * y) + kPi * y)};
    };
    f.pS = [](const Jet& x, const Jet& y) {
        const Jet c = cos(kPi * y / 2.0);
        return -kPi / 4.0 * cos(kPi * x / 2.0) * (y - 2.0 * c * c);
    };
    f.uD = [](const Jet& x, const Jet& y) {
        return std::array<Jet, 2>{-(kPi * kPi / 8.0) * y * sin(kPi * x / 2.0), kPi / 4.0 * cos(kPi * x / 2.0)};
    };
    f.pD = [](const Jet& x, const Jet& y) { return -kPi / 4.0 * cos(kPi * x / 2.0) * y; };
    return f;
}

ExactFields example2()
{
    ExactFields f;
    const auto second = [](const Jet& x, const Jet& y) {
        const Jet s = sin(kPi * y);
        return -2.0 * x * s * s * (2.0 * x - 1.0) * (x - 1.0);
    };
    f.uS = [second](const Jet& x, const Jet& y) {
        return std::array<Jet, 2>{x * x * kPi * sin(2.0 * kPi * y) * pow(x - 1.0, 2), second(x, y)};
    };
    f.pS = [](const Jet& x, const Jet& y) { return (std::cos(1.0) - 1.0) * std::sin(1.0) + cos(y) * sin(x); };
    f.uD = [second](const Jet& x, const Jet& y) {
        return std::array<Jet, 2>{sin(kPi * x) * sin(kPi * y), second(x, y)};
    };
    f.pD = [](const Jet& x, const Jet& y) { return sin(kPi * x) * cos(kPi * y); };
    return f;
}

ExactFields example3()
{
    ExactFields f;
    f.uS = [](const Jet& x, const Jet& y) {
        const Jet c = cos(kPi * x);
        const Jet q = y * y - 0.25;
        return std::array<Jet, 2>{16.0 * y * c * c * q, 8.0 * kPi * c * sin(kPi * x) * q * q};
    };
    f.pS = [](const Jet& x, const Jet&) { return x * x; };
    f.uD = [](const Jet& x, const Jet& y) {
        return std::array<Jet, 2>{sin(2.0 * kPi * x) * cos(2.0 * kPi * y), -cos(2.0 * kPi * x) * sin(2.0 * kPi * y)};
    };
    f.pD = [](const Jet& x, const Jet& y) { return cos(2.0 * kPi * x) * cos(2.0 * kPi * y); };
    return f;
}

ExactFields kovasznay(double eps)
{
    const double lambda = -8.0 * kPi * kPi / (1.0 / eps + std::sqrt(1.0 / (eps * eps) + 64.0 * kPi * kPi));
    ExactFields f;
    f.uS = [lambda](const Jet& x, const Jet& y) {
        const Jet e = exp(lambda * x);
        return std::array<Jet, 2>{1.0 - e * cos(2.0 * kPi * y), lambda / (2.0 * kPi) * e * sin(2.0 * kPi * y)};
    };
    f.pS = [lambda](const Jet& x, const Jet&) { return 0.5 * (1.0 - exp(2.0 * lambda * x)); };
    f.uD = [](const Jet&, const Jet&) { return std::array<Jet, 2>{Jet(0.0), Jet(0.0)}; };
    f.pD = [](const Jet&, const Jet&) { return Jet(0.0); };
    return f;
}

Sources zero_sources()
{
    Sources s;
    s.fS = [](const Vec2&) { return Vec2(0, 0); };
    s.fD = [](const Vec2&) { return 0.0; };
    s.gD = [](const Vec2&) { return Vec2(0, 0); };
    s.g1 = [](const Vec2&, const Vec2&, const Vec2&) { return 0.0; };
    s.g2 = [](const Vec2&, const Vec2&, const Vec2&) { return 0.0; };
    return s;
}

}  // namespace

ManufacturedCase example_case(int id, std::optional<double> G)
{
    ManufacturedCase c;
    c.id = id;
    c.name = "ex" + std::to_string(id);
    c.params.G = G.value_or(1.0);
    switch (id) {
    case 1:
    case 2:
        c.stokes_box = {0.0, 1.0, 0.0, 1.0};
        c.darcy_box = {0.0, 1.0, 1.0, 2.0};
        c.exact = id == 1 ? example1() : example2();
        break;
    case 3:
        c.stokes_box = {0.0, 1.0, 0.0, 0.5};
        c.darcy_box = {0.0, 1.0, 0.5, 1.0};
        c.exact = example3();
        c.permeability = PermeabilityField::oscillatory(1.0 / 16.0);
        break;
    case 4: {
        c.stokes_box = {-0.5, 1.5, 0.0, 2.0};
        c.darcy_box = {-0.5, 1.5, -2.0, 0.0};
        c.stokes_interface = mesh::Side::Bottom;
        c.darcy_interface = mesh::Side::Top;
        c.exact = kovasznay(1.0);
        c.has_exact = false;
        // High-permeability region: two horizontal channels joined by a riser.
        c.permeability = PermeabilityField::high_contrast(
            {{-0.5, 1.0, -1.5, -1.25}, {0.75, 1.0, -1.25, -0.5}, {0.0, 1.5, -0.75, -0.5}}, 1e4);
        const double ybot = c.darcy_box.y0;
        c.darcy_neumann = [ybot](const Vec2& mid) { return std::abs(mid.y() - ybot) > 1e-12; };
        break;
    }
    default: throw InvalidArgument("unknown example id " + std::to_string(id));
    }
    const auto perm = c.permeability;
    if (perm.kind() != PermeabilityKind::Identity) c.params.K_inv = [perm](const Vec2& x) { return perm.K_inv(x); };
    c.sources = c.has_exact ? manufacture_sources(c.exact, c.params, c.stokes_box, c.darcy_box) : zero_sources();
    return c;
}

ManufacturedCase case_by_name(const std::string& name, std::optional<double> G)
{
    for (int id = 1; id <= 4; ++id) {
        if (name == "ex" + std::to_string(id) || name == std::to_string(id)) return example_case(id, G);
    }
    if (name == "zero") return zero_case();
    throw InvalidArgument("unknown case '" + name + "'");
}

std::vector<std::string> case_names() { return {"ex1", "ex2", "ex3", "ex4", "zero"}; }

ManufacturedCase zero_case()
{
    ManufacturedCase c;
    c.id = 0;
    c.name = "zero";
    c.stokes_box = {0.0, 1.0, 0.0, 1.0};
    c.darcy_box = {0.0, 1.0, 1.0, 2.0};
    c.exact.uS = c.exact.uD = [](const Jet&, const Jet&) { return std::array<Jet, 2>{Jet(0.0), Jet(0.0)}; };
    c.exact.pS = c.exact.pD = [](const Jet&, const Jet&) { return Jet(0.0); };
    c.sources = zero_sources();
    return c;
}

double ResidualReport::max() const
{
    return std::max({stokes_momentum, stokes_mass, darcy_mass, darcy_momentum, interface_g1, interface_g2, normal_flux});
}

ResidualReport strong_residuals(const ManufacturedCase& c, int interior_points, int interface_points,
                                std::uint64_t seed)
{
    if (!c.has_exact) throw InvalidArgument("strong_residuals: case '" + c.name + "' has no exact solution");
    ResidualReport r;
    std::mt19937_64 rng(seed);
    const FdField us[2] = {component(c.exact.uS, 0), component(c.exact.uS, 1)};
    const FdField ud[2] = {component(c.exact.uD, 0), component(c.exact.uD, 1)};
    const FdField ps = scalar(c.exact.pS), pd = scalar(c.exact.pD);
    const double nu = c.params.nu;

    for (int i = 0; i < interior_points; ++i) {
        const Vec2 xs = sample(rng, c.stokes_box);
        const Vec2 xd = sample(rng, c.darcy_box);
        const Vec2 gp = ps.grad(xs);
        const Vec2 fs = c.sources.fS(xs);
        r.stokes_momentum = std::max(r.stokes_momentum, std::abs(fs.x() - (-nu * us[0].lap(xs) + gp.x())));
        r.stokes_momentum = std::max(r.stokes_momentum, std::abs(fs.y() - (-nu * us[1].lap(xs) + gp.y())));
        r.stokes_mass = std::max(r.stokes_mass, std::abs(us[0].grad(xs).x() + us[1].grad(xs).y()));
        r.darcy_mass = std::max(r.darcy_mass, std::abs(c.sources.fD(xd) - (ud[0].grad(xd).x() + ud[1].grad(xd).y())));
        const Vec2 u(ud[0].f(xd), ud[1].f(xd));
        const Vec2 a = (c.params.mu / c.params.rho) * (c.params.k_inv(xd) * u) + (c.params.beta / c.params.rho) * u.norm() * u;
        r.darcy_momentum = std::max(r.darcy_momentum, (c.sources.gD(xd) - a - pd.grad(xd)).cwiseAbs().maxCoeff());
    }

    const Vec2 n = interface_normal(c.stokes_interface);
    const Vec2 t(n.y(), -n.x());
    const double yi = c.stokes_interface == mesh::Side::Top ? c.stokes_box.y1 : c.stokes_box.y0;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < interface_points; ++i) {
        const Vec2 x(c.stokes_box.x0 + u01(rng) * c.stokes_box.width(), yi);
        Mat2 j;
        for (int a = 0; a < 2; ++a) j.row(a) = us[a].grad(x).transpose();
        const Vec2 uval(us[0].f(x), us[1].f(x));
        const Vec2 dval(ud[0].f(x), ud[1].f(x));
        r.interface_g1 = std::max(r.interface_g1, std::abs(c.sources.g1(x, n, t) - (ps.f(x) - nu * n.dot(j * n) - pd.f(x))));
        r.interface_g2 = std::max(r.interface_g2, std::abs(c.sources.g2(x, n, t) - (-nu * t.dot(j * n) - c.params.G * uval.dot(t))));
        r.normal_flux = std::max(r.normal_flux, std::abs((uval - dval).dot(n)));
    }
    return r;
}

}  // namespace sdg::cases
