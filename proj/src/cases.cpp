#include "polyvem/cases.hpp"

#include <numbers>
#include <sstream>
#include <stdexcept>

#include "polyvem/rng.hpp"

namespace polyvem {

namespace {

constexpr double pi = std::numbers::pi;

Jet jx(const Jet& x, const Jet& y) { return x * x + y * y; }

// u = s (A(x) A'(y), -A(y) A'(x)) from a profile A and its first three derivatives
struct Profile {
    std::function<double(double)> a, a1, a2, a3;
    double s = 1.0;

    Point u(const Point& x) const { return s * Point(a(x.x()) * a1(x.y()), -a(x.y()) * a1(x.x())); }
    Eigen::Matrix2d grad(const Point& x) const {
        Eigen::Matrix2d g;
        g << a1(x.x()) * a1(x.y()), a(x.x()) * a2(x.y()), -a(x.y()) * a2(x.x()), -a1(x.y()) * a1(x.x());
        return s * g;
    }
    Point laplacian(const Point& x) const {
        return s * Point(a2(x.x()) * a1(x.y()) + a(x.x()) * a3(x.y()), -(a2(x.y()) * a1(x.x()) + a(x.y()) * a3(x.x())));
    }
};

Profile polynomial_profile() {
    return {[](double t) { return t * t * (1 - t) * (1 - t); }, [](double t) { return 2 * t - 6 * t * t + 4 * t * t * t; },
            [](double t) { return 2 - 12 * t + 12 * t * t; }, [](double t) { return -12 + 24 * t; }, 0.1};
}

Profile trigonometric_profile() {
    return {[](double t) { return std::pow(std::sin(2 * pi * t), 2); },
            [](double t) { return 2 * pi * std::sin(4 * pi * t); },
            [](double t) { return 8 * pi * pi * std::cos(4 * pi * t); },
            [](double t) { return -32 * pi * pi * pi * std::sin(4 * pi * t); }, 1.0 / (8 * pi)};
}

// f = -nu lap u + (grad u) u - grad p
std::function<Point(const Point&, double)> load(std::function<Point(const Point&)> lap, TensorField grad,
                                                VectorField u, VectorField grad_p, bool stokes) {
    return [=](const Point& x, double nu) -> Point {
        Point f = -nu * lap(x) - grad_p(x);
        if (!stokes) f += grad(x) * u(x);
        return f;
    };
}

BenchmarkCase hydrostatic(const std::string& name, ScalarField p, VectorField grad_p,
                          std::function<Jet(const Jet&, const Jet&)> p_jet, const std::string& what) {
    BenchmarkCase c;
    c.name = name;
    c.description = "Stokes, u = 0, " + what + ", f = -grad p";
    c.family = "quad";
    c.distortion = 0.3;
    c.levels = {10, 20, 40};
    c.stokes = true;
    c.exact = {[](const Point&) { return Point(0.0, 0.0); }, [](const Point&) { return Eigen::Matrix2d::Zero().eval(); },
               p};
    c.f = [grad_p](const Point& x, double) -> Point { return -grad_p(x); };
    c.u_jet = [](const Jet&, const Jet&) { return JetVector{Jet(0.0), Jet(0.0)}; };
    c.p_jet = std::move(p_jet);
    return c;
}

std::vector<BenchmarkCase> build_registry() {
    std::vector<BenchmarkCase> r;

    r.push_back(hydrostatic(
        "test1_p1", [](const Point& x) { return x.x() * x.x() * x.x() - x.y() * x.y() * x.y(); },
        [](const Point& x) { return Point(3 * x.x() * x.x(), -3 * x.y() * x.y()); },
        [](const Jet& x, const Jet& y) { return x * x * x - y * y * y; }, "p = x^3 - y^3"));
    r.push_back(hydrostatic(
        "test1_p2", [](const Point& x) { return std::sin(2 * pi * x.x()) * std::sin(2 * pi * x.y()); },
        [](const Point& x) {
            return Point(2 * pi * std::cos(2 * pi * x.x()) * std::sin(2 * pi * x.y()),
                         2 * pi * std::sin(2 * pi * x.x()) * std::cos(2 * pi * x.y()));
        },
        [](const Jet& x, const Jet& y) { return sin(2 * pi * x) * sin(2 * pi * y); },
        "p = sin(2 pi x) sin(2 pi y)"));

    {
        BenchmarkCase c;
        c.name = "test2_u1";
        c.description = "Navier-Stokes on the disk, rigid rotation u = (-y, x), p = -r^2/2 + 1/4, f = 0";
        c.domain = DomainTag::disk;
        c.family = "disk-tri";
        c.distortion = 0.5;
        c.levels = {5, 10, 20};
        c.exact = {[](const Point& x) { return Point(-x.y(), x.x()); },
                   [](const Point&) {
                       Eigen::Matrix2d g;
                       g << 0, -1, 1, 0;
                       return g;
                   },
                   [](const Point& x) { return -0.5 * x.squaredNorm() + 0.25; }};
        c.f = [](const Point&, double) { return Point(0.0, 0.0); };
        c.u_jet = [](const Jet& x, const Jet& y) { return JetVector{-y, x}; };
        c.p_jet = [](const Jet& x, const Jet& y) { return -0.5 * jx(x, y) + 0.25; };
        r.push_back(c);
    }
    {
        BenchmarkCase c;
        c.name = "test2_u2";
        c.description = "Navier-Stokes on the disk, u = 3 (x^2 - y^2, -2xy), p = 9 r^4 / 2 - 3/2, f = 0";
        c.domain = DomainTag::disk;
        c.family = "disk-tri";
        c.distortion = 0.5;
        c.levels = {5, 10, 20};
        c.exact = {[](const Point& x) { return Point(3 * (x.x() * x.x() - x.y() * x.y()), -6 * x.x() * x.y()); },
                   [](const Point& x) {
                       Eigen::Matrix2d g;
                       g << 6 * x.x(), -6 * x.y(), -6 * x.y(), -6 * x.x();
                       return g;
                   },
                   [](const Point& x) { return 4.5 * x.squaredNorm() * x.squaredNorm() - 1.5; }};
        c.f = [](const Point&, double) { return Point(0.0, 0.0); };
        c.u_jet = [](const Jet& x, const Jet& y) { return JetVector{3 * (x * x - y * y), -6 * x * y}; };
        c.p_jet = [](const Jet& x, const Jet& y) { return 4.5 * jx(x, y) * jx(x, y) - 1.5; };
        r.push_back(c);
    }
    {
        const Profile a = polynomial_profile();
        BenchmarkCase c;
        c.name = "test3";
        c.description = "Navier-Stokes, polynomial stream-function flow, p = x^3 y^3 - 1/16, viscosity sweep";
        c.family = "tri";
        c.levels = {20};
        c.nu = 1e-1;
        c.nu_sweep = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
        const VectorField u = [a](const Point& x) { return a.u(x); };
        const TensorField g = [a](const Point& x) { return a.grad(x); };
        c.exact = {u, g, [](const Point& x) { return std::pow(x.x() * x.y(), 3) - 1.0 / 16.0; }};
        c.f = load([a](const Point& x) { return a.laplacian(x); }, g, u,
                   [](const Point& x) {
                       return Point(3 * x.x() * x.x() * std::pow(x.y(), 3), 3 * std::pow(x.x(), 3) * x.y() * x.y());
                   },
                   false);
        c.u_jet = [](const Jet& x, const Jet& y) {
            const Jet ax = x * x * (1 - x) * (1 - x), ay = y * y * (1 - y) * (1 - y);
            const Jet bx = 2 * x - 6 * x * x + 4 * x * x * x, by = 2 * y - 6 * y * y + 4 * y * y * y;
            return JetVector{0.1 * ax * by, -0.1 * ay * bx};
        };
        c.p_jet = [](const Jet& x, const Jet& y) { return x * x * x * y * y * y - 1.0 / 16.0; };
        r.push_back(c);
    }
    const auto trig_u_jet = [](const Jet& x, const Jet& y) {
        const Jet sx = sin(2 * pi * x), sy = sin(2 * pi * y), cx = cos(2 * pi * x), cy = cos(2 * pi * y);
        return JetVector{0.5 * sx * sx * sy * cy, -0.5 * sy * sy * sx * cx};
    };
    {
        const Profile a = trigonometric_profile();
        BenchmarkCase c;
        c.name = "test4";
        c.description = "Navier-Stokes, nu = 0.1, trigonometric flow, p = pi^2 sin(2 pi x) cos(2 pi y)";
        c.family = "tri";
        c.levels = {10, 20, 40};
        c.family_levels["tri"] = {40, 80, 160};
        c.nu = 0.1;
        const VectorField u = [a](const Point& x) { return a.u(x); };
        const TensorField g = [a](const Point& x) { return a.grad(x); };
        c.exact = {u, g, [](const Point& x) { return pi * pi * std::sin(2 * pi * x.x()) * std::cos(2 * pi * x.y()); }};
        c.f = load([a](const Point& x) { return a.laplacian(x); }, g, u,
                   [](const Point& x) {
                       return Point(2 * pi * pi * pi * std::cos(2 * pi * x.x()) * std::cos(2 * pi * x.y()),
                                    -2 * pi * pi * pi * std::sin(2 * pi * x.x()) * std::sin(2 * pi * x.y()));
                   },
                   false);
        c.u_jet = trig_u_jet;
        c.p_jet = [](const Jet& x, const Jet& y) { return pi * pi * sin(2 * pi * x) * cos(2 * pi * y); };
        r.push_back(c);
    }
    {
        const Profile a = trigonometric_profile();
        BenchmarkCase c;
        c.name = "test5";
        c.description = "Stokes, nu = 1, trigonometric flow, p = sin(2 pi x) cos(2 pi y), distorted quads";
        c.family = "quad";
        c.distortion = 0.5;
        c.levels = {10, 20, 40};
        c.stokes = true;
        const VectorField u = [a](const Point& x) { return a.u(x); };
        const TensorField g = [a](const Point& x) { return a.grad(x); };
        c.exact = {u, g, [](const Point& x) { return std::sin(2 * pi * x.x()) * std::cos(2 * pi * x.y()); }};
        c.f = load([a](const Point& x) { return a.laplacian(x); }, g, u,
                   [](const Point& x) {
                       return Point(2 * pi * std::cos(2 * pi * x.x()) * std::cos(2 * pi * x.y()),
                                    -2 * pi * std::sin(2 * pi * x.x()) * std::sin(2 * pi * x.y()));
                   },
                   true);
        c.u_jet = trig_u_jet;
        c.p_jet = [](const Jet& x, const Jet& y) { return sin(2 * pi * x) * cos(2 * pi * y); };
        r.push_back(c);
    }

    for (const BenchmarkCase& c : r) {
        const VerifyResult v = verify_case(c);
        if (v.max() > 1e-8)
            throw std::logic_error("case " + c.name + " fails its PDE identity check (" + std::to_string(v.max()) + ")");
    }
    return r;
}

}  // namespace

const std::vector<BenchmarkCase>& case_registry() {
    static const std::vector<BenchmarkCase> registry = build_registry();
    return registry;
}

const BenchmarkCase& find_case(const std::string& name) {
    for (const BenchmarkCase& c : case_registry())
        if (c.name == name) return c;
    std::string names;
    for (const BenchmarkCase& c : case_registry()) names += (names.empty() ? "" : ", ") + c.name;
    throw std::invalid_argument("unknown case '" + name + "'; registered: " + names);
}

std::string list_cases() {
    std::ostringstream os;
    for (const BenchmarkCase& c : case_registry()) {
        os << c.name << "  family=" << c.family;
        if (c.distortion > 0) os << " distortion=" << c.distortion;
        const auto join = [&os](const std::vector<int>& l) {
            for (std::size_t i = 0; i < l.size(); ++i) os << (i ? "," : "") << l[i];
        };
        os << " levels=";
        join(c.levels_for(c.family));
        if (c.levels_for(c.family) != c.levels) {
            os << " (other families ";
            join(c.levels);
            os << ')';
        }
        if (c.nu_sweep.empty())
            os << " nu=" << c.nu;
        else {
            os << " nu=";
            for (std::size_t i = 0; i < c.nu_sweep.size(); ++i) os << (i ? "," : "") << c.nu_sweep[i];
        }
        os << "\n    " << c.description << '\n';
    }
    return os.str();
}

VerifyResult verify_case(const BenchmarkCase& c, int samples, std::uint64_t seed) {
    Rng rng(seed);
    VerifyResult r;
    std::vector<double> nus = c.nu_sweep;
    if (nus.empty()) nus.push_back(c.nu);
    for (int s = 0; s < samples; ++s) {
        Point x;
        do {
            x = c.domain == DomainTag::disk ? Point(rng.uniform(-1, 1), rng.uniform(-1, 1))
                                            : Point(rng.uniform(), rng.uniform());
        } while (c.domain == DomainTag::disk && x.squaredNorm() >= 1.0);
        const Jet X = Jet::variable(x.x(), 0), Y = Jet::variable(x.y(), 1);
        const JetVector u = c.u_jet(X, Y);
        const Jet p = c.p_jet(X, Y);
        Eigen::Matrix2d g;
        g.row(0) = u[0].g.transpose();
        g.row(1) = u[1].g.transpose();
        const Point uv(u[0].v, u[1].v);
        const Point lap(u[0].H.trace(), u[1].H.trace());
        for (double nu : nus) {
            Point res = -nu * lap - p.g - c.f(x, nu);
            if (!c.stokes) res += g * uv;
            r.pde = std::max(r.pde, res.lpNorm<Eigen::Infinity>());
        }
        r.gradient = std::max(r.gradient, (c.exact.grad_u(x) - g).lpNorm<Eigen::Infinity>());
        r.value = std::max({r.value, (c.exact.u(x) - uv).lpNorm<Eigen::Infinity>(), std::abs(c.exact.p(x) - p.v)});
        r.divergence = std::max(r.divergence, std::abs(g.trace()));
    }
    return r;
}

PolyMesh make_mesh(const std::string& family, DomainTag domain, int n, double distortion, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("make_mesh: n must be positive");
    if (family == "quad") return gen_square_quads(n, distortion, seed);
    if (family == "tri")
        return domain == DomainTag::disk ? gen_disk_triangles(n, distortion, seed) : gen_square_triangles(n);
    if (family == "disk-tri") return gen_disk_triangles(n, distortion, seed);
    if (family == "web") return gen_web_hexagons(n, seed);
    if (family == "voronoi") return gen_voronoi_cvt(domain, voronoi_seed_count(domain, 1.0 / n), 30, seed);
    throw std::invalid_argument("unknown mesh family '" + family + "' (quad, tri, web, voronoi, disk-tri)");
}

}  // namespace polyvem
