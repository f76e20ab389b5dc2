// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "polyvem/cases.hpp"
#include "polyvem/runner.hpp"

using namespace polyvem;

namespace {

constexpr double pi = std::numbers::pi;

int failures = 0;
std::vector<double> all_div;
std::vector<int> selected;  // empty: every criterion

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) ok = false;
        if (!detail.empty()) detail += "; ";
        detail += what + (cond ? "" : " [X]");
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string list(const std::vector<double>& v, const char* f = "%.2f") {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ",") + fmt(f, x);
    return s;
}

bool within(const std::vector<double>& v, double target, double tol) {
    for (double x : v)
        if (std::abs(x - target) > tol) return false;
    return !v.empty();
}

void report(int id, const std::string& name, const Check& c, double seconds) {
    std::printf("%s %d %s (%.0fs): %s\n", c.ok ? "PASS" : "FAIL", id, name.c_str(), seconds, c.detail.c_str());
    std::fflush(stdout);
    failures += !c.ok;
}

std::vector<LevelResult> run(const std::string& name, std::function<void(RunConfig&)> tweak = nullptr) {
    RunConfig cfg;
    cfg.case_name = name;
    if (tweak) tweak(cfg);
    std::vector<LevelResult> rows = run_case(cfg);
    for (const LevelResult& r : rows)
        if (r.solve.converged) all_div.push_back(r.errors.div_inf);
    return rows;
}

std::vector<double> column(const std::vector<LevelResult>& rows, double ErrorReport::*m) {
    std::vector<double> v;
    for (const LevelResult& r : rows) v.push_back(r.errors.*m);
    return v;
}

std::vector<double> rate(const std::vector<LevelResult>& rows, double ErrorReport::*m) {
    return eoc(column(rows, &ErrorReport::h), column(rows, m));
}

bool converged(const std::vector<LevelResult>& rows) {
    for (const LevelResult& r : rows)
        if (!r.solve.converged) return false;
    return true;
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

template <class F>
void timed(int id, const std::string& name, F body) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), id) == selected.end()) return;
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
        body(c);
    } catch (const std::exception& e) {
        c.require(false, std::string("exception: ") + e.what());
    }
    report(id, name, c, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

Eigen::VectorXd random_vector(int n, unsigned seed) {
    std::mt19937 g(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = u(g);
    return v;
}

double rel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

std::vector<PolyMesh> family_meshes(int n) {
    return {make_mesh("quad", DomainTag::square, n, 0.3, 1), make_mesh("quad", DomainTag::square, n, 0.5, 1),
            make_mesh("tri", DomainTag::square, n, 0.0, 1),  make_mesh("web", DomainTag::square, n, 0.0, 1),
            make_mesh("voronoi", DomainTag::square, n, 0.0, 1), make_mesh("voronoi", DomainTag::disk, n, 0.0, 1),
            make_mesh("disk-tri", DomainTag::disk, n, 0.5, 1)};
}

const char* family_names[] = {"Q", "U", "T", "W", "V-square", "V-disk", "T-disk"};

void properties(Check& c) {
    std::vector<Polygon> cells;
    for (const PolyMesh& m : family_meshes(4))
        for (int i = 0; i < m.num_cells(); ++i) cells.push_back(m.cell_polygon(i));

    // reproduction measured in L2(E) relative to the polynomial; coefficient norm reported alongside
    double proj = 0.0, coef = 0.0, cons = 0.0, skew = 0.0;
    unsigned seed = 1;
    for (int k = 2; k <= 3; ++k)
        for (const Polygon& poly : cells) {
            const ElementOperators op(poly, k);
            const int nk = poly_dim(k), nk1 = poly_dim(k - 1);
            const Eigen::VectorXd p = random_vector(2 * nk, seed++);
            const Eigen::VectorXd d = op.dof_matrix() * p;
            const PolyCalculus pc = poly_calculus(k, op.geometry().diameter);
            Eigen::VectorXd g(4 * nk1);
            for (int i = 0; i < 2; ++i) {
                const Eigen::VectorXd gi = pc.gradient * p.segment(i * nk, nk);
                g.segment(2 * i * nk1, nk1) = gi.head(nk1);
                g.segment((2 * i + 1) * nk1, nk1) = gi.tail(nk1);
            }
            const Eigen::MatrixXd hk = op.mass(k), hk1 = op.mass(k - 1);
            const auto l2 = [](const Eigen::VectorXd& r, const Eigen::VectorXd& q, const Eigen::MatrixXd& h) {
                const int n = static_cast<int>(h.rows());
                double num = 0.0, den = 0.0;
                for (int b = 0; b < r.size() / n; ++b) {
                    num += r.segment(b * n, n).dot(h * r.segment(b * n, n));
                    den += q.segment(b * n, n).dot(h * q.segment(b * n, n));
                }
                return std::sqrt(std::abs(num) / den);
            };
            proj = std::max({proj, l2(op.pi_nabla() * d - p, p, hk), l2(op.pi0() * d - p, p, hk),
                             l2(op.pi0_grad() * d - g, g, hk1)});
            coef = std::max({coef, rel(op.pi_nabla() * d, p), rel(op.pi0() * d, p), rel(op.pi0_grad() * d, g)});

            Eigen::MatrixXd gv = Eigen::MatrixXd::Zero(2 * nk, 2 * nk);
            gv.topLeftCorner(nk, nk) = op.gradient_gram();
            gv.bottomRightCorner(nk, nk) = op.gradient_gram();
            const Eigen::MatrixXd diff = op.stiffness() * op.dof_matrix() - op.pi_nabla().transpose() * gv;
            cons = std::max(cons, diff.cwiseAbs().maxCoeff() / op.stiffness().cwiseAbs().maxCoeff());

            const int N = op.layout().total;
            const Eigen::VectorXd w = random_vector(N, seed++), v = random_vector(N, seed++);
            skew = std::max(skew, std::abs(v.dot(op.convection(w, ConvectionMode::skew) * v)) /
                                      (w.norm() * v.squaredNorm()));
        }
    c.require(proj <= 1e-11, std::to_string(cells.size()) + " cells, projector reproduction " + fmt("%.1e", proj) +
                                 " (coefficients " + fmt("%.1e", coef) + ")");
    c.require(cons <= 1e-10, "k-consistency " + fmt("%.1e", cons));
    c.require(skew <= 1e-12, "skew annihilation " + fmt("%.1e", skew));

    double jac = 0.0;
    for (ConvectionMode mode : {ConvectionMode::plain, ConvectionMode::skew}) {
        const Discretization disc(make_mesh("web", DomainTag::square, 3, 0.0, 2), 2);
        Problem prob;
        prob.nu = 0.1;
        prob.mode = mode;
        const DofMap& d = disc.dofs();
        const Eigen::VectorXd u = random_vector(d.n_velocity, 11), p = random_vector(d.n_pressure, 12);
        const Eigen::VectorXd load = random_vector(d.n_velocity, 13);
        const NewtonSystem ns = assemble_newton(disc, prob, load, u, p);
        Eigen::VectorXd dz = random_vector(ns.jacobian.size(), 14);
        dz(dz.size() - 1) = 0.0;
        Eigen::VectorXd du, dp;
        unpack(disc, dz, Eigen::VectorXd::Zero(d.n_velocity), du, dp);
        const double eps = 1e-7;
        const Eigen::VectorXd fd = (assemble_newton(disc, prob, load, u + eps * du, p + eps * dp, false).residual -
                                    assemble_newton(disc, prob, load, u - eps * du, p - eps * dp, false).residual) /
                                   (2 * eps);
        jac = std::max(jac, (ns.jacobian.matrix * dz - fd).norm() / std::max(1.0, fd.norm()));
    }
    c.require(jac <= 1e-5, "Jacobian vs FD " + fmt("%.1e", jac));

    bool dims = true;
    for (const PolyMesh& m : family_meshes(6))
        for (int k = 2; k <= 3; ++k) {
            const DofMap d = number_dofs(m, k);
            dims = dims && d.n_velocity == DofMap::velocity_dimension(k, m.num_cells(), m.num_vertices(), m.num_edges());
            dims = dims && d.n_pressure - 1 == DofMap::pressure_dimension(k, m.num_cells());
        }
    c.require(dims, "dimension formulas on 7 families, k=2,3");

    // interpolation of a smooth non-polynomial field
    const VectorField v = [](const Point& x) {
        return Point(std::sin(pi * x.x()) * std::cos(pi * x.y()) + std::exp(x.y()), std::cos(2 * x.x() + x.y()));
    };
    const ScalarField div = [](const Point& x) {
        return pi * std::cos(pi * x.x()) * std::cos(pi * x.y()) - std::sin(2 * x.x() + x.y());
    };
    ExactSolution ex;
    ex.u = v;
    ex.grad_u = [](const Point& x) {
        Eigen::Matrix2d g;
        g << pi * std::cos(pi * x.x()) * std::cos(pi * x.y()), -pi * std::sin(pi * x.x()) * std::sin(pi * x.y()) +
                                                                  std::exp(x.y()),
            -2 * std::sin(2 * x.x() + x.y()), -std::sin(2 * x.x() + x.y());
        return g;
    };
    ex.p = [](const Point&) { return 0.0; };
    std::string interp;
    bool interp_ok = true;
    for (const char* fam : {"quad", "tri", "web"})
        for (int k = 2; k <= 3; ++k) {
            std::vector<double> h, e1, e0;
            for (int n : {4, 8, 16}) {
                const Discretization disc(make_mesh(fam, DomainTag::square, n, 0.3, 1), k);
                const Eigen::VectorXd ui = disc.interpolate(v, div, 2 * k + 4);
                const ErrorReport r =
                    compute_errors(disc, ui, Eigen::VectorXd::Zero(disc.dofs().n_pressure), ex, 1.0 / n);
                h.push_back(1.0 / n);
                e1.push_back(r.u_h1);
                e0.push_back(r.u_l2);
            }
            const std::vector<double> r1 = eoc(h, e1), r0 = eoc(h, e0);
            const bool ok = std::abs(r1.back() - k) <= 0.3 && std::abs(r0.back() - (k + 1)) <= 0.3;
            interp_ok = interp_ok && ok;
            interp += std::string(interp.empty() ? "" : " ") + fam + "/k" + std::to_string(k) + " " +
                      fmt("%.2f", r1.back()) + "," + fmt("%.2f", r0.back()) + (ok ? "" : "!");
        }
    c.require(interp_ok, "interpolation EOC H1,L2 " + interp);

    std::string infsup;
    bool infsup_ok = true;
    const std::vector<PolyMesh> coarse = family_meshes(6), fine = family_meshes(12);
    for (std::size_t f = 0; f < coarse.size(); ++f) {
        const double b0 = infsup_estimate(Discretization(coarse[f], 2));
        const double b1 = infsup_estimate(Discretization(fine[f], 2));
        const double var = std::abs(b1 - b0) / std::max(b0, b1);
        infsup_ok = infsup_ok && var <= 0.2 && b1 > 0.0;
        infsup += std::string(infsup.empty() ? "" : " ") + family_names[f] + " " + fmt("%.3f", b0) + "->" +
                  fmt("%.3f", b1);
    }
    c.require(infsup_ok, "inf-sup variation <= 20% " + infsup);
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    timed(1, "hydrostatic exactness (test1_p1, Q_h)", [](Check& c) {
        const auto rows = run("test1_p1");
        c.require(converged(rows), "converged");
        c.require(max_of(column(rows, &ErrorReport::u_h1)) <= 1e-9,
                  "H1(u) " + list(column(rows, &ErrorReport::u_h1), "%.1e") + " <= 1e-9");
        c.require(max_of(column(rows, &ErrorReport::u_l2)) <= 1e-11,
                  "L2(u) " + list(column(rows, &ErrorReport::u_l2), "%.1e") + " <= 1e-11");
        const auto rp = rate(rows, &ErrorReport::p_l2);
        c.require(within(rp, 2.0, 0.25), "p EOC " + list(rp) + " in 2 +- 0.25");
    });

    timed(2, "higher-order load effect (test1_p2, Q_h)", [](Check& c) {
        const auto rows = run("test1_p2");
        c.require(converged(rows), "converged");
        const auto r1 = rate(rows, &ErrorReport::u_h1), rp = rate(rows, &ErrorReport::p_l2);
        c.require(*std::min_element(r1.begin(), r1.end()) >= 3.5, "H1(u) EOC " + list(r1) + " >= 3.5");
        c.require(within(rp, 2.0, 0.25), "p EOC " + list(rp) + " in 2 +- 0.25");
    });

    timed(3, "convective reproduction (test2_u1, disk T_h)", [](Check& c) {
        const auto plain = run("test2_u1");
        const auto skew = run("test2_u1", [](RunConfig& cfg) { cfg.mode = ConvectionMode::skew; });
        c.require(converged(plain) && converged(skew), "converged");
        const auto ep = column(plain, &ErrorReport::u_h1), es = column(skew, &ErrorReport::u_h1);
        c.require(max_of(ep) <= 1e-9, "plain H1(u) " + list(ep, "%.1e") + " <= 1e-9");
        const auto r = rate(skew, &ErrorReport::u_h1);
        c.require(within(r, 2.0, 0.3), "skew H1 EOC " + list(r) + " in 2 +- 0.3");
        const std::vector<double> reference{5.7385e-5, 1.510897e-5, 3.438742e-6};
        bool close = es.size() == reference.size();
        std::vector<double> ratio;
        for (std::size_t i = 0; close && i < es.size(); ++i) {
            ratio.push_back(es[i] / reference[i]);
            close = close && ratio.back() <= 10.0 && ratio.back() >= 0.1;
        }
        c.require(close, "skew H1 " + list(es, "%.2e") + ", ratio to reference " + list(ratio) + " within 10x");
    });

    timed(4, "plain vs skew (test2_u2)", [](Check& c) {
        const auto plain = run("test2_u2");
        const auto skew = run("test2_u2", [](RunConfig& cfg) { cfg.mode = ConvectionMode::skew; });
        c.require(converged(plain) && converged(skew), "converged");
        const auto ep = column(plain, &ErrorReport::u_h1), es = column(skew, &ErrorReport::u_h1);
        std::vector<double> ratio;
        bool ok = ep.size() == es.size();
        for (std::size_t i = 0; ok && i < ep.size(); ++i) {
            ratio.push_back(ep[i] / es[i]);
            ok = ok && ratio.back() <= 0.1;
        }
        c.require(ok, "plain/skew H1 " + list(ratio, "%.1e") + " <= 0.1");
    });

    timed(5, "optimal rates (test4, T_h and W_h)", [](Check& c) {
        for (const char* fam : {"tri", "web"}) {
            const auto rows = run("test4", [fam](RunConfig& cfg) { cfg.family = fam; });
            const std::string tag = fam == std::string("tri") ? "T " : "W ";
            c.require(converged(rows), tag + "converged");
            const auto r1 = rate(rows, &ErrorReport::u_h1), r0 = rate(rows, &ErrorReport::u_l2),
                       rp = rate(rows, &ErrorReport::p_l2);
            std::string levels;
            for (const LevelResult& r : rows) levels += (levels.empty() ? "" : ",") + std::to_string(r.n);
            c.require(within(r1, 2.0, 0.25), tag + "1/h=" + levels + " H1 EOC " + list(r1) + " in 2 +- 0.25");
            c.require(within(r0, 3.0, 0.35), tag + "L2 EOC " + list(r0) + " in 3 +- 0.35");
            c.require(within(rp, 2.0, 0.25), tag + "p EOC " + list(rp) + " in 2 +- 0.25");
        }
    });

    timed(6, "distortion robustness (test5, U_h)", [](Check& c) {
        const auto rows = run("test5");
        c.require(converged(rows), "converged");
        const auto r1 = rate(rows, &ErrorReport::u_h1);
        c.require(within(r1, 2.0, 0.3), "H1 EOC " + list(r1) + " in 2 +- 0.3");
    });

    timed(7, "viscosity robustness (test3, h = 1/20)", [](Check& c) {
        const auto rows = run("test3");
        double e1 = 0.0, e3 = 0.0;
        std::string info;
        for (const LevelResult& r : rows) {
            const bool gated = r.nu >= 1e-3 * (1 - 1e-12);
            if (gated) c.require(r.solve.converged, "nu=" + fmt("%g", r.nu) + " converged");
            info += std::string(info.empty() ? "" : " ") + "nu=" + fmt("%g", r.nu) + ":" + fmt("%.2e", r.errors.u_h1) +
                    (r.solve.converged ? "" : "(no conv)");
            if (std::abs(r.nu - 1e-1) < 1e-15) e1 = r.errors.u_h1;
            if (std::abs(r.nu - 1e-3) < 1e-15) e3 = r.errors.u_h1;
        }
        c.require(e1 > 0.0 && e3 / e1 < 100.0, "H1 ratio nu=1e-3 / nu=1e-1 " + fmt("%.3f", e3 / e1) + " < 100");
        c.detail += "; reported " + info;
    });

    timed(8, "divergence-free solves", [](Check& c) {
        c.require(!all_div.empty() && max_of(all_div) <= 1e-9,
                  std::to_string(all_div.size()) + " converged solves, max div " + fmt("%.1e", max_of(all_div)) +
                      " <= 1e-9");
    });

    timed(9, "property suites", properties);

    std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
