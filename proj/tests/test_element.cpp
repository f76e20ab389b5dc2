#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "polyvem/element.hpp"

using namespace polyvem;

namespace {

std::vector<Polygon> sample_cells() {
    std::vector<Polygon> cells{
        {Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)},
        {Point(0.1, 0.0), Point(0.7, 0.05), Point(1.0, 0.45), Point(0.55, 0.4), Point(0.6, 0.95), Point(0.0, 0.6)},
        {Point(0.2, 0.1), Point(0.5, 0.15), Point(0.3, 0.4)},
    };
    cells.push_back(gen_square_quads(4, 0.5, 1).cell_polygon(5));
    const PolyMesh web = gen_web_hexagons(4, 3);
    cells.push_back(web.cell_polygon(7));
    cells.push_back(web.cell_polygon(12));
    const PolyMesh vor = gen_voronoi_cvt(DomainTag::disk, 30, 10, 5);
    cells.push_back(vor.cell_polygon(0));
    cells.push_back(vor.cell_polygon(17));
    cells.push_back(gen_disk_triangles(3).cell_polygon(20));
    return cells;
}

Eigen::VectorXd random_vector(int n, unsigned seed) {
    std::mt19937 g(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = u(g);
    return v;
}

// gradient tensor coefficients of a [P_k]^2 field in the (2i+j) layout
Eigen::VectorXd gradient_coeffs(const Eigen::VectorXd& p, int k, double h) {
    const int nk = poly_dim(k), nk1 = poly_dim(k - 1);
    const PolyCalculus pc = poly_calculus(k, h);
    Eigen::VectorXd g(4 * nk1);
    for (int i = 0; i < 2; ++i) {
        const Eigen::VectorXd gi = pc.gradient * p.segment(i * nk, nk);
        g.segment((2 * i) * nk1, nk1) = gi.head(nk1);
        g.segment((2 * i + 1) * nk1, nk1) = gi.tail(nk1);
    }
    return g;
}

double rel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace

TEST(Layout, Counts) {
    EXPECT_EQ(dof_layout(2, 4).total, 18);
    EXPECT_EQ(dof_layout(2, 4).n_p, 3);
    EXPECT_EQ(dof_layout(2, 3).total, 14);
    EXPECT_EQ(dof_layout(3, 4).total, 30);
    EXPECT_THROW(dof_layout(1, 4), std::invalid_argument);
}

TEST(Element, MonomialIntegralsMatchQuadrature) {
    for (const Polygon& p : sample_cells()) {
        const ElementOperators op(p, 3);
        const Eigen::VectorXd q = monomial_integrals(quad_rule(p, 9), op.basis(), 9);
        EXPECT_LT((op.integrals() - q).norm(), 1e-13 * op.geometry().area);
    }
}

TEST(Element, ProjectorsReproducePolynomials) {
    unsigned seed = 1;
    for (int k = 2; k <= 4; ++k)
        for (const Polygon& poly : sample_cells()) {
            const ElementOperators op(poly, k);
            const int nk = poly_dim(k);
            const Eigen::VectorXd p = random_vector(2 * nk, seed++);
            const Eigen::VectorXd d = op.dof_matrix() * p;
            const double tol = k <= 3 ? 1e-11 : 1e-9;
            EXPECT_LT(rel(op.pi_nabla() * d, p), tol) << "k=" << k;
            EXPECT_LT(rel(op.pi0() * d, p), tol) << "k=" << k;
            EXPECT_LT(rel(op.pi0_grad() * d, gradient_coeffs(p, k, op.geometry().diameter)), tol) << "k=" << k;
            EXPECT_LT((op.pi_nabla() * op.dof_matrix() - Eigen::MatrixXd::Identity(2 * nk, 2 * nk)).norm(), 1e-10);
        }
}

TEST(Element, InterpolationOfPolynomialMatchesDofMatrix) {
    for (int k = 2; k <= 3; ++k)
        for (const Polygon& poly : sample_cells()) {
            const ElementOperators op(poly, k);
            auto v = [](const Point& x) {
                return Point(1 + x.x() - 2 * x.y() * x.y() + x.x() * x.y(), 0.5 * x.x() * x.x() - x.y() + 3 * x.x() * x.y());
            };
            auto div = [](const Point& x) { return 1 + x.y() - 1 + 3 * x.x(); };
            const Eigen::VectorXd d = op.interpolate(v, div, 2 * k + 3);
            const Eigen::VectorXd p = op.pi_nabla() * d;
            EXPECT_LT(rel(op.dof_matrix() * p, d), 1e-12);
            const Eigen::VectorXd dfd = op.interpolate(v, nullptr, 2 * k + 3);
            EXPECT_LT(rel(dfd, d), 1e-8);
        }
}

TEST(Element, ConstantField) {
    for (const Polygon& poly : sample_cells()) {
        const ElementOperators op(poly, 3);
        const Eigen::VectorXd d = op.interpolate([](const Point&) { return Point(1, 2); }, [](const Point&) { return 0.0; }, 9);
        for (int i = 0; i < op.layout().n_vertex + op.layout().n_edge; i += 2) {
            EXPECT_EQ(d(i), 1.0);
            EXPECT_EQ(d(i + 1), 2.0);
        }
        for (int b = 1; b <= op.layout().n_div; ++b) EXPECT_EQ(d(op.layout().div(b)), 0.0);
        const Eigen::VectorXd pn = op.pi_nabla() * d;
        EXPECT_NEAR(pn(0), 1.0, 1e-12);
        EXPECT_NEAR(pn(poly_dim(3)), 2.0, 1e-12);
        EXPECT_LT((op.pi0_grad() * d).norm(), 1e-11);
        EXPECT_LT((op.stiffness() * d).norm(), 1e-10);
    }
}

TEST(Element, ConsistencyAndStabilization) {
    for (int k = 2; k <= 4; ++k)
        for (const Polygon& poly : sample_cells()) {
            const ElementOperators op(poly, k);
            const int nk = poly_dim(k), N = op.layout().total;
            Eigen::MatrixXd gv = Eigen::MatrixXd::Zero(2 * nk, 2 * nk);
            gv.topLeftCorner(nk, nk) = op.gradient_gram();
            gv.bottomRightCorner(nk, nk) = op.gradient_gram();
            // a_h(q, phi) = a(q, phi) for every q in [P_k]^2 and every basis function
            const Eigen::MatrixXd lhs = op.stiffness() * op.dof_matrix();
            const Eigen::MatrixXd rhs = op.pi_nabla().transpose() * gv;
            const double scale = op.stiffness().cwiseAbs().maxCoeff();
            EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10 * scale) << "k=" << k;
            EXPECT_LT((op.stabilization() * op.dof_matrix()).norm(), 1e-10);
            const Eigen::MatrixXd& s = op.stabilization();
            EXPECT_LT((s - s.transpose()).norm(), 1e-12 * s.norm());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
            EXPECT_GT(es.eigenvalues().minCoeff(), -1e-10);
            int zero = 0;
            for (int i = 0; i < N; ++i) zero += es.eigenvalues()(i) < 1e-9;
            EXPECT_EQ(zero, 2 * nk);
            const Eigen::VectorXd ea = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(op.stiffness()).eigenvalues();
            EXPECT_GT(ea.minCoeff(), -1e-10 * ea.maxCoeff());
            EXPECT_LT(ea(1), 1e-10 * ea.maxCoeff());
            EXPECT_GT(ea(2), 1e6 * std::max(std::abs(ea(0)), std::abs(ea(1))));
            EXPECT_GT(op.alpha(), 0.0);
        }
}

TEST(Element, DivergenceTwoPaths) {
    for (int k = 2; k <= 4; ++k)
        for (const Polygon& poly : sample_cells()) {
            const ElementOperators op(poly, k);
            const Eigen::VectorXd d = random_vector(op.layout().total, 40 + k);
            const Eigen::VectorXd direct = op.divergence() * d;
            const Eigen::VectorXd via = op.mass(k - 1) * (op.div_coeffs() * d);
            EXPECT_LT((direct - via).norm(), 1e-12 * std::max(1.0, direct.norm()));
            // v = x
            const Eigen::VectorXd dx = op.interpolate([](const Point& x) { return x; }, [](const Point&) { return 2.0; },
                                                      2 * k + 3);
            EXPECT_NEAR((op.divergence() * dx)(0), 2.0 * op.geometry().area, 1e-12);
            const Eigen::VectorXd dc = op.div_coeffs() * dx;
            EXPECT_NEAR(dc(0), 2.0, 1e-10);
            EXPECT_LT(dc.tail(dc.size() - 1).norm(), 1e-10);
            // divergence-free polynomial: curl of x^3 y - y^2 x
            auto curl = [](const Point& x) {
                return Point(x.x() * x.x() * x.x() - 2 * x.y() * x.x(), -(3 * x.x() * x.x() * x.y() - x.y() * x.y()));
            };
            const Eigen::VectorXd df = op.interpolate(curl, [](const Point&) { return 0.0; }, 2 * k + 3);
            if (k >= 3) EXPECT_LT((op.divergence() * df).norm(), 1e-12);
        }
}

TEST(Element, SkewAnnihilation) {
    for (int k = 2; k <= 3; ++k)
        for (const Polygon& poly : sample_cells()) {
            const ElementOperators op(poly, k);
            const int N = op.layout().total;
            const Eigen::VectorXd w = random_vector(N, 7), v = random_vector(N, 8);
            const Eigen::MatrixXd c = op.convection(w, ConvectionMode::skew);
            EXPECT_LE(std::abs(v.dot(c * v)), 1e-12 * w.norm() * v.squaredNorm());
        }
}

TEST(Element, ConvectionDerivativeIsExact) {
    for (ConvectionMode mode : {ConvectionMode::plain, ConvectionMode::skew})
        for (const Polygon& poly : sample_cells()) {
            const ElementOperators op(poly, 2);
            const int N = op.layout().total;
            const Eigen::VectorXd w = random_vector(N, 1), u = random_vector(N, 2), dw = random_vector(N, 3);
            const double eps = 1e-3;
            const Eigen::VectorXd fd =
                (op.convection(w + eps * dw, mode) * u - op.convection(w - eps * dw, mode) * u) / (2 * eps);
            const Eigen::VectorXd an = op.convection_derivative(u, mode) * dw;
            EXPECT_LT((fd - an).norm(), 1e-10 * std::max(1.0, an.norm()));
        }
}

TEST(Element, ConvectionOracleOnSquare) {
    const Polygon sq{Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)};
    const ElementOperators op(sq, 2);
    const int nk = poly_dim(2);
    auto lin = [](const Point& x) { return Point(2 * x.x() - x.y() + 1, x.x() + 3 * x.y()); };
    const Eigen::VectorXd du = op.interpolate(lin, [](const Point&) { return 5.0; }, 7);
    const Eigen::VectorXd dw = op.interpolate([](const Point&) { return Point(1, 0); }, [](const Point&) { return 0.0; }, 7);
    const Eigen::VectorXd got = op.convection(dw, ConvectionMode::plain) * du;
    // (grad u) w = (2, 1) everywhere; oracle int g . Pi0 phi_a
    const Eigen::VectorXd want = 2.0 * op.moments().row(0).transpose() + 1.0 * op.moments().row(nk).transpose();
    EXPECT_LT((got - want).norm(), 1e-12);
}

TEST(Element, LoadOfPolynomialIsExactPairing) {
    for (const Polygon& poly : sample_cells()) {
        const ElementOperators op(poly, 2);
        auto f = [](const Point& x) { return Point(x.x() * x.y() - 1, x.y() * x.y() + 2 * x.x()); };
        const Eigen::VectorXd got = op.load(f, 7);
        // coefficients of f in the cell basis, then int f . phi_a = coeff^T M
        const QuadRule r = quad_rule(poly, 8);
        const int nk = poly_dim(2);
        Eigen::VectorXd fm = Eigen::VectorXd::Zero(2 * nk);
        for (std::size_t q = 0; q < r.size(); ++q) {
            const Eigen::VectorXd m = op.basis().values(r.points[q]);
            fm.head(nk) += r.weights[q] * f(r.points[q]).x() * m;
            fm.tail(nk) += r.weights[q] * f(r.points[q]).y() * m;
        }
        Eigen::MatrixXd hv = Eigen::MatrixXd::Zero(2 * nk, 2 * nk);
        hv.topLeftCorner(nk, nk) = op.mass(2);
        hv.bottomRightCorner(nk, nk) = op.mass(2);
        const Eigen::VectorXd coef = hv.ldlt().solve(fm);
        EXPECT_LT((got - op.moments().transpose() * coef).norm(), 1e-12);
        EXPECT_EQ(op.load([](const Point&) { return Point(0, 0); }, 7).norm(), 0.0);
    }
}

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

Point vortex(const Point& x) {
    const double sx = std::sin(two_pi * x.x()), cx = std::cos(two_pi * x.x());
    const double sy = std::sin(two_pi * x.y()), cy = std::cos(two_pi * x.y());
    return 0.5 * Point(sx * sx * sy * cy, -sy * sy * sx * cx);
}

// rows: d/dx, d/dy of each component
Eigen::Matrix2d vortex_grad(const Point& x) {
    const double sx = std::sin(two_pi * x.x()), cx = std::cos(two_pi * x.x());
    const double sy = std::sin(two_pi * x.y()), cy = std::cos(two_pi * x.y());
    Eigen::Matrix2d g;
    g(0, 0) = 0.5 * two_pi * 2 * sx * cx * sy * cy;
    g(0, 1) = 0.5 * two_pi * sx * sx * (cy * cy - sy * sy);
    g(1, 0) = -0.5 * two_pi * sy * sy * (cx * cx - sx * sx);
    g(1, 1) = -0.5 * two_pi * 2 * sy * cy * sx * cx;
    return g;
}

Polygon square_cell(double x0, double y0, double h) {
    return {Point(x0, y0), Point(x0 + h, y0), Point(x0 + h, y0 + h), Point(x0, y0 + h)};
}

double h1_projection_error(const Polygon& cell) {
    const ElementOperators op(cell, 2);
    const Eigen::VectorXd d = op.interpolate(vortex, [](const Point&) { return 0.0; }, 12);
    const Eigen::VectorXd p = op.pi_nabla() * d;
    const int nk = poly_dim(2);
    const QuadRule r = quad_rule(cell, 12);
    double s = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q) {
        const Eigen::Matrix2Xd g = op.basis().gradients(r.points[q]);
        Eigen::Matrix2d gp;
        gp.row(0) = (g * p.head(nk)).transpose();
        gp.row(1) = (g * p.tail(nk)).transpose();
        s += r.weights[q] * (vortex_grad(r.points[q]) - gp).squaredNorm();
    }
    return std::sqrt(s);
}

}  // namespace

TEST(Element, InterpolationMatchesQuadratureOracle) {
    const Polygon cell = gen_square_triangles(10).cell_polygon(37);
    const ElementOperators op(cell, 2);
    const Eigen::VectorXd d = op.interpolate(vortex, [](const Point&) { return 0.0; }, 16);
    // independent oracle: DoF integrals on a 4x refined sub-triangulation
    const double area = op.geometry().area, h = op.geometry().diameter;
    Eigen::VectorXd want = Eigen::VectorXd::Zero(op.layout().total);
    for (int i = 0; i < op.layout().n_vertex + op.layout().n_edge; ++i) want(i) = vortex(op.node(i))(i % 2);
    EXPECT_EQ(op.layout().n_gperp, 0);
    EXPECT_LT((d - want).norm(), 1e-12);
    // divergence-free field: divergence DoFs vanish
    for (int b = 1; b <= op.layout().n_div; ++b) EXPECT_EQ(d(op.layout().div(b)), 0.0);
    // k = 3 adds one x^perp moment
    const ElementOperators op3(cell, 3);
    const Eigen::VectorXd d3 = op3.interpolate(vortex, [](const Point&) { return 0.0; }, 16);
    double oracle = 0.0;
    for (const Triangle& t : triangulate(cell)) {
        const Point m01 = 0.5 * (t[0] + t[1]), m12 = 0.5 * (t[1] + t[2]), m20 = 0.5 * (t[2] + t[0]);
        for (const Triangle& s : {Triangle{t[0], m01, m20}, Triangle{m01, t[1], m12}, Triangle{m20, m12, t[2]},
                                  Triangle{m01, m12, m20}}) {
            const QuadRule r = triangle_rule(s, 16);
            for (std::size_t q = 0; q < r.size(); ++q) {
                const Point xi = (r.points[q] - op3.geometry().centroid) / h;
                oracle += r.weights[q] * vortex(r.points[q]).dot(Point(xi.y(), -xi.x()));
            }
        }
    }
    EXPECT_NEAR(d3(op3.layout().gperp(0)), oracle / area, 1e-12);
}

TEST(Element, H1ProjectionRate) {
    const double e10 = h1_projection_error(square_cell(0.3, 0.5, 0.1));
    const double e20 = h1_projection_error(square_cell(0.3, 0.5, 0.05));
    const double e40 = h1_projection_error(square_cell(0.3, 0.5, 0.025));
    // |v - Pi v|_1 on one cell scales like h^k * |E|^(1/2) = h^3
    EXPECT_NEAR(std::log2(e10 / e20), 3.0, 0.3);
    EXPECT_NEAR(std::log2(e20 / e40), 3.0, 0.3);
    EXPECT_LT(e10, 0.05);
}

TEST(Element, RayleighQuotientsOnWebCells) {
    const PolyMesh web = gen_web_hexagons(5, 3);
    double lo = 1e300, hi = 0.0;
    const std::vector<VectorField> fields{
        [](const Point& x) { return Point(std::sin(3 * x.x() + x.y()), std::cos(2 * x.x() - x.y())); },
        [](const Point& x) { return Point(x.x() * x.x() * x.x() * x.y(), std::exp(x.x()) * x.y() * x.y()); },
        [](const Point& x) { return vortex(x); },
        [](const Point& x) { return Point(std::cos(7 * x.y()), std::sin(5 * x.x() * x.y())); },
    };
    for (int c = 0; c < web.num_cells(); ++c) {
        const ElementOperators op(web.cell_polygon(c), 2);
        const QuadRule r = quad_rule(op.geometry().vertices, 12);
        for (const VectorField& f : fields) {
            const Eigen::VectorXd d = op.interpolate(f, nullptr, 12);
            const double ah = d.dot(op.stiffness() * d);
            double a = 0.0;
            const double eps = 1e-6;
            for (std::size_t q = 0; q < r.size(); ++q) {
                const Point x = r.points[q];
                const Point gx = (f(x + Point(eps, 0)) - f(x - Point(eps, 0))) / (2 * eps);
                const Point gy = (f(x + Point(0, eps)) - f(x - Point(0, eps))) / (2 * eps);
                a += r.weights[q] * (gx.squaredNorm() + gy.squaredNorm());
            }
            if (a < 1e-14) continue;
            lo = std::min(lo, ah / a);
            hi = std::max(hi, ah / a);
        }
    }
    EXPECT_GT(lo, 0.1);
    EXPECT_LT(hi, 10.0);
}
