#include <cmath>

#include <gtest/gtest.h>

#include "polyvem/mesh.hpp"
#include "polyvem/polyquad.hpp"

using namespace polyvem;

namespace {

const Polygon unit_square{Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)};

const Polygon hexagon{Point(0.1, 0.0), Point(0.7, 0.05), Point(1.0, 0.45),
                      Point(0.55, 0.4), Point(0.6, 0.95), Point(0.0, 0.6)};

double integrate(const QuadRule& r, auto&& f) {
    double s = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * f(r.points[q]);
    return s;
}

// same rule applied on each triangle split into 4 by edge midpoints
QuadRule refined_rule(const Polygon& poly, int d) {
    QuadRule r;
    for (const Triangle& t : triangulate(poly)) {
        const Point m01 = 0.5 * (t[0] + t[1]), m12 = 0.5 * (t[1] + t[2]), m20 = 0.5 * (t[2] + t[0]);
        for (const Triangle& s : {Triangle{t[0], m01, m20}, Triangle{m01, t[1], m12}, Triangle{m20, m12, t[2]},
                                  Triangle{m01, m12, m20}}) {
            const QuadRule sr = triangle_rule(s, d);
            r.points.insert(r.points.end(), sr.points.begin(), sr.points.end());
            r.weights.insert(r.weights.end(), sr.weights.begin(), sr.weights.end());
        }
    }
    return r;
}

}  // namespace

TEST(Quadrature, UnitSquare) {
    EXPECT_NEAR(quad_rule(unit_square, 2).total_weight(), 1.0, 1e-14);
    EXPECT_NEAR(integrate(quad_rule(unit_square, 3), [](const Point& p) { return p.x() * p.y(); }), 0.25, 1e-14);
}

TEST(Quadrature, GaussLegendreExactness) {
    for (int n = 1; n <= 12; ++n) {
        std::vector<double> x, w;
        gauss_legendre(n, x, w);
        for (int p = 0; p < 2 * n; ++p) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += w[i] * std::pow(x[i], p);
            EXPECT_NEAR(s, 1.0 / (p + 1), 1e-14) << "n=" << n << " p=" << p;
        }
    }
}

TEST(Quadrature, HexagonAgainstRefinedRule) {
    const ScaledMonomialBasis b(6, area_centroid(hexagon), diameter(hexagon));
    const QuadRule r = quad_rule(hexagon, 6);
    const QuadRule oracle = refined_rule(hexagon, 6);
    EXPECT_NEAR(r.total_weight(), signed_area(hexagon), 1e-12);
    for (int i = 0; i < poly_dim(3); ++i)
        for (int j = 0; j < poly_dim(3); ++j) {
            auto f = [&](const Point& x) {
                const Eigen::VectorXd v = b.values(x, 3);
                return v(i) * v(j);
            };
            const double want = integrate(oracle, f);
            EXPECT_NEAR(integrate(r, f), want, 1e-12 * std::max(1.0, std::abs(want)));
        }
}

TEST(Quadrature, NonConvexFallsBackToEars) {
    // centroid outside the kernel: fan triangles would flip
    const Polygon c{Point(0, 0), Point(1, 0), Point(1, 1), Point(0.9, 1), Point(0.9, 0.1), Point(0, 0.1)};
    const QuadRule r = quad_rule(c, 4);
    EXPECT_NEAR(r.total_weight(), signed_area(c), 1e-14);
    for (double w : r.weights) EXPECT_GT(w, 0.0);
    for (const Point& p : r.points) EXPECT_TRUE(point_in_polygon(c, p));
}

TEST(Quadrature, DegenerateCellRejected) {
    const Polygon flat{Point(0, 0), Point(1, 0), Point(2, 0)};
    EXPECT_THROW(quad_rule(flat, 2), std::invalid_argument);
}

TEST(Gram, Oracles) {
    const ScaledMonomialBasis b(1, Point(0.5, 0.5), std::sqrt(2.0));
    const QuadRule r = quad_rule(unit_square, 2);
    const Eigen::MatrixXd h0 = gram_matrix(b, r, 0);
    ASSERT_EQ(h0.rows(), 1);
    EXPECT_NEAR(h0(0, 0), 1.0, 1e-14);
    const Eigen::MatrixXd h1 = gram_matrix(b, r, 1);
    EXPECT_NEAR(h1(0, 0), 1.0, 1e-14);
    EXPECT_NEAR(h1(1, 1), 1.0 / 24, 1e-14);
    EXPECT_NEAR(h1(2, 2), 1.0 / 24, 1e-14);
    EXPECT_NEAR(h1(1, 2), 0.0, 1e-14);
    const Eigen::MatrixXd from_table = gram_matrix(monomial_integrals(r, b, 2), 1);
    EXPECT_LT((from_table - h1).norm(), 1e-14);
}

TEST(Gram, ConditionOnWebFamily) {
    for (int n : {5, 10, 20}) {
        const PolyMesh m = gen_web_hexagons(n, 3);
        double worst = 0.0;
        for (int c = 0; c < m.num_cells(); ++c) {
            const CellGeometry g = cell_geometry(m, c);
            const ScaledMonomialBasis b(2, g.centroid, g.diameter);
            const Eigen::MatrixXd h = gram_matrix(b, quad_rule(g.vertices, 4), 2);
            const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues();
            worst = std::max(worst, ev.maxCoeff() / ev.minCoeff());
        }
        EXPECT_LT(worst, 1e6) << "n=" << n;
    }
}

TEST(Calculus, Identities) {
    for (int k = 2; k <= 4; ++k) {
        const PolyCalculus pc = poly_calculus(k, 0.3);
        EXPECT_EQ(pc.gradient.col(0).norm(), 0.0);
        // div(xi^perp q) = xi^perp . grad q, zero for the constant only
        EXPECT_LT((pc.divergence * pc.perp).col(0).norm(), 1e-14);
        const Eigen::MatrixXd xgrad = pc.divergence * pc.perp;
        for (int i = 1; i < poly_dim(k - 1); ++i) {
            const Exponent e = monomial_exponent(i);
            Eigen::VectorXd want = Eigen::VectorXd::Zero(poly_dim(k - 1));
            if (e.a > 0) want(monomial_index(e.a - 1, e.b + 1)) += e.a / 0.3;
            if (e.b > 0) want(monomial_index(e.a + 1, e.b - 1)) -= e.b / 0.3;
            EXPECT_LT((xgrad.col(i) - want).norm(), 1e-12);
        }
        EXPECT_EQ(pc.rot_perp.rows(), poly_dim(k - 1));
        EXPECT_EQ(pc.rot_perp.cols(), poly_dim(k - 1));
        EXPECT_GT(std::abs(pc.rot_perp.determinant()), 1e-8);
    }
    const PolyCalculus pc2 = poly_calculus(2, 1.0);
    EXPECT_EQ(pc2.rot_perp.rows(), 3);
    // rot(xi^perp m) = -(2 + |beta|) m in scaled coordinates
    EXPECT_LT((pc2.rot_perp - Eigen::Vector3d(-2, -3, -3).asDiagonal().toDenseMatrix()).norm(), 1e-14);
}

TEST(Calculus, GradientPerpDecomposition) {
    for (int k = 1; k <= 4; ++k) {
        const double h = 0.7;
        const int nk = poly_dim(k);
        // grad P_{k+1} without constants, then xi^perp P_{k-1}
        const Eigen::MatrixXd g = poly_calculus(k + 1, h).gradient.rightCols(poly_dim(k + 1) - 1);
        const Eigen::MatrixXd p = poly_calculus(k, h).perp;
        Eigen::MatrixXd basis(2 * nk, 2 * nk);
        basis << g, p;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
        EXPECT_EQ(lu.rank(), 2 * nk);
        EXPECT_EQ(p.cols(), k * (k + 1) / 2);
        const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(2 * nk, -1.0, 2.0);
        EXPECT_LT((basis * lu.solve(v) - v).norm(), 1e-12);
    }
}

TEST(Edges, IntegralAndNodes) {
    const EdgeRule r = edge_quadrature(Point(0, 0), Point(1, 0), 4);
    double s = 0.0;
    for (std::size_t q = 0; q < r.points.size(); ++q) s += r.weights[q] * r.points[q].x() * r.points[q].x();
    EXPECT_NEAR(s, 1.0 / 3, 1e-15);
    EXPECT_EQ(edge_node_params(2), std::vector<double>{0.5});
    const std::vector<double> t3 = edge_node_params(3);
    ASSERT_EQ(t3.size(), 2u);
    EXPECT_NEAR(t3[0], 0.5 - 0.5 / std::sqrt(5.0), 1e-15);
    EXPECT_NEAR(t3[1], 0.5 + 0.5 / std::sqrt(5.0), 1e-15);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(edge_vandermonde(2));
    EXPECT_LT(svd.singularValues()(0) / svd.singularValues()(2), 100.0);
}

TEST(Edges, TraceReproducesPolynomials) {
    for (int k = 2; k <= 4; ++k) {
        const Polygon& poly = hexagon;
        const int n = static_cast<int>(poly.size());
        auto u = [](const Point& x, int c) {
            return c == 0 ? 1.0 + x.x() - 2 * x.y() * x.y() + x.x() * x.y() : 0.5 * x.x() * x.x() - x.y();
        };
        const std::vector<double> t = edge_node_params(k);
        Eigen::VectorXd dofs(2 * n * k);
        for (int j = 0; j < n; ++j)
            for (int c = 0; c < 2; ++c) {
                dofs(2 * j + c) = u(poly[j], c);
                for (int l = 0; l < k - 1; ++l)
                    dofs(2 * n + 2 * ((k - 1) * j + l) + c) = u(poly[j] + t[l] * (poly[(j + 1) % n] - poly[j]), c);
            }
        const Eigen::VectorXd coef = boundary_trace_matrix(n, k) * dofs;
        for (int j = 0; j < n; ++j)
            for (int c = 0; c < 2; ++c)
                for (double s : {0.13, 0.5, 0.77}) {
                    double v = 0.0;
                    for (int p = 0; p <= k; ++p) v += coef((2 * j + c) * (k + 1) + p) * std::pow(s, p);
                    EXPECT_NEAR(v, u(poly[j] + s * (poly[(j + 1) % n] - poly[j]), c), 1e-13);
                }
    }
}
