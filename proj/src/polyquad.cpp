#include "polyvem/polyquad.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polyvem {

Exponent monomial_exponent(int index) {
    int d = 0;
    while ((d + 1) * (d + 2) / 2 <= index) ++d;
    const int b = index - d * (d + 1) / 2;
    return {d - b, b};
}

ScaledMonomialBasis::ScaledMonomialBasis(int degree, Point centroid, double h)
    : degree_(degree), centroid_(std::move(centroid)), h_(h) {}

Eigen::VectorXd ScaledMonomialBasis::values(const Point& x, int deg) const {
    if (deg < 0) deg = degree_;
    const Point s = scaled(x);
    Eigen::VectorXd px(deg + 1), py(deg + 1);
    px(0) = py(0) = 1.0;
    for (int i = 1; i <= deg; ++i) {
        px(i) = px(i - 1) * s.x();
        py(i) = py(i - 1) * s.y();
    }
    Eigen::VectorXd v(poly_dim(deg));
    for (int d = 0, idx = 0; d <= deg; ++d)
        for (int b = 0; b <= d; ++b) v(idx++) = px(d - b) * py(b);
    return v;
}

Eigen::Matrix2Xd ScaledMonomialBasis::gradients(const Point& x, int deg) const {
    if (deg < 0) deg = degree_;
    const Eigen::VectorXd v = values(x, deg);
    Eigen::Matrix2Xd g = Eigen::Matrix2Xd::Zero(2, poly_dim(deg));
    for (int d = 0, idx = 0; d <= deg; ++d)
        for (int b = 0; b <= d; ++b, ++idx) {
            const int a = d - b;
            if (a > 0) g(0, idx) = a * v(monomial_index(a - 1, b)) / h_;
            if (b > 0) g(1, idx) = b * v(monomial_index(a, b - 1)) / h_;
        }
    return g;
}

double QuadRule::total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0, p1 = x;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged root
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
            const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        nodes[n - 1 - i] = 0.5 * (x + 1.0);
        weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
}

QuadRule triangle_rule(const Triangle& t, int d) {
    const int nu = (d + 3) / 2;  // integrand degree d + 1 in the collapsed direction
    const int nv = (d + 2) / 2;
    std::vector<double> xu, wu, xv, wv;
    gauss_legendre(nu, xu, wu);
    gauss_legendre(nv, xv, wv);
    const Point e1 = t[1] - t[0], e2 = t[2] - t[0];
    const double jac = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
    QuadRule r;
    r.degree = d;
    r.points.reserve(nu * nv);
    r.weights.reserve(nu * nv);
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            const double u = xu[i], v = xv[j] * (1.0 - xu[i]);
            r.points.push_back(t[0] + u * e1 + v * e2);
            r.weights.push_back(wu[i] * wv[j] * (1.0 - xu[i]) * jac);
        }
    return r;
}

QuadRule quad_rule(const Polygon& cell, int d) {
    if (d < 0) throw std::invalid_argument("quad_rule: negative degree");
    if (!(signed_area(cell) > 0.0)) throw std::invalid_argument("quad_rule: degenerate (zero-area) cell");
    QuadRule r;
    r.degree = d;
    for (const Triangle& t : triangulate(cell)) {
        QuadRule tr = triangle_rule(t, d);
        r.points.insert(r.points.end(), tr.points.begin(), tr.points.end());
        r.weights.insert(r.weights.end(), tr.weights.begin(), tr.weights.end());
    }
    return r;
}

EdgeRule edge_quadrature(const Point& a, const Point& b, int d) {
    const int n = d / 2 + 1;
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    const double len = (b - a).norm();
    EdgeRule r;
    r.params = x;
    for (int i = 0; i < n; ++i) {
        r.points.push_back(a + x[i] * (b - a));
        r.weights.push_back(w[i] * len);
    }
    return r;
}

std::vector<double> edge_node_params(int k) {
    if (k < 2) throw std::invalid_argument("edge_node_params: k must be >= 2");
    if (k == 2) return {0.5};
    // interior roots of P_k' on [-1,1]
    std::vector<double> t(k - 1);
    for (int j = 1; j < k; ++j) {
        double x = -std::cos(std::numbers::pi * j / k);
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int m = 2; m <= k; ++m) {
                const double p2 = ((2 * m - 1) * x * p1 - (m - 1) * p0) / m;
                p0 = p1;
                p1 = p2;
            }
            const double dp = k * (x * p1 - p0) / (x * x - 1.0);
            const double d2p = (2.0 * x * dp - k * (k + 1) * p1) / (1.0 - x * x);
            const double dx = dp / d2p;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        t[j - 1] = 0.5 * (x + 1.0);
    }
    return t;
}

Eigen::MatrixXd edge_vandermonde(int k) {
    std::vector<double> nodes{0.0};
    for (double t : edge_node_params(k)) nodes.push_back(t);
    nodes.push_back(1.0);
    Eigen::MatrixXd v(k + 1, k + 1);
    for (int i = 0; i <= k; ++i)
        for (int j = 0; j <= k; ++j) v(i, j) = std::pow(nodes[i], j);
    return v;
}

Eigen::MatrixXd boundary_trace_matrix(int n_edges, int k) {
    const Eigen::MatrixXd vinv = edge_vandermonde(k).inverse();
    const int nb = 2 * n_edges * k;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(2 * n_edges * (k + 1), nb);
    for (int j = 0; j < n_edges; ++j)
        for (int c = 0; c < 2; ++c) {
            std::vector<int> cols;
            cols.push_back(2 * j + c);
            for (int l = 0; l < k - 1; ++l) cols.push_back(2 * n_edges + 2 * ((k - 1) * j + l) + c);
            cols.push_back(2 * ((j + 1) % n_edges) + c);
            for (int p = 0; p <= k; ++p)
                for (int i = 0; i <= k; ++i) t((2 * j + c) * (k + 1) + p, cols[i]) += vinv(p, i);
        }
    return t;
}

Eigen::VectorXd monomial_integrals(const QuadRule& rule, const ScaledMonomialBasis& basis, int deg) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(poly_dim(deg));
    for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * basis.values(rule.points[q], deg);
    return s;
}

Eigen::MatrixXd gram_matrix(const Eigen::VectorXd& integrals, int k) {
    const int n = poly_dim(k);
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i) {
        const Exponent ei = monomial_exponent(i);
        for (int j = 0; j < n; ++j) {
            const Exponent ej = monomial_exponent(j);
            g(i, j) = integrals(monomial_index(ei.a + ej.a, ei.b + ej.b));
        }
    }
    return g;
}

Eigen::MatrixXd gram_matrix(const ScaledMonomialBasis& basis, const QuadRule& rule, int k) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(poly_dim(k), poly_dim(k));
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Eigen::VectorXd v = basis.values(rule.points[q], k);
        g.noalias() += rule.weights[q] * v * v.transpose();
    }
    return g;
}

Eigen::MatrixXd scaled_derivative(int k, int direction) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(poly_dim(k - 1), poly_dim(k));
    for (int i = 0; i < poly_dim(k); ++i) {
        const Exponent e = monomial_exponent(i);
        if (direction == 0 && e.a > 0) d(monomial_index(e.a - 1, e.b), i) = e.a;
        if (direction == 1 && e.b > 0) d(monomial_index(e.a, e.b - 1), i) = e.b;
    }
    return d;
}

PolyCalculus poly_calculus(int k, double h) {
    PolyCalculus pc;
    pc.k = k;
    const int nk = poly_dim(k), nk1 = poly_dim(k - 1), nk2 = poly_dim(k - 2);
    const Eigen::MatrixXd dx = scaled_derivative(k, 0) / h;
    const Eigen::MatrixXd dy = scaled_derivative(k, 1) / h;

    pc.gradient.resize(2 * nk1, nk);
    pc.gradient << dx, dy;

    pc.divergence.resize(nk1, 2 * nk);
    pc.divergence << dx, dy;

    const Eigen::MatrixXd lap = scaled_derivative(k - 1, 0) / h * dx + scaled_derivative(k - 1, 1) / h * dy;
    pc.vector_laplacian = Eigen::MatrixXd::Zero(2 * nk2, 2 * nk);
    pc.vector_laplacian.block(0, 0, nk2, nk) = lap;
    pc.vector_laplacian.block(nk2, nk, nk2, nk) = lap;

    pc.perp = Eigen::MatrixXd::Zero(2 * nk, nk1);
    for (int i = 0; i < nk1; ++i) {
        const Exponent e = monomial_exponent(i);
        pc.perp(monomial_index(e.a, e.b + 1), i) = 1.0;
        pc.perp(nk + monomial_index(e.a + 1, e.b), i) = -1.0;
    }
    // rot v = d v_2 / dx - d v_1 / dy
    Eigen::MatrixXd rot(nk1, 2 * nk);
    rot << -dy, dx;
    pc.rot_perp = rot * pc.perp;
    return pc;
}

}  // namespace polyvem
