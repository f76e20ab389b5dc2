#pragma once

#include <vector>

#include <Eigen/Dense>

#include "polyvem/geometry.hpp"

namespace polyvem {

/// dim P_k in 2D; zero for k < 0
constexpr int poly_dim(int k) { return k < 0 ? 0 : (k + 1) * (k + 2) / 2; }

struct Exponent {
    int a = 0;  // power of the first scaled coordinate
    int b = 0;
    int degree() const { return a + b; }
};

/// Monomials are ordered by total degree, then by increasing power of y.
constexpr int monomial_index(int a, int b) { return (a + b) * (a + b + 1) / 2 + b; }
Exponent monomial_exponent(int index);

/// m_alpha(x) = ((x - centroid) / h)^alpha
class ScaledMonomialBasis {
public:
    ScaledMonomialBasis(int degree, Point centroid, double h);

    int degree() const { return degree_; }
    int size() const { return poly_dim(degree_); }
    const Point& centroid() const { return centroid_; }
    double h() const { return h_; }

    Point scaled(const Point& x) const { return (x - centroid_) / h_; }
    /// values of all monomials of degree <= deg (default: basis degree)
    Eigen::VectorXd values(const Point& x, int deg = -1) const;
    /// physical-coordinate gradients, one column per monomial
    Eigen::Matrix2Xd gradients(const Point& x, int deg = -1) const;

private:
    int degree_;
    Point centroid_;
    double h_;
};

struct QuadRule {
    std::vector<Point> points;
    std::vector<double> weights;
    int degree = 0;

    std::size_t size() const { return points.size(); }
    double total_weight() const;
};

/// Gauss-Legendre rule on [0,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Collapsed (Duffy) Gauss rule, exact for polynomials of degree <= d.
QuadRule triangle_rule(const Triangle& t, int d);

/// Sub-triangulation rule on a simple CCW polygon, exact to degree d.
QuadRule quad_rule(const Polygon& cell, int d);

/// Gauss rule on the segment [a,b]; weights include the length.
struct EdgeRule {
    std::vector<double> params;  // in [0,1] from a to b
    std::vector<Point> points;
    std::vector<double> weights;
};
EdgeRule edge_quadrature(const Point& a, const Point& b, int d);

/// Interior nodal parameters on an edge for order k: the midpoint for k = 2,
/// interior Gauss-Lobatto points for k >= 3 (k-1 values, ascending, symmetric).
std::vector<double> edge_node_params(int k);

/// Vandermonde V(i,j) = t_i^j over the k+1 nodes {0, interior..., 1}.
Eigen::MatrixXd edge_vandermonde(int k);

/// Maps the boundary velocity DoFs of an n-edge cell (vertex values then
/// edge-interior values, two components each) to monomial coefficients in the
/// edge parameter: row (edge j, component c, power p) -> index (2 j + c) (k+1) + p.
Eigen::MatrixXd boundary_trace_matrix(int n_edges, int k);

/// Integrals of every scaled monomial of degree <= deg over the rule.
Eigen::VectorXd monomial_integrals(const QuadRule& rule, const ScaledMonomialBasis& basis, int deg);

/// H(i,j) = int m_i m_j over the cell, for monomials of degree <= k.
Eigen::MatrixXd gram_matrix(const ScaledMonomialBasis& basis, const QuadRule& rule, int k);
/// Same matrix from precomputed monomial integrals (needs degree >= 2k).
Eigen::MatrixXd gram_matrix(const Eigen::VectorXd& integrals, int k);

/// Exact operator matrices in the scaled basis of a cell with diameter h.
/// Vector polynomials are stored component-major: (component c, monomial a)
/// -> c * poly_dim(deg) + a. Tensors (i, j) = d v_i / d x_j -> (2 i + j) * dim + a.
struct PolyCalculus {
    int k = 0;
    Eigen::MatrixXd gradient;          // P_k -> [P_{k-1}]^2
    Eigen::MatrixXd divergence;        // [P_k]^2 -> P_{k-1}
    Eigen::MatrixXd vector_laplacian;  // [P_k]^2 -> [P_{k-2}]^2
    Eigen::MatrixXd perp;              // P_{k-1} -> [P_k]^2, q -> xi^perp q
    Eigen::MatrixXd rot_perp;          // P_{k-1} -> P_{k-1}, q -> rot(xi^perp q)
};
PolyCalculus poly_calculus(int k, double h);

/// Scalar derivative matrices P_k -> P_{k-1} in scaled coordinates (no 1/h).
Eigen::MatrixXd scaled_derivative(int k, int direction);

}  // namespace polyvem
