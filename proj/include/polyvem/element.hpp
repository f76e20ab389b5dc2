#pragma once

#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

#include "polyvem/mesh.hpp"
#include "polyvem/polyquad.hpp"

namespace polyvem {

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Point(const Point&)>;

class ElementError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Local velocity DoFs in the order: vertex values, edge-node values,
/// x^perp moments, divergence moments. Two components interleaved for the
/// nodal groups.
struct DofLayout {
    int k = 0;
    int n_edges = 0;
    int n_vertex = 0;  // 2 n_E
    int n_edge = 0;    // 2 n_E (k-1)
    int n_gperp = 0;   // (k-1)(k-2)/2
    int n_div = 0;     // k(k+1)/2 - 1
    int total = 0;
    int n_p = 0;       // k(k+1)/2

    int vertex(int j, int c) const { return 2 * j + c; }
    /// node l (0-based, ascending parameter from vertex j) on edge j
    int edge(int j, int l, int c) const { return n_vertex + 2 * ((k - 1) * j + l) + c; }
    int gperp(int b) const { return n_vertex + n_edge + b; }
    /// divergence moment against m_beta, beta = 1 .. n_div
    int div(int beta) const { return n_vertex + n_edge + n_gperp + beta - 1; }
};

DofLayout dof_layout(int k, int n_edges);

enum class ConvectionMode { plain, skew };

/// Projectors and local forms of one cell. Polynomial results are expressed
/// in the scaled monomial basis of the cell; vector fields component-major,
/// gradient tensors as (2 i + j) * dim(P_{k-1}) + beta for d v_i / d x_j.
///
/// D_V3 values are (1/|E|) int v . xi^perp m_beta for |beta| <= k-3 and D_V4
/// values are (h/|E|) int div(v) m_beta for 1 <= |beta| <= k-1.
class ElementOperators {
public:
    ElementOperators(const Polygon& poly, int k, int cell_id = -1);

    int k() const { return layout_.k; }
    const DofLayout& layout() const { return layout_; }
    const CellGeometry& geometry() const { return geom_; }
    const ScaledMonomialBasis& basis() const { return basis_; }
    /// int_E m_gamma for |gamma| <= 3k
    const Eigen::VectorXd& integrals() const { return integrals_; }

    const Eigen::MatrixXd& pi_nabla() const { return pi_nabla_; }
    /// int_E v_c m_alpha for |alpha| <= k
    const Eigen::MatrixXd& moments() const { return moments_; }
    const Eigen::MatrixXd& pi0() const { return pi0_; }
    const Eigen::MatrixXd& pi0_grad() const { return pi0_grad_; }
    const Eigen::MatrixXd& div_coeffs() const { return div_coeffs_; }
    /// DoF values of the plain basis e_c m_alpha (N x 2 dim P_k)
    const Eigen::MatrixXd& dof_matrix() const { return dof_matrix_; }

    const Eigen::MatrixXd& consistency() const { return consistency_; }
    /// (I - D Pi)^T (I - D Pi), not scaled by alpha
    const Eigen::MatrixXd& stabilization() const { return stabilization_; }
    double alpha() const { return alpha_; }
    const Eigen::MatrixXd& stiffness() const { return stiffness_; }
    /// rows: int_E m_beta div v, |beta| <= k-1
    const Eigen::MatrixXd& divergence() const { return divergence_; }

    /// H(i,j) = int m_i m_j over P_deg
    Eigen::MatrixXd mass(int deg) const { return gram_matrix(integrals_, deg); }
    /// G(a,b) = int grad m_a . grad m_b over P_k
    const Eigen::MatrixXd& gradient_gram() const { return grad_gram_; }

    /// Matrix of v -> c_h(w; v, .) for the given state w (local DoFs).
    Eigen::MatrixXd convection(const Eigen::VectorXd& w, ConvectionMode mode) const;
    /// Matrix of dw -> d/dw c_h(w; u, .) applied to dw at fixed u.
    Eigen::MatrixXd convection_derivative(const Eigen::VectorXd& u, ConvectionMode mode) const;

    /// int_E f . Pi0 phi_a for every basis function
    Eigen::VectorXd load(const VectorField& f, int quad_degree) const;

    /// DoF values of a field; div may be empty (central differences, step 1e-6 h)
    Eigen::VectorXd interpolate(const VectorField& v, const ScalarField& div, int quad_degree) const;

    /// physical location of DoF node i (vertex and edge DoFs, i < n_vertex + n_edge), i / 2 ordering
    Point node(int dof) const;

private:
    void build_boundary_terms();

    DofLayout layout_;
    CellGeometry geom_;
    ScaledMonomialBasis basis_;
    Eigen::VectorXd integrals_;
    std::vector<double> edge_params_;
    // boundary_[c][d](gamma, dof) = int_{dE} m_gamma v_c n_d, |gamma| <= k+1
    Eigen::MatrixXd boundary_[2][2];

    Eigen::MatrixXd pi_nabla_, moments_, pi0_, pi0_grad_, div_coeffs_, dof_matrix_;
    Eigen::MatrixXd consistency_, stabilization_, stiffness_, divergence_, grad_gram_;
    double alpha_ = 0.0;
};

}  // namespace polyvem
