#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Sparse>

#include "polyvem/element.hpp"
#include "polyvem/mesh.hpp"

namespace polyvem {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Global velocity numbering: vertex DoFs 2 v + c, then edge-node DoFs
/// 2 n_V + 2 ((k-1) e + l) + c with nodes ordered from the lower-indexed edge
/// endpoint, then per-cell interior DoFs (x^perp moments, divergence moments).
/// Pressures are per-cell monomial coefficients c * n_p + beta.
struct DofMap {
    int k = 0;
    int n_vertices = 0, n_edges = 0, n_cells = 0;
    int n_velocity = 0;
    int n_pressure = 0;
    int n_p = 0;  // pressure coefficients per cell
    int n_active = 0;
    std::vector<std::vector<int>> cell_dofs;  // local velocity DoF -> global
    std::vector<char> dirichlet;              // per velocity DoF
    std::vector<int> active;                  // velocity DoF -> active index or -1
    std::vector<int> active_to_global;
    std::vector<Point> node_position;         // nodal DoFs (vertex and edge), indexed by global DoF / 2

    int n_nodal() const { return 2 * static_cast<int>(node_position.size()); }
    int pressure(int cell, int beta) const { return cell * n_p + beta; }
    /// dim V_h from mesh counts
    static int velocity_dimension(int k, int n_cells, int n_vertices, int n_edges);
    /// dim Q_h including the zero-mean condition
    static int pressure_dimension(int k, int n_cells) { return n_cells * k * (k + 1) / 2 - 1; }
};

/// Numbers the DoFs of a mesh; every boundary vertex and edge DoF is Dirichlet.
DofMap number_dofs(const PolyMesh& mesh, int k);

/// Mesh, numbering and per-cell operators, built once and shared by every solve.
class Discretization {
public:
    Discretization(const PolyMesh& mesh, int k);

    const PolyMesh& mesh() const { return mesh_; }
    int k() const { return dofs_.k; }
    const DofMap& dofs() const { return dofs_; }
    const ElementOperators& element(int c) const { return ops_[c]; }

    Eigen::VectorXd gather(const Eigen::VectorXd& u, int c) const;
    /// Global DoF vector of a field (shared DoFs taken from the first cell).
    Eigen::VectorXd interpolate(const VectorField& v, const ScalarField& div, int quad_degree) const;
    /// Dirichlet DoFs set from g at the boundary nodes, zero elsewhere.
    Eigen::VectorXd boundary_lift(const VectorField& g) const;
    /// Velocity load vector sum_E int f . Pi0 phi.
    Eigen::VectorXd load(const VectorField& f, int quad_degree) const;
    /// int m_beta over each cell, the zero-mean constraint row.
    Eigen::VectorXd pressure_mean_row() const;

private:
    PolyMesh mesh_;
    DofMap dofs_;
    std::vector<ElementOperators> ops_;
};

struct Problem {
    double nu = 1.0;
    VectorField f;          // load
    VectorField g;          // Dirichlet data; zero when empty
    int load_degree = -1;   // default 2k + 3
    ConvectionMode mode = ConvectionMode::plain;
};

/// Bordered saddle system over z = [u_active; p; lambda].
struct SaddleSystem {
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
    int n_active = 0;
    int n_pressure = 0;
    bool constrained = true;

    int size() const { return static_cast<int>(rhs.size()); }
};

/// Callback giving the local velocity-velocity matrix of cell c.
using LocalMatrix = std::function<Eigen::MatrixXd(int)>;

/// Scatters local velocity matrices, the divergence blocks and the mean
/// constraint; Dirichlet columns move to the right-hand side using `lift`.
SaddleSystem build_saddle(const Discretization& disc, const LocalMatrix& local, const Eigen::VectorXd& load,
                          const Eigen::VectorXd& lift, bool constrained = true);

SaddleSystem assemble_stokes(const Discretization& disc, const Problem& prob, const Eigen::VectorXd& load,
                             const Eigen::VectorXd& lift);
/// Convection frozen at the full velocity DoF vector w.
SaddleSystem assemble_oseen(const Discretization& disc, const Problem& prob, const Eigen::VectorXd& load,
                            const Eigen::VectorXd& lift, const Eigen::VectorXd& w);

struct NewtonSystem {
    Eigen::VectorXd residual;  // over [u_active; p; lambda]
    SaddleSystem jacobian;
};
/// Residual of the discrete equations at (u, p) and its exact Jacobian.
NewtonSystem assemble_newton(const Discretization& disc, const Problem& prob, const Eigen::VectorXd& load,
                             const Eigen::VectorXd& u, const Eigen::VectorXd& p, bool with_jacobian = true);

/// Splits a saddle solution back into full velocity DoFs and pressures.
void unpack(const Discretization& disc, const Eigen::VectorXd& z, const Eigen::VectorXd& lift, Eigen::VectorXd& u,
            Eigen::VectorXd& p);
/// Active velocity entries followed by pressures and a zero multiplier.
Eigen::VectorXd pack(const Discretization& disc, const Eigen::VectorXd& u, const Eigen::VectorXd& p);

/// Per-cell P_{k-1} coefficients of div u_h.
std::vector<Eigen::VectorXd> divergence_coeffs(const Discretization& disc, const Eigen::VectorXd& u);

/// Global velocity stiffness (no viscosity) and divergence matrices over all DoFs.
SparseMatrix assemble_stiffness(const Discretization& disc);
SparseMatrix assemble_divergence(const Discretization& disc);
/// Block-diagonal pressure mass matrix.
SparseMatrix assemble_pressure_mass(const Discretization& disc);

/// Writes `rows cols nnz` followed by one `row col value` line per entry (0-based).
void write_coo(const SparseMatrix& m, const std::filesystem::path& path);

}  // namespace polyvem
