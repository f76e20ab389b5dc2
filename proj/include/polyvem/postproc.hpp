#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "polyvem/assembly.hpp"

namespace polyvem {

/// G(i, j) = d u_i / d x_j
using TensorField = std::function<Eigen::Matrix2d(const Point&)>;

struct ExactSolution {
    VectorField u;
    TensorField grad_u;
    ScalarField p;  // any additive constant; shifted to zero mean on the mesh
};

struct ErrorReport {
    double h = 0.0;
    int ndof = 0;          // velocity unknowns plus pressures minus the mean constraint
    double u_h1 = 0.0;     // || grad u - Pi0_{k-1} grad u_h ||
    double u_l2 = 0.0;     // || u - Pi0_k u_h ||
    double u_linf = 0.0;   // max over internal vertices and edge nodes, both components
    double p_l2 = 0.0;
    double div_inf = 0.0;  // max |div u_h|
};

/// Broken error norms; quad_degree < 0 selects 2k + 3.
ErrorReport compute_errors(const Discretization& disc, const Eigen::VectorXd& u, const Eigen::VectorXd& p,
                           const ExactSolution& exact, double h, int quad_degree = -1);

/// Largest |div u_h| over cell vertices and quadrature points of degree 2k.
double div_inf_norm(const Discretization& disc, const Eigen::VectorXd& u);

/// log(e_i / e_{i+1}) / log(h_i / h_{i+1}); h must be strictly decreasing.
std::vector<double> eoc(const std::vector<double>& h, const std::vector<double>& e);

/// Discrete inf-sup constant: square root of the smallest nonzero generalized
/// eigenvalue of B A^{-1} B^T against the pressure mass matrix, over active
/// velocity DoFs.
double infsup_estimate(const Discretization& disc);

/// One sample of the projected fields at a cell vertex or centroid.
struct FieldSample {
    int cell = 0;
    Point x = Point::Zero();
    Point u = Point::Zero();
    double p = 0.0;
};

/// Pi0_k u_h and p_h at the vertices of each cell followed by its centroid.
std::vector<FieldSample> sample_fields(const Discretization& disc, const Eigen::VectorXd& u, const Eigen::VectorXd& p);

/// Legacy ASCII VTK unstructured grid: one polygon per cell plus a vertex cell
/// at each centroid, point data "velocity" and "pressure".
void export_vtk(const Discretization& disc, const Eigen::VectorXd& u, const Eigen::VectorXd& p,
                const std::filesystem::path& path);
/// CSV with header `cell,x,y,ux,uy,p`.
void export_csv(const Discretization& disc, const Eigen::VectorXd& u, const Eigen::VectorXd& p,
                const std::filesystem::path& path);
std::vector<FieldSample> read_field_csv(const std::filesystem::path& path);

}  // namespace polyvem
