#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyvem/assembly.hpp"

namespace polyvem {

/// Zero (or numerically negligible) pivot during factorization.
class SingularSystemError : public std::runtime_error {
public:
    SingularSystemError(const std::string& what, int unknown) : std::runtime_error(what), unknown_(unknown) {}
    /// row/column of the offending pivot in the factored matrix
    int unknown() const { return unknown_; }

private:
    int unknown_;
};

/// Sparse LU factorization (UMFPACK). Throws SingularSystemError when a pivot
/// falls below 1e-14 of the largest one.
class SparseLU {
public:
    explicit SparseLU(const SparseMatrix& a);
    ~SparseLU();
    SparseLU(const SparseLU&) = delete;
    SparseLU& operator=(const SparseLU&) = delete;

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    int size() const { return n_; }

private:
    SparseMatrix a_;
    void* numeric_ = nullptr;
    int n_ = 0;
};

struct LinearStats {
    int refinements = 0;
    double relative_residual = 0.0;
};

/// Direct solve with iterative refinement down to 1e-11 ||b||.
Eigen::VectorXd linear_solve(const SparseMatrix& a, const Eigen::VectorXd& b, LinearStats* stats = nullptr);
/// As above; a singular pivot is reported by block (velocity, pressure, multiplier).
Eigen::VectorXd linear_solve(const SaddleSystem& s, LinearStats* stats = nullptr);

struct NonlinearOptions {
    int picard_max = 15;
    int newton_max = 25;
    double picard_reduction = 1e-2;
    double tol_rel = 1e-10;
    double tol_abs = 1e-13;
    double damping = 1.0;         // initial Newton step length
    double damping_floor = 1.0 / 16.0;
    double continuation_start = 0.0;  // > nu: solve at nu_start, nu_start/10, ... first
};

struct SolveReport {
    int picard_iterations = 0;
    int newton_iterations = 0;
    int continuation_steps = 0;
    std::vector<double> residual_history;  // after the Stokes solve and each iteration
    double reference = 0.0;                // norm of the Stokes right-hand side
    double final_residual = 0.0;
    bool converged = false;
    double wall_seconds = 0.0;
    std::string message;
};

struct Solution {
    Eigen::VectorXd u;  // all velocity DoFs, boundary included
    Eigen::VectorXd p;  // pressure coefficients
    SolveReport report;
};

/// Single Stokes solve, convection ignored.
Solution solve_stokes(const Discretization& disc, const Problem& prob);

/// Picard from the Stokes solution, then damped Newton. Non-convergence is
/// reported through the flag, never thrown.
Solution solve_navier_stokes(const Discretization& disc, const Problem& prob, const NonlinearOptions& opts = {});

}  // namespace polyvem
