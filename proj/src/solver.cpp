#include "polyvem/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <umfpack.h>

namespace polyvem {

namespace {

std::string umfpack_status(int status) {
    switch (status) {
    case UMFPACK_ERROR_out_of_memory: return "out of memory";
    case UMFPACK_ERROR_invalid_matrix: return "invalid matrix";
    case UMFPACK_ERROR_different_pattern: return "pattern changed";
    default: return "status " + std::to_string(status);
    }
}

}  // namespace

SparseLU::SparseLU(const SparseMatrix& a) : a_(a), n_(static_cast<int>(a.rows())) {
    if (a.rows() != a.cols()) throw std::invalid_argument("SparseLU: matrix not square");
    a_.makeCompressed();
    const int* ap = a_.outerIndexPtr();
    const int* ai = a_.innerIndexPtr();
    const double* ax = a_.valuePtr();

    void* symbolic = nullptr;
    int status = umfpack_di_symbolic(n_, n_, ap, ai, ax, &symbolic, nullptr, nullptr);
    if (status != UMFPACK_OK) throw std::runtime_error("sparse LU symbolic analysis failed: " + umfpack_status(status));
    status = umfpack_di_numeric(ap, ai, ax, symbolic, &numeric_, nullptr, nullptr);
    umfpack_di_free_symbolic(&symbolic);
    if (status != UMFPACK_OK && status != UMFPACK_WARNING_singular_matrix) {
        umfpack_di_free_numeric(&numeric_);
        throw std::runtime_error("sparse LU factorization failed: " + umfpack_status(status));
    }

    std::vector<double> udiag(n_);
    std::vector<int> q(n_);
    umfpack_di_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, q.data(),
                           udiag.data(), nullptr, nullptr, numeric_);
    double umax = 0.0;
    for (double d : udiag) umax = std::max(umax, std::abs(d));
    int worst = -1;
    double umin = umax;
    for (int i = 0; i < n_; ++i)
        if (std::abs(udiag[i]) <= umin) {
            umin = std::abs(udiag[i]);
            worst = i;
        }
    if (status == UMFPACK_WARNING_singular_matrix || umin < 1e-14 * umax || umax == 0.0) {
        umfpack_di_free_numeric(&numeric_);
        const int col = worst >= 0 ? q[worst] : 0;
        throw SingularSystemError("singular matrix: pivot " + std::to_string(umin) + " at unknown " +
                                      std::to_string(col) + " (largest pivot " + std::to_string(umax) + ")",
                                  col);
    }
}

SparseLU::~SparseLU() {
    if (numeric_) umfpack_di_free_numeric(&numeric_);
}

Eigen::VectorXd SparseLU::solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x(n_);
    const int status = umfpack_di_solve(UMFPACK_A, a_.outerIndexPtr(), a_.innerIndexPtr(), a_.valuePtr(), x.data(),
                                        b.data(), numeric_, nullptr, nullptr);
    if (status != UMFPACK_OK) throw std::runtime_error("sparse LU solve failed: " + umfpack_status(status));
    return x;
}

Eigen::VectorXd linear_solve(const SparseMatrix& a, const Eigen::VectorXd& b, LinearStats* stats) {
    const SparseLU lu(a);
    Eigen::VectorXd x = lu.solve(b);
    const double bn = b.norm();
    Eigen::VectorXd r = b - a * x;
    int steps = 0;
    while (r.norm() > 1e-11 * bn && steps < 5) {
        x += lu.solve(r);
        r = b - a * x;
        ++steps;
    }
    if (stats) {
        stats->refinements = steps;
        stats->relative_residual = bn > 0.0 ? r.norm() / bn : r.norm();
    }
    return x;
}

namespace {

// [K c; c^T 0] with K singular only along the constant pressure: factor
// K + sigma e e^T (e the first pressure coefficient) and close the system
// with a 2 x 2 solve for the multiplier and e^T z.
class BorderedSolver {
public:
    explicit BorderedSolver(const SaddleSystem& s) : n_(s.size() - 1), j0_(s.n_active) {
        const SparseMatrix k = s.matrix.topLeftCorner(n_, n_);
        c_ = Eigen::VectorXd(s.matrix.col(n_)).head(n_);
        double diag = 0.0;
        for (int i = 0; i < s.n_active; ++i) diag = std::max(diag, std::abs(s.matrix.coeff(i, i)));
        sigma_ = diag > 0.0 ? diag : 1.0;
        SparseMatrix kr = k;
        kr.coeffRef(j0_, j0_) += sigma_;
        lu_ = std::make_unique<SparseLU>(kr);
        xc_ = lu_->solve(c_);
        xe_ = lu_->solve(Eigen::VectorXd::Unit(n_, j0_));
        cap_ << -xc_(j0_), sigma_ * xe_(j0_) - 1.0, -c_.dot(xc_), sigma_ * c_.dot(xe_);
        cap_lu_ = cap_.fullPivLu();
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
        const Eigen::VectorXd xb = lu_->solve(rhs.head(n_));
        const Eigen::Vector2d r(-xb(j0_), rhs(n_) - c_.dot(xb));
        const Eigen::Vector2d ls = cap_lu_.solve(r);
        Eigen::VectorXd z(n_ + 1);
        z.head(n_) = xb - ls(0) * xc_ + sigma_ * ls(1) * xe_;
        z(n_) = ls(0);
        return z;
    }

private:
    int n_, j0_;
    double sigma_ = 1.0;
    std::unique_ptr<SparseLU> lu_;
    Eigen::VectorXd c_, xc_, xe_;
    Eigen::Matrix2d cap_;
    Eigen::FullPivLU<Eigen::Matrix2d> cap_lu_;
};

std::string describe_unknown(const SaddleSystem& s, int i) {
    if (i < s.n_active) return "velocity unknown " + std::to_string(i);
    if (i < s.n_active + s.n_pressure) return "pressure unknown " + std::to_string(i - s.n_active);
    return "mean-value multiplier";
}

}  // namespace

Eigen::VectorXd linear_solve(const SaddleSystem& s, LinearStats* stats) {
    try {
        if (!s.constrained || s.n_pressure == 0) return linear_solve(s.matrix, s.rhs, stats);
        const BorderedSolver bs(s);
        Eigen::VectorXd x = bs.solve(s.rhs);
        const double bn = s.rhs.norm();
        Eigen::VectorXd r = s.rhs - s.matrix * x;
        int steps = 0;
        while (r.norm() > 1e-11 * bn && steps < 5) {
            x += bs.solve(r);
            r = s.rhs - s.matrix * x;
            ++steps;
        }
        if (stats) {
            stats->refinements = steps;
            stats->relative_residual = bn > 0.0 ? r.norm() / bn : r.norm();
        }
        return x;
    } catch (const SingularSystemError& e) {
        throw SingularSystemError(std::string(e.what()) + ", " + describe_unknown(s, e.unknown()), e.unknown());
    }
}

namespace {

int load_degree(const Discretization& disc, const Problem& prob) {
    return prob.load_degree >= 0 ? prob.load_degree : 2 * disc.k() + 3;
}

double residual_norm(const Discretization& disc, const Problem& prob, const Eigen::VectorXd& load,
                     const Eigen::VectorXd& u, const Eigen::VectorXd& p) {
    return assemble_newton(disc, prob, load, u, p, false).residual.norm();
}

// Picard then Newton from (u, p) at the viscosity in prob.
void iterate(const Discretization& disc, const Problem& prob, const Eigen::VectorXd& load, const Eigen::VectorXd& lift,
             const NonlinearOptions& opts, double tol, Eigen::VectorXd& u, Eigen::VectorXd& p, SolveReport& rep) {
    double r = residual_norm(disc, prob, load, u, p);
    rep.residual_history.push_back(r);
    if (r <= tol) {
        rep.final_residual = r;
        rep.converged = true;
        return;
    }
    const double r0 = r;
    for (int it = 0; it < opts.picard_max && r > opts.picard_reduction * r0 && r > tol; ++it) {
        const SaddleSystem s = assemble_oseen(disc, prob, load, lift, u);
        Eigen::VectorXd un, pn;
        unpack(disc, linear_solve(s), lift, un, pn);
        u = std::move(un);
        p = std::move(pn);
        r = residual_norm(disc, prob, load, u, p);
        rep.residual_history.push_back(r);
        ++rep.picard_iterations;
    }
    for (int it = 0; it < opts.newton_max && r > tol; ++it) {
        const NewtonSystem ns = assemble_newton(disc, prob, load, u, p);
        Eigen::VectorXd du, dp;
        unpack(disc, linear_solve(ns.jacobian), Eigen::VectorXd::Zero(u.size()), du, dp);
        double t = opts.damping;
        Eigen::VectorXd ut = u + t * du, pt = p + t * dp;
        double rt = residual_norm(disc, prob, load, ut, pt);
        while (rt > r && t > opts.damping_floor) {
            t *= 0.5;
            ut = u + t * du;
            pt = p + t * dp;
            rt = residual_norm(disc, prob, load, ut, pt);
        }
        u = std::move(ut);
        p = std::move(pt);
        r = rt;
        rep.residual_history.push_back(r);
        ++rep.newton_iterations;
    }
    rep.final_residual = r;
    rep.converged = r <= tol;
}

}  // namespace

Solution solve_stokes(const Discretization& disc, const Problem& prob) {
    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::VectorXd load = disc.load(prob.f, load_degree(disc, prob));
    const Eigen::VectorXd lift = disc.boundary_lift(prob.g);
    const SaddleSystem s = assemble_stokes(disc, prob, load, lift);
    Solution sol;
    LinearStats st;
    unpack(disc, linear_solve(s, &st), lift, sol.u, sol.p);
    sol.report.reference = s.rhs.norm();
    sol.report.final_residual = st.relative_residual * sol.report.reference;
    sol.report.residual_history.push_back(sol.report.final_residual);
    sol.report.converged = st.relative_residual <= 1e-11 || sol.report.final_residual <= 1e-13;
    if (!sol.report.converged) sol.report.message = "linear residual above 1e-11 after refinement";
    sol.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

Solution solve_navier_stokes(const Discretization& disc, const Problem& prob, const NonlinearOptions& opts) {
    if (!(opts.tol_rel > 0.0) || !(opts.tol_abs > 0.0)) throw std::invalid_argument("tolerances must be positive");
    if (opts.picard_max < 0 || opts.newton_max < 0 || opts.picard_max + opts.newton_max < 1)
        throw std::invalid_argument("need at least one nonlinear iteration");
    if (!(opts.damping > 0.0 && opts.damping <= 1.0)) throw std::invalid_argument("damping must lie in (0, 1]");

    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::VectorXd load = disc.load(prob.f, load_degree(disc, prob));
    const Eigen::VectorXd lift = disc.boundary_lift(prob.g);

    std::vector<double> nus;
    if (opts.continuation_start > prob.nu)
        for (double nu = opts.continuation_start; nu > prob.nu * 1.0000001; nu /= 10.0) nus.push_back(nu);
    nus.push_back(prob.nu);

    Problem stage = prob;
    stage.nu = nus.front();
    const SaddleSystem s = assemble_stokes(disc, stage, load, lift);
    Solution sol;
    unpack(disc, linear_solve(s), lift, sol.u, sol.p);
    SolveReport& rep = sol.report;
    rep.reference = assemble_stokes(disc, prob, load, lift).rhs.norm();
    const double tol = std::max(opts.tol_rel * rep.reference, opts.tol_abs);

    for (std::size_t i = 0; i < nus.size(); ++i) {
        stage.nu = nus[i];
        const bool last = i + 1 == nus.size();
        // intermediate stages only need a rough answer
        const double stage_tol = last ? tol : std::max(tol, 1e-6 * rep.reference);
        iterate(disc, stage, load, lift, opts, stage_tol, sol.u, sol.p, rep);
        if (!last) ++rep.continuation_steps;
        if (!rep.converged) {
            rep.message = "no convergence at nu = " + std::to_string(stage.nu);
            break;
        }
    }
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

}  // namespace polyvem
