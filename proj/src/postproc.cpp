#include "polyvem/postproc.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "polyvem/solver.hpp"

namespace polyvem {

namespace {

double shifted_pressure_mean(const Discretization& disc, const ScalarField& p, int deg) {
    double s = 0.0, area = 0.0;
    for (int c = 0; c < disc.dofs().n_cells; ++c) {
        const QuadRule q = quad_rule(disc.element(c).geometry().vertices, deg);
        for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * p(q.points[i]);
        area += disc.element(c).geometry().area;
    }
    return s / area;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return os;
}

}  // namespace

ErrorReport compute_errors(const Discretization& disc, const Eigen::VectorXd& u, const Eigen::VectorXd& p,
                           const ExactSolution& exact, double h, int quad_degree) {
    const DofMap& dm = disc.dofs();
    const int k = disc.k();
    const int deg = quad_degree >= 0 ? quad_degree : 2 * k + 3;
    const int nk = poly_dim(k), nk1 = poly_dim(k - 1);
    ErrorReport r;
    r.h = h;
    r.ndof = dm.n_active + dm.n_pressure - 1;
    const double pmean = exact.p ? shifted_pressure_mean(disc, exact.p, deg) : 0.0;

    double h1 = 0.0, l2 = 0.0, pl2 = 0.0;
    for (int c = 0; c < dm.n_cells; ++c) {
        const ElementOperators& op = disc.element(c);
        const Eigen::VectorXd ul = disc.gather(u, c);
        const Eigen::VectorXd vc = op.pi0() * ul;
        const Eigen::VectorXd gc = op.pi0_grad() * ul;
        const Eigen::VectorXd pc = p.segment(c * dm.n_p, dm.n_p);
        const QuadRule q = quad_rule(op.geometry().vertices, deg);
        for (std::size_t i = 0; i < q.size(); ++i) {
            const Point& x = q.points[i];
            const double w = q.weights[i];
            const Eigen::VectorXd m = op.basis().values(x, k);
            const Eigen::VectorXd m1 = m.head(nk1);
            if (exact.u) {
                const Point uh(m.dot(vc.head(nk)), m.dot(vc.tail(nk)));
                l2 += w * (exact.u(x) - uh).squaredNorm();
            }
            if (exact.grad_u) {
                const Eigen::Matrix2d g = exact.grad_u(x);
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) {
                        const double d = g(a, b) - m1.dot(gc.segment((2 * a + b) * nk1, nk1));
                        h1 += w * d * d;
                    }
            }
            if (exact.p) {
                const double d = exact.p(x) - pmean - m1.dot(pc);
                pl2 += w * d * d;
            }
        }
    }
    r.u_h1 = std::sqrt(h1);
    r.u_l2 = std::sqrt(l2);
    r.p_l2 = std::sqrt(pl2);
    if (exact.u)
        for (int i = 0; i < dm.n_nodal(); i += 2) {
            if (dm.dirichlet[i]) continue;
            const Point e = exact.u(dm.node_position[i / 2]);
            r.u_linf = std::max({r.u_linf, std::abs(e.x() - u(i)), std::abs(e.y() - u(i + 1))});
        }
    r.div_inf = div_inf_norm(disc, u);
    return r;
}

double div_inf_norm(const Discretization& disc, const Eigen::VectorXd& u) {
    const int k = disc.k();
    const std::vector<Eigen::VectorXd> dc = divergence_coeffs(disc, u);
    double m = 0.0;
    for (int c = 0; c < disc.dofs().n_cells; ++c) {
        const ElementOperators& op = disc.element(c);
        const Polygon& poly = op.geometry().vertices;
        for (const Point& x : poly) m = std::max(m, std::abs(op.basis().values(x, k - 1).dot(dc[c])));
        const QuadRule q = quad_rule(poly, 2 * k);
        for (const Point& x : q.points) m = std::max(m, std::abs(op.basis().values(x, k - 1).dot(dc[c])));
    }
    return m;
}

std::vector<double> eoc(const std::vector<double>& h, const std::vector<double>& e) {
    if (h.size() != e.size()) throw std::invalid_argument("eoc: size mismatch");
    std::vector<double> r;
    for (std::size_t i = 0; i + 1 < h.size(); ++i) {
        if (!(h[i + 1] < h[i])) throw std::invalid_argument("eoc: h must be strictly decreasing");
        r.push_back(std::log(e[i] / e[i + 1]) / std::log(h[i] / h[i + 1]));
    }
    return r;
}

double infsup_estimate(const Discretization& disc) {
    const DofMap& dm = disc.dofs();
    const SparseMatrix a_full = assemble_stiffness(disc);
    const SparseMatrix b_full = assemble_divergence(disc);
    // restrict to active velocity DoFs
    SparseMatrix sel(dm.n_velocity, dm.n_active);
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < dm.n_active; ++i) t.emplace_back(dm.active_to_global[i], i, 1.0);
    sel.setFromTriplets(t.begin(), t.end());
    const SparseMatrix a = sel.transpose() * a_full * sel;
    const SparseMatrix b = b_full * sel;

    const SparseLU lu(a);
    const Eigen::MatrixXd bt = Eigen::MatrixXd(b.transpose());
    Eigen::MatrixXd x(dm.n_active, dm.n_pressure);
    for (int j = 0; j < dm.n_pressure; ++j) x.col(j) = lu.solve(bt.col(j));
    Eigen::MatrixXd s = b * x;
    s = 0.5 * (s + s.transpose()).eval();
    const Eigen::MatrixXd mp = Eigen::MatrixXd(assemble_pressure_mass(disc));
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(s, mp, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("infsup_estimate: eigensolver failed");
    // eigenvalues ascending; the first belongs to the constant pressure
    return std::sqrt(std::max(es.eigenvalues()(1), 0.0));
}

std::vector<FieldSample> sample_fields(const Discretization& disc, const Eigen::VectorXd& u, const Eigen::VectorXd& p) {
    const DofMap& dm = disc.dofs();
    const int k = disc.k();
    const int nk = poly_dim(k);
    std::vector<FieldSample> out;
    for (int c = 0; c < dm.n_cells; ++c) {
        const ElementOperators& op = disc.element(c);
        const Eigen::VectorXd vc = op.pi0() * disc.gather(u, c);
        const Eigen::VectorXd pc = p.segment(c * dm.n_p, dm.n_p);
        Polygon pts = op.geometry().vertices;
        pts.push_back(op.geometry().centroid);
        for (const Point& x : pts) {
            const Eigen::VectorXd m = op.basis().values(x, k);
            out.push_back({c, x, Point(m.dot(vc.head(nk)), m.dot(vc.tail(nk))), m.head(dm.n_p).dot(pc)});
        }
    }
    return out;
}

void export_vtk(const Discretization& disc, const Eigen::VectorXd& u, const Eigen::VectorXd& p,
                const std::filesystem::path& path) {
    const std::vector<FieldSample> s = sample_fields(disc, u, p);
    const PolyMesh& mesh = disc.mesh();
    const int nc = mesh.num_cells();
    std::ofstream os = open_output(path);
    os.precision(17);
    os << "# vtk DataFile Version 3.0\npolyvem solution\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << s.size() << " double\n";
    for (const FieldSample& f : s) os << f.x.x() << ' ' << f.x.y() << " 0\n";
    std::size_t size = 0;
    for (const auto& cell : mesh.cells()) size += cell.size() + 1 + 2;
    os << "CELLS " << 2 * nc << ' ' << size << '\n';
    std::size_t base = 0;
    std::vector<std::size_t> centre(nc);
    for (int c = 0; c < nc; ++c) {
        const std::size_t n = mesh.cells()[c].size();
        os << n;
        for (std::size_t j = 0; j < n; ++j) os << ' ' << base + j;
        os << '\n';
        centre[c] = base + n;
        base += n + 1;
    }
    for (int c = 0; c < nc; ++c) os << "1 " << centre[c] << '\n';
    os << "CELL_TYPES " << 2 * nc << '\n';
    for (int c = 0; c < nc; ++c) os << "7\n";
    for (int c = 0; c < nc; ++c) os << "1\n";
    os << "POINT_DATA " << s.size() << "\nVECTORS velocity double\n";
    for (const FieldSample& f : s) os << f.u.x() << ' ' << f.u.y() << " 0\n";
    os << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (const FieldSample& f : s) os << f.p << '\n';
    if (!os) throw std::runtime_error("write to '" + path.string() + "' failed");
}

void export_csv(const Discretization& disc, const Eigen::VectorXd& u, const Eigen::VectorXd& p,
                const std::filesystem::path& path) {
    std::ofstream os = open_output(path);
    os << "cell,x,y,ux,uy,p\n";
    char buf[160];
    for (const FieldSample& f : sample_fields(disc, u, p)) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", f.cell, f.x.x(), f.x.y(), f.u.x(),
                      f.u.y(), f.p);
        os << buf;
    }
    if (!os) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::vector<FieldSample> read_field_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(is, line) || line != "cell,x,y,ux,uy,p")
        throw std::runtime_error(path.string() + ": missing header");
    std::vector<FieldSample> out;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        FieldSample f;
        double x, y, ux, uy;
        if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf,%lf", &f.cell, &x, &y, &ux, &uy, &f.p) != 6)
            throw std::runtime_error(path.string() + ": line " + std::to_string(lineno) + ": expected 6 fields");
        f.x = Point(x, y);
        f.u = Point(ux, uy);
        out.push_back(f);
    }
    return out;
}

}  // namespace polyvem
