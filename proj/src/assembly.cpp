#include "polyvem/assembly.hpp"

#include <cstdio>
#include <fstream>

namespace polyvem {

int DofMap::velocity_dimension(int k, int n_cells, int n_vertices, int n_edges) {
    const int interior = (k - 1) * (k - 2) / 2 + k * (k + 1) / 2 - 1;
    return n_cells * interior + 2 * (n_vertices + (k - 1) * n_edges);
}

DofMap number_dofs(const PolyMesh& mesh, int k) {
    if (k < 2) throw std::invalid_argument("number_dofs: order k must be >= 2");
    DofMap m;
    m.k = k;
    m.n_vertices = mesh.num_vertices();
    m.n_edges = mesh.num_edges();
    m.n_cells = mesh.num_cells();
    m.n_p = poly_dim(k - 1);
    const int interior = poly_dim(k - 3) + poly_dim(k - 1) - 1;
    const int edge_base = 2 * m.n_vertices;
    const int cell_base = edge_base + 2 * (k - 1) * m.n_edges;
    m.n_velocity = cell_base + interior * m.n_cells;
    m.n_pressure = m.n_cells * m.n_p;

    const std::vector<double> t = edge_node_params(k);
    m.node_position.resize(static_cast<std::size_t>(m.n_vertices + (k - 1) * m.n_edges));
    for (int v = 0; v < m.n_vertices; ++v) m.node_position[v] = mesh.vertices()[v];
    for (int e = 0; e < m.n_edges; ++e) {
        const Point& a = mesh.vertices()[mesh.edges()[e].v0];
        const Point& b = mesh.vertices()[mesh.edges()[e].v1];
        for (int l = 0; l < k - 1; ++l) m.node_position[m.n_vertices + (k - 1) * e + l] = a + t[l] * (b - a);
    }

    m.dirichlet.assign(static_cast<std::size_t>(m.n_velocity), 0);
    for (int v = 0; v < m.n_vertices; ++v)
        if (mesh.boundary_vertex(v)) m.dirichlet[2 * v] = m.dirichlet[2 * v + 1] = 1;
    for (int e = 0; e < m.n_edges; ++e)
        if (mesh.boundary_edge(e))
            for (int i = 0; i < 2 * (k - 1); ++i) m.dirichlet[edge_base + 2 * (k - 1) * e + i] = 1;

    m.cell_dofs.resize(m.n_cells);
    for (int c = 0; c < m.n_cells; ++c) {
        const auto& cell = mesh.cells()[c];
        const int n = static_cast<int>(cell.size());
        const DofLayout lay = dof_layout(k, n);
        std::vector<int>& g = m.cell_dofs[c];
        g.resize(lay.total);
        for (int j = 0; j < n; ++j)
            for (int cc = 0; cc < 2; ++cc) g[lay.vertex(j, cc)] = 2 * cell[j] + cc;
        for (int j = 0; j < n; ++j) {
            const int e = mesh.cell_edges(c)[j];
            const bool same = cell[j] < cell[(j + 1) % n];
            for (int l = 0; l < k - 1; ++l) {
                const int gl = same ? l : k - 2 - l;
                for (int cc = 0; cc < 2; ++cc) g[lay.edge(j, l, cc)] = edge_base + 2 * ((k - 1) * e + gl) + cc;
            }
        }
        for (int i = 0; i < interior; ++i) g[lay.n_vertex + lay.n_edge + i] = cell_base + interior * c + i;
    }

    m.active.assign(static_cast<std::size_t>(m.n_velocity), -1);
    for (int i = 0; i < m.n_velocity; ++i)
        if (!m.dirichlet[i]) {
            m.active[i] = m.n_active++;
            m.active_to_global.push_back(i);
        }
    return m;
}

Discretization::Discretization(const PolyMesh& mesh, int k) : mesh_(mesh), dofs_(number_dofs(mesh, k)) {
    ops_.reserve(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) ops_.emplace_back(mesh.cell_polygon(c), k, c);
}

Eigen::VectorXd Discretization::gather(const Eigen::VectorXd& u, int c) const {
    const std::vector<int>& g = dofs_.cell_dofs[c];
    Eigen::VectorXd r(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) r(i) = u(g[i]);
    return r;
}

Eigen::VectorXd Discretization::interpolate(const VectorField& v, const ScalarField& div, int quad_degree) const {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(dofs_.n_velocity);
    for (int i = 0; i < dofs_.n_nodal(); i += 2) {
        const Point x = v(dofs_.node_position[i / 2]);
        u(i) = x.x();
        u(i + 1) = x.y();
    }
    for (int c = 0; c < dofs_.n_cells; ++c) {
        const ElementOperators& op = ops_[c];
        const Eigen::VectorXd d = op.interpolate(v, div, quad_degree);
        const int first = op.layout().n_vertex + op.layout().n_edge;
        for (int i = first; i < op.layout().total; ++i) u(dofs_.cell_dofs[c][i]) = d(i);
    }
    return u;
}

Eigen::VectorXd Discretization::boundary_lift(const VectorField& g) const {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(dofs_.n_velocity);
    if (!g) return u;
    for (int i = 0; i < dofs_.n_nodal(); i += 2)
        if (dofs_.dirichlet[i]) {
            const Point x = g(dofs_.node_position[i / 2]);
            u(i) = x.x();
            u(i + 1) = x.y();
        }
    return u;
}

Eigen::VectorXd Discretization::load(const VectorField& f, int quad_degree) const {
    Eigen::VectorXd F = Eigen::VectorXd::Zero(dofs_.n_velocity);
    if (!f) return F;
    for (int c = 0; c < dofs_.n_cells; ++c) {
        const Eigen::VectorXd fl = ops_[c].load(f, quad_degree);
        for (int i = 0; i < fl.size(); ++i) F(dofs_.cell_dofs[c][i]) += fl(i);
    }
    return F;
}

Eigen::VectorXd Discretization::pressure_mean_row() const {
    Eigen::VectorXd m(dofs_.n_pressure);
    for (int c = 0; c < dofs_.n_cells; ++c) m.segment(c * dofs_.n_p, dofs_.n_p) = ops_[c].integrals().head(dofs_.n_p);
    return m;
}

SaddleSystem build_saddle(const Discretization& disc, const LocalMatrix& local, const Eigen::VectorXd& load,
                          const Eigen::VectorXd& lift, bool constrained) {
    const DofMap& dm = disc.dofs();
    SaddleSystem s;
    s.n_active = dm.n_active;
    s.n_pressure = dm.n_pressure;
    s.constrained = constrained;
    const int n = dm.n_active + dm.n_pressure + (constrained ? 1 : 0);
    s.rhs = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < dm.n_active; ++i) s.rhs(i) = load(dm.active_to_global[i]);

    std::vector<Eigen::Triplet<double>> trip;
    for (int c = 0; c < dm.n_cells; ++c) {
        const std::vector<int>& g = dm.cell_dofs[c];
        const int N = static_cast<int>(g.size());
        const Eigen::MatrixXd a = local(c);
        for (int i = 0; i < N; ++i) {
            const int ri = dm.active[g[i]];
            if (ri < 0) continue;
            for (int j = 0; j < N; ++j) {
                const int cj = dm.active[g[j]];
                if (cj >= 0)
                    trip.emplace_back(ri, cj, a(i, j));
                else
                    s.rhs(ri) -= a(i, j) * lift(g[j]);
            }
        }
        const Eigen::MatrixXd& b = disc.element(c).divergence();
        for (int beta = 0; beta < dm.n_p; ++beta) {
            const int rp = dm.n_active + dm.pressure(c, beta);
            for (int j = 0; j < N; ++j) {
                if (b(beta, j) == 0.0) continue;
                const int cj = dm.active[g[j]];
                if (cj >= 0) {
                    trip.emplace_back(rp, cj, b(beta, j));
                    trip.emplace_back(cj, rp, b(beta, j));
                } else {
                    s.rhs(rp) -= b(beta, j) * lift(g[j]);
                }
            }
        }
    }
    if (constrained) {
        const Eigen::VectorXd m = disc.pressure_mean_row();
        const int rl = n - 1;
        for (int i = 0; i < dm.n_pressure; ++i) {
            trip.emplace_back(rl, dm.n_active + i, m(i));
            trip.emplace_back(dm.n_active + i, rl, m(i));
        }
    }
    s.matrix.resize(n, n);
    s.matrix.setFromTriplets(trip.begin(), trip.end());
    s.matrix.makeCompressed();
    return s;
}

SaddleSystem assemble_stokes(const Discretization& disc, const Problem& prob, const Eigen::VectorXd& load,
                             const Eigen::VectorXd& lift) {
    return build_saddle(
        disc, [&](int c) -> Eigen::MatrixXd { return prob.nu * disc.element(c).stiffness(); }, load, lift);
}

SaddleSystem assemble_oseen(const Discretization& disc, const Problem& prob, const Eigen::VectorXd& load,
                            const Eigen::VectorXd& lift, const Eigen::VectorXd& w) {
    if (w.size() == 0 || w.isZero(0.0)) return assemble_stokes(disc, prob, load, lift);
    return build_saddle(
        disc,
        [&](int c) -> Eigen::MatrixXd {
            const ElementOperators& op = disc.element(c);
            return prob.nu * op.stiffness() + op.convection(disc.gather(w, c), prob.mode);
        },
        load, lift);
}

NewtonSystem assemble_newton(const Discretization& disc, const Problem& prob, const Eigen::VectorXd& load,
                             const Eigen::VectorXd& u, const Eigen::VectorXd& p, bool with_jacobian) {
    const DofMap& dm = disc.dofs();
    NewtonSystem ns;
    const int n = dm.n_active + dm.n_pressure + 1;
    Eigen::VectorXd rv = -load;
    Eigen::VectorXd rp = Eigen::VectorXd::Zero(dm.n_pressure);
    for (int c = 0; c < dm.n_cells; ++c) {
        const ElementOperators& op = disc.element(c);
        const Eigen::VectorXd ul = disc.gather(u, c);
        const Eigen::VectorXd pl = p.segment(c * dm.n_p, dm.n_p);
        const Eigen::VectorXd r =
            prob.nu * (op.stiffness() * ul) + op.convection(ul, prob.mode) * ul + op.divergence().transpose() * pl;
        for (int i = 0; i < r.size(); ++i) rv(dm.cell_dofs[c][i]) += r(i);
        rp.segment(c * dm.n_p, dm.n_p) = op.divergence() * ul;
    }
    ns.residual.resize(n);
    for (int i = 0; i < dm.n_active; ++i) ns.residual(i) = rv(dm.active_to_global[i]);
    ns.residual.segment(dm.n_active, dm.n_pressure) = rp;
    ns.residual(n - 1) = disc.pressure_mean_row().dot(p);
    if (with_jacobian) {
        const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dm.n_velocity);
        ns.jacobian = build_saddle(
            disc,
            [&](int c) -> Eigen::MatrixXd {
                const ElementOperators& op = disc.element(c);
                const Eigen::VectorXd ul = disc.gather(u, c);
                return prob.nu * op.stiffness() + op.convection(ul, prob.mode) +
                       op.convection_derivative(ul, prob.mode);
            },
            zero, zero);
        ns.jacobian.rhs = -ns.residual;
    }
    return ns;
}

void unpack(const Discretization& disc, const Eigen::VectorXd& z, const Eigen::VectorXd& lift, Eigen::VectorXd& u,
            Eigen::VectorXd& p) {
    const DofMap& dm = disc.dofs();
    u = lift;
    for (int i = 0; i < dm.n_active; ++i) u(dm.active_to_global[i]) = z(i);
    p = z.segment(dm.n_active, dm.n_pressure);
}

Eigen::VectorXd pack(const Discretization& disc, const Eigen::VectorXd& u, const Eigen::VectorXd& p) {
    const DofMap& dm = disc.dofs();
    Eigen::VectorXd z = Eigen::VectorXd::Zero(dm.n_active + dm.n_pressure + 1);
    for (int i = 0; i < dm.n_active; ++i) z(i) = u(dm.active_to_global[i]);
    z.segment(dm.n_active, dm.n_pressure) = p;
    return z;
}

std::vector<Eigen::VectorXd> divergence_coeffs(const Discretization& disc, const Eigen::VectorXd& u) {
    std::vector<Eigen::VectorXd> r(disc.dofs().n_cells);
    for (int c = 0; c < disc.dofs().n_cells; ++c) r[c] = disc.element(c).div_coeffs() * disc.gather(u, c);
    return r;
}

SparseMatrix assemble_stiffness(const Discretization& disc) {
    const DofMap& dm = disc.dofs();
    std::vector<Eigen::Triplet<double>> trip;
    for (int c = 0; c < dm.n_cells; ++c) {
        const Eigen::MatrixXd& a = disc.element(c).stiffness();
        const std::vector<int>& g = dm.cell_dofs[c];
        for (int i = 0; i < a.rows(); ++i)
            for (int j = 0; j < a.cols(); ++j) trip.emplace_back(g[i], g[j], a(i, j));
    }
    SparseMatrix m(dm.n_velocity, dm.n_velocity);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

SparseMatrix assemble_divergence(const Discretization& disc) {
    const DofMap& dm = disc.dofs();
    std::vector<Eigen::Triplet<double>> trip;
    for (int c = 0; c < dm.n_cells; ++c) {
        const Eigen::MatrixXd& b = disc.element(c).divergence();
        const std::vector<int>& g = dm.cell_dofs[c];
        for (int i = 0; i < b.rows(); ++i)
            for (int j = 0; j < b.cols(); ++j)
                if (b(i, j) != 0.0) trip.emplace_back(dm.pressure(c, i), g[j], b(i, j));
    }
    SparseMatrix m(dm.n_pressure, dm.n_velocity);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

SparseMatrix assemble_pressure_mass(const Discretization& disc) {
    const DofMap& dm = disc.dofs();
    std::vector<Eigen::Triplet<double>> trip;
    for (int c = 0; c < dm.n_cells; ++c) {
        const Eigen::MatrixXd h = disc.element(c).mass(disc.k() - 1);
        for (int i = 0; i < dm.n_p; ++i)
            for (int j = 0; j < dm.n_p; ++j) trip.emplace_back(dm.pressure(c, i), dm.pressure(c, j), h(i, j));
    }
    SparseMatrix m(dm.n_pressure, dm.n_pressure);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

void write_coo(const SparseMatrix& m, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    os << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
    char buf[64];
    for (int j = 0; j < m.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(m, j); it; ++it) {
            std::snprintf(buf, sizeof buf, "%.17g", it.value());
            os << it.row() << ' ' << it.col() << ' ' << buf << '\n';
        }
    if (!os) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace polyvem
