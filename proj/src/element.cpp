#include "polyvem/element.hpp"

#include <string>

namespace polyvem {

namespace {

int add_index(int i, int j) {
    const Exponent a = monomial_exponent(i), b = monomial_exponent(j);
    return monomial_index(a.a + b.a, a.b + b.b);
}

// P(i,j) = int m_i m_j for i < dim P_da, j < dim P_db
Eigen::MatrixXd product_table(const Eigen::VectorXd& ints, int da, int db) {
    Eigen::MatrixXd p(poly_dim(da), poly_dim(db));
    for (int i = 0; i < p.rows(); ++i)
        for (int j = 0; j < p.cols(); ++j) p(i, j) = ints(add_index(i, j));
    return p;
}

// int m_i m_j m_l, cached index arithmetic
double triple(const Eigen::VectorXd& ints, const Exponent& a, const Exponent& b, const Exponent& c) {
    return ints(monomial_index(a.a + b.a + c.a, a.b + b.b + c.b));
}

Eigen::MatrixXd block_diag2(const Eigen::MatrixXd& a) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(2 * a.rows(), 2 * a.cols());
    r.topLeftCorner(a.rows(), a.cols()) = a;
    r.bottomRightCorner(a.rows(), a.cols()) = a;
    return r;
}

std::string cell_tag(int id) { return id >= 0 ? "cell " + std::to_string(id) + ": " : std::string(); }

}  // namespace

DofLayout dof_layout(int k, int n_edges) {
    if (k < 2) throw std::invalid_argument("dof_layout: order k must be >= 2");
    if (n_edges < 3) throw std::invalid_argument("dof_layout: a cell needs at least 3 edges");
    DofLayout l;
    l.k = k;
    l.n_edges = n_edges;
    l.n_vertex = 2 * n_edges;
    l.n_edge = 2 * n_edges * (k - 1);
    l.n_gperp = poly_dim(k - 3);
    l.n_div = poly_dim(k - 1) - 1;
    l.total = l.n_vertex + l.n_edge + l.n_gperp + l.n_div;
    l.n_p = poly_dim(k - 1);
    return l;
}

Point ElementOperators::node(int dof) const {
    const int n = layout_.n_edges;
    if (dof < layout_.n_vertex) return geom_.vertices[dof / 2];
    const int e = (dof - layout_.n_vertex) / 2;
    const int j = e / (layout_.k - 1), l = e % (layout_.k - 1);
    const Point& a = geom_.vertices[j];
    const Point& b = geom_.vertices[(j + 1) % n];
    return a + edge_params_[l] * (b - a);
}

void ElementOperators::build_boundary_terms() {
    const int k = layout_.k, n = layout_.n_edges, N = layout_.total;
    const int ng = poly_dim(k + 1);
    const Eigen::MatrixXd vinv = edge_vandermonde(k).inverse();
    for (auto& row : boundary_)
        for (auto& m : row) m = Eigen::MatrixXd::Zero(ng, N);
    for (int j = 0; j < n; ++j) {
        const Point& a = geom_.vertices[j];
        const Point& b = geom_.vertices[(j + 1) % n];
        const Point& nrm = geom_.normals[j];
        const EdgeRule r = edge_quadrature(a, b, 2 * k + 1);
        for (std::size_t q = 0; q < r.points.size(); ++q) {
            Eigen::RowVectorXd pw(k + 1);
            for (int p = 0; p <= k; ++p) pw(p) = std::pow(r.params[q], p);
            const Eigen::RowVectorXd lag = pw * vinv;
            const Eigen::VectorXd m = basis_.values(r.points[q], k + 1) * r.weights[q];
            for (int c = 0; c < 2; ++c)
                for (int i = 0; i <= k; ++i) {
                    const int dof = i == 0 ? layout_.vertex(j, c)
                                  : i == k ? layout_.vertex((j + 1) % n, c)
                                           : layout_.edge(j, i - 1, c);
                    for (int d = 0; d < 2; ++d) boundary_[c][d].col(dof) += (lag(i) * nrm(d)) * m;
                }
        }
    }
}

ElementOperators::ElementOperators(const Polygon& poly, int k, int cell_id)
    : layout_(dof_layout(k, static_cast<int>(poly.size()))),
      geom_(cell_geometry(poly)),
      basis_(k, geom_.centroid, geom_.diameter),
      edge_params_(edge_node_params(k)) {
    const int n = layout_.n_edges, N = layout_.total;
    const double h = geom_.diameter, area = geom_.area;
    if (!(area > 0.0)) throw ElementError(cell_tag(cell_id) + "degenerate cell (non-positive area)");
    const int nk = poly_dim(k), nk1 = poly_dim(k - 1), nk2 = poly_dim(k - 2), nk3 = poly_dim(k - 3);
    const int nkp = poly_dim(k + 1);

    // monomial integrals through the boundary: div((x - x_E) m) = (2 + |g|) m
    const int dmax = 3 * k;
    integrals_ = Eigen::VectorXd::Zero(poly_dim(dmax));
    for (int j = 0; j < n; ++j) {
        const Point& a = geom_.vertices[j];
        const Point& b = geom_.vertices[(j + 1) % n];
        const double xn = (a - geom_.centroid).dot(geom_.normals[j]);
        const EdgeRule r = edge_quadrature(a, b, dmax);
        for (std::size_t q = 0; q < r.points.size(); ++q)
            integrals_ += (r.weights[q] * xn) * basis_.values(r.points[q], dmax);
    }
    for (int g = 0; g < integrals_.size(); ++g) integrals_(g) /= 2.0 + monomial_exponent(g).degree();

    build_boundary_terms();

    const Eigen::MatrixXd hk = gram_matrix(integrals_, k);
    const Eigen::MatrixXd hk1 = gram_matrix(integrals_, k - 1);
    const Eigen::MatrixXd hv = block_diag2(hk);
    const PolyCalculus pc = poly_calculus(k, h);
    const PolyCalculus pcp = poly_calculus(k + 1, h);
    Eigen::MatrixXd deriv[2] = {scaled_derivative(k, 0) / h, scaled_derivative(k, 1) / h};
    Eigen::MatrixXd deriv1[2] = {scaled_derivative(k - 1, 0) / h, scaled_derivative(k - 1, 1) / h};

    // divergence moments; the constant mode is the boundary flux
    const Eigen::MatrixXd flux_all = boundary_[0][0] + boundary_[1][1];  // int m_g v.n
    divergence_ = Eigen::MatrixXd::Zero(nk1, N);
    divergence_.row(0) = flux_all.row(0);
    for (int b = 1; b < nk1; ++b) divergence_(b, layout_.div(b)) = area / h;
    Eigen::LDLT<Eigen::MatrixXd> hk1_ldlt(hk1);
    div_coeffs_ = hk1_ldlt.solve(divergence_);

    // moments against the mixed basis {grad m_g, 1 <= |g| <= k+1} u {xi^perp m_b, |b| <= k-1}
    const Eigen::MatrixXd ig = product_table(integrals_, k + 1, k - 1);
    Eigen::MatrixXd mix = Eigen::MatrixXd::Zero(2 * nk, N);
    // gradients taken in scaled coordinates (h grad m_g) for conditioning
    mix.topRows(nkp - 1) = h * (-ig * div_coeffs_ + flux_all).bottomRows(nkp - 1);
    for (int b = 0; b < nk3; ++b) mix(nkp - 1 + b, layout_.gperp(b)) = area;
    Eigen::MatrixXd mixed_basis(2 * nk, 2 * nk);
    mixed_basis << h * pcp.gradient.rightCols(nkp - 1), pc.perp;
    Eigen::FullPivLU<Eigen::MatrixXd> mixed_lu(mixed_basis);
    if (!mixed_lu.isInvertible()) throw ElementError(cell_tag(cell_id) + "singular polynomial basis");
    const Eigen::MatrixXd to_plain = mixed_lu.inverse().transpose();
    // rows with |alpha| <= k-2 only involve the known part of the mixed moments
    const Eigen::MatrixXd partial = to_plain * mix;
    Eigen::MatrixXd low(2 * nk2, N);
    for (int c = 0; c < 2; ++c) low.middleRows(c * nk2, nk2) = partial.middleRows(c * nk, nk2);

    // H1 projector
    grad_gram_ = deriv[0].transpose() * hk1 * deriv[0] + deriv[1].transpose() * hk1 * deriv[1];
    Eigen::MatrixXd gs = grad_gram_;
    gs.row(0) = integrals_.head(nk).transpose();
    const Eigen::MatrixXd lap = pc.vector_laplacian.topLeftCorner(nk2, nk);
    Eigen::MatrixXd rhs(2 * nk, N);
    for (int c = 0; c < 2; ++c) {
        Eigen::MatrixXd r = -lap.transpose() * low.middleRows(c * nk2, nk2);
        for (int d = 0; d < 2; ++d) r += deriv[d].transpose() * boundary_[c][d].topRows(nk1);
        r.row(0) = partial.row(c * nk);
        rhs.middleRows(c * nk, nk) = r;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> gs_lu(gs);
    if (!gs_lu.isInvertible()) throw ElementError(cell_tag(cell_id) + "singular H1 projection matrix");
    pi_nabla_.resize(2 * nk, N);
    for (int c = 0; c < 2; ++c) pi_nabla_.middleRows(c * nk, nk) = gs_lu.solve(rhs.middleRows(c * nk, nk));

    // enhancement: moments against the L2-orthogonal complement of x^perp P_{k-3}
    // in x^perp P_{k-1} are those of the H1 projection
    const Eigen::MatrixXd gperp = pc.perp.transpose() * hv * pc.perp;
    const int nh = nk1 - nk3;
    Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(nh, nk3);
    if (nk3 > 0) coef = gperp.block(nk3, 0, nh, nk3) * gperp.topLeftCorner(nk3, nk3).inverse();
    for (int j = 0; j < nh; ++j) {
        Eigen::VectorXd g = pc.perp.col(nk3 + j);
        for (int l = 0; l < nk3; ++l) g -= coef(j, l) * pc.perp.col(l);
        Eigen::RowVectorXd row = g.transpose() * hv * pi_nabla_;
        for (int l = 0; l < nk3; ++l) row(layout_.gperp(l)) += coef(j, l) * area;
        mix.row(nkp - 1 + nk3 + j) = row;
    }
    moments_ = to_plain * mix;
    pi0_ = Eigen::LDLT<Eigen::MatrixXd>(hv).solve(moments_);

    // L2 projection of the gradient onto P_{k-1}
    Eigen::MatrixXd gm(4 * nk1, N);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            gm.middleRows((2 * i + j) * nk1, nk1) =
                -deriv1[j].transpose() * low.middleRows(i * nk2, nk2) + boundary_[i][j].topRows(nk1);
    pi0_grad_.resize(4 * nk1, N);
    for (int t = 0; t < 4; ++t) pi0_grad_.middleRows(t * nk1, nk1) = hk1_ldlt.solve(gm.middleRows(t * nk1, nk1));

    // DoFs of the plain polynomial basis
    dof_matrix_ = Eigen::MatrixXd::Zero(N, 2 * nk);
    for (int i = 0; i < layout_.n_vertex + layout_.n_edge; ++i) {
        const Eigen::VectorXd m = basis_.values(node(i), k);
        dof_matrix_.row(i).segment((i % 2) * nk, nk) = m.transpose();
    }
    const Eigen::MatrixXd perp_moments = pc.perp.transpose() * hv / area;
    for (int b = 0; b < nk3; ++b) dof_matrix_.row(layout_.gperp(b)) = perp_moments.row(b);
    const Eigen::MatrixXd div_moments = hk1 * pc.divergence * (h / area);
    for (int b = 1; b < nk1; ++b) dof_matrix_.row(layout_.div(b)) = div_moments.row(b);

    consistency_ = pi_nabla_.transpose() * block_diag2(grad_gram_) * pi_nabla_;
    const Eigen::MatrixXd ip = Eigen::MatrixXd::Identity(N, N) - dof_matrix_ * pi_nabla_;
    stabilization_ = ip.transpose() * ip;
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(consistency_, Eigen::EigenvaluesOnly)
                                   .eigenvalues();
    const double thresh = 1e-12 * ev.maxCoeff();
    double sum = 0.0;
    int cnt = 0;
    for (int i = 0; i < ev.size(); ++i)
        if (ev(i) > thresh) sum += ev(i), ++cnt;
    alpha_ = cnt > 0 ? sum / cnt : 0.0;
    if (!(alpha_ > 0.0)) throw ElementError(cell_tag(cell_id) + "non-positive stabilization scaling");
    stiffness_ = consistency_ + alpha_ * stabilization_;
}

Eigen::MatrixXd ElementOperators::convection(const Eigen::VectorXd& w, ConvectionMode mode) const {
    const int k = layout_.k, nk = poly_dim(k), nk1 = poly_dim(k - 1);
    const Eigen::VectorXd wc = pi0_ * w;
    // t((i, a), (2i+j, b)) = int m_a m_b (Pi0 w)_j
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(2 * nk, 4 * nk1);
    for (int a = 0; a < nk; ++a) {
        const Exponent ea = monomial_exponent(a);
        for (int b = 0; b < nk1; ++b) {
            const Exponent eb = monomial_exponent(b);
            double s[2] = {0.0, 0.0};
            for (int g = 0; g < nk; ++g) {
                const double v = triple(integrals_, ea, eb, monomial_exponent(g));
                s[0] += wc(g) * v;
                s[1] += wc(nk + g) * v;
            }
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) t(i * nk + a, (2 * i + j) * nk1 + b) = s[j];
        }
    }
    const Eigen::MatrixXd c = pi0_.transpose() * t * pi0_grad_;
    if (mode == ConvectionMode::plain) return c;
    return 0.5 * (c - c.transpose());
}

Eigen::MatrixXd ElementOperators::convection_derivative(const Eigen::VectorXd& u, ConvectionMode mode) const {
    const int k = layout_.k, nk = poly_dim(k), nk1 = poly_dim(k - 1);
    const Eigen::VectorXd gu = pi0_grad_ * u;
    // c(w; u, v) = sum int (grad u)_{ij} w_j v_i
    // t2((i, a), (j, g)) = int m_a m_g (grad u)_{ij}
    Eigen::MatrixXd t2 = Eigen::MatrixXd::Zero(2 * nk, 2 * nk);
    for (int a = 0; a < nk; ++a) {
        const Exponent ea = monomial_exponent(a);
        for (int g = 0; g < nk; ++g) {
            const Exponent eg = monomial_exponent(g);
            for (int b = 0; b < nk1; ++b) {
                const double v = triple(integrals_, ea, monomial_exponent(b), eg);
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) t2(i * nk + a, j * nk + g) += gu((2 * i + j) * nk1 + b) * v;
            }
        }
    }
    const Eigen::MatrixXd d = pi0_.transpose() * t2 * pi0_;
    if (mode == ConvectionMode::plain) return d;
    // second half: d/dw c(w; v, u) = int (grad v)_{ij} w_j u_i
    const Eigen::VectorXd uc = pi0_ * u;
    // t3((2i+j, b), (j, g)) = int m_b m_g u_i
    Eigen::MatrixXd t3 = Eigen::MatrixXd::Zero(4 * nk1, 2 * nk);
    for (int b = 0; b < nk1; ++b) {
        const Exponent eb = monomial_exponent(b);
        for (int g = 0; g < nk; ++g) {
            const Exponent eg = monomial_exponent(g);
            double s[2] = {0.0, 0.0};
            for (int a = 0; a < nk; ++a) {
                const double v = triple(integrals_, monomial_exponent(a), eb, eg);
                s[0] += uc(a) * v;
                s[1] += uc(nk + a) * v;
            }
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) t3((2 * i + j) * nk1 + b, j * nk + g) = s[i];
        }
    }
    const Eigen::MatrixXd e = pi0_grad_.transpose() * t3 * pi0_;
    return 0.5 * (d - e);
}

Eigen::VectorXd ElementOperators::load(const VectorField& f, int quad_degree) const {
    const int nk = poly_dim(layout_.k);
    const QuadRule r = quad_rule(geom_.vertices, quad_degree);
    Eigen::VectorXd fm = Eigen::VectorXd::Zero(2 * nk);
    for (std::size_t q = 0; q < r.size(); ++q) {
        const Eigen::VectorXd m = basis_.values(r.points[q], layout_.k);
        const Point fv = f(r.points[q]);
        fm.head(nk) += (r.weights[q] * fv.x()) * m;
        fm.tail(nk) += (r.weights[q] * fv.y()) * m;
    }
    return pi0_.transpose() * fm;
}

Eigen::VectorXd ElementOperators::interpolate(const VectorField& v, const ScalarField& div, int quad_degree) const {
    const int k = layout_.k, nk1 = poly_dim(k - 1), nk3 = poly_dim(k - 3);
    const double h = geom_.diameter, area = geom_.area;
    Eigen::VectorXd d = Eigen::VectorXd::Zero(layout_.total);
    for (int i = 0; i < layout_.n_vertex + layout_.n_edge; i += 2) {
        const Point x = v(node(i));
        d(i) = x.x();
        d(i + 1) = x.y();
    }
    const double step = 1e-6 * h;
    auto divergence = [&](const Point& x) {
        if (div) return div(x);
        const Point ex(step, 0.0), ey(0.0, step);
        return (v(x + ex).x() - v(x - ex).x() + v(x + ey).y() - v(x - ey).y()) / (2.0 * step);
    };
    const QuadRule r = quad_rule(geom_.vertices, quad_degree);
    for (std::size_t q = 0; q < r.size(); ++q) {
        const Point& x = r.points[q];
        const Eigen::VectorXd m = basis_.values(x, k - 1);
        const Point s = basis_.scaled(x);
        if (nk3 > 0) {
            const double vp = v(x).dot(Point(s.y(), -s.x())) * r.weights[q] / area;
            for (int b = 0; b < nk3; ++b) d(layout_.gperp(b)) += vp * m(b);
        }
        const double dv = divergence(x) * r.weights[q] * h / area;
        for (int b = 1; b < nk1; ++b) d(layout_.div(b)) += dv * m(b);
    }
    return d;
}

}  // namespace polyvem
