#include "hpvem/vem_local.hpp"

#include "hpvem/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace hpvem {

namespace {

std::string cell_label(int cell) { return "cell " + std::to_string(cell); }

Eigen::Matrix2d sample_diffusion(const std::function<Eigen::Matrix2d(const Point&)>& diffusion,
                                 const Point& x, int cell)
{
    Eigen::Matrix2d k;
    try {
        k = diffusion(x);
    } catch (const std::exception& e) {
        throw CoefficientError("diffusion evaluation failed on " + cell_label(cell) + ": " +
                               e.what());
    }
    if (!k.allFinite()) {
        throw CoefficientError("non-finite diffusion tensor on " + cell_label(cell));
    }
    return k;
}

double sample_potential(const std::function<double(const Point&)>& potential, const Point& x,
                        int cell)
{
    double v = 0.0;
    try {
        v = potential(x);
    } catch (const std::exception& e) {
        throw CoefficientError("potential evaluation failed on " + cell_label(cell) + ": " +
                               e.what());
    }
    if (!std::isfinite(v)) {
        throw CoefficientError("non-finite potential on " + cell_label(cell));
    }
    return v;
}

/// Inverse of a small symmetric positive definite block.
Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m)
{
    if (m.rows() == 0) {
        return m;
    }
    return m.ldlt().solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
}

} // namespace

DofLayout dof_layout(int n_vertices, int p, std::vector<int> edge_degrees, int cell_id)
{
    if (p < 1) {
        throw ArgumentError("element degree must be >= 1");
    }
    if (n_vertices < 3) {
        throw ArgumentError("element needs at least 3 vertices");
    }
    if (static_cast<int>(edge_degrees.size()) != n_vertices) {
        throw ArgumentError("one edge degree per element edge is required");
    }
    DofLayout layout;
    layout.cell = cell_id;
    layout.degree = p;
    layout.n_vertices = n_vertices;
    int offset = n_vertices;
    for (int pe : edge_degrees) {
        if (pe < 1) {
            throw ArgumentError("edge degree must be >= 1");
        }
        layout.edge_offset.push_back(offset);
        offset += pe - 1;
    }
    layout.edge_degrees = std::move(edge_degrees);
    layout.moment_offset = offset;
    layout.n_moments = poly_dim(p - 2);
    layout.size = offset + layout.n_moments;
    return layout;
}

LocalSpace::LocalSpace(std::span<const Point> cell, int p, std::vector<int> edge_degrees,
                       int cell_id, int quad_order)
    : vertices_(cell.begin(), cell.end())
{
    layout_ = dof_layout(static_cast<int>(vertices_.size()), p, std::move(edge_degrees), cell_id);
    area_ = signed_area(vertices_);
    if (!(area_ > 0.0)) {
        throw GeometryError(cell_label(cell_id) + " is not counterclockwise or has zero area");
    }
    diameter_ = polygon_diameter(vertices_);
    const int n = layout_.n_vertices;
    edges_.resize(n);
    for (int i = 0; i < n; ++i) {
        LocalEdge& e = edges_[i];
        e.start = vertices_[i];
        e.end = vertices_[(i + 1) % n];
        const Point d = e.end - e.start;
        e.length = d.norm();
        e.normal = Point(d.y(), -d.x()) / e.length;
        e.lobatto = gauss_lobatto(layout_.edge_degrees[i]);
    }
    const int order = quad_order < 0 ? 2 * p + 2 : std::max(quad_order, 2 * p);
    try {
        rule_ = polygon_quadrature(vertices_, order);
    } catch (const GeometryError& e) {
        throw GeometryError(cell_label(cell_id) + ": " + e.what());
    }
    basis_ = orthonormalize(vertices_, p, rule_, cell_id);
}

Eigen::VectorXd LocalSpace::interpolate(const std::function<double(const Point&)>& f) const
{
    Eigen::VectorXd dofs = Eigen::VectorXd::Zero(size());
    for (int i = 0; i < layout_.n_vertices; ++i) {
        dofs[layout_.vertex_dof(i)] = f(vertices_[i]);
        const LocalEdge& e = edges_[i];
        for (int k = 1; k < layout_.edge_degrees[i]; ++k) {
            dofs[layout_.edge_node_dof(i, k)] = f(e.map(e.lobatto.nodes[k]));
        }
    }
    if (layout_.n_moments > 0) {
        Eigen::VectorXd mom = Eigen::VectorXd::Zero(layout_.n_moments);
        for (std::size_t q = 0; q < rule_.size(); ++q) {
            mom += rule_.weights[q] * f(rule_.points[q]) *
                   basis_.values(rule_.points[q]).head(layout_.n_moments);
        }
        dofs.segment(layout_.moment_offset, layout_.n_moments) = mom / std::sqrt(area_);
    }
    return dofs;
}

Eigen::VectorXd LocalSpace::dofs_of_polynomial(const Eigen::VectorXd& coeffs) const
{
    return interpolate([&](const Point& x) {
        return basis_.values(x).head(coeffs.size()).dot(coeffs);
    });
}

ProjectorSet project_nabla(const LocalSpace& space)
{
    const DofLayout& layout = space.layout();
    const OrthoBasis& basis = space.basis();
    const QuadratureRule& rule = space.rule();
    const int p = layout.degree;
    const int np = poly_dim(p);
    const int nm = poly_dim(p - 2);
    const int n = layout.size;
    const double sqrt_area = std::sqrt(space.area());

    ProjectorSet proj;
    proj.mass = gram_matrix(basis, rule);

    // DOFs of the basis functions.
    proj.basis_dofs = Eigen::MatrixXd::Zero(n, np);
    for (int i = 0; i < layout.n_vertices; ++i) {
        proj.basis_dofs.row(layout.vertex_dof(i)) = basis.values(space.vertices()[i]).transpose();
        const LocalEdge& e = space.edges()[i];
        for (int k = 1; k < layout.edge_degrees[i]; ++k) {
            proj.basis_dofs.row(layout.edge_node_dof(i, k)) =
                basis.values(e.map(e.lobatto.nodes[k])).transpose();
        }
    }
    if (nm > 0) {
        proj.basis_dofs.bottomRows(nm) = proj.mass.topRows(nm) / sqrt_area;
    }

    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(np, np);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(np, n);
    proj.boundary_integral = Eigen::RowVectorXd::Zero(n);

    // Boundary terms: Lobatto nodes integrate v * (degree <= p) exactly since p_e >= p.
    for (int i = 0; i < layout.n_vertices; ++i) {
        const LocalEdge& e = space.edges()[i];
        for (int k = 0; k <= layout.edge_degrees[i]; ++k) {
            const Point x = e.map(e.lobatto.nodes[k]);
            const double w = 0.5 * e.length * e.lobatto.weights[k];
            const int dof = layout.edge_node_dof(i, k);
            const Eigen::VectorXd vals = basis.values(x);
            const Eigen::VectorXd dn = basis.gradients(x) * e.normal;
            proj.boundary_integral[dof] += w;
            g.row(0) += w * vals.transpose();
            b.col(dof).tail(np - 1) += w * dn.tail(np - 1);
        }
    }

    // Volume terms: (grad psi_c, grad psi_b) and -(v, lap psi_c) through the moments.
    Eigen::MatrixXd lap_moments = Eigen::MatrixXd::Zero(nm, np);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point& x = rule.points[q];
        const double w = rule.weights[q];
        const Eigen::MatrixX2d grads = basis.gradients(x);
        g.bottomRows(np - 1).noalias() += w * grads.bottomRows(np - 1) * grads.transpose();
        if (nm > 0) {
            lap_moments.noalias() += w * basis.values(x).head(nm) * basis.laplacians(x).transpose();
        }
    }
    if (nm > 0) {
        const Eigen::MatrixXd lap_coeffs = spd_inverse(proj.mass.topLeftCorner(nm, nm)) * lap_moments;
        for (int c = 1; c < np; ++c) {
            b.block(c, layout.moment_offset, 1, nm) -= sqrt_area * lap_coeffs.col(c).transpose();
        }
    }
    b.row(0) = proj.boundary_integral;
    // Gradient rows scale like 1/area, the boundary-average row like 1; balance them.
    g.row(0) /= space.area();
    b.row(0) /= space.area();

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(g);
    if (!(lu.rcond() > 1e-15)) {
        throw ConditioningError("H1 projector system of cell " + std::to_string(layout.cell) +
                                " is singular");
    }
    proj.pi_nabla = lu.solve(b);
    return proj;
}

Eigen::MatrixXd project_L2(const LocalSpace& space, const ProjectorSet& nabla)
{
    const DofLayout& layout = space.layout();
    const int p = layout.degree;
    const int nm = poly_dim(p - 2);
    const int nz = poly_dim(p - 1);
    const int n = layout.size;
    Eigen::MatrixXd moments = Eigen::MatrixXd::Zero(nz, n);
    const double sqrt_area = std::sqrt(space.area());
    for (int a = 0; a < nm; ++a) {
        moments(a, layout.moment_dof(a)) = sqrt_area;
    }
    // Enhancing constraints: moments of degree p-1 taken from the H1 projection.
    moments.bottomRows(nz - nm) = nabla.mass.middleRows(nm, nz - nm) * nabla.pi_nabla;
    return spd_inverse(nabla.mass.topLeftCorner(nz, nz)) * moments;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> project_grad_L2(const LocalSpace& space,
                                                           const ProjectorSet& nabla)
{
    const DofLayout& layout = space.layout();
    const OrthoBasis& basis = space.basis();
    const QuadratureRule& rule = space.rule();
    const int p = layout.degree;
    const int nm = poly_dim(p - 2);
    const int nz = poly_dim(p - 1);
    const int n = layout.size;
    const double sqrt_area = std::sqrt(space.area());

    Eigen::MatrixXd mx = Eigen::MatrixXd::Zero(nz, n);
    Eigen::MatrixXd my = Eigen::MatrixXd::Zero(nz, n);
    // (dv/dx, phi_a) = -(v, dphi_a/dx) + (v, phi_a n_x)_{dK}
    for (int i = 0; i < layout.n_vertices; ++i) {
        const LocalEdge& e = space.edges()[i];
        for (int k = 0; k <= layout.edge_degrees[i]; ++k) {
            const Point x = e.map(e.lobatto.nodes[k]);
            const double w = 0.5 * e.length * e.lobatto.weights[k];
            const int dof = layout.edge_node_dof(i, k);
            const Eigen::VectorXd vals = basis.values(x).head(nz);
            mx.col(dof) += w * e.normal.x() * vals;
            my.col(dof) += w * e.normal.y() * vals;
        }
    }
    if (nm > 0) {
        Eigen::MatrixXd dx_moments = Eigen::MatrixXd::Zero(nm, nz);
        Eigen::MatrixXd dy_moments = Eigen::MatrixXd::Zero(nm, nz);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point& x = rule.points[q];
            const double w = rule.weights[q];
            const Eigen::VectorXd vals = basis.values(x).head(nm);
            const Eigen::MatrixX2d grads = basis.gradients(x).topRows(nz);
            dx_moments.noalias() += w * vals * grads.col(0).transpose();
            dy_moments.noalias() += w * vals * grads.col(1).transpose();
        }
        const Eigen::MatrixXd inv = spd_inverse(nabla.mass.topLeftCorner(nm, nm));
        const Eigen::MatrixXd dx_coeffs = inv * dx_moments;
        const Eigen::MatrixXd dy_coeffs = inv * dy_moments;
        mx.middleCols(layout.moment_offset, nm) -= sqrt_area * dx_coeffs.transpose();
        my.middleCols(layout.moment_offset, nm) -= sqrt_area * dy_coeffs.transpose();
    }
    const Eigen::MatrixXd inv_z = spd_inverse(nabla.mass.topLeftCorner(nz, nz));
    return {inv_z * mx, inv_z * my};
}

ProjectorSet compute_projectors(const LocalSpace& space)
{
    ProjectorSet proj = project_nabla(space);
    proj.pi_zero = project_L2(space, proj);
    auto [gx, gy] = project_grad_L2(space, proj);
    proj.pi_grad_x = std::move(gx);
    proj.pi_grad_y = std::move(gy);
    return proj;
}

S1Kind parse_s1_kind(const std::string& name)
{
    if (name == "explicit" || name == "explicit_p") {
        return S1Kind::explicit_p;
    }
    if (name == "drecipe" || name == "diagonal_recipe") {
        return S1Kind::diagonal_recipe;
    }
    throw ArgumentError("unknown stabilization kind: " + name);
}

std::string to_string(S1Kind kind)
{
    return kind == S1Kind::explicit_p ? "explicit" : "drecipe";
}

Eigen::MatrixXd boundary_mass(const LocalSpace& space)
{
    const DofLayout& layout = space.layout();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(layout.size, layout.size);
    for (int i = 0; i < layout.n_vertices; ++i) {
        const LocalEdge& e = space.edges()[i];
        const int pe = layout.edge_degrees[i];
        const EdgeNodes gauss = gauss_legendre(pe + 1);
        std::vector<int> dofs(pe + 1);
        for (int k = 0; k <= pe; ++k) {
            dofs[k] = layout.edge_node_dof(i, k);
        }
        for (std::size_t g = 0; g < gauss.nodes.size(); ++g) {
            const Eigen::VectorXd l = lagrange_values(e.lobatto.nodes, gauss.nodes[g]);
            const double w = 0.5 * e.length * gauss.weights[g];
            for (int k = 0; k <= pe; ++k) {
                for (int j = 0; j <= pe; ++j) {
                    m(dofs[k], dofs[j]) += w * l[k] * l[j];
                }
            }
        }
    }
    return m;
}

Eigen::MatrixXd stab_s1(S1Kind kind, const LocalSpace& space, const ProjectorSet& proj,
                        const Eigen::MatrixXd& consistency)
{
    const DofLayout& layout = space.layout();
    const int n = layout.size;
    switch (kind) {
    case S1Kind::explicit_p: {
        const double p = layout.degree;
        const double h = space.diameter();
        Eigen::MatrixXd s = (p / h) * boundary_mass(space);
        const int nm = layout.n_moments;
        if (nm > 0) {
            s.block(layout.moment_offset, layout.moment_offset, nm, nm) +=
                (p * p / (h * h)) * space.area() * spd_inverse(proj.mass.topLeftCorner(nm, nm));
        }
        return s;
    }
    case S1Kind::diagonal_recipe: {
        if (consistency.rows() != n || consistency.cols() != n) {
            throw ArgumentError("diagonal recipe needs the N x N consistency matrix");
        }
        Eigen::VectorXd d(n);
        for (int i = 0; i < n; ++i) {
            d[i] = std::max(1.0, consistency(i, i));
        }
        return d.asDiagonal();
    }
    }
    throw ArgumentError("unknown stabilization kind");
}

Eigen::MatrixXd stab_s0(const LocalSpace& space)
{
    const double p = space.degree();
    return (space.diameter() / (p * p)) * boundary_mass(space);
}

Eigen::MatrixXd nabla_consistency(const LocalSpace& space, const ProjectorSet& proj,
                                  const std::function<Eigen::Matrix2d(const Point&)>& diffusion)
{
    const OrthoBasis& basis = space.basis();
    const QuadratureRule& rule = space.rule();
    const int np = basis.size();
    Eigen::MatrixXd gk = Eigen::MatrixXd::Zero(np, np);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point& x = rule.points[q];
        const Eigen::MatrixX2d grads = basis.gradients(x);
        const Eigen::Matrix2d k = sample_diffusion(diffusion, x, space.cell_id());
        gk.noalias() += rule.weights[q] * grads * k * grads.transpose();
    }
    return proj.pi_nabla.transpose() * gk * proj.pi_nabla;
}

LocalMatrices local_matrices(const LocalSpace& space, const ProjectorSet& proj,
                             const ElementCoefficients& coeffs, const StabChoice& stab)
{
    if (!coeffs.diffusion) {
        throw CoefficientError("missing diffusion tensor on cell " +
                               std::to_string(space.cell_id()));
    }
    const QuadratureRule& rule = space.rule();
    const OrthoBasis& basis = space.basis();
    const int n = space.size();
    const int nz = poly_dim(space.degree() - 1);
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);

    LocalMatrices out;
    out.stab = stab;

    // Consistency: (K Pi0 grad u, Pi0 grad v), with K sampled at the quadrature points.
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd hv = Eigen::MatrixXd::Zero(nz, nz);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point& x = rule.points[q];
        const double w = rule.weights[q];
        const Eigen::VectorXd phi = basis.values(x).head(nz);
        Eigen::MatrixXd grad(2, n);
        grad.row(0) = phi.transpose() * proj.pi_grad_x;
        grad.row(1) = phi.transpose() * proj.pi_grad_y;
        const Eigen::Matrix2d k = sample_diffusion(coeffs.diffusion, x, space.cell_id());
        a.noalias() += w * grad.transpose() * k * grad;
        if (coeffs.potential) {
            hv.noalias() += w * sample_potential(coeffs.potential, x, space.cell_id()) * phi *
                            phi.transpose();
        }
    }

    const Eigen::MatrixXd consistency = stab.s1 == S1Kind::diagonal_recipe
        ? nabla_consistency(space, proj, coeffs.diffusion)
        : Eigen::MatrixXd();
    const Eigen::MatrixXd s1 = stab_s1(stab.s1, space, proj, consistency);
    const Eigen::MatrixXd not_nabla = identity - proj.basis_dofs * proj.pi_nabla;
    a.noalias() += not_nabla.transpose() * s1 * not_nabla;

    out.potential = proj.pi_zero.transpose() * hv * proj.pi_zero;

    const Eigen::MatrixXd not_zero = identity - proj.basis_dofs.leftCols(nz) * proj.pi_zero;
    Eigen::MatrixXd c = proj.pi_zero.transpose() * proj.mass.topLeftCorner(nz, nz) * proj.pi_zero;
    c.noalias() += not_zero.transpose() * stab_s0(space) * not_zero;

    out.stiffness = 0.5 * (a + a.transpose());
    out.potential = 0.5 * (out.potential + out.potential.transpose()).eval();
    out.mass = 0.5 * (c + c.transpose());
    return out;
}

LocalMatrices local_matrices(const LocalSpace& space, const ElementCoefficients& coeffs,
                             const StabChoice& stab)
{
    return local_matrices(space, compute_projectors(space), coeffs, stab);
}

} // namespace hpvem
