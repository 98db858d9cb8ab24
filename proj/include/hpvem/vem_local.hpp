#pragma once

#include "hpvem/geometry.hpp"
#include "hpvem/polyspace.hpp"

#include <Eigen/Core>

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hpvem {

/// Local degrees of freedom of the enhanced space on one polygon:
/// vertex values, then the internal Gauss-Lobatto values of each edge
/// (ordered along the counterclockwise loop), then scaled moments
/// |K|^{-1/2} (v, phi_a)_K against the orthonormal basis up to degree p-2.
struct DofLayout {
    int cell = -1;
    int degree = 1;
    std::vector<int> edge_degrees;
    int n_vertices = 0;
    std::vector<int> edge_offset;
    int moment_offset = 0;
    int n_moments = 0;
    int size = 0;

    int vertex_dof(int i) const { return i % n_vertices; }
    /// Node k = 0 .. p_e of local edge i; k = 0 and k = p_e are the end vertices.
    int edge_node_dof(int i, int k) const
    {
        if (k == 0) {
            return vertex_dof(i);
        }
        if (k == edge_degrees[i]) {
            return vertex_dof(i + 1);
        }
        return edge_offset[i] + k - 1;
    }
    int moment_dof(int a) const { return moment_offset + a; }
};

/// Throws ArgumentError for p < 1 or p_e < 1.
DofLayout dof_layout(int n_vertices, int p, std::vector<int> edge_degrees, int cell_id = -1);

struct LocalEdge {
    Point start;
    Point end;
    double length = 0.0;
    Point normal; ///< outward unit normal
    EdgeNodes lobatto;

    Point map(double t) const { return start + 0.5 * (t + 1.0) * (end - start); }
};

/// Geometry, quadrature, orthonormal basis and DOF layout of one element.
class LocalSpace {
public:
    /// `quad_order` < 0 selects the default exactness 2p+2.
    LocalSpace(std::span<const Point> cell, int p, std::vector<int> edge_degrees, int cell_id = -1,
               int quad_order = -1);

    int degree() const { return layout_.degree; }
    int size() const { return layout_.size; }
    int cell_id() const { return layout_.cell; }
    const DofLayout& layout() const { return layout_; }
    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<LocalEdge>& edges() const { return edges_; }
    double area() const { return area_; }
    double diameter() const { return diameter_; }
    const QuadratureRule& rule() const { return rule_; }
    const OrthoBasis& basis() const { return basis_; }

    /// DOF vector of a function known in closed form; moments use the element rule.
    Eigen::VectorXd interpolate(const std::function<double(const Point&)>& f) const;

    /// DOF vector of the polynomial sum_b c_b psi_b (coefficients in the orthonormal basis).
    Eigen::VectorXd dofs_of_polynomial(const Eigen::VectorXd& coeffs) const;

private:
    std::vector<Point> vertices_;
    std::vector<LocalEdge> edges_;
    double area_ = 0.0;
    double diameter_ = 0.0;
    QuadratureRule rule_;
    OrthoBasis basis_;
    DofLayout layout_;
};

/// Projection matrices acting on local DOF vectors. Coefficients refer to the
/// element's orthonormal basis.
struct ProjectorSet {
    Eigen::MatrixXd pi_nabla;            ///< pi_p x N: DOFs -> coefficients of the H1 projection
    Eigen::MatrixXd pi_zero;             ///< pi_{p-1} x N: DOFs -> coefficients of the L2 projection
    Eigen::MatrixXd pi_grad_x;           ///< pi_{p-1} x N: L2 projection of d/dx
    Eigen::MatrixXd pi_grad_y;           ///< pi_{p-1} x N: L2 projection of d/dy
    Eigen::RowVectorXd boundary_integral; ///< 1 x N: v -> integral of v over the boundary
    Eigen::MatrixXd basis_dofs;          ///< N x pi_p: DOFs of the orthonormal basis functions
    Eigen::MatrixXd mass;                ///< pi_p x pi_p: Gram matrix of the basis under the rule
};

/// H1 projection onto degree p, constant fixed by the boundary average.
/// Fills pi_nabla, boundary_integral, basis_dofs and mass.
ProjectorSet project_nabla(const LocalSpace& space);

/// L2 projection onto degree p-1 via the moments and the enhancing constraints.
Eigen::MatrixXd project_L2(const LocalSpace& space, const ProjectorSet& nabla);

/// L2 projection of both gradient components onto degree p-1.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> project_grad_L2(const LocalSpace& space,
                                                           const ProjectorSet& nabla);

/// All projectors of the element.
ProjectorSet compute_projectors(const LocalSpace& space);

enum class S1Kind { explicit_p, diagonal_recipe };
enum class S0Kind { boundary_hp };

struct StabChoice {
    S1Kind s1 = S1Kind::diagonal_recipe;
    S0Kind s0 = S0Kind::boundary_hp;
};

S1Kind parse_s1_kind(const std::string& name);
std::string to_string(S1Kind kind);

/// (u, v) over the element boundary, traces interpolated from the edge nodes and
/// integrated with Gauss-Legendre rules exact to degree 2 p_e + 1.
Eigen::MatrixXd boundary_mass(const LocalSpace& space);

/// Stabilization matrix S1 in DOF space; the caller composes it with (I - Pi_nabla).
/// explicit_p: (p^2/h^2)(Pi0_{p-2} u, Pi0_{p-2} v) + (p/h)(u, v)_{dK}.
/// diagonal_recipe: diag(max(1, consistency(i, i))).
Eigen::MatrixXd stab_s1(S1Kind kind, const LocalSpace& space, const ProjectorSet& proj,
                        const Eigen::MatrixXd& consistency);

/// (h/p^2)(u, v)_{dK}.
Eigen::MatrixXd stab_s0(const LocalSpace& space);

/// Coefficients of one element, evaluated at quadrature points.
struct ElementCoefficients {
    std::function<Eigen::Matrix2d(const Point&)> diffusion;
    std::function<double(const Point&)> potential; ///< empty means V = 0
};

struct LocalMatrices {
    Eigen::MatrixXd stiffness; ///< A_K
    Eigen::MatrixXd potential; ///< B_K
    Eigen::MatrixXd mass;      ///< C_K
    StabChoice stab;
};

/// a(Pi_nabla phi_i, Pi_nabla phi_j) with the sampled diffusion tensor.
Eigen::MatrixXd nabla_consistency(const LocalSpace& space, const ProjectorSet& proj,
                                  const std::function<Eigen::Matrix2d(const Point&)>& diffusion);

LocalMatrices local_matrices(const LocalSpace& space, const ProjectorSet& proj,
                             const ElementCoefficients& coeffs, const StabChoice& stab);

LocalMatrices local_matrices(const LocalSpace& space, const ElementCoefficients& coeffs,
                             const StabChoice& stab);

} // namespace hpvem
