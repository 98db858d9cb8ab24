#pragma once

#include "hpvem/geometry.hpp"

#include <Eigen/Core>

#include <span>
#include <utility>
#include <vector>

namespace hpvem {

/// Dimension of the bivariate polynomials of degree <= l; 0 for l < 0.
constexpr int poly_dim(int l) { return l < 0 ? 0 : (l + 1) * (l + 2) / 2; }

/// One-dimensional rule on [-1, 1].
struct EdgeNodes {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// p+1 Gauss-Lobatto nodes, ascending, endpoints included. Exact to degree 2p-1.
EdgeNodes gauss_lobatto(int p);

/// n Gauss-Legendre nodes, ascending. Exact to degree 2n-1.
EdgeNodes gauss_legendre(int n);

/// Values at t of the Lagrange basis on the given nodes.
Eigen::VectorXd lagrange_values(std::span<const double> nodes, double t);

struct QuadratureRule {
    std::vector<Point> points;
    std::vector<double> weights;
    int order = 0; ///< total degree integrated exactly

    std::size_t size() const { return points.size(); }
};

/// Collapsed Gauss-Legendre product rule on a triangle, exact to `order`.
QuadratureRule triangle_quadrature(const Triangle& tri, int order);

/// Composite rule on the fan subtriangulation of a star-shaped polygon.
QuadratureRule polygon_quadrature(std::span<const Point> cell, int order);

/// Scaled monomials ((x - xc)/h)^a ((y - yc)/h)^b, ordered by total degree, then by
/// decreasing a.
class MonomialBasis {
public:
    MonomialBasis() = default;
    MonomialBasis(int degree, const Point& center, double h);

    int degree() const { return degree_; }
    int size() const { return poly_dim(degree_); }
    const Point& center() const { return center_; }
    double scale() const { return h_; }
    std::pair<int, int> exponents(int i) const { return exponents_[i]; }

    Eigen::VectorXd values(const Point& x) const;
    /// size() x 2 matrix of gradients.
    Eigen::MatrixX2d gradients(const Point& x) const;
    Eigen::VectorXd laplacians(const Point& x) const;

private:
    int degree_ = 0;
    Point center_ = Point::Zero();
    double h_ = 1.0;
    std::vector<std::pair<int, int>> exponents_;
};

/// L2(K)-orthonormal basis phi = C m with C lower triangular, so the first
/// poly_dim(l) functions span the polynomials of degree <= l for every l.
class OrthoBasis {
public:
    OrthoBasis() = default;
    OrthoBasis(MonomialBasis mono, Eigen::MatrixXd change_of_basis);

    int degree() const { return mono_.degree(); }
    int size() const { return mono_.size(); }
    const MonomialBasis& monomials() const { return mono_; }
    const Eigen::MatrixXd& change_of_basis() const { return C_; }

    Eigen::VectorXd values(const Point& x) const { return C_ * mono_.values(x); }
    Eigen::MatrixX2d gradients(const Point& x) const { return C_ * mono_.gradients(x); }
    Eigen::VectorXd laplacians(const Point& x) const { return C_ * mono_.laplacians(x); }

private:
    MonomialBasis mono_;
    Eigen::MatrixXd C_;
};

/// Gram matrix of a set of functions under a quadrature rule.
template <class Basis>
Eigen::MatrixXd gram_matrix(const Basis& basis, const QuadratureRule& rule)
{
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(basis.size(), basis.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Eigen::VectorXd v = basis.values(rule.points[q]);
        g.noalias() += rule.weights[q] * v * v.transpose();
    }
    return g;
}

/// Two-pass Householder orthonormalization of the scaled monomials of a cell.
/// Throws ConditioningError (naming `cell_id`) when the monomial Gram matrix
/// has condition number above 1e14 after diagonal equilibration.
OrthoBasis orthonormalize(std::span<const Point> cell, int degree, const QuadratureRule& rule,
                          int cell_id = -1);

} // namespace hpvem
