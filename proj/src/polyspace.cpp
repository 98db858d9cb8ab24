#include "hpvem/polyspace.hpp"

#include "hpvem/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace hpvem {

namespace {

/// Legendre P_n and its derivative at x.
std::pair<double, double> legendre(int n, double x)
{
    double p0 = 1.0;
    double p1 = x;
    if (n == 0) {
        return {1.0, 0.0};
    }
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    // P_n' = n (x P_n - P_{n-1}) / (x^2 - 1), only used away from the endpoints.
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
}

/// Integer power with 0^0 = 1.
double ipow(double x, int k)
{
    double r = 1.0;
    for (int i = 0; i < k; ++i) {
        r *= x;
    }
    return r;
}

} // namespace

EdgeNodes gauss_legendre(int n)
{
    if (n < 1) {
        throw ArgumentError("Gauss-Legendre rule needs at least one point");
    }
    EdgeNodes rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = legendre(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const auto [p, dp] = legendre(n, x);
        (void)p;
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

EdgeNodes gauss_lobatto(int p)
{
    if (p < 1) {
        throw ArgumentError("Gauss-Lobatto rule needs p >= 1");
    }
    const int n = p + 1;
    EdgeNodes rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // Newton iteration on (1 - x^2) P_p'(x) with Chebyshev-Gauss-Lobatto initial guesses,
    // using the Legendre recurrence for P_p and P_{p-1}.
    for (int i = 0; i < n; ++i) {
        double x = -std::cos(std::numbers::pi * i / p);
        if (i == 0 || i == p) {
            rule.nodes[i] = x;
            continue;
        }
        for (int it = 0; it < 100; ++it) {
            double pm1 = 1.0;
            double pk = x;
            for (int k = 2; k <= p; ++k) {
                const double pn = ((2.0 * k - 1.0) * x * pk - (k - 1.0) * pm1) / k;
                pm1 = pk;
                pk = pn;
            }
            // Roots of P_p' solve x P_p - P_{p-1} = 0; f = x P_p - P_{p-1}, f' = (p+1) P_p.
            const double f = x * pk - pm1;
            const double df = (p + 1.0) * pk;
            const double dx = f / df;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        rule.nodes[i] = x;
    }
    for (int i = 0; i < n; ++i) {
        const double pp = legendre(p, rule.nodes[i]).first;
        const double pval = (i == 0 || i == p) ? (i == 0 && p % 2 == 1 ? -1.0 : 1.0) : pp;
        rule.weights[i] = 2.0 / (p * (p + 1.0) * pval * pval);
    }
    // Symmetrize to remove the last-bit asymmetry of the iteration.
    for (int i = 0; i < n / 2; ++i) {
        const double x = 0.5 * (rule.nodes[n - 1 - i] - rule.nodes[i]);
        const double w = 0.5 * (rule.weights[n - 1 - i] + rule.weights[i]);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        rule.nodes[n / 2] = 0.0;
    }
    return rule;
}

Eigen::VectorXd lagrange_values(std::span<const double> nodes, double t)
{
    const int n = static_cast<int>(nodes.size());
    Eigen::VectorXd l(n);
    for (int k = 0; k < n; ++k) {
        double v = 1.0;
        for (int m = 0; m < n; ++m) {
            if (m != k) {
                v *= (t - nodes[m]) / (nodes[k] - nodes[m]);
            }
        }
        l[k] = v;
    }
    return l;
}

QuadratureRule triangle_quadrature(const Triangle& tri, int order)
{
    if (order < 0) {
        throw ArgumentError("quadrature order must be nonnegative");
    }
    // (u, v) in [0,1]^2 -> xi = u, eta = (1-u) v; the Jacobian (1-u) adds one degree in u.
    const int nu = (order + 3) / 2;
    const int nv = order / 2 + 1;
    const EdgeNodes gu = gauss_legendre(nu);
    const EdgeNodes gv = gauss_legendre(nv);
    const Point e1 = tri[1] - tri[0];
    const Point e2 = tri[2] - tri[0];
    const double jac = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
    QuadratureRule rule;
    rule.order = order;
    rule.points.reserve(nu * nv);
    rule.weights.reserve(nu * nv);
    for (int i = 0; i < nu; ++i) {
        const double u = 0.5 * (gu.nodes[i] + 1.0);
        for (int j = 0; j < nv; ++j) {
            const double v = 0.5 * (gv.nodes[j] + 1.0);
            const double xi = u;
            const double eta = (1.0 - u) * v;
            rule.points.push_back(tri[0] + xi * e1 + eta * e2);
            rule.weights.push_back(0.25 * gu.weights[i] * gv.weights[j] * (1.0 - u) * jac);
        }
    }
    return rule;
}

QuadratureRule polygon_quadrature(std::span<const Point> cell, int order)
{
    QuadratureRule rule;
    rule.order = order;
    for (const Triangle& tri : subtriangulate(cell)) {
        QuadratureRule t = triangle_quadrature(tri, order);
        rule.points.insert(rule.points.end(), t.points.begin(), t.points.end());
        rule.weights.insert(rule.weights.end(), t.weights.begin(), t.weights.end());
    }
    return rule;
}

MonomialBasis::MonomialBasis(int degree, const Point& center, double h)
    : degree_(degree)
    , center_(center)
    , h_(h)
{
    if (degree < 0) {
        throw ArgumentError("monomial degree must be nonnegative");
    }
    if (!(h > 0.0)) {
        throw ArgumentError("monomial scaling must be positive");
    }
    for (int d = 0; d <= degree; ++d) {
        for (int b = 0; b <= d; ++b) {
            exponents_.emplace_back(d - b, b);
        }
    }
}

Eigen::VectorXd MonomialBasis::values(const Point& x) const
{
    const double s = (x.x() - center_.x()) / h_;
    const double t = (x.y() - center_.y()) / h_;
    Eigen::VectorXd v(size());
    for (int i = 0; i < size(); ++i) {
        const auto [a, b] = exponents_[i];
        v[i] = ipow(s, a) * ipow(t, b);
    }
    return v;
}

Eigen::MatrixX2d MonomialBasis::gradients(const Point& x) const
{
    const double s = (x.x() - center_.x()) / h_;
    const double t = (x.y() - center_.y()) / h_;
    Eigen::MatrixX2d g(size(), 2);
    for (int i = 0; i < size(); ++i) {
        const auto [a, b] = exponents_[i];
        g(i, 0) = a == 0 ? 0.0 : a * ipow(s, a - 1) * ipow(t, b) / h_;
        g(i, 1) = b == 0 ? 0.0 : b * ipow(s, a) * ipow(t, b - 1) / h_;
    }
    return g;
}

Eigen::VectorXd MonomialBasis::laplacians(const Point& x) const
{
    const double s = (x.x() - center_.x()) / h_;
    const double t = (x.y() - center_.y()) / h_;
    Eigen::VectorXd l(size());
    const double h2 = h_ * h_;
    for (int i = 0; i < size(); ++i) {
        const auto [a, b] = exponents_[i];
        double v = 0.0;
        if (a >= 2) {
            v += a * (a - 1) * ipow(s, a - 2) * ipow(t, b);
        }
        if (b >= 2) {
            v += b * (b - 1) * ipow(s, a) * ipow(t, b - 2);
        }
        l[i] = v / h2;
    }
    return l;
}

OrthoBasis::OrthoBasis(MonomialBasis mono, Eigen::MatrixXd change_of_basis)
    : mono_(std::move(mono))
    , C_(std::move(change_of_basis))
{
}

OrthoBasis orthonormalize(std::span<const Point> cell, int degree, const QuadratureRule& rule,
                          int cell_id)
{
    if (rule.order < 2 * degree) {
        throw ArgumentError("quadrature order must be at least twice the basis degree");
    }
    MonomialBasis mono(degree, polygon_centroid(cell), polygon_diameter(cell));
    const int n = mono.size();
    const int nq = static_cast<int>(rule.size());
    if (nq < n) {
        throw ArgumentError("quadrature rule has fewer points than basis functions");
    }
    Eigen::MatrixXd values(nq, n);
    for (int q = 0; q < nq; ++q) {
        values.row(q) = std::sqrt(rule.weights[q]) * mono.values(rule.points[q]).transpose();
    }
    // Returns the upper-triangular R with positive diagonal of a thin QR.
    auto triangular_factor = [n](const Eigen::MatrixXd& a) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
        Eigen::MatrixXd r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
        for (int i = 0; i < n; ++i) {
            if (r(i, i) < 0.0) {
                r.row(i) *= -1.0;
            }
        }
        return r;
    };
    const Eigen::MatrixXd r1 = triangular_factor(values);
    // Householder QR is insensitive to column scaling, so the relevant
    // condition number is that of the equilibrated Gram matrix.
    const Eigen::VectorXd col_norms = r1.colwise().norm().transpose();
    const Eigen::VectorXd sv =
        Eigen::JacobiSVD<Eigen::MatrixXd>(r1 * col_norms.cwiseInverse().asDiagonal())
            .singularValues();
    const double cond_gram = sv[n - 1] > 0.0 ? std::pow(sv[0] / sv[n - 1], 2) : INFINITY;
    if (!(cond_gram <= 1e14)) {
        throw ConditioningError("monomial Gram matrix of cell " + std::to_string(cell_id) +
                                " is numerically singular (condition " +
                                std::to_string(cond_gram) + ")");
    }
    const Eigen::MatrixXd r1_inv =
        r1.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(n, n));
    const Eigen::MatrixXd r2 = triangular_factor(values * r1_inv);
    const Eigen::MatrixXd r2_inv =
        r2.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(n, n));
    // phi_j = sum_i m_i (R1^-1 R2^-1)_{ij}
    Eigen::MatrixXd c = (r1_inv * r2_inv).transpose();
    c = c.triangularView<Eigen::Lower>();
    return OrthoBasis(std::move(mono), std::move(c));
}

} // namespace hpvem
