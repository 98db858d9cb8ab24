#include "oracles.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace oracle {

namespace {

// Gauss-Legendre on [0, 1] by Newton on P_n; kept local so the oracle shares
// nothing with the library.
void legendre_rule(int n, std::vector<double>& x, std::vector<double>& w)
{
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = t;
                p0 = 1.0;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16) {
                break;
            }
        }
        x[i] = 0.5 * (1.0 - t);
        w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
}

} // namespace

double polygon_area(const std::vector<Vec2>& poly)
{
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % poly.size()];
        s += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * s;
}

double polygon_monomial_integral(const std::vector<Vec2>& poly, int a, int b, const Vec2& c)
{
    // int x^a y^b = 1/(a+1) oint x^(a+1) y^b n_x ds = 1/(a+1) oint x^(a+1) y^b dy.
    const int n = (a + b + 3) / 2 + 1;
    std::vector<double> t, w;
    legendre_rule(n, t, w);
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 p = poly[i] - c;
        const Vec2 q = poly[(i + 1) % poly.size()] - c;
        const double dy = q.y() - p.y();
        for (int k = 0; k < n; ++k) {
            const Vec2 x = p + t[k] * (q - p);
            s += w[k] * std::pow(x.x(), a + 1) * std::pow(x.y(), b) * dy;
        }
    }
    return s / (a + 1);
}

Eigen::VectorXd generalized_eigenvalues(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sm(0.5 * (M + M.transpose()));
    if (sm.eigenvalues().minCoeff() <= 0.0) {
        throw std::runtime_error("oracle: M is not positive definite");
    }
    const Eigen::MatrixXd m_inv_half =
        sm.eigenvectors() * sm.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
        sm.eigenvectors().transpose();
    Eigen::MatrixXd c = m_inv_half * A * m_inv_half;
    c = 0.5 * (c + c.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sc(c, Eigen::EigenvaluesOnly);
    return sc.eigenvalues();
}

double center_hat_lambda_2x2()
{
    // One element [0, 1/2]^2 with the hat equal to 1 at the corner (1/2, 1/2).
    // Pi_nabla phi: gradient = boundary flux / area = (1, 1); constant from the
    // boundary mean 1/4, so Pi phi = 3/4, -1/4, 1/4, 1/4 at corner, opposite, others.
    // (I - Pi) phi = +-1/4 alternating; diagonal recipe weights max(1, 1/2) = 1.
    const double a_elem = 2.0 * 0.25 + 4.0 * 0.0625; // |grad|^2 |K| + kernel term
    // Pi0 phi = mean of Pi phi over K = 1/4, so the consistency mass is (1/4)^2 |K|.
    // S0 = (h/p^2) (phi - 1/4, phi - 1/4)_{dK}, h = sqrt(2)/2: two edges where the
    // trace goes 3/4 -> -1/4 linearly, two where it is -1/4.
    const double len = 0.5;
    const double lin = len * (0.75 * 0.75 - 0.75 * 0.25 + 0.25 * 0.25) / 3.0;
    const double cst = len * 0.25 * 0.25;
    const double h = std::sqrt(2.0) / 2.0;
    const double m_elem = 0.0625 * 0.25 + h * (2.0 * lin + 2.0 * cst);
    return (4.0 * a_elem) / (4.0 * m_elem); // = 3 / (1/16 + 5 sqrt(2)/12)
}

} // namespace oracle
