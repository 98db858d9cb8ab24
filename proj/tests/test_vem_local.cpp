#include "hpvem/errors.hpp"
#include "hpvem/property_checks.hpp"
#include "hpvem/vem_local.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace hpvem;

namespace {

const std::vector<Point> unit_square{Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)};

LocalSpace uniform_space(const std::vector<Point>& cell, int p)
{
    return LocalSpace(cell, p, std::vector<int>(cell.size(), p));
}

double eval(const LocalSpace& s, const Eigen::VectorXd& coeffs, const Point& x)
{
    return coeffs.dot(s.basis().values(x).head(coeffs.size()));
}

// Max deviation of a coefficient vector from a function over the quadrature points.
double deviation(const LocalSpace& s, const Eigen::VectorXd& coeffs,
                 const std::function<double(const Point&)>& f)
{
    double d = 0.0;
    for (const Point& x : s.rule().points) {
        d = std::max(d, std::abs(eval(s, coeffs, x) - f(x)));
    }
    return d;
}

ElementCoefficients identity_coeffs()
{
    return {[](const Point&) { return Eigen::Matrix2d::Identity().eval(); }, {}};
}

std::vector<Point> pentagon()
{
    std::vector<Point> p;
    for (int i = 0; i < 5; ++i) {
        const double t = 2.0 * std::numbers::pi * i / 5 + 0.3;
        p.emplace_back(std::cos(t), std::sin(t));
    }
    return p;
}

} // namespace

TEST_CASE("DOF layout sizes")
{
    CHECK(dof_layout(4, 1, {1, 1, 1, 1}).size == 4);
    CHECK(dof_layout(4, 2, {2, 2, 2, 2}).size == 9);
    CHECK(dof_layout(5, 3, {3, 3, 3, 3, 3}).size == 18);
    const DofLayout hp = dof_layout(4, 2, {2, 3, 2, 4});
    CHECK(hp.size == 4 + (1 + 2 + 1 + 3) + 1);
    CHECK(hp.edge_node_dof(1, 0) == 1);
    CHECK(hp.edge_node_dof(1, 3) == 2);
    CHECK(hp.edge_node_dof(3, 4) == 0);
    CHECK_THROWS_AS(dof_layout(4, 2, {2, 0, 2, 2}), ArgumentError);
    CHECK_THROWS_AS(dof_layout(4, 0, {1, 1, 1, 1}), ArgumentError);
}

TEST_CASE("H1 projector")
{
    SUBCASE("constants and polynomials are reproduced")
    {
        for (int p = 1; p <= 6; ++p) {
            const LocalSpace s = uniform_space(pentagon(), p);
            const ProjectorSet proj = compute_projectors(s);
            const Eigen::VectorXd one = s.interpolate([](const Point&) { return 1.0; });
            CHECK(deviation(s, proj.pi_nabla * one, [](const Point&) { return 1.0; }) < 1e-12);
            auto q = [p](const Point& x) { return std::pow(x.x() - 0.1, p) - 2.0 * x.y() + x.x() * std::pow(x.y(), p - 1); };
            CHECK(deviation(s, proj.pi_nabla * s.interpolate(q), q) < 1e-10);
        }
    }
    SUBCASE("vertex hat on the unit square")
    {
        const LocalSpace s = uniform_space(unit_square, 1);
        const ProjectorSet proj = compute_projectors(s);
        for (int v = 0; v < 4; ++v) {
            Eigen::VectorXd hat = Eigen::VectorXd::Zero(4);
            hat[v] = 1.0;
            const Eigen::VectorXd c = proj.pi_nabla * hat;
            const Eigen::MatrixX2d g = s.basis().gradients(Point(0.5, 0.5));
            const Eigen::Vector2d grad = g.transpose() * c;
            // Gradient points from the opposite corner to the hat's vertex, size 1/2 per axis.
            const Point dir = unit_square[v] - Point(0.5, 0.5);
            CHECK(grad.x() == doctest::Approx(dir.x()).epsilon(1e-13));
            CHECK(grad.y() == doctest::Approx(dir.y()).epsilon(1e-13));
        }
    }
}

TEST_CASE("L2 projector")
{
    for (int p = 1; p <= 6; ++p) {
        const LocalSpace s = uniform_space(pentagon(), p);
        const ProjectorSet proj = compute_projectors(s);
        auto low = [p](const Point& x) { return p >= 2 ? std::pow(x.x() + x.y(), p - 2) + 0.5 : 0.5; };
        CHECK(deviation(s, proj.pi_zero * s.interpolate(low), low) < 1e-12);
        auto q = [p](const Point& x) { return std::pow(x.x() - 0.3 * x.y(), p - 1) + x.y(); };
        if (p >= 2) {
            CHECK(deviation(s, proj.pi_zero * s.interpolate(q), q) < 1e-10);
        }
        if (p >= 2) {
            // One internal moment: the degree <= p-2 part of Pi0 is exactly that mode.
            const DofLayout& l = s.layout();
            for (int a = 0; a < l.n_moments; ++a) {
                Eigen::VectorXd v = Eigen::VectorXd::Zero(l.size);
                v[l.moment_dof(a)] = 1.0;
                const Eigen::VectorXd c = proj.pi_zero * v;
                for (int b = 0; b < l.n_moments; ++b) {
                    CHECK(std::abs(c[b] - (a == b ? std::sqrt(s.area()) : 0.0)) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("projection orthogonality: low moments of Pi0 v equal the moment DOFs")
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int p = 2; p <= 7; ++p) {
        const LocalSpace s = uniform_space(random_star_polygon(rng, 6), p);
        const ProjectorSet proj = compute_projectors(s);
        Eigen::VectorXd v(s.size());
        for (int i = 0; i < v.size(); ++i) {
            v[i] = g(rng);
        }
        const Eigen::VectorXd c = proj.pi_zero * v;
        const DofLayout& l = s.layout();
        for (int a = 0; a < l.n_moments; ++a) {
            CHECK(std::abs(c[a] / std::sqrt(s.area()) - v[l.moment_dof(a)]) < 1e-10);
        }
    }
}

TEST_CASE("gradient projector")
{
    for (int p = 1; p <= 5; ++p) {
        const LocalSpace s = uniform_space(pentagon(), p);
        const ProjectorSet proj = compute_projectors(s);
        const Eigen::VectorXd one = s.interpolate([](const Point&) { return 1.0; });
        CHECK((proj.pi_grad_x * one).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((proj.pi_grad_y * one).cwiseAbs().maxCoeff() < 1e-12);
        const Eigen::VectorXd x = s.interpolate([](const Point& z) { return z.x(); });
        CHECK(deviation(s, proj.pi_grad_x * x, [](const Point&) { return 1.0; }) < 1e-12);
        CHECK(deviation(s, proj.pi_grad_y * x, [](const Point&) { return 0.0; }) < 1e-12);
    }
}

TEST_CASE("stabilizations")
{
    SUBCASE("S1 vanishes on polynomials")
    {
        for (S1Kind kind : {S1Kind::explicit_p, S1Kind::diagonal_recipe}) {
            for (int p = 1; p <= 5; ++p) {
                const LocalSpace s = uniform_space(pentagon(), p);
                const ProjectorSet proj = compute_projectors(s);
                const Eigen::MatrixXd cons = nabla_consistency(s, proj, identity_coeffs().diffusion);
                const Eigen::MatrixXd s1 = stab_s1(kind, s, proj, cons);
                const Eigen::MatrixXd kernel =
                    Eigen::MatrixXd::Identity(s.size(), s.size()) - proj.basis_dofs * proj.pi_nabla;
                const Eigen::VectorXd q =
                    s.interpolate([p](const Point& x) { return std::pow(x.y() + 0.2, p) - x.x(); });
                const Eigen::VectorXd r = kernel * q;
                CHECK(std::abs(r.dot(s1 * r)) < 1e-12);
            }
        }
    }
    SUBCASE("diagonal recipe on the unit square, p=1")
    {
        const LocalSpace s = uniform_space(unit_square, 1);
        const ProjectorSet proj = compute_projectors(s);
        const Eigen::MatrixXd cons = nabla_consistency(s, proj, identity_coeffs().diffusion);
        for (int i = 0; i < 4; ++i) {
            CHECK(cons(i, i) == doctest::Approx(0.5).epsilon(1e-14));
        }
        const Eigen::MatrixXd s1 = stab_s1(S1Kind::diagonal_recipe, s, proj, cons);
        CHECK((s1 - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("S0 on the unit square")
    {
        const LocalSpace s1 = uniform_space(unit_square, 1);
        const Eigen::VectorXd one1 = s1.interpolate([](const Point&) { return 1.0; });
        CHECK(one1.dot(stab_s0(s1) * one1) == doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-14));
        CHECK(stab_s0(s1) * Eigen::VectorXd::Zero(4) == Eigen::VectorXd::Zero(4));
        // Doubling p quarters the form on the same trace.
        const LocalSpace s2 = uniform_space(unit_square, 2);
        const Eigen::VectorXd one2 = s2.interpolate([](const Point&) { return 1.0; });
        CHECK(one2.dot(stab_s0(s2) * one2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    }
    SUBCASE("kind names")
    {
        CHECK(parse_s1_kind("explicit") == S1Kind::explicit_p);
        CHECK(parse_s1_kind("drecipe") == S1Kind::diagonal_recipe);
        CHECK(to_string(S1Kind::diagonal_recipe) == "drecipe");
        CHECK_THROWS_AS(parse_s1_kind("nope"), ArgumentError);
    }
}

TEST_CASE("local matrices")
{
    for (S1Kind kind : {S1Kind::explicit_p, S1Kind::diagonal_recipe}) {
        const StabChoice stab{kind, S0Kind::boundary_hp};
        for (int p = 1; p <= 6; ++p) {
            const LocalSpace s = uniform_space(unit_square, p);
            const LocalMatrices m = local_matrices(s, identity_coeffs(), stab);
            const Eigen::VectorXd x = s.interpolate([](const Point& z) { return z.x(); });
            CHECK(x.dot(m.stiffness * x) == doctest::Approx(1.0).epsilon(1e-10));
            const Eigen::VectorXd one = s.interpolate([](const Point&) { return 1.0; });
            CHECK((m.stiffness * one).cwiseAbs().maxCoeff() < 1e-12);
            CHECK(one.dot(m.mass * one) == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(m.potential.cwiseAbs().maxCoeff() == 0.0);
            for (const Eigen::MatrixXd* a : {&m.stiffness, &m.mass}) {
                CHECK((*a - a->transpose()).norm() <= 1e-12 * a->norm());
            }
        }
    }
}

TEST_CASE("stiffness is definite off the constants")
{
    std::mt19937_64 rng(23);
    for (S1Kind kind : {S1Kind::explicit_p, S1Kind::diagonal_recipe}) {
        for (int p = 1; p <= 8; ++p) {
            const LocalSpace s = uniform_space(random_star_polygon(rng, 3 + p % 5), p);
            const LocalMatrices m = local_matrices(s, identity_coeffs(), {kind, S0Kind::boundary_hp});
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.stiffness, Eigen::EigenvaluesOnly);
            const Eigen::VectorXd ev = es.eigenvalues();
            CHECK(std::abs(ev[0]) < 1e-10 * ev.maxCoeff());
            CHECK(ev[1] > 1e-10 * ev.maxCoeff());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(m.mass, Eigen::EigenvaluesOnly);
            CHECK(em.eigenvalues()[0] > 0.0);
        }
    }
}

TEST_CASE("potential and coefficient errors")
{
    const LocalSpace s = uniform_space(unit_square, 3);
    ElementCoefficients c = identity_coeffs();
    c.potential = [](const Point&) { return 2.0; };
    const LocalMatrices m = local_matrices(s, c, {});
    const Eigen::VectorXd one = s.interpolate([](const Point&) { return 1.0; });
    CHECK(one.dot(m.potential * one) == doctest::Approx(2.0).epsilon(1e-12));

    const LocalSpace named(unit_square, 2, {2, 2, 2, 2}, 41);
    ElementCoefficients bad{[](const Point&) -> Eigen::Matrix2d {
                                throw std::runtime_error("field undefined");
                            },
                            {}};
    try {
        local_matrices(named, bad, {});
        FAIL("expected a coefficient error");
    } catch (const CoefficientError& e) {
        CHECK(std::string(e.what()).find("41") != std::string::npos);
    }
}

TEST_CASE("hp local space with raised edge degrees")
{
    // Element degree 2, one edge at degree 4: the space still contains P_2 exactly.
    const LocalSpace s(unit_square, 2, {2, 4, 2, 3});
    const LocalMatrices m = local_matrices(s, identity_coeffs(), {});
    auto q = [](const Point& x) { return x.x() * x.y() - 0.5 * x.x() * x.x(); };
    const Eigen::VectorXd v = s.interpolate(q);
    // Exact energy: grad q = (y - x, x), integral over the unit square of (y-x)^2 + x^2 = 1/6 + 1/3.
    CHECK(v.dot(m.stiffness * v) == doctest::Approx(0.5).epsilon(1e-10));
    const ProjectorSet proj = compute_projectors(s);
    CHECK(deviation(s, proj.pi_nabla * v, q) < 1e-11);
}
