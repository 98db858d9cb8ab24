#include "hpvem/property_checks.hpp"

#include "hpvem/assembly.hpp"
#include "hpvem/eigensolve.hpp"
#include "hpvem/errors.hpp"
#include "hpvem/hp_distribution.hpp"
#include "hpvem/mesh.hpp"
#include "hpvem/test_cases.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hpvem {

std::vector<Point> random_star_polygon(std::mt19937_64& rng, int n_vertices, double scale,
                                       const Point& center)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> angles(n_vertices);
    // Jittered angles keep every sector below pi, so the centre sees all edges.
    const double sector = 2.0 * std::numbers::pi / n_vertices;
    const double phase = unit(rng) * sector;
    for (int i = 0; i < n_vertices; ++i) {
        angles[i] = phase + sector * (i + 0.5 * (unit(rng) - 0.5));
    }
    std::vector<Point> poly;
    for (double a : angles) {
        const double r = scale * (0.5 + 0.5 * unit(rng));
        poly.push_back(center + r * Point(std::cos(a), std::sin(a)));
    }
    return poly;
}

ProjectorErrors projector_reproduction(const LocalSpace& space, std::mt19937_64& rng,
                                       int samples)
{
    const ProjectorSet proj = compute_projectors(space);
    const OrthoBasis& basis = space.basis();
    const QuadratureRule& rule = space.rule();
    const int p = space.degree();
    const int np = poly_dim(p);
    const int nz = poly_dim(p - 1);
    std::normal_distribution<double> normal;
    ProjectorErrors err;
    auto rel = [](const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
        return (got - want).lpNorm<Eigen::Infinity>() /
               std::max(1.0, want.lpNorm<Eigen::Infinity>());
    };
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd c(np);
        for (int i = 0; i < np; ++i) {
            c[i] = normal(rng);
        }
        const Eigen::VectorXd dofs = space.dofs_of_polynomial(c);
        err.nabla = std::max(err.nabla, rel(proj.pi_nabla * dofs, c));

        const Eigen::VectorXd low = c.head(nz);
        const Eigen::VectorXd low_dofs = space.dofs_of_polynomial(low);
        err.zero = std::max(err.zero, rel(proj.pi_zero * low_dofs, low));

        Eigen::VectorXd gx = Eigen::VectorXd::Zero(nz);
        Eigen::VectorXd gy = Eigen::VectorXd::Zero(nz);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Eigen::VectorXd phi = basis.values(rule.points[q]).head(nz);
            const Eigen::Vector2d grad = basis.gradients(rule.points[q]).transpose() * c;
            gx += rule.weights[q] * grad.x() * phi;
            gy += rule.weights[q] * grad.y() * phi;
        }
        err.grad = std::max(err.grad, rel(proj.pi_grad_x * dofs, gx));
        err.grad = std::max(err.grad, rel(proj.pi_grad_y * dofs, gy));
    }
    return err;
}

namespace {

double max_abs(const SparseMatrix& m)
{
    double v = 0.0;
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            v = std::max(v, std::abs(it.value()));
        }
    }
    return v;
}

double asymmetry(const SparseMatrix& m)
{
    const SparseMatrix d = m - SparseMatrix(m.transpose());
    return max_abs(d) / std::max(max_abs(m), 1e-300);
}

CheckResult make(const std::string& name, double value, double threshold,
                 const std::string& detail = "")
{
    return {name, value <= threshold, value, threshold, detail};
}

} // namespace

std::vector<CheckResult> run_property_checks(bool quick, std::uint64_t seed)
{
    std::vector<CheckResult> out;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> nv(3, 9);

    // Projector reproduction on random star-shaped polygons.
    {
        const int polygons = quick ? 20 : 200;
        ProjectorErrors worst;
        for (int i = 0; i < polygons; ++i) {
            const std::vector<Point> poly = random_star_polygon(rng, nv(rng));
            for (int p = 1; p <= 8; ++p) {
                const LocalSpace space(poly, p, std::vector<int>(poly.size(), p), i);
                const ProjectorErrors e = projector_reproduction(space, rng, 1);
                worst.nabla = std::max(worst.nabla, e.nabla);
                worst.zero = std::max(worst.zero, e.zero);
                worst.grad = std::max(worst.grad, e.grad);
            }
        }
        out.push_back(make("projector Pi_nabla reproduction", worst.nabla, 1e-9));
        out.push_back(make("projector Pi0 reproduction", worst.zero, 1e-9));
        out.push_back(make("projector Pi0 grad reproduction", worst.grad, 1e-9));
    }

    // Patch test: q^T A_K q equals the exact energy of a polynomial q, both stabilizations.
    {
        double worst = 0.0;
        const int polygons = quick ? 5 : 40;
        std::normal_distribution<double> normal;
        for (int i = 0; i < polygons; ++i) {
            const std::vector<Point> poly = random_star_polygon(rng, nv(rng));
            Eigen::Matrix2d k;
            k << 2.0, 0.3, 0.3, 1.0;
            for (int p = 1; p <= 6; ++p) {
                const LocalSpace space(poly, p, std::vector<int>(poly.size(), p), i);
                const QuadratureRule fine = polygon_quadrature(poly, 2 * p + 6);
                Eigen::VectorXd c(poly_dim(p));
                for (int j = 0; j < c.size(); ++j) {
                    c[j] = normal(rng);
                }
                double exact = 0.0;
                for (std::size_t q = 0; q < fine.size(); ++q) {
                    const Eigen::Vector2d g = space.basis().gradients(fine.points[q]).transpose() * c;
                    exact += fine.weights[q] * g.dot(k * g);
                }
                const Eigen::VectorXd dofs = space.dofs_of_polynomial(c);
                for (S1Kind kind : {S1Kind::explicit_p, S1Kind::diagonal_recipe}) {
                    ElementCoefficients coeffs;
                    coeffs.diffusion = [k](const Point&) { return k; };
                    const LocalMatrices lm = local_matrices(space, coeffs, StabChoice{kind, {}});
                    const double got = dofs.dot(lm.stiffness * dofs);
                    worst = std::max(worst, std::abs(got - exact) / std::abs(exact));
                }
            }
        }
        out.push_back(make("patch test energy", worst, 1e-9));
    }

    // Assembly invariants on small benchmark meshes.
    {
        double sym = 0.0;
        double kernel = 0.0;
        bool mass_ok = true;
        const std::vector<std::pair<std::string, int>> cases = {
            {"tc1", 4}, {"tc2", 4}, {"tc3", 4}, {"tc4", 4}};
        for (const auto& [name, n] : cases) {
            const TestCase tc = make_test_case(name, name == "tc4" ? 1e8 : 2.0);
            const PolyMesh mesh = case_cartesian_mesh(tc, n);
            for (int p = 1; p <= (quick ? 2 : 4); ++p) {
                const DegreeMap deg = assign_uniform(mesh, p);
                const SystemMatrices sys = assemble(mesh, deg, tc.coeffs, tc.bc);
                sym = std::max({sym, asymmetry(sys.A), asymmetry(sys.M)});
                Eigen::SimplicialLDLT<SparseMatrix> ldlt(sys.M);
                mass_ok = mass_ok && ldlt.info() == Eigen::Success &&
                          ldlt.vectorD().minCoeff() > 0.0;
                if (tc.id == CaseId::lshape) {
                    const Eigen::VectorXd one = interpolate_global(
                        mesh, deg, sys.dofs, [](const Point&) { return 1.0; });
                    kernel = std::max(kernel, (sys.A * one).lpNorm<Eigen::Infinity>());
                }
            }
        }
        out.push_back(make("assembled matrices symmetric", sym, 1e-12));
        out.push_back(make("Neumann Laplace annihilates constants", kernel, 1e-11));
        out.push_back(make("mass matrix definite", mass_ok ? 0.0 : 1.0, 0.0));
    }

    // Krylov solver against the dense oracle on small systems.
    {
        double worst = 0.0;
        for (const std::string name : {"tc1", "tc3"}) {
            const TestCase tc = make_test_case(name);
            const PolyMesh mesh = case_cartesian_mesh(tc, 4);
            const DegreeMap deg = assign_uniform(mesh, 2);
            const SystemMatrices sys = assemble(mesh, deg, tc.coeffs, tc.bc);
            SolverConfig sc;
            sc.n_eigs = 4;
            sc.zero_mode = tc.bc.kind == BoundaryKind::neumann;
            sc.dense_threshold = 0;
            sc.subspace_size = 20;
            const EigenResult it = solve_generalized(sys.A, sys.M, sc);
            const Eigen::VectorXd all =
                dense_spectrum(Eigen::MatrixXd(sys.A), Eigen::MatrixXd(sys.M));
            const int off = sc.zero_mode ? 1 : 0;
            for (int j = 0; j < sc.n_eigs; ++j) {
                worst = std::max(worst, std::abs(it.values[j] - all[j + off]) / all[j + off]);
            }
        }
        out.push_back(make("eigensolver matches dense oracle", worst, 1e-9));
    }

    // hp pipeline with equal layer degrees against the uniform pipeline.
    {
        const LayeredMesh lm = generate_graded(GradedDomain::lshape, 2, 0.5);
        const TestCase tc = make_test_case("tc3");
        DegreeMap hp = assign_from_cell_degrees(lm.mesh, std::vector<int>(lm.mesh.num_cells(), 3));
        const DegreeMap uni = assign_uniform(lm.mesh, 3);
        const SystemMatrices a = assemble(lm.mesh, hp, tc.coeffs, tc.bc);
        const SystemMatrices b = assemble(lm.mesh, uni, tc.coeffs, tc.bc);
        const bool same = a.A.nonZeros() == b.A.nonZeros() &&
                          std::equal(a.A.valuePtr(), a.A.valuePtr() + a.A.nonZeros(),
                                     b.A.valuePtr()) &&
                          std::equal(a.M.valuePtr(), a.M.valuePtr() + a.M.nonZeros(),
                                     b.M.valuePtr());
        out.push_back(make("hp and uniform pipelines identical", same ? 0.0 : 1.0, 0.0));
    }
    return out;
}

} // namespace hpvem
