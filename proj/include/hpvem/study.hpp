#pragma once

#include "hpvem/assembly.hpp"
#include "hpvem/eigensolve.hpp"
#include "hpvem/hp_distribution.hpp"
#include "hpvem/test_cases.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hpvem {

enum class Regime { h, p, hp };
enum class Abscissa { sqrt_dof, cbrt_dof, h, degree };
enum class FitModel { algebraic, exponential };

Regime parse_regime(const std::string& s);
Abscissa parse_abscissa(const std::string& s);
FitModel parse_fit_model(const std::string& s);
std::string to_string(Regime r);
std::string to_string(Abscissa a);
std::string to_string(FitModel m);

struct StudyConfig {
    std::string case_name = "tc1_square_laplace";
    double eps = 2.0;
    Regime regime = Regime::h;

    // h regime: uniform degree p on a mesh sequence. Cartesian sizes are cells
    // per side; Voronoi sizes are seed counts.
    int p = 1;
    std::vector<int> mesh_sizes{4, 8, 16, 32};

    // p regime: degrees p_min .. p_max on one mesh.
    int p_min = 1;
    int p_max = 8;
    int mesh_n = 4; ///< Cartesian cells per side, or Voronoi seed count

    std::string mesh_kind = "cartesian"; ///< cartesian | voronoi
    int lloyd_iterations = 50;
    std::uint64_t seed = 1;

    // hp regime: graded meshes n = n_min .. n_max.
    double sigma = 0.5;
    int mu = 1;
    int hp_cap = 0; // 0: no cap on layer degrees
    int n_min = 0;
    int n_max = 6;

    StabChoice stab;
    int quad_extra = 2;
    int n_eigs = 4; // distinct reference values tracked
    std::optional<Abscissa> abscissa;
    std::string ref_file;
    double solver_tolerance = 1e-10;
    bool timing = true; ///< false writes 0 wall times so reports are reproducible byte for byte

    Abscissa effective_abscissa() const;
    FitModel default_fit_model() const;
};

struct ConvergenceRecord {
    int run = 0;
    int dofs = 0;
    double h = 0.0;
    double abscissa = 0.0;
    int max_degree = 0;
    // One entry per tracked distinct reference value; computed is the member of
    // its multiplet block closest to the reference.
    std::vector<double> reference;
    std::vector<int> multiplicity;
    std::vector<double> computed;
    std::vector<double> rel_error;
    std::vector<double> residual;
    std::vector<double> spectrum; // all computed eigenvalues, ascending
    double walltime = 0.0;
};

/// One discretization of a test case.
struct Discretization {
    PolyMesh mesh;
    DegreeMap degrees;
};

/// Mesh and degrees of each step of the study, in order.
std::vector<Discretization> study_steps(const StudyConfig& config, const TestCase& tc);

/// Each step: build mesh, assign degrees, assemble, solve, pair with the
/// reference list expanded by multiplicity. `on_record` sees every record as
/// soon as it is complete; a failing step throws after the earlier records were delivered.
std::vector<ConvergenceRecord> run_study(
    const StudyConfig& config,
    const std::function<void(const ConvergenceRecord&)>& on_record = {});

/// Solves one discretization and returns the smallest eigenvalues (zero mode excluded).
EigenResult solve_case(const TestCase& tc, const Discretization& d, const StabChoice& stab,
                       int n_eigs, int quad_extra = 2, double tolerance = 1e-10,
                       int* dofs = nullptr);

struct FitResult {
    FitModel model = FitModel::algebraic;
    int eig_index = 0;
    double slope = 0.0;     ///< least-squares slope of log(err) against log(x) or x
    double rate = 0.0;      ///< algebraic: slope; exponential: b = -slope
    double intercept = 0.0;
    double r2 = 0.0;
    int points = 0;
};

/// Errors below `floor` are left out. Throws FitError with fewer than 3 usable points.
FitResult fit_rates(const std::vector<double>& x, const std::vector<double>& err, FitModel model,
                    double floor = 1e-12);

FitResult fit_study(const std::vector<ConvergenceRecord>& records, int eig_index, FitModel model,
                    double floor = 1e-12);

} // namespace hpvem
