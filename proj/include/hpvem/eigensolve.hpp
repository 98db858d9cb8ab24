#pragma once

#include <Eigen/Core>
#include <Eigen/Sparse>

#include <cstdint>
#include <optional>
#include <vector>

namespace hpvem {

struct SolverConfig {
    int n_eigs = 4;
    std::optional<double> shift;  ///< default: 0, or a small negative value with zero_mode
    double tolerance = 1e-10;
    int max_iterations = 300;     ///< restart cycles of the Krylov iteration
    bool zero_mode = false;       ///< Neumann: report the smallest eigenpair separately
    int dense_threshold = 500;    ///< systems below this size use a dense solver
    int subspace_size = 0;        ///< 0 picks max(4 (k + 3), 40)
    std::uint64_t seed = 20240611;
};

struct EigenResult {
    Eigen::VectorXd values;      ///< ascending
    Eigen::MatrixXd vectors;     ///< M-orthonormal columns
    Eigen::VectorXd residuals;   ///< |Ax - lMx| / ((|A| + |l| |M|) |x|), infinity matrix norms
    std::vector<double> zero_modes;
    double shift = 0.0;
    bool dense = false;
    int iterations = 0;
    int operator_applications = 0;
};

/// Infinity norm of a sparse matrix.
double norm_inf(const Eigen::SparseMatrix<double>& m);

/// Shift used when none is configured.
double default_shift(const Eigen::SparseMatrix<double>& A, const Eigen::SparseMatrix<double>& M,
                     bool zero_mode);

double relative_residual(const Eigen::SparseMatrix<double>& A,
                         const Eigen::SparseMatrix<double>& M, double lambda,
                         const Eigen::VectorXd& x, double norm_a, double norm_m);

/// Smallest eigenpairs of A x = l M x with A symmetric semidefinite and M
/// symmetric definite. Throws ShiftError if A - shift M is not definite and
/// IterationError if the residuals do not reach the tolerance.
EigenResult solve_generalized(const Eigen::SparseMatrix<double>& A,
                              const Eigen::SparseMatrix<double>& M, const SolverConfig& config);

/// Full spectrum of a small dense pencil, ascending.
Eigen::VectorXd dense_spectrum(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M);

struct MatchedEigenvalue {
    double reference = 0.0;
    double computed = 0.0;      ///< member of the cluster closest to the reference
    double rel_error = 0.0;     ///< |reference - computed| / |reference|
    int cluster_begin = 0;      ///< index into the computed list
    int multiplicity = 0;       ///< cluster size
};

/// Groups the ascending computed values into clusters (maximal runs whose
/// consecutive relative gaps are <= cluster_rel_tol) and pairs the i-th
/// reference value with the i-th cluster. Throws CoverageError when there are
/// fewer clusters than references.
std::vector<MatchedEigenvalue> match_eigenvalues(const std::vector<double>& computed,
                                                 const std::vector<double>& reference,
                                                 double cluster_rel_tol = 1e-6);

} // namespace hpvem
