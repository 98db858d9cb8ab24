#include "hpvem/eigensolve.hpp"

#include "hpvem/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace hpvem {

using Sparse = Eigen::SparseMatrix<double>;

double norm_inf(const Sparse& m)
{
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(m.rows());
    for (int k = 0; k < m.outerSize(); ++k) {
        for (Sparse::InnerIterator it(m, k); it; ++it) {
            rows[it.row()] += std::abs(it.value());
        }
    }
    return rows.size() ? rows.maxCoeff() : 0.0;
}

double default_shift(const Sparse& A, const Sparse& M, bool zero_mode)
{
    if (!zero_mode) {
        return 0.0;
    }
    // Capped at -1: the uncapped scale grows with the contrast and the mesh
    // size and would push the shift far from the wanted end of the spectrum.
    return -std::min(1.0, 1e-8 * norm_inf(A) / norm_inf(M));
}

double relative_residual(const Sparse& A, const Sparse& M, double lambda,
                         const Eigen::VectorXd& x, double norm_a, double norm_m)
{
    const Eigen::VectorXd r = A * x - lambda * (M * x);
    return r.norm() / ((norm_a + std::abs(lambda) * norm_m) * x.norm());
}

Eigen::VectorXd dense_spectrum(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M)
{
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, M, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw IterationError("dense generalized eigensolver failed");
    }
    return es.eigenvalues();
}

namespace {

/// M-orthogonalizes W against V (two passes of classical Gram-Schmidt), then
/// orthonormalizes its columns among themselves, dropping dependent ones.
Eigen::MatrixXd m_orthonormalize(const Sparse& M, const Eigen::MatrixXd& V, Eigen::MatrixXd W)
{
    for (int pass = 0; pass < 2 && V.cols() > 0; ++pass) {
        W -= V * (V.transpose() * (M * W));
    }
    Eigen::MatrixXd out(W.rows(), W.cols());
    int kept = 0;
    for (int j = 0; j < W.cols(); ++j) {
        Eigen::VectorXd w = W.col(j);
        const double before = std::sqrt(std::max(0.0, w.dot(M * w)));
        for (int pass = 0; pass < 2; ++pass) {
            if (V.cols() > 0) {
                w -= V * (V.transpose() * (M * w));
            }
            if (kept > 0) {
                w -= out.leftCols(kept) * (out.leftCols(kept).transpose() * (M * w));
            }
        }
        const double after = std::sqrt(std::max(0.0, w.dot(M * w)));
        if (!(after > 1e-10 * before) || after == 0.0) {
            continue;
        }
        out.col(kept++) = w / after;
    }
    return out.leftCols(kept);
}

void split_zero_mode(EigenResult& res, bool zero_mode)
{
    if (!zero_mode || res.values.size() == 0) {
        return;
    }
    res.zero_modes.push_back(res.values[0]);
    const int k = static_cast<int>(res.values.size()) - 1;
    res.values = res.values.tail(k).eval();
    res.vectors = res.vectors.rightCols(k).eval();
    res.residuals = res.residuals.tail(k).eval();
}

EigenResult solve_dense(const Sparse& A, const Sparse& M, const SolverConfig& config, int k,
                        double norm_a, double norm_m)
{
    const Eigen::MatrixXd a = Eigen::MatrixXd(A);
    const Eigen::MatrixXd m = Eigen::MatrixXd(M);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (a + a.transpose()), 0.5 * (m + m.transpose()));
    if (es.info() != Eigen::Success) {
        throw IterationError("dense generalized eigensolver failed (mass matrix not definite?)");
    }
    EigenResult res;
    res.dense = true;
    res.shift = config.shift.value_or(0.0);
    res.values = es.eigenvalues().head(k);
    res.vectors = es.eigenvectors().leftCols(k);
    res.residuals.resize(k);
    for (int j = 0; j < k; ++j) {
        Eigen::VectorXd x = res.vectors.col(j);
        x /= std::sqrt(x.dot(M * x));
        res.vectors.col(j) = x;
        res.residuals[j] = relative_residual(A, M, res.values[j], x, norm_a, norm_m);
    }
    return res;
}

} // namespace

EigenResult solve_generalized(const Sparse& A, const Sparse& M, const SolverConfig& config)
{
    if (config.n_eigs < 1 || !(config.tolerance > 0.0)) {
        throw ArgumentError("n_eigs must be >= 1 and the tolerance positive");
    }
    if (A.rows() != A.cols() || M.rows() != M.cols() || A.rows() != M.rows()) {
        throw ArgumentError("A and M must be square and of equal size");
    }
    const int n = static_cast<int>(A.rows());
    const int k = config.n_eigs + (config.zero_mode ? 1 : 0);
    if (k > n) {
        throw ArgumentError("requested " + std::to_string(k) + " eigenpairs of a system with " +
                            std::to_string(n) + " unknowns");
    }
    const double norm_a = norm_inf(A);
    const double norm_m = norm_inf(M);
    const int block = std::min(k + 3, n);
    int m = config.subspace_size > 0 ? config.subspace_size : std::max(4 * block, 40);
    m = std::max(m, 2 * block);

    EigenResult res;
    if (n < config.dense_threshold || m >= n) {
        res = solve_dense(A, M, config, k, norm_a, norm_m);
        for (int j = 0; j < k; ++j) {
            if (!(res.residuals[j] <= config.tolerance)) {
                std::ostringstream msg;
                msg << "dense solve residual " << res.residuals[j] << " above tolerance";
                throw IterationError(msg.str());
            }
        }
        split_zero_mode(res, config.zero_mode);
        return res;
    }

    const double sigma = config.shift ? *config.shift : default_shift(A, M, config.zero_mode);
    Sparse shifted = A - sigma * M;
    Eigen::SimplicialLDLT<Sparse> ldlt(shifted);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0)) {
        std::ostringstream msg;
        msg << "A - sigma M is not positive definite for sigma = " << sigma
            << "; choose a shift below the smallest eigenvalue";
        throw ShiftError(msg.str());
    }
    res.shift = sigma;
    auto apply = [&](const Eigen::MatrixXd& x) {
        res.operator_applications += static_cast<int>(x.cols());
        Eigen::MatrixXd y = ldlt.solve(M * x);
        return y;
    };

    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd start(n, block);
    for (int j = 0; j < block; ++j) {
        for (int i = 0; i < n; ++i) {
            start(i, j) = normal(rng);
        }
    }
    // One application of the operator damps the high end before the first cycle.
    Eigen::MatrixXd V = m_orthonormalize(M, Eigen::MatrixXd(n, 0), apply(start));
    Eigen::MatrixXd TV = apply(V);

    Eigen::VectorXd ritz;
    Eigen::MatrixXd X;
    Eigen::VectorXd resid(k);
    for (int cycle = 1; cycle <= config.max_iterations; ++cycle) {
        res.iterations = cycle;
        int last = static_cast<int>(V.cols()) - std::min<int>(block, static_cast<int>(V.cols()));
        while (V.cols() < m) {
            Eigen::MatrixXd W = m_orthonormalize(M, V, TV.rightCols(V.cols() - last));
            if (W.cols() == 0) {
                break;
            }
            if (V.cols() + W.cols() > m) {
                W = W.leftCols(m - V.cols()).eval();
            }
            const Eigen::MatrixXd TW = apply(W);
            last = static_cast<int>(V.cols());
            V.conservativeResize(Eigen::NoChange, V.cols() + W.cols());
            V.rightCols(W.cols()) = W;
            TV.conservativeResize(Eigen::NoChange, TV.cols() + TW.cols());
            TV.rightCols(TW.cols()) = TW;
        }

        const Eigen::MatrixXd MV = M * V;
        Eigen::MatrixXd H = MV.transpose() * TV;
        Eigen::MatrixXd G = MV.transpose() * V;
        H = 0.5 * (H + H.transpose()).eval();
        G = 0.5 * (G + G.transpose()).eval();
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(H, G);
        if (es.info() != Eigen::Success) {
            throw IterationError("Rayleigh-Ritz step failed");
        }
        const int nv = static_cast<int>(V.cols());
        const int keep = std::min(block, nv);
        // Largest theta = 1 / (lambda - sigma) first.
        Eigen::MatrixXd Y = es.eigenvectors().rightCols(keep).rowwise().reverse();
        Eigen::VectorXd theta = es.eigenvalues().tail(keep).reverse();
        ritz = (sigma + theta.array().inverse()).matrix();
        X = V * Y;
        Eigen::MatrixXd TX = TV * Y;

        bool converged = keep >= k;
        for (int j = 0; j < std::min(k, keep); ++j) {
            resid[j] = relative_residual(A, M, ritz[j], X.col(j), norm_a, norm_m);
            converged = converged && resid[j] <= config.tolerance;
        }
        if (converged) {
            break;
        }
        if (cycle == config.max_iterations) {
            std::ostringstream msg;
            msg << "eigensolver stopped after " << cycle << " cycles; residuals:";
            for (int j = 0; j < std::min(k, keep); ++j) {
                msg << ' ' << resid[j];
            }
            throw IterationError(msg.str());
        }
        V = std::move(X);
        TV = std::move(TX);
    }

    res.values = ritz.head(k);
    res.vectors = X.leftCols(k);
    res.residuals = resid;
    for (int j = 0; j < k; ++j) {
        Eigen::VectorXd x = res.vectors.col(j);
        x /= std::sqrt(x.dot(M * x));
        res.vectors.col(j) = x;
        res.residuals[j] = relative_residual(A, M, res.values[j], x, norm_a, norm_m);
    }
    split_zero_mode(res, config.zero_mode);
    return res;
}

std::vector<MatchedEigenvalue> match_eigenvalues(const std::vector<double>& computed,
                                                 const std::vector<double>& reference,
                                                 double cluster_rel_tol)
{
    std::vector<std::pair<int, int>> clusters; // begin, size
    for (int i = 0; i < static_cast<int>(computed.size()); ++i) {
        if (!clusters.empty()) {
            const double prev = computed[i - 1];
            const double gap = std::abs(computed[i] - prev) / std::max(std::abs(prev), 1e-300);
            if (gap <= cluster_rel_tol) {
                ++clusters.back().second;
                continue;
            }
        }
        clusters.emplace_back(i, 1);
    }
    if (clusters.size() < reference.size()) {
        throw CoverageError("only " + std::to_string(clusters.size()) +
                            " computed clusters for " + std::to_string(reference.size()) +
                            " reference values");
    }
    std::vector<MatchedEigenvalue> out;
    for (std::size_t r = 0; r < reference.size(); ++r) {
        MatchedEigenvalue mv;
        mv.reference = reference[r];
        mv.cluster_begin = clusters[r].first;
        mv.multiplicity = clusters[r].second;
        mv.rel_error = std::numeric_limits<double>::infinity();
        for (int i = 0; i < mv.multiplicity; ++i) {
            const double c = computed[mv.cluster_begin + i];
            const double err = std::abs(reference[r] - c) / std::abs(reference[r]);
            if (err < mv.rel_error) {
                mv.rel_error = err;
                mv.computed = c;
            }
        }
        out.push_back(mv);
    }
    return out;
}

} // namespace hpvem
