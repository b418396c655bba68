#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gglr/gradient_graph.hpp"
#include "gglr/grid.hpp"
#include "gglr/sparse.hpp"

namespace gglr {

struct SolveConfig {
    double sigma = 0.68;
    double mu = 0.01;
    bool mu_auto = false;  // derive mu from the MSE bound instead of cfg.mu
    int window = 5;
    Connectivity connectivity = Connectivity::four;
    double cg_tol = 1e-8;       // relative residual
    long cg_maxit = 0;          // 0 means 10 * rows * cols
    double outer_tol = 1e-4;    // relative iterate change
    int outer_maxit = 10;
    std::uint64_t seed = 0;
    bool jacobi_precond = false;

    // Used by mu_auto; negative values request estimation from the data.
    double sigma_p2 = -1.0;
    double sigma_o2 = -1.0;
    double mu_min = 1e-6;
    double mu_max = 1e3;

    void validate() const;
};

struct CgResult {
    std::vector<double> x;
    long iterations = 0;
    double relative_residual = 0.0;  // recomputed from b - Bx at exit
    bool converged = false;
    bool breakdown = false;  // hit a zero-curvature direction (singular system)
};

/// B = HᵀH + mu (ℒh + ℒv), exactly symmetric; b = Hᵀy with y the K-vector of
/// observed values.
std::pair<SparseMatrix, std::vector<double>> assemble_system(const SparseMatrix& h, const SparseMatrix& lifted_h,
                                                             const SparseMatrix& lifted_v, double mu,
                                                             const std::vector<double>& y);

/// Conjugate gradient for symmetric positive semi-definite systems. Stops on
/// the recursive residual, then verifies the true residual and resumes if it
/// still exceeds tol. Throws on non-symmetric input or NaN. jacobi, when
/// non-null, supplies the diagonal for a Jacobi preconditioner.
CgResult conjugate_gradient(const SparseMatrix& b_mat, const std::vector<double>& rhs,
                            const std::vector<double>& x0, double tol, long maxit,
                            const std::vector<double>* jacobi = nullptr);

struct SolveReport {
    ImageGrid restored;  // final iterate, unclamped; clamp at serialization
    int outer_iterations = 0;
    std::vector<long> cg_iterations;
    double final_relative_residual = 0.0;
    double regularizer_value = 0.0;  // x*ᵀ(ℒh+ℒv)x* under the final weights
    double wall_time_s = 0.0;
    bool cg_converged = true;
    bool outer_converged = false;
    double mu_used = 0.0;
};

/// Restores missing pixels by the iteratively reweighted gradient-graph
/// quadratic program: structure-tensor gradient estimates seed the first
/// weight set, each round solves (HᵀH + mu(ℒh+ℒv))x = Hᵀy by warm-started
/// CG, and weights are rebuilt from the current solution until the iterate
/// stabilizes.
SolveReport interpolate(const ImageGrid& y, const PixelMask& mask, const SolveConfig& cfg);

/// Baseline using the 4-connected pixel graph with intensity-difference
/// weights (promotes piecewise constant output).
SolveReport glr_interpolate(const ImageGrid& y, const PixelMask& mask, const SolveConfig& cfg);

}  // namespace gglr
