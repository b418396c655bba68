#pragma once

#include <span>
#include <vector>

#include "gglr/grid.hpp"
#include "gglr/solver.hpp"
#include "gglr/sparse.hpp"

namespace gglr {

/// Spectral facts of a lifted Laplacian feeding the MSE bound: lambda3 is
/// the smallest eigenvalue above the numerical null space, lambda_max the
/// largest. sigma_p2 models deviation from an ideal planar signal, sigma_o2
/// the observation noise.
struct SpectralSummary {
    int count = 0;  // signal length K
    double lambda3 = 0.0;
    double lambda_max = 0.0;
    double sigma_p2 = 0.0;
    double sigma_o2 = 0.0;
};

/// Exact denoiser MSE for eigenvalues lambda_3..lambda_K with the matching
/// signal projections; the two zero eigenvalues contribute 2*sigma_o2 of
/// variance implicitly (K = lambdas.size() + 2).
double mse_exact(double mu, std::span<const double> lambdas, std::span<const double> projections, double sigma_o2);

/// Bias-variance upper bound on the MSE as a function of mu.
double mse_bound(double mu, const SpectralSummary& s);
double mse_bound_derivative(double mu, const SpectralSummary& s);

/// Minimizer of mse_bound over [mu_min, mu_max]: coarse log-grid bracket,
/// then bisection on the derivative (golden-section fallback when the
/// derivative does not change sign in the bracket).
double optimal_mu(const SpectralSummary& s, double mu_min, double mu_max);

struct ExtremeEigs {
    double lambda3 = 0.0;
    double lambda_max = 0.0;
};

/// lambda_max by power iteration (1e-8 Rayleigh tolerance); lambda3 by dense
/// eigendecomposition up to dense_threshold nodes, else by power iteration
/// on lambda_max*I - L with the supplied analytic null basis deflated.
/// The numerical null space is everything below 1e-9 * lambda_max.
ExtremeEigs extreme_eigenvalues(const SparseMatrix& laplacian,
                                const std::vector<std::vector<double>>& null_basis = {},
                                int dense_threshold = 4096);

/// {1, column ramp, row ramp} on an MN grid — the planar null space of the
/// combined lifted Laplacian for any edge weights.
std::vector<std::vector<double>> planar_null_basis(int rows, int cols);

/// Noise variance from the median absolute horizontal difference between
/// adjacent known pixels (robust to edges). Heuristic.
double estimate_noise_variance(const ImageGrid& img, const PixelMask& mask);

/// Planar-deviation variance: median residual variance of local plane fits
/// over known pixels, with the noise floor removed. Heuristic.
double estimate_perturbation_variance(const ImageGrid& img, const PixelMask& mask, int window, double sigma_o2);

/// End-to-end mu selection used by SolveConfig::mu_auto: spectral summary of
/// the supplied first-iteration Laplacian plus variance estimates (or the
/// user-provided overrides in cfg).
double auto_mu(const ImageGrid& y, const PixelMask& mask, const SparseMatrix& lifted_sum, const SolveConfig& cfg);

}  // namespace gglr
