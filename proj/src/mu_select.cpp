#include "gglr/mu_select.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "gglr/kernels.hpp"

namespace gglr {

double mse_exact(double mu, std::span<const double> lambdas, std::span<const double> projections, double sigma_o2) {
    if (!(mu > 0.0)) throw std::invalid_argument("mse_exact: mu must be positive");
    if (lambdas.size() != projections.size()) throw std::invalid_argument("mse_exact: size mismatch");
    double bias2 = 0.0;
    double var = 2.0;  // the two zero eigenvalues pass noise through unchanged
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const double lam = lambdas[i];
        double q = 0.0, h = 1.0;
        if (lam > 0.0) {
            q = 1.0 / (1.0 + 1.0 / (mu * lam));
            h = 1.0 / (1.0 + mu * lam);
        }
        bias2 += q * q * projections[i] * projections[i];
        var += h * h;
    }
    return bias2 + sigma_o2 * var;
}

double mse_bound(double mu, const SpectralSummary& s) {
    if (!(mu > 0.0)) throw std::invalid_argument("mse_bound: mu must be positive");
    if (s.count < 3) throw std::invalid_argument("mse_bound: need K >= 3");
    const double km2 = static_cast<double>(s.count - 2);
    const double bias_den = 1.0 + 1.0 / (mu * s.lambda_max);
    const double bias = km2 * s.sigma_p2 / (bias_den * bias_den);
    const double var_den = 1.0 + mu * s.lambda3;
    const double var = (km2 / (var_den * var_den) + 2.0) * s.sigma_o2;
    return bias + var;
}

double mse_bound_derivative(double mu, const SpectralSummary& s) {
    if (!(mu > 0.0)) throw std::invalid_argument("mse_bound_derivative: mu must be positive");
    const double km2 = static_cast<double>(s.count - 2);
    const double lk = s.lambda_max;
    const double l3 = s.lambda3;
    const double d1 = 1.0 + mu * lk;
    const double d3 = 1.0 + mu * l3;
    // d/dmu of (mu*lk/(1+mu*lk))^2 and of (1+mu*l3)^-2
    const double bias_term = 2.0 * mu * lk * lk / (d1 * d1 * d1);
    const double var_term = -2.0 * l3 / (d3 * d3 * d3);
    return km2 * (s.sigma_p2 * bias_term + s.sigma_o2 * var_term);
}

namespace {

double golden_section(const SpectralSummary& s, double lo, double hi) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = std::log(lo), b = std::log(hi);
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = mse_bound(std::exp(c), s);
    double fd = mse_bound(std::exp(d), s);
    for (int it = 0; it < 200 && (b - a) > 1e-13 * std::max(1.0, std::fabs(b)); ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = mse_bound(std::exp(c), s);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = mse_bound(std::exp(d), s);
        }
    }
    return std::exp(0.5 * (a + b));
}

double bisect_derivative(const SpectralSummary& s, double lo, double hi) {
    double flo = mse_bound_derivative(lo, s);
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        const double fmid = mse_bound_derivative(mid, s);
        if (fmid == 0.0 || std::fabs(fmid) <= 1e-10 * std::max(mse_bound(mid, s), 1e-300) ||
            (hi - lo) <= 1e-13 * hi) {
            return mid;
        }
        if ((flo < 0.0) != (fmid < 0.0)) {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    return std::sqrt(lo * hi);
}

}  // namespace

double optimal_mu(const SpectralSummary& s, double mu_min, double mu_max) {
    if (!(mu_min > 0.0) || !(mu_min < mu_max)) throw std::invalid_argument("optimal_mu: invalid range");
    if (s.count < 3) throw std::invalid_argument("optimal_mu: need K >= 3");

    // Coarse log grid to bracket the global minimum.
    constexpr int kGrid = 257;
    const double la = std::log(mu_min), lb = std::log(mu_max);
    int best = 0;
    double best_val = mse_bound(mu_min, s);
    for (int i = 1; i < kGrid; ++i) {
        const double mu = std::exp(la + (lb - la) * i / (kGrid - 1));
        const double v = mse_bound(mu, s);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    auto grid_mu = [&](int i) { return std::exp(la + (lb - la) * i / (kGrid - 1)); };

    if (best == 0 && mse_bound_derivative(mu_min, s) >= 0.0) return mu_min;
    if (best == kGrid - 1 && mse_bound_derivative(mu_max, s) <= 0.0) return mu_max;

    const double lo = grid_mu(std::max(0, best - 1));
    const double hi = grid_mu(std::min(kGrid - 1, best + 1));
    const double dlo = mse_bound_derivative(lo, s);
    const double dhi = mse_bound_derivative(hi, s);
    if ((dlo < 0.0) != (dhi < 0.0)) return bisect_derivative(s, lo, hi);
    return golden_section(s, lo, hi);
}

namespace {

// Deterministic pseudo-random start vector for power iteration.
double hash01(std::uint64_t i) {
    std::uint64_t z = i + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

void orthonormalize(std::vector<std::vector<double>>& basis) {
    std::size_t kept = 0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        auto v = basis[i];
        for (std::size_t j = 0; j < kept; ++j) {
            const double c = kernels::dot(basis[j].data(), v.data(), v.size());
            kernels::axpy(-c, basis[j].data(), v.data(), v.size());
        }
        const double n = kernels::nrm2(v.data(), v.size());
        if (n > 1e-12) {
            for (double& x : v) x /= n;
            basis[kept++] = std::move(v);
        }
    }
    basis.resize(kept);
}

void deflate(const std::vector<std::vector<double>>& basis, std::vector<double>& v) {
    for (const auto& b : basis) {
        const double c = kernels::dot(b.data(), v.data(), v.size());
        kernels::axpy(-c, b.data(), v.data(), v.size());
    }
}

// Dominant eigenvalue of op (a symmetric PSD apply) with optional deflation.
double power_iteration(const SparseMatrix& m, double shift, const std::vector<std::vector<double>>& basis) {
    const std::size_t n = static_cast<std::size_t>(m.rows());
    std::vector<double> v(n), w(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = hash01(i) - 0.5;
    deflate(basis, v);
    double nv = kernels::nrm2(v.data(), n);
    if (nv == 0.0) return 0.0;
    for (double& x : v) x /= nv;

    double rayleigh = 0.0;
    for (int it = 0; it < 100000; ++it) {
        // w = shift*v - L*v when shifted, else w = L*v
        m.matvec_into(v.data(), w.data());
        if (shift != 0.0) {
            for (std::size_t i = 0; i < n; ++i) w[i] = shift * v[i] - w[i];
        }
        deflate(basis, w);
        const double r = kernels::dot(v.data(), w.data(), n);
        // |r - lambda| <= ||w - r v|| for unit v and symmetric operators, so
        // this certifies the Rayleigh quotient to the requested tolerance.
        double res2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = w[i] - r * v[i];
            res2 += d * d;
        }
        const double nw = kernels::nrm2(w.data(), n);
        if (nw == 0.0) return 0.0;
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
        if (std::sqrt(res2) <= 1e-8 * std::max(std::fabs(r), 1e-300)) return r;
        rayleigh = r;
    }
    return rayleigh;
}

}  // namespace

ExtremeEigs extreme_eigenvalues(const SparseMatrix& laplacian, const std::vector<std::vector<double>>& null_basis,
                                int dense_threshold) {
    const int n = laplacian.rows();
    if (laplacian.cols() != n) throw std::invalid_argument("extreme_eigenvalues: matrix must be square");
    if (!laplacian.symmetric_hint() && !is_symmetric(laplacian, 1e-12)) {
        throw std::invalid_argument("extreme_eigenvalues: matrix not symmetric");
    }

    ExtremeEigs out;
    out.lambda_max = power_iteration(laplacian, 0.0, {});
    if (out.lambda_max <= 0.0) return out;  // zero matrix

    const double null_cut = 1e-9 * out.lambda_max;
    if (n <= dense_threshold) {
        Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
        const auto rp = laplacian.row_ptr();
        const auto ci = laplacian.col_idx();
        const auto va = laplacian.values();
        for (int r = 0; r < n; ++r) {
            for (std::size_t k = rp[static_cast<std::size_t>(r)]; k < rp[static_cast<std::size_t>(r) + 1]; ++k) {
                dense(r, ci[k]) = va[k];
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense, Eigen::EigenvaluesOnly);
        const auto& vals = eig.eigenvalues();
        for (int i = 0; i < n; ++i) {
            if (vals[i] > null_cut) {
                out.lambda3 = vals[i];
                return out;
            }
        }
        out.lambda3 = out.lambda_max;  // rank deficient beyond the null space
        return out;
    }

    if (null_basis.empty()) {
        throw std::invalid_argument("extreme_eigenvalues: null basis required above the dense threshold");
    }
    std::vector<std::vector<double>> basis = null_basis;
    for (const auto& b : basis) {
        if (static_cast<int>(b.size()) != n) throw std::invalid_argument("extreme_eigenvalues: null basis size mismatch");
    }
    orthonormalize(basis);
    const double theta = power_iteration(laplacian, out.lambda_max, basis);
    out.lambda3 = std::max(out.lambda_max - theta, null_cut);
    return out;
}

std::vector<std::vector<double>> planar_null_basis(int rows, int cols) {
    const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    std::vector<std::vector<double>> basis(3, std::vector<double>(n));
    for (int l = 0; l < cols; ++l) {
        for (int k = 0; k < rows; ++k) {
            const std::size_t i = vec_index(rows, k, l);
            basis[0][i] = 1.0;
            basis[1][i] = static_cast<double>(l);
            basis[2][i] = static_cast<double>(k);
        }
    }
    return basis;
}

double estimate_noise_variance(const ImageGrid& img, const PixelMask& mask) {
    std::vector<double> diffs;
    for (int l = 0; l + 1 < img.cols; ++l) {
        for (int k = 0; k < img.rows; ++k) {
            if (mask.is_known(k, l) && mask.is_known(k, l + 1)) {
                diffs.push_back(std::fabs(img.at(k, l + 1) - img.at(k, l)));
            }
        }
    }
    if (diffs.empty()) return 0.0;
    std::nth_element(diffs.begin(), diffs.begin() + diffs.size() / 2, diffs.end());
    const double mad = diffs[diffs.size() / 2];
    // |d| ~ half-normal with std sqrt(2)*sigma_o; median = sqrt(2)*sigma_o*0.6745
    const double sigma = mad / (std::sqrt(2.0) * 0.6744897501960817);
    return sigma * sigma;
}

double estimate_perturbation_variance(const ImageGrid& img, const PixelMask& mask, int window, double sigma_o2) {
    const int radius = std::max(1, window / 2);
    std::vector<double> residual_vars;
    for (int l = radius; l < img.cols - radius; l += radius) {
        for (int k = radius; k < img.rows - radius; k += radius) {
            Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
            Eigen::Vector3d atb = Eigen::Vector3d::Zero();
            std::vector<std::pair<Eigen::Vector3d, double>> samples;
            for (int dc = -radius; dc <= radius; ++dc) {
                for (int dr = -radius; dr <= radius; ++dr) {
                    const int kk = k + dr, ll = l + dc;
                    if (!mask.is_known(kk, ll)) continue;
                    Eigen::Vector3d a(1.0, static_cast<double>(dc), static_cast<double>(dr));
                    const double v = img.at(kk, ll);
                    ata += a * a.transpose();
                    atb += a * v;
                    samples.emplace_back(a, v);
                }
            }
            if (samples.size() < 6) continue;
            const Eigen::Vector3d coef = ata.ldlt().solve(atb);
            double ss = 0.0;
            for (const auto& [a, v] : samples) {
                const double r = v - coef.dot(a);
                ss += r * r;
            }
            residual_vars.push_back(ss / static_cast<double>(samples.size() - 3));
        }
    }
    if (residual_vars.empty()) return 0.0;
    std::nth_element(residual_vars.begin(), residual_vars.begin() + residual_vars.size() / 2, residual_vars.end());
    return std::max(residual_vars[residual_vars.size() / 2] - sigma_o2, 1e-12);
}

double auto_mu(const ImageGrid& y, const PixelMask& mask, const SparseMatrix& lifted_sum, const SolveConfig& cfg) {
    SpectralSummary s;
    s.count = y.rows * y.cols;
    const ExtremeEigs eigs = extreme_eigenvalues(lifted_sum, planar_null_basis(y.rows, y.cols));
    s.lambda3 = eigs.lambda3;
    s.lambda_max = eigs.lambda_max;
    s.sigma_o2 = cfg.sigma_o2 >= 0.0 ? cfg.sigma_o2 : estimate_noise_variance(y, mask);
    s.sigma_p2 = cfg.sigma_p2 >= 0.0 ? cfg.sigma_p2 : estimate_perturbation_variance(y, mask, cfg.window, s.sigma_o2);
    if (s.lambda_max <= 0.0) return cfg.mu > 0.0 ? cfg.mu : 0.01;
    if (s.sigma_o2 <= 0.0 && s.sigma_p2 <= 0.0) return cfg.mu > 0.0 ? cfg.mu : 0.01;
    return optimal_mu(s, cfg.mu_min, cfg.mu_max);
}

}  // namespace gglr
