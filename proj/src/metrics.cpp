#include "gglr/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace gglr {

namespace {

void check_same_dims(const ImageGrid& a, const ImageGrid& b, const char* what) {
    if (a.rows != b.rows || a.cols != b.cols) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    }
}

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::array<double, kSsimWindow> gaussian_taps() {
    std::array<double, kSsimWindow> w{};
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
        const double d = i - kSsimWindow / 2;
        w[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
        sum += w[static_cast<std::size_t>(i)];
    }
    for (double& v : w) v /= sum;
    return w;
}

// Separable valid-region Gaussian filter of a column-major raster.
std::vector<double> gauss_filter(const std::vector<double>& src, int rows, int cols) {
    const auto taps = gaussian_taps();
    const int vrows = rows - kSsimWindow + 1;
    const int vcols = cols - kSsimWindow + 1;
    std::vector<double> tmp(static_cast<std::size_t>(vrows) * static_cast<std::size_t>(cols));
    for (int l = 0; l < cols; ++l) {
        for (int k = 0; k < vrows; ++k) {
            double s = 0.0;
            for (int t = 0; t < kSsimWindow; ++t) s += taps[static_cast<std::size_t>(t)] * src[vec_index(rows, k + t, l)];
            tmp[vec_index(vrows, k, l)] = s;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(vrows) * static_cast<std::size_t>(vcols));
    for (int l = 0; l < vcols; ++l) {
        for (int k = 0; k < vrows; ++k) {
            double s = 0.0;
            for (int t = 0; t < kSsimWindow; ++t) s += taps[static_cast<std::size_t>(t)] * tmp[vec_index(vrows, k, l + t)];
            out[vec_index(vrows, k, l)] = s;
        }
    }
    return out;
}

}  // namespace

double psnr(const ImageGrid& reference, const ImageGrid& test) {
    check_same_dims(reference, test, "psnr");
    double se = 0.0;
    for (std::size_t i = 0; i < reference.values.size(); ++i) {
        const double d = reference.values[i] - test.values[i];
        se += d * d;
    }
    const double mse = se / static_cast<double>(reference.values.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

double ssim(const ImageGrid& reference, const ImageGrid& test) {
    check_same_dims(reference, test, "ssim");
    if (reference.rows < kSsimWindow || reference.cols < kSsimWindow) {
        throw std::invalid_argument("ssim: images must be at least 11x11");
    }
    const int rows = reference.rows, cols = reference.cols;
    const std::size_t n = reference.values.size();
    std::vector<double> xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        xx[i] = reference.values[i] * reference.values[i];
        yy[i] = test.values[i] * test.values[i];
        xy[i] = reference.values[i] * test.values[i];
    }
    const auto mu_x = gauss_filter(reference.values, rows, cols);
    const auto mu_y = gauss_filter(test.values, rows, cols);
    const auto s_xx = gauss_filter(xx, rows, cols);
    const auto s_yy = gauss_filter(yy, rows, cols);
    const auto s_xy = gauss_filter(xy, rows, cols);

    double acc = 0.0;
    for (std::size_t i = 0; i < mu_x.size(); ++i) {
        const double mx = mu_x[i], my = mu_y[i];
        const double vx = s_xx[i] - mx * mx;
        const double vy = s_yy[i] - my * my;
        const double cxy = s_xy[i] - mx * my;
        const double num = (2.0 * mx * my + kC1) * (2.0 * cxy + kC2);
        const double den = (mx * mx + my * my + kC1) * (vx + vy + kC2);
        acc += num / den;
    }
    return acc / static_cast<double>(mu_x.size());
}

}  // namespace gglr
