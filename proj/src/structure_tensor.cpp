#include "gglr/structure_tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace gglr {

GradientField observable_gradients(const ImageGrid& img, const PixelMask& mask, GradientDirection dir) {
    if (img.rows != mask.rows || img.cols != mask.cols) {
        throw std::invalid_argument("observable_gradients: image/mask dimension mismatch");
    }
    GradientField f = GradientField::zero(dir, img.rows, img.cols);
    for (int l = 0; l < f.cols; ++l) {
        for (int k = 0; k < f.rows; ++k) {
            const bool horizontal = dir == GradientDirection::horizontal;
            const int nk = horizontal ? k : k + 1;
            const int nl = horizontal ? l + 1 : l;
            const std::size_t node = vec_index(f.rows, k, l);
            if (mask.is_known(k, l) && mask.is_known(nk, nl)) {
                f.values[node] = img.at(nk, nl) - img.at(k, l);
                f.valid[node] = 1;
            } else {
                f.values[node] = 0.0;
                f.valid[node] = 0;
            }
        }
    }
    return f;
}

namespace {

struct WindowSums {
    double shh = 0.0, shv = 0.0, svv = 0.0;
    double sum_h = 0.0, sum_v = 0.0;
    int count = 0;
};

// Accumulates tensor products over window offsets. gh or gv may be null for
// degenerate single-row/column images; the missing direction contributes 0.
WindowSums accumulate_window(int pk, int pl, const GradientField* gh, const GradientField* gv, int window) {
    const int radius = window / 2;
    WindowSums s;
    for (int dc = -radius; dc <= radius; ++dc) {
        for (int dr = -radius; dr <= radius; ++dr) {
            const int k = pk + dr;
            const int l = pl + dc;
            double h = 0.0, v = 0.0;
            if (gh != nullptr) {
                if (k < 0 || k >= gh->rows || l < 0 || l >= gh->cols || !gh->is_valid(k, l)) continue;
                h = gh->at(k, l);
            }
            if (gv != nullptr) {
                if (k < 0 || k >= gv->rows || l < 0 || l >= gv->cols || !gv->is_valid(k, l)) continue;
                v = gv->at(k, l);
            }
            s.shh += h * h;
            s.shv += h * v;
            s.svv += v * v;
            s.sum_h += h;
            s.sum_v += v;
            s.count += 1;
        }
    }
    return s;
}

StructureTensor tensor_from_sums(const WindowSums& s) {
    StructureTensor t;
    if (s.count == 0) return t;
    t.shh = s.shh / s.count;
    t.shv = s.shv / s.count;
    t.svv = s.svv / s.count;
    t.samples = s.count;
    return t;
}

}  // namespace

StructureTensor structure_tensor_at(int pk, int pl, const GradientField& gh, const GradientField& gv, int window) {
    if (window < 1 || window % 2 == 0) throw std::invalid_argument("structure_tensor_at: window must be odd >= 1");
    return tensor_from_sums(accumulate_window(pk, pl, &gh, &gv, window));
}

GradientEstimate dominant_gradient(const StructureTensor& s, double mean_gh, double mean_gv) {
    GradientEstimate out;
    if (s.samples == 0 || (s.shh == 0.0 && s.shv == 0.0 && s.svv == 0.0)) return out;

    const double trace = s.shh + s.svv;
    const double diff = s.shh - s.svv;
    const double disc = std::sqrt(diff * diff + 4.0 * s.shv * s.shv);
    const double lambda_max = 0.5 * (trace + disc);
    if (lambda_max <= 0.0) return out;

    double eh, ev;
    if (s.shv != 0.0) {
        // (lambda_max - shh) pairs with shv; pick the component ordering with
        // the larger pivot for stability.
        if (s.shh >= s.svv) {
            eh = lambda_max - s.svv;
            ev = s.shv;
        } else {
            eh = s.shv;
            ev = lambda_max - s.shh;
        }
    } else {
        eh = s.shh >= s.svv ? 1.0 : 0.0;
        ev = s.shh >= s.svv ? 0.0 : 1.0;
    }
    const double norm = std::sqrt(eh * eh + ev * ev);
    if (norm == 0.0) return out;
    const double scale = std::sqrt(lambda_max) / norm;
    out.gh = eh * scale;
    out.gv = ev * scale;

    const double align = out.gh * mean_gh + out.gv * mean_gv;
    bool flip = false;
    if (align < 0.0) {
        flip = true;
    } else if (align == 0.0) {
        if (out.gh < 0.0) {
            flip = true;
        } else if (out.gh == 0.0 && out.gv < 0.0) {
            flip = true;
        }
    }
    if (flip) {
        out.gh = -out.gh;
        out.gv = -out.gv;
    }
    return out;
}

std::pair<GradientField, GradientField> estimate_gradient_field(const ImageGrid& img, const PixelMask& mask,
                                                                int window) {
    if (window < 1 || window % 2 == 0) throw std::invalid_argument("estimate_gradient_field: window must be odd >= 1");
    const bool has_h = img.cols >= 2;
    const bool has_v = img.rows >= 2;
    if (!has_h && !has_v) throw std::invalid_argument("estimate_gradient_field: image too small");

    GradientField obs_h, obs_v;
    if (has_h) obs_h = observable_gradients(img, mask, GradientDirection::horizontal);
    if (has_v) obs_v = observable_gradients(img, mask, GradientDirection::vertical);
    const GradientField* ph = has_h ? &obs_h : nullptr;
    const GradientField* pv = has_v ? &obs_v : nullptr;

    GradientField out_h = obs_h;
    GradientField out_v = obs_v;

    // Each non-observable node takes the tensor estimate anchored at its
    // base pixel. Nodes are independent; the loop order never affects the
    // values.
    if (has_h) {
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out_h.size());
#pragma omp parallel for schedule(static) if (n >= 1024)
        for (std::ptrdiff_t node = 0; node < n; ++node) {
            if (obs_h.valid[static_cast<std::size_t>(node)]) continue;
            const int k = static_cast<int>(node % out_h.rows);
            const int l = static_cast<int>(node / out_h.rows);
            const WindowSums s = accumulate_window(k, l, ph, pv, window);
            const StructureTensor t = tensor_from_sums(s);
            const GradientEstimate e =
                s.count > 0 ? dominant_gradient(t, s.sum_h / s.count, s.sum_v / s.count) : GradientEstimate{};
            out_h.values[static_cast<std::size_t>(node)] = e.gh;
            out_h.valid[static_cast<std::size_t>(node)] = 1;
        }
    }
    if (has_v) {
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out_v.size());
#pragma omp parallel for schedule(static) if (n >= 1024)
        for (std::ptrdiff_t node = 0; node < n; ++node) {
            if (obs_v.valid[static_cast<std::size_t>(node)]) continue;
            const int k = static_cast<int>(node % out_v.rows);
            const int l = static_cast<int>(node / out_v.rows);
            const WindowSums s = accumulate_window(k, l, ph, pv, window);
            const StructureTensor t = tensor_from_sums(s);
            const GradientEstimate e =
                s.count > 0 ? dominant_gradient(t, s.sum_h / s.count, s.sum_v / s.count) : GradientEstimate{};
            out_v.values[static_cast<std::size_t>(node)] = e.gv;
            out_v.valid[static_cast<std::size_t>(node)] = 1;
        }
    }
    if (!has_h) out_h = GradientField{};
    if (!has_v) out_v = GradientField{};
    return {std::move(out_h), std::move(out_v)};
}

}  // namespace gglr
