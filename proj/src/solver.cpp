#include "gglr/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "gglr/kernels.hpp"
#include "gglr/mu_select.hpp"
#include "gglr/structure_tensor.hpp"

namespace gglr {

void SolveConfig::validate() const {
    if (!(sigma > 0.0)) throw std::invalid_argument("config: sigma must be positive");
    if (!mu_auto && !(mu > 0.0)) throw std::invalid_argument("config: mu must be positive");
    if (window < 1 || window % 2 == 0) throw std::invalid_argument("config: window must be odd >= 1");
    if (connectivity != Connectivity::two && connectivity != Connectivity::four) {
        throw std::invalid_argument("config: connectivity must be 2 or 4");
    }
    if (!(cg_tol > 0.0) || !(outer_tol > 0.0)) throw std::invalid_argument("config: tolerances must be positive");
    if (cg_maxit < 0 || outer_maxit < 1) throw std::invalid_argument("config: iteration caps must be positive");
    if (mu_auto && !(mu_min > 0.0 && mu_min < mu_max)) {
        throw std::invalid_argument("config: invalid mu range");
    }
}

std::pair<SparseMatrix, std::vector<double>> assemble_system(const SparseMatrix& h, const SparseMatrix& lifted_h,
                                                             const SparseMatrix& lifted_v, double mu,
                                                             const std::vector<double>& y) {
    if (!(mu > 0.0)) throw std::invalid_argument("assemble_system: mu must be positive");
    if (static_cast<int>(y.size()) != h.rows()) throw std::invalid_argument("assemble_system: y/H dimension mismatch");
    const int n = h.cols();
    // HᵀH via the generic triple product with an identity core.
    SparseMatrix hth = sparse_triple_product(h, SparseMatrix::identity(h.rows()));
    hth.set_symmetric_hint(true);

    SparseMatrix reg(n, n);
    if (lifted_h.nnz() != 0 && lifted_v.nnz() != 0) {
        reg = sparse_add(lifted_h, lifted_v);
    } else if (lifted_h.nnz() != 0) {
        reg = lifted_h;
    } else if (lifted_v.nnz() != 0) {
        reg = lifted_v;
    }
    if (reg.rows() != n || reg.cols() != n) throw std::invalid_argument("assemble_system: laplacian dimension mismatch");

    SparseMatrix b_mat = sparse_add(hth, sparse_scale(reg, mu));
    b_mat.set_symmetric_hint(true);

    std::vector<double> b(static_cast<std::size_t>(n), 0.0);
    sparse_transpose(h).matvec_into(y.data(), b.data());
    return {std::move(b_mat), std::move(b)};
}

CgResult conjugate_gradient(const SparseMatrix& b_mat, const std::vector<double>& rhs,
                            const std::vector<double>& x0, double tol, long maxit,
                            const std::vector<double>* jacobi) {
    const int n = b_mat.rows();
    if (b_mat.cols() != n) throw std::invalid_argument("conjugate_gradient: matrix must be square");
    if (static_cast<int>(rhs.size()) != n || static_cast<int>(x0.size()) != n) {
        throw std::invalid_argument("conjugate_gradient: dimension mismatch");
    }
    if (!b_mat.symmetric_hint() && !is_symmetric(b_mat, 1e-12)) {
        throw std::invalid_argument("conjugate_gradient: matrix not symmetric");
    }
    if (jacobi != nullptr && static_cast<int>(jacobi->size()) != n) {
        throw std::invalid_argument("conjugate_gradient: preconditioner dimension mismatch");
    }

    CgResult res;
    res.x = x0;
    const std::size_t un = static_cast<std::size_t>(n);
    const double bnorm = kernels::nrm2(rhs.data(), un);
    if (bnorm == 0.0) {
        res.x.assign(un, 0.0);
        res.converged = true;
        return res;
    }
    if (!std::isfinite(bnorm)) throw std::runtime_error("numerical breakdown");

    double diag_scale = 0.0;
    {
        const auto rp = b_mat.row_ptr();
        const auto ci = b_mat.col_idx();
        const auto va = b_mat.values();
        for (int r = 0; r < n; ++r) {
            for (std::size_t k = rp[static_cast<std::size_t>(r)]; k < rp[static_cast<std::size_t>(r) + 1]; ++k) {
                if (ci[k] == r) diag_scale = std::max(diag_scale, std::fabs(va[k]));
            }
        }
        if (diag_scale == 0.0) diag_scale = 1.0;
    }

    std::vector<double> r(un), p(un), v(un), z;
    if (jacobi != nullptr) z.resize(un);

    auto apply_precond = [&](const std::vector<double>& src, std::vector<double>& dst) {
        for (std::size_t i = 0; i < un; ++i) {
            const double d = (*jacobi)[i];
            dst[i] = d > 0.0 ? src[i] / d : src[i];
        }
    };

    for (;;) {
        // (Re)start from the current iterate with a freshly computed residual.
        b_mat.matvec_into(res.x.data(), r.data());
        for (std::size_t i = 0; i < un; ++i) r[i] = rhs[i] - r[i];
        double rnorm = kernels::nrm2(r.data(), un);
        if (!std::isfinite(rnorm)) throw std::runtime_error("numerical breakdown");
        if (rnorm / bnorm <= tol) {
            res.converged = true;
            res.relative_residual = rnorm / bnorm;
            return res;
        }
        if (res.iterations >= maxit) {
            res.relative_residual = rnorm / bnorm;
            return res;
        }

        double rz;
        if (jacobi != nullptr) {
            apply_precond(r, z);
            p = z;
            rz = kernels::dot(r.data(), z.data(), un);
        } else {
            p = r;
            rz = kernels::dot(r.data(), r.data(), un);
        }

        while (res.iterations < maxit) {
            b_mat.matvec_into(p.data(), v.data());
            const double pv = kernels::dot(p.data(), v.data(), un);
            if (!std::isfinite(pv)) throw std::runtime_error("numerical breakdown");
            const double pp = kernels::dot(p.data(), p.data(), un);
            if (pv <= 1e-14 * diag_scale * pp) {
                // Direction with no curvature: the system matrix is singular
                // along p and the residual cannot be reduced further.
                res.breakdown = true;
                res.relative_residual = rnorm / bnorm;
                return res;
            }
            const double alpha = rz / pv;
            kernels::axpy(alpha, p.data(), res.x.data(), un);
            kernels::axpy(-alpha, v.data(), r.data(), un);
            res.iterations += 1;

            double rz_next;
            if (jacobi != nullptr) {
                apply_precond(r, z);
                rz_next = kernels::dot(r.data(), z.data(), un);
            } else {
                rz_next = kernels::dot(r.data(), r.data(), un);
            }
            if (!std::isfinite(rz_next)) throw std::runtime_error("numerical breakdown");
            rnorm = kernels::nrm2(r.data(), un);
            if (rnorm / bnorm <= tol) break;  // verify against the true residual above
            const double beta = rz_next / rz;
            rz = rz_next;
            kernels::xpby(jacobi != nullptr ? z.data() : r.data(), beta, p.data(), un);
        }
    }
}

namespace {

struct LiftedPair {
    SparseMatrix lh;
    SparseMatrix lv;
};

LiftedPair lift_from_fields(const SparseMatrix* fh, const SparseMatrix* fv, const GradientField& gh,
                            const GradientField& gv, const SolveConfig& cfg, int n_px) {
    LiftedPair out{SparseMatrix(n_px, n_px), SparseMatrix(n_px, n_px)};
    if (fh != nullptr) {
        const GradientGraph graph_h = build_gradient_graph(gh, cfg.connectivity, cfg.sigma);
        out.lh = lift_laplacian(*fh, graph_h.laplacian);
    }
    if (fv != nullptr) {
        const GradientGraph graph_v = build_gradient_graph(gv, cfg.connectivity, cfg.sigma);
        out.lv = lift_laplacian(*fv, graph_v.laplacian);
    }
    return out;
}

std::vector<double> jacobi_diagonal(const SparseMatrix& b_mat) {
    std::vector<double> d(static_cast<std::size_t>(b_mat.rows()), 0.0);
    const auto rp = b_mat.row_ptr();
    const auto ci = b_mat.col_idx();
    const auto va = b_mat.values();
    for (int r = 0; r < b_mat.rows(); ++r) {
        for (std::size_t k = rp[static_cast<std::size_t>(r)]; k < rp[static_cast<std::size_t>(r) + 1]; ++k) {
            if (ci[k] == r) d[static_cast<std::size_t>(r)] = va[k];
        }
    }
    return d;
}

double relative_change(const std::vector<double>& next, const std::vector<double>& prev) {
    std::vector<double> diff(next.size());
    for (std::size_t i = 0; i < next.size(); ++i) diff[i] = next[i] - prev[i];
    const double dp = kernels::nrm2(diff.data(), diff.size());
    const double pn = kernels::nrm2(prev.data(), prev.size());
    return pn > 0.0 ? dp / pn : dp;
}

enum class Method { gradient_graph, pixel_graph };

SolveReport run_outer_loop(const ImageGrid& y, const PixelMask& mask, const SolveConfig& cfg, Method method) {
    cfg.validate();
    if (y.rows != mask.rows || y.cols != mask.cols) {
        throw std::invalid_argument("interpolate: image/mask dimension mismatch");
    }
    const auto t0 = std::chrono::steady_clock::now();
    const int n_px = y.rows * y.cols;
    if (mask.known_count() == 0) throw std::runtime_error("no observations");

    const SparseMatrix h = selection_matrix(mask);
    const std::vector<double> y_known = gather_known(y, mask);
    const long cg_maxit = cfg.cg_maxit > 0 ? cfg.cg_maxit : 10L * n_px;

    // Zero-fill initial iterate: observed values at known pixels.
    std::vector<double> x(static_cast<std::size_t>(n_px), 0.0);
    for (int i = 0; i < n_px; ++i) {
        if (mask.known[static_cast<std::size_t>(i)]) x[static_cast<std::size_t>(i)] = y.values[static_cast<std::size_t>(i)];
    }

    const bool has_h = y.cols >= 2;
    const bool has_v = y.rows >= 2;
    SparseMatrix fh_mat, fv_mat;
    if (method == Method::gradient_graph) {
        if (has_h) fh_mat = gradient_operator(y.rows, y.cols, GradientDirection::horizontal);
        if (has_v) fv_mat = gradient_operator(y.rows, y.cols, GradientDirection::vertical);
    }
    const SparseMatrix* fh = has_h && method == Method::gradient_graph ? &fh_mat : nullptr;
    const SparseMatrix* fv = has_v && method == Method::gradient_graph ? &fv_mat : nullptr;

    SolveReport report;
    report.mu_used = cfg.mu;

    // The first weight set comes from structure-tensor estimates; afterwards
    // gradients are recomputed from the complete iterate.
    GradientField gh, gv;
    SparseMatrix pixel_lap;
    if (method == Method::gradient_graph) {
        auto fields = estimate_gradient_field(y, mask, cfg.window);
        gh = std::move(fields.first);
        gv = std::move(fields.second);
    } else {
        pixel_lap = build_grid_graph(y.rows, y.cols, x, Connectivity::four, GradientDirection::horizontal,
                                     cfg.sigma)
                        .laplacian;
    }

    SparseMatrix last_lh(n_px, n_px), last_lv(n_px, n_px);
    for (int outer = 0; outer < cfg.outer_maxit; ++outer) {
        LiftedPair lifted;
        if (method == Method::gradient_graph) {
            lifted = lift_from_fields(fh, fv, gh, gv, cfg, n_px);
        } else {
            lifted = LiftedPair{pixel_lap, SparseMatrix(n_px, n_px)};
        }

        if (outer == 0 && cfg.mu_auto) {
            report.mu_used = auto_mu(y, mask, sparse_add(lifted.lh, lifted.lv), cfg);
        }

        auto [b_mat, b] = assemble_system(h, lifted.lh, lifted.lv, report.mu_used, y_known);
        std::vector<double> jd;
        if (cfg.jacobi_precond) jd = jacobi_diagonal(b_mat);
        CgResult cg = conjugate_gradient(b_mat, b, x, cfg.cg_tol, cg_maxit,
                                         cfg.jacobi_precond ? &jd : nullptr);
        if (cg.breakdown && cg.relative_residual > cfg.cg_tol) {
            throw std::runtime_error("insufficient observations");
        }
        report.cg_iterations.push_back(cg.iterations);
        report.final_relative_residual = cg.relative_residual;
        report.cg_converged = cg.converged;
        report.outer_iterations = outer + 1;
        last_lh = std::move(lifted.lh);
        last_lv = std::move(lifted.lv);

        const double rel = relative_change(cg.x, x);
        x = std::move(cg.x);
        if (rel < cfg.outer_tol) {
            report.outer_converged = true;
            break;
        }
        if (outer + 1 == cfg.outer_maxit) break;

        const ImageGrid current = devectorize(y.rows, y.cols, x);
        if (method == Method::gradient_graph) {
            if (has_h) gh = image_gradients(current, GradientDirection::horizontal);
            if (has_v) gv = image_gradients(current, GradientDirection::vertical);
        } else {
            pixel_lap = build_grid_graph(y.rows, y.cols, x, Connectivity::four, GradientDirection::horizontal,
                                         cfg.sigma)
                            .laplacian;
        }
    }

    report.regularizer_value = gglr_value(x, last_lh, last_lv);
    report.restored = devectorize(y.rows, y.cols, x);
    report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace

SolveReport interpolate(const ImageGrid& y, const PixelMask& mask, const SolveConfig& cfg) {
    return run_outer_loop(y, mask, cfg, Method::gradient_graph);
}

SolveReport glr_interpolate(const ImageGrid& y, const PixelMask& mask, const SolveConfig& cfg) {
    return run_outer_loop(y, mask, cfg, Method::pixel_graph);
}

}  // namespace gglr
