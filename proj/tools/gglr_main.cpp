// Command-line front end: degrade / interpolate / eval / bench / mu-select.
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "gglr/degrade.hpp"
#include "gglr/gradient_graph.hpp"
#include "gglr/metrics.hpp"
#include "gglr/mu_select.hpp"
#include "gglr/pnm_io.hpp"
#include "gglr/solver.hpp"
#include "gglr/structure_tensor.hpp"

namespace {

using nlohmann::json;

std::string format_fixed(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

json metric_json(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    return json(v);
}

struct SolverFlags {
    double sigma = 0.68;
    std::string mu = "0.01";
    int window = 5;
    int connectivity = 4;
    double cg_tol = 1e-8;
    long cg_maxit = 0;
    double outer_tol = 1e-4;
    int outer_maxit = 10;
    bool jacobi = false;
    double sigma_p2 = -1.0;
    double sigma_o2 = -1.0;
    double mu_min = 1e-6;
    double mu_max = 1e3;

    void attach(CLI::App* cmd) {
        cmd->add_option("--sigma", sigma, "Gradient-difference weight bandwidth")
            ->envname("GGLR_SIGMA")
            ->capture_default_str();
        cmd->add_option("--mu", mu, "Regularization weight, or 'auto'")->envname("GGLR_MU")->capture_default_str();
        cmd->add_option("--window", window, "Structure-tensor window (odd)")
            ->envname("GGLR_WINDOW")
            ->capture_default_str();
        cmd->add_option("--connectivity", connectivity, "Gradient-graph connectivity (2 or 4)")
            ->envname("GGLR_CONNECTIVITY")
            ->capture_default_str();
        cmd->add_option("--cg-tol", cg_tol, "CG relative residual tolerance")->capture_default_str();
        cmd->add_option("--cg-maxit", cg_maxit, "CG iteration cap (0 = 10*M*N)")->capture_default_str();
        cmd->add_option("--outer-tol", outer_tol, "Outer-loop relative change tolerance")->capture_default_str();
        cmd->add_option("--outer-maxit", outer_maxit, "Outer-loop iteration cap")->capture_default_str();
        cmd->add_flag("--jacobi", jacobi, "Use a diagonal (Jacobi) preconditioner in CG");
        cmd->add_option("--sigma-p2", sigma_p2, "Planar-deviation variance for --mu auto (<0: estimate)");
        cmd->add_option("--sigma-o2", sigma_o2, "Observation noise variance for --mu auto (<0: estimate)");
        cmd->add_option("--mu-min", mu_min, "Lower end of the auto-mu search range")->capture_default_str();
        cmd->add_option("--mu-max", mu_max, "Upper end of the auto-mu search range")->capture_default_str();
    }

    gglr::SolveConfig to_config() const {
        gglr::SolveConfig cfg;
        cfg.sigma = sigma;
        if (mu == "auto") {
            cfg.mu_auto = true;
            cfg.mu = 0.01;
        } else {
            cfg.mu = std::stod(mu);
        }
        cfg.window = window;
        cfg.connectivity = connectivity == 2 ? gglr::Connectivity::two : gglr::Connectivity::four;
        if (connectivity != 2 && connectivity != 4) throw CLI::ValidationError("--connectivity must be 2 or 4");
        cfg.cg_tol = cg_tol;
        cfg.cg_maxit = cg_maxit;
        cfg.outer_tol = outer_tol;
        cfg.outer_maxit = outer_maxit;
        cfg.jacobi_precond = jacobi;
        cfg.sigma_p2 = sigma_p2;
        cfg.sigma_o2 = sigma_o2;
        cfg.mu_min = mu_min;
        cfg.mu_max = mu_max;
        return cfg;
    }
};

json report_json(const gglr::SolveReport& rep, const std::string& method, const gglr::SolveConfig& cfg) {
    json j;
    j["method"] = method;
    j["rows"] = rep.restored.rows;
    j["cols"] = rep.restored.cols;
    j["sigma"] = cfg.sigma;
    j["mu"] = rep.mu_used;
    j["window"] = cfg.window;
    j["connectivity"] = static_cast<int>(cfg.connectivity);
    j["outer_iterations"] = rep.outer_iterations;
    j["cg_iterations"] = rep.cg_iterations;
    j["final_relative_residual"] = rep.final_relative_residual;
    j["regularizer_value"] = rep.regularizer_value;
    j["wall_time_s"] = rep.wall_time_s;
    j["outer_converged"] = rep.outer_converged;
    j["cg_converged"] = rep.cg_converged;
    return j;
}

// Per-task mask seed: a fixed splitmix64 mix of the base seed with the image
// and fraction indices. All methods see the same mask for a given pair.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = base ^ (a * 0x9e3779b97f4a7c15ULL) ^ (b * 0xc2b2ae3d27d4eb4fULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

int run_degrade(const std::string& in, double fraction, std::uint64_t seed, const std::string& out_mask,
                const std::string& out_img) {
    const gglr::ImageGrid img = gglr::read_pgm(in);
    const gglr::PixelMask mask = gglr::random_mask(img.rows, img.cols, fraction, seed);
    gglr::write_pbm_mask(out_mask, mask);
    gglr::write_pgm(out_img, gglr::zero_fill(img, mask));
    return 0;
}

int run_interpolate(const std::string& in, const std::string& mask_path, const std::string& method,
                    const SolverFlags& flags, const std::string& out, const std::string& report_path) {
    const gglr::ImageGrid degraded = gglr::read_pgm(in);
    const gglr::PixelMask mask = gglr::read_pbm_mask(mask_path);
    const gglr::SolveConfig cfg = flags.to_config();
    const gglr::SolveReport rep =
        method == "glr" ? gglr::glr_interpolate(degraded, mask, cfg) : gglr::interpolate(degraded, mask, cfg);
    gglr::write_pgm(out, rep.restored);
    if (!report_path.empty()) {
        std::ofstream rf(report_path);
        if (!rf) throw std::runtime_error(report_path + ": cannot open for writing");
        rf << report_json(rep, method, cfg).dump(2) << "\n";
    }
    return 0;
}

int run_eval(const std::string& ref_path, const std::string& test_path, bool as_json) {
    const gglr::ImageGrid ref = gglr::read_pgm(ref_path);
    const gglr::ImageGrid test = gglr::read_pgm(test_path);
    const double p = gglr::psnr(ref, test);
    const double s = gglr::ssim(ref, test);
    if (as_json) {
        json j;
        j["psnr_db"] = metric_json(p);
        j["ssim"] = s;
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "psnr_db " << format_fixed(p) << "\n";
        std::cout << "ssim " << format_fixed(s) << "\n";
    }
    return 0;
}

int run_bench(const std::string& dir, const std::vector<double>& fractions, const std::vector<std::string>& methods,
              std::uint64_t seed, const SolverFlags& flags, const std::string& out_path, bool measure_runtime) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".pgm") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error(dir + ": no .pgm images");
    for (const auto& m : methods) {
        if (m != "gglr2" && m != "gglr4" && m != "glr") {
            throw std::runtime_error("unknown method '" + m + "' (expected gglr2, gglr4 or glr)");
        }
    }

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error(out_path + ": cannot open for writing");
    out << "image,fraction,method,psnr_db,ssim,runtime_s\n";

    for (std::size_t fi = 0; fi < files.size(); ++fi) {
        const gglr::ImageGrid ref = gglr::read_pgm(files[fi].string());
        for (std::size_t ri = 0; ri < fractions.size(); ++ri) {
            const gglr::PixelMask mask =
                gglr::random_mask(ref.rows, ref.cols, fractions[ri], mix_seed(seed, fi, ri));
            const gglr::ImageGrid degraded = gglr::zero_fill(ref, mask);
            for (const std::string& method : methods) {
                gglr::SolveConfig cfg = flags.to_config();
                if (method == "gglr2") cfg.connectivity = gglr::Connectivity::two;
                if (method == "gglr4") cfg.connectivity = gglr::Connectivity::four;
                const auto t0 = std::chrono::steady_clock::now();
                const gglr::SolveReport rep = method == "glr" ? gglr::glr_interpolate(degraded, mask, cfg)
                                                              : gglr::interpolate(degraded, mask, cfg);
                const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                // Restored intensities are clamped exactly as PGM output would be.
                gglr::ImageGrid clamped = rep.restored;
                for (double& v : clamped.values) v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
                char frac[32];
                std::snprintf(frac, sizeof(frac), "%g", fractions[ri]);
                out << files[fi].stem().string() << "," << frac << "," << method << ","
                    << format_fixed(gglr::psnr(ref, clamped)) << "," << format_fixed(gglr::ssim(ref, clamped)) << ","
                    << format_fixed(measure_runtime ? elapsed : 0.0) << "\n";
            }
        }
    }
    return 0;
}

int run_mu_select(const std::string& in, const std::string& mask_path, const SolverFlags& flags) {
    const gglr::ImageGrid degraded = gglr::read_pgm(in);
    const gglr::PixelMask mask = gglr::read_pbm_mask(mask_path);
    gglr::SolveConfig cfg = flags.to_config();
    cfg.mu_auto = true;

    const auto [gh, gv] = gglr::estimate_gradient_field(degraded, mask, cfg.window);
    const int n = degraded.rows * degraded.cols;
    gglr::SparseMatrix sum(n, n);
    if (degraded.cols >= 2) {
        const auto fh = gglr::gradient_operator(degraded.rows, degraded.cols, gglr::GradientDirection::horizontal);
        sum = gglr::sparse_add(sum, gglr::lift_laplacian(fh, gglr::build_gradient_graph(gh, cfg.connectivity,
                                                                                        cfg.sigma)
                                                                 .laplacian));
    }
    if (degraded.rows >= 2) {
        const auto fv = gglr::gradient_operator(degraded.rows, degraded.cols, gglr::GradientDirection::vertical);
        sum = gglr::sparse_add(sum, gglr::lift_laplacian(fv, gglr::build_gradient_graph(gv, cfg.connectivity,
                                                                                        cfg.sigma)
                                                                 .laplacian));
    }

    const auto eigs = gglr::extreme_eigenvalues(sum, gglr::planar_null_basis(degraded.rows, degraded.cols));
    const double so2 = cfg.sigma_o2 >= 0.0 ? cfg.sigma_o2 : gglr::estimate_noise_variance(degraded, mask);
    const double sp2 =
        cfg.sigma_p2 >= 0.0 ? cfg.sigma_p2 : gglr::estimate_perturbation_variance(degraded, mask, cfg.window, so2);
    gglr::SpectralSummary summary{n, eigs.lambda3, eigs.lambda_max, sp2, so2};
    const double mu_star = gglr::optimal_mu(summary, cfg.mu_min, cfg.mu_max);

    std::cout << "lambda3 " << eigs.lambda3 << "\n";
    std::cout << "lambda_max " << eigs.lambda_max << "\n";
    std::cout << "sigma_p2 " << sp2 << "\n";
    std::cout << "sigma_o2 " << so2 << "\n";
    std::cout << "mu_star " << mu_star << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Image interpolation by gradient-graph Laplacian regularization"};
    app.require_subcommand(1);

    // degrade
    auto* degrade = app.add_subcommand("degrade", "Drop random pixels from an image");
    std::string d_in, d_out_mask, d_out_img;
    double d_fraction = 0.9;
    std::uint64_t d_seed = 0;
    degrade->add_option("--in", d_in, "Input PGM")->required();
    degrade->add_option("--fraction", d_fraction, "Missing-pixel fraction")->capture_default_str();
    degrade->add_option("--seed", d_seed, "Mask seed")->capture_default_str();
    degrade->add_option("--out-mask", d_out_mask, "Output PBM mask (set bit = missing)")->required();
    degrade->add_option("--out-img", d_out_img, "Output degraded PGM (missing pixels zeroed)")->required();

    // interpolate
    auto* interp = app.add_subcommand("interpolate", "Restore missing pixels");
    std::string i_in, i_mask, i_out, i_report, i_method = "gglr";
    SolverFlags i_flags;
    interp->add_option("--in", i_in, "Degraded PGM")->required();
    interp->add_option("--mask", i_mask, "PBM mask")->required();
    interp->add_option("--method", i_method, "gglr or glr")->capture_default_str();
    interp->add_option("--out", i_out, "Restored PGM")->required();
    interp->add_option("--report", i_report, "Optional JSON solve report");
    i_flags.attach(interp);

    // eval
    auto* eval = app.add_subcommand("eval", "PSNR/SSIM of a restored image");
    std::string e_ref, e_test;
    bool e_json = false;
    eval->add_option("--ref", e_ref, "Reference PGM")->required();
    eval->add_option("--test", e_test, "Test PGM")->required();
    eval->add_flag("--json", e_json, "Emit a JSON object");

    // bench
    auto* bench = app.add_subcommand("bench", "Batch protocol over a directory of PGM images");
    std::string b_dir, b_out;
    std::vector<double> b_fractions{0.90, 0.95, 0.98, 0.99};
    std::vector<std::string> b_methods{"gglr2", "gglr4", "glr"};
    std::uint64_t b_seed = 0;
    bool b_measure = false;
    SolverFlags b_flags;
    bench->add_option("--dir", b_dir, "Image directory")->required();
    bench->add_option("--fractions", b_fractions, "Missing fractions")->delimiter(',')->capture_default_str();
    bench->add_option("--methods", b_methods, "Methods: gglr2,gglr4,glr")->delimiter(',')->capture_default_str();
    bench->add_option("--seed", b_seed, "Base mask seed")->capture_default_str();
    bench->add_option("--out", b_out, "Output CSV")->required();
    bench->add_flag("--measure-runtime", b_measure,
                    "Fill runtime_s with wall time (CSV is no longer byte-reproducible)");
    b_flags.attach(bench);

    // mu-select
    auto* mu = app.add_subcommand("mu-select", "Bound-minimizing regularization weight");
    std::string m_in, m_mask;
    SolverFlags m_flags;
    mu->add_option("--lap-from", m_in, "Degraded PGM the Laplacian is built from")->required();
    mu->add_option("--mask", m_mask, "PBM mask")->required();
    m_flags.attach(mu);

    CLI11_PARSE(app, argc, argv);

    try {
        if (degrade->parsed()) return run_degrade(d_in, d_fraction, d_seed, d_out_mask, d_out_img);
        if (interp->parsed()) {
            if (i_method != "gglr" && i_method != "glr") throw std::runtime_error("--method must be gglr or glr");
            return run_interpolate(i_in, i_mask, i_method, i_flags, i_out, i_report);
        }
        if (eval->parsed()) return run_eval(e_ref, e_test, e_json);
        if (bench->parsed()) return run_bench(b_dir, b_fractions, b_methods, b_seed, b_flags, b_out, b_measure);
        if (mu->parsed()) return run_mu_select(m_in, m_mask, m_flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
