// Command-line driver: experiment runner plus standalone phantom/projection/
// denoising utilities and the self-check battery.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sgdtheta/checks.hpp"
#include "sgdtheta/experiment.hpp"
#include "sgdtheta/io.hpp"
#include "sgdtheta/solver.hpp"
#include "sgdtheta/version.hpp"

namespace {

using namespace sgdtheta;

int cmd_run(const std::string& config_path, bool force, bool timings,
            const std::string& out_override, bool has_seed, std::uint64_t seed,
            bool has_stride, std::uint64_t stride) {
    ExperimentConfig cfg = ExperimentConfig::parse_file(config_path);
    if (!out_override.empty()) {
        cfg.out_dir = out_override;
    } else if (const char* env = std::getenv("SGDTHETA_OUT"); env && *env) {
        cfg.out_dir = env;
    }
    if (has_seed) cfg.solver.seed = seed;
    if (has_stride) cfg.solver.telemetry_stride = stride;

    ExperimentOptions opt;
    opt.force = force;
    opt.with_timings = timings;
    const ExperimentOutcome outcome = run_experiment(cfg, opt);

    std::cout << "admissibility: " << outcome.admissibility.summary() << "\n";
    for (const MethodOutcome& mo : outcome.methods) {
        std::cout << mo.name << ": " << mo.iterations << " iterations, rel_error "
                  << mo.final_rel_error << (mo.stopped_by_discrepancy ? ", stopped by discrepancy" : "")
                  << (mo.not_converged ? ", NOT converged" : "") << " -> " << mo.csv_path << "\n";
    }
    std::cout << "manifest: " << outcome.manifest_path << "\n";
    return 0;
}

int cmd_check(std::uint64_t seed) {
    const std::vector<CheckResult> results = run_all_checks(seed);
    bool all_pass = true;
    for (const CheckResult& r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": measured " << r.measured
                  << " (tolerance " << r.tolerance << ")" << (r.note.empty() ? "" : " " + r.note)
                  << "\n";
        all_pass = all_pass && r.pass;
    }
    // Admissibility constant of the shipped CT default parameter set.
    SolverConfig def;
    const AdmissibilityReport rep = check_admissibility(def, 0.5);
    std::cout << (rep.pass ? "[PASS] " : "[FAIL] ")
              << "admissibility of default CT config (mu0=0.18, tau=1.1): c0 = " << rep.c0 << "\n";
    all_pass = all_pass && rep.pass;
    return all_pass ? 0 : 1;
}

int cmd_phantom(std::size_t n, const std::string& out) {
    const Vector img = shepp_logan(n);
    write_image_f64(out, img, GridShape{n, n}, {{"role", "phantom"}});
    write_pgm_preview(out + ".pgm", img, GridShape{n, n});
    std::cout << "wrote " << out << " (" << n << "x" << n << ")\n";
    return 0;
}

int cmd_project(const std::string& image_path, std::size_t angles, std::size_t lines,
                const std::string& out, const std::string& matrix_out) {
    GridShape grid;
    const Vector img = read_image_f64(image_path, grid);
    if (grid.rows != grid.cols) throw DimensionError("project: image must be square");

    std::vector<double> angle_list(angles);
    for (std::size_t k = 0; k < angles; ++k)
        angle_list[k] = 180.0 * static_cast<double>(k + 1) / static_cast<double>(angles);
    const SparseRowBlock F = build_parallel_tomo(grid.rows, angle_list, lines);

    const Vector sino = radon_row_apply(F, 0, F.rows, img);
    write_image_f64(out, sino, GridShape{angles, lines}, {{"role", "sinogram"}});
    write_pgm_preview(out + ".pgm", sino, GridShape{angles, lines});
    if (!matrix_out.empty()) {
        if (matrix_out.size() > 4 && matrix_out.substr(matrix_out.size() - 4) == ".mtx")
            write_matrix_market(matrix_out, F);
        else
            write_sparse_binary(matrix_out, F);
        std::cout << "wrote operator " << matrix_out << " (" << F.rows << "x" << F.cols << ", nnz "
                  << F.nnz() << ")\n";
    }
    std::cout << "wrote " << out << " (" << angles << "x" << lines << ")\n";
    return 0;
}

int cmd_denoise_tv(const std::string& image_path, double beta, const std::string& out,
                   double gap_tol, std::size_t max_iters) {
    GridShape grid;
    const Vector img = read_image_f64(image_path, grid);
    PdhgConfig cfg;
    cfg.gap_tol = gap_tol;
    cfg.max_iters = max_iters;
    const Vector z = tv_denoise_pdhg(img, grid, beta, cfg);
    write_image_f64(out, z, grid, {{"role", "tv_denoised"}});
    write_pgm_preview(out + ".pgm", z, grid);
    std::cout << "wrote " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SGD with convex penalty for ill-posed systems: experiment harness"};
    app.set_version_flag("--version", sgdtheta::kVersion);
    app.require_subcommand(1);

    // run
    std::string config_path, out_override;
    bool force = false, timings = false;
    std::uint64_t seed = 0, stride = 0;
    auto* run = app.add_subcommand("run", "run a configured experiment");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_flag("--force", force, "run even if the admissibility check fails");
    run->add_flag("--timings", timings, "write wall-clock times into CSVs (not byte-reproducible)");
    run->add_option("--out", out_override, "output directory override");
    auto* seed_opt = run->add_option("--seed", seed, "solver seed override");
    auto* stride_opt = run->add_option("--stride", stride, "telemetry stride override");

    // check
    std::uint64_t check_seed = 20240100;
    auto* check = app.add_subcommand("check", "run the verification batteries");
    check->add_option("--seed", check_seed, "seed for the randomized batteries");

    // phantom
    std::size_t phantom_n = 64;
    std::string phantom_out = "phantom.f64";
    auto* phantom = app.add_subcommand("phantom", "write the Shepp-Logan phantom");
    phantom->add_option("n", phantom_n, "grid size")->required();
    phantom->add_option("--out", phantom_out, "output image path");

    // project
    std::string proj_image, proj_out = "sinogram.f64", proj_matrix;
    std::size_t proj_angles = 45, proj_lines = 64;
    auto* project = app.add_subcommand("project", "apply the parallel-beam projector to an image");
    project->add_option("--image", proj_image, "input f64 image")->required();
    project->add_option("--angles", proj_angles, "projection count");
    project->add_option("--lines", proj_lines, "detector lines per angle");
    project->add_option("--out", proj_out, "output sinogram path");
    project->add_option("--matrix", proj_matrix, "also export the sparse operator (.mtx = Matrix Market)");

    // denoise-tv
    std::string tv_image, tv_out = "denoised.f64";
    double tv_beta = 5.0, tv_gap = 1e-3;
    std::size_t tv_iters = 200;
    auto* denoise = app.add_subcommand("denoise-tv", "TV-denoise an image by PDHG");
    denoise->add_option("--image", tv_image, "input f64 image")->required();
    denoise->add_option("--beta", tv_beta, "TV weight beta");
    denoise->add_option("--out", tv_out, "output image path");
    denoise->add_option("--gap-tol", tv_gap, "relative duality gap tolerance");
    denoise->add_option("--max-iters", tv_iters, "PDHG iteration cap");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_path, force, timings, out_override, seed_opt->count() > 0, seed,
                           stride_opt->count() > 0, stride);
        if (check->parsed()) return cmd_check(check_seed);
        if (phantom->parsed()) return cmd_phantom(phantom_n, phantom_out);
        if (project->parsed())
            return cmd_project(proj_image, proj_angles, proj_lines, proj_out, proj_matrix);
        if (denoise->parsed()) return cmd_denoise_tv(tv_image, tv_beta, tv_out, tv_gap, tv_iters);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
