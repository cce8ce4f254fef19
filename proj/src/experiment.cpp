#include "sgdtheta/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "sgdtheta/io.hpp"
#include "sgdtheta/version.hpp"

namespace sgdtheta {

Vector piecewise_phantom(std::size_t n) {
    if (n < 8) throw DimensionError("piecewise_phantom: grid size must be >= 8");
    Vector img(n * n, 0.0);
    const double step = 2.0 / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double y = 1.0 - static_cast<double>(i) * step;
        for (std::size_t j = 0; j < n; ++j) {
            const double x = -1.0 + static_cast<double>(j) * step;
            double v = 0.0;
            const double d1 = (x + 0.25) * (x + 0.25) + (y - 0.15) * (y - 0.15);
            if (d1 <= 0.40 * 0.40) v = 1.0;
            const double d2 = (x - 0.38) * (x - 0.38) + (y + 0.32) * (y + 0.32);
            if (d2 <= 0.22 * 0.22) v = 0.5;
            if (x >= -0.55 && x <= -0.15 && y >= -0.6 && y <= -0.35) v = 0.75;
            img[i * n + j] = v;
        }
    }
    return img;
}

namespace {

struct Problem {
    std::shared_ptr<const ForwardOperatorFamily> family;
    Vector truth;
    DualVector xi0;
    GridShape image_grid;
};

Problem build_problem(const ExperimentConfig& cfg) {
    Problem prob;
    prob.image_grid = GridShape{cfg.grid, cfg.grid};
    if (cfg.problem == ProblemKind::Ct) {
        prob.truth = shepp_logan(cfg.grid);
        prob.family =
            std::make_shared<CtRowFamily>(build_parallel_tomo(cfg.grid, cfg.angle_list(), cfg.lines));
        prob.xi0.assign(cfg.grid * cfg.grid, 0.0);
    } else {
        prob.truth = piecewise_phantom(cfg.grid);
        prob.family = std::make_shared<SchlierenFamily>(cfg.grid, cfg.directions, cfg.detectors);
        // Constant dual initial guess, value 0.01 at every grid node.
        prob.xi0.assign(cfg.grid * cfg.grid, 0.01);
    }
    return prob;
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& opt) {
    cfg.validate();
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);

    const Problem prob = build_problem(cfg);
    const PenaltySpec penalty = cfg.penalty_spec();
    EquationSystem sys =
        EquationSystem::from_noisy(prob.family, forward_data(*prob.family, prob.truth), cfg.noise);

    ExperimentOutcome outcome;
    outcome.admissibility = check_admissibility(cfg.solver, penalty.sigma);
    if (!outcome.admissibility.pass && !opt.force)
        throw ConfigError("admissibility check failed (" + outcome.admissibility.summary() +
                          "); rerun with --force to proceed anyway");

    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
        const std::string& name = cfg.methods[m];
        SolverConfig sc = method_config(cfg, name, m);
        sc.admissibility = AdmissibilityMode::Warn;  // gate already applied above

        const auto t0 = std::chrono::steady_clock::now();
        SgdSolver solver(sys, sc, penalty, cfg.pdhg, prob.truth);
        solver.set_initial(prob.xi0);
        RunResult run = solver.run();
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        MethodOutcome mo;
        mo.name = name;
        mo.iterations = run.iterations;
        mo.stopped_by_discrepancy = run.stopped_by_discrepancy;
        mo.not_converged = run.not_converged;
        mo.final_rel_error = solver.relative_error();
        mo.wall_seconds = secs;
        mo.csv_path = (fs::path(cfg.out_dir) / (name + ".csv")).string();
        mo.image_path = (fs::path(cfg.out_dir) / (name + "_final.f64")).string();

        write_history_csv(mo.csv_path, run.records, sc.seed, opt.with_timings);
        write_image_f64(mo.image_path, run.final_pair.x, prob.image_grid,
                        {{"method", name}, {"seed", std::to_string(sc.seed)}});
        write_pgm_preview((fs::path(cfg.out_dir) / (name + "_final.pgm")).string(),
                          run.final_pair.x, prob.image_grid);
        outcome.methods.push_back(std::move(mo));
    }

    // Reference artifacts shared by all methods.
    write_image_f64((fs::path(cfg.out_dir) / "truth.f64").string(), prob.truth, prob.image_grid,
                    {{"role", "ground_truth"}});
    write_pgm_preview((fs::path(cfg.out_dir) / "truth.pgm").string(), prob.truth, prob.image_grid);

    outcome.manifest_path = (fs::path(cfg.out_dir) / "manifest.txt").string();
    std::ofstream man(outcome.manifest_path);
    if (!man) throw IoError("run_experiment: cannot open manifest for writing");
    man.precision(17);
    man << "# sgdtheta run manifest\n";
    man << "version " << kVersion << "\n";
    man << "config_format " << kConfigFormatVersion << "\n\n";
    man << "# admissibility\n" << outcome.admissibility.summary() << "\n\n";
    man << "# methods\n";
    for (const MethodOutcome& mo : outcome.methods) {
        man << mo.name << " iterations " << mo.iterations << " rel_error " << mo.final_rel_error
            << " wall_s " << mo.wall_seconds
            << (mo.stopped_by_discrepancy ? " stopped_by_discrepancy" : "")
            << (mo.not_converged ? " not_converged" : "") << "\n";
    }
    double total = 0.0;
    for (double d : sys.delta) total += std::pow(d, cfg.noise.r);
    man << "\n# noise levels (gate values, delta_i = ||y_i^d - y_i|| bookkeeping)\n";
    man << "delta_total " << (total > 0.0 ? std::exp(std::log(total) / cfg.noise.r) : 0.0) << "\n";
    for (std::size_t i = 0; i < sys.delta.size(); ++i) man << "delta " << i << ' ' << sys.delta[i] << "\n";
    man << "\n# config echo\n" << cfg.echo();
    if (!man) throw IoError("run_experiment: manifest write failure");
    return outcome;
}

}  // namespace sgdtheta
