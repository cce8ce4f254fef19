#pragma once

#include <string>
#include <vector>

#include "sgdtheta/config.hpp"
#include "sgdtheta/system.hpp"

namespace sgdtheta {

/// Piecewise-constant test object for the schlieren study: disks and a block
/// of constant value supported inside D = [-1,1]^2, zero near the boundary.
Vector piecewise_phantom(std::size_t n);

struct ExperimentOptions {
    bool force = false;         ///< run even if the admissibility check fails
    bool with_timings = false;  ///< write wall_ms into CSVs (breaks byte reproducibility)
};

struct MethodOutcome {
    std::string name;
    std::size_t iterations = 0;
    bool stopped_by_discrepancy = false;
    bool not_converged = false;
    double final_rel_error = 0.0;
    double wall_seconds = 0.0;
    std::string csv_path;
    std::string image_path;
};

struct ExperimentOutcome {
    std::vector<MethodOutcome> methods;
    std::string manifest_path;
    AdmissibilityReport admissibility;
};

/// Runs every configured method on one shared noisy dataset and writes the
/// per-method RunHistory CSVs, final reconstructions (f64 + PGM preview) and
/// the manifest into cfg.out_dir. Throws ConfigError when the admissibility
/// check fails and `force` is not set.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& opt = {});

}  // namespace sgdtheta
