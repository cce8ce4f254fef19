#pragma once

#include <string>
#include <vector>

#include "sgdtheta/penalty.hpp"
#include "sgdtheta/sampling.hpp"
#include "sgdtheta/solver.hpp"

namespace sgdtheta {

enum class ProblemKind { Ct, Schlieren };

/// Experiment description parsed from the sectioned key-value config format
/// (see README for the schema).
struct ExperimentConfig {
    ProblemKind problem = ProblemKind::Ct;
    std::size_t grid = 64;

    std::size_t angles = 45;  ///< CT: projection count, evenly spaced in (0, 180]
    std::size_t lines = 64;   ///< CT: detector lines per angle

    std::size_t directions = 24;  ///< schlieren: recording directions on the circle
    std::size_t detectors = 0;    ///< schlieren: 0 = ceil(1.5 * grid)

    NoiseSpec noise;

    PenaltyVariant penalty = PenaltyVariant::QuadraticNonneg;
    double beta = 5.0;  ///< TV weight

    SolverConfig solver;
    PdhgConfig pdhg;

    std::vector<std::string> methods = {"sgd_theta"};
    std::string out_dir = "out";

    void validate() const;

    PenaltySpec penalty_spec() const;

    /// CT projection angles in degrees: k * 180/angles, k = 1..angles.
    std::vector<double> angle_list() const;

    static ExperimentConfig parse_file(const std::string& path);
    static ExperimentConfig parse_string(const std::string& text, const std::string& origin);

    /// Canonical text echo (valid config) for the run manifest.
    std::string echo() const;
};

/// Known comparison methods: sgd_theta, sgd_ndp, sgd_decaying, constant_gated,
/// landweber, kaczmarz. Returns the solver configuration for one method,
/// seeded with base.seed + method_index.
SolverConfig method_config(const ExperimentConfig& cfg, const std::string& method,
                           std::size_t method_index);

}  // namespace sgdtheta
