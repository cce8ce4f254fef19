#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgdtheta/penalty.hpp"
#include "sgdtheta/system.hpp"

namespace sgdtheta {

enum class StepRuleKind {
    AdaptiveDP,     ///< adaptive step gated by the discrepancy principle
    AdaptiveNDP,    ///< same adaptive step, no discrepancy gate (tau = 0)
    Decaying,       ///< t_n = t0 * n^(-alpha)
    ConstantGated,  ///< t_n = t_bar while the full residual exceeds the threshold
};

enum class StopRuleKind { APrioriMaxIters, APosterioriDiscrepancy };

enum class BatchMode { Random, Cyclic, Full };

enum class AdmissibilityMode { Warn, Enforce };

struct SolverConfig {
    StepRuleKind step_rule = StepRuleKind::AdaptiveDP;
    StopRuleKind stop_rule = StopRuleKind::APrioriMaxIters;
    BatchMode batch_mode = BatchMode::Random;
    AdmissibilityMode admissibility = AdmissibilityMode::Warn;

    double mu0 = 0.18;
    double mu1 = 1e4;
    double tau = 1.1;
    double p = 2.0;   ///< penalty convexity order
    double r = 2.0;   ///< data-space exponent
    double eta = 0.0; ///< tangential-cone constant assumed for admissibility

    double t0 = 0.01;    ///< Decaying scale
    double alpha = 0.51; ///< Decaying exponent, in (1/2, 1)
    double t_bar = 0.0;  ///< ConstantGated step; 0 = presample at the initial iterate

    std::size_t batch_size = 1;
    std::size_t max_iters = 1000;
    std::uint64_t seed = 0;
    std::size_t telemetry_stride = 0;  ///< 0 = once per epoch (N / batch_size)

    void validate() const;
};

/// Admissibility constants of the step-size rules:
///   c0 = 1 - eta - (1+eta)/tau - ((p-1)/p) (mu0/(2 sigma))^(1/(p-1))
///   c1 = 1 - eta - ((p-1)/p) (mu0/(2 sigma))^(1/(p-1))     (exact-data diagnostic)
///   c3 = 1 - eta - mu0/(4 sigma) - (1+eta)/2 - (1+eta)/(2 tau^2)
struct AdmissibilityReport {
    double c0 = 0.0;
    bool c0_applicable = false;
    double c1 = 0.0;
    double c3 = 0.0;
    bool c3_applicable = false;
    bool pass = true;  ///< for the configured step rule

    std::string summary() const;
};

AdmissibilityReport check_admissibility(const SolverConfig& cfg, double sigma);

/// The paper-gap bound mu0 < 2 sigma (p/(p-1) (1 - 1/tau))^(p-1) under which
/// c0 > 0 at eta = 0.
double mu0_upper_bound(double sigma, double p, double tau);

/// Step size t_n for one batch. `residual_norm` and `gradient_norm` are the
/// stacked block quantities; `delta_batch` = (sum_{i in batch} delta_i^r)^(1/r);
/// `full_gate_open` is the ConstantGated full-residual test; `t_bar` the
/// resolved constant step. Pure function.
double step_size(const SolverConfig& cfg, std::size_t iter, double residual_norm,
                 double gradient_norm, double delta_batch, bool full_gate_open = true,
                 double t_bar = 0.0);

struct HistoryRecord {
    std::size_t iter = 0;                 ///< iterations completed (0 = initial state)
    std::vector<std::uint32_t> batch;     ///< selected indices, ascending
    double step = 0.0;
    double batch_residual = 0.0;
    std::optional<double> total_sq_residual;  ///< sum_i ||F_i(x) - y_i^d||^2
    std::optional<double> rel_error;          ///< ||x - x_true||_2 / ||x_true||_2
    std::optional<double> bregman;            ///< D_xi theta(x_true, x)
    double wall_ms = 0.0;
};

struct RunResult {
    std::vector<HistoryRecord> records;
    BregmanPair final_pair;
    std::size_t iterations = 0;
    bool stopped_by_discrepancy = false;
    bool not_converged = false;  ///< a-posteriori rule hit max_iters
    AdmissibilityReport admissibility;
};

/// SGD-theta iteration (dual update + mirror step) with pluggable step and
/// stop rules. The loop is strictly sequential; within a step the batch is
/// reduced in ascending equation index.
class SgdSolver {
public:
    SgdSolver(EquationSystem system, SolverConfig cfg, PenaltySpec penalty,
              PdhgConfig pdhg = {}, Vector ground_truth = {});

    /// Replaces the initial dual iterate (only before the first step).
    void set_initial(DualVector xi0);

    const BregmanPair& pair() const { return pair_; }
    std::size_t iteration() const { return iter_; }
    const EquationSystem& system() const { return sys_; }
    const SolverConfig& config() const { return cfg_; }
    std::size_t telemetry_stride() const { return stride_; }
    double resolved_t_bar() const { return t_bar_; }

    HistoryRecord step();
    HistoryRecord step_with_batch(std::vector<std::size_t> batch);

    RunResult run();

    double full_residual_sq();              ///< cached per state version
    double discrepancy_threshold_sq() const { return threshold_sq_; }
    double relative_error() const;          ///< needs ground truth
    std::optional<double> bregman_to_truth() const;

private:
    void refresh_full_residual();
    HistoryRecord telemetry_record(std::size_t iter);
    void fill_telemetry(HistoryRecord& rec);

    EquationSystem sys_;
    SolverConfig cfg_;
    PenaltySpec penalty_;
    PdhgConfig pdhg_;
    Vector truth_;
    bool truth_feasible_ = false;

    IndexSampler sampler_;
    BregmanPair pair_;
    PdhgState warm_;
    std::size_t iter_ = 0;
    std::size_t stride_ = 1;
    double t_bar_ = 0.0;
    double threshold_sq_ = 0.0;

    std::uint64_t state_version_ = 0;
    std::uint64_t full_cache_version_ = ~0ull;
    double full_cache_ = 0.0;
    bool gate_open_ = true;
};

/// Full-gradient update over all N equations (spec baseline).
HistoryRecord landweber_step(SgdSolver& solver);

/// Deterministic cyclic single-equation update, index (n mod N).
HistoryRecord kaczmarz_step(SgdSolver& solver);

/// CSV export with header
///   iter,step,batch_residual,total_sq_residual,rel_error,bregman,seed_hash,wall_ms
/// Empty fields mark telemetry not computed that iteration. Wall times are
/// only written when with_timings is set, keeping default artifacts
/// byte-reproducible for a fixed seed.
void write_history_csv(const std::string& path, const std::vector<HistoryRecord>& records,
                       std::uint64_t seed, bool with_timings = false);

}  // namespace sgdtheta
