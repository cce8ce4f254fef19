#include "sgdtheta/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sgdtheta/rng.hpp"
#include "sgdtheta/spaces.hpp"

namespace sgdtheta {

void SolverConfig::validate() const {
    if (!(mu0 > 0.0)) throw ConfigError("SolverConfig: mu0 must be > 0");
    if (!(mu1 > 0.0)) throw ConfigError("SolverConfig: mu1 must be > 0");
    if (!(p >= 2.0)) throw ConfigError("SolverConfig: p must be >= 2");
    if (!(r > 1.0)) throw InvalidExponentError("SolverConfig: requires r > 1");
    if (!(eta >= 0.0 && eta < 1.0)) throw ConfigError("SolverConfig: eta must lie in [0,1)");
    if (batch_size == 0) throw InvalidBatchError("SolverConfig: batch size must be >= 1");
    switch (step_rule) {
        case StepRuleKind::AdaptiveDP:
            if (!(tau > 1.0)) throw ConfigError("SolverConfig: AdaptiveDP requires tau > 1");
            break;
        case StepRuleKind::AdaptiveNDP:
            break;  // tau is ignored (treated as 0)
        case StepRuleKind::Decaying:
            if (!(alpha > 0.5 && alpha < 1.0))
                throw ConfigError("SolverConfig: Decaying requires alpha in (1/2, 1)");
            if (!(t0 > 0.0)) throw ConfigError("SolverConfig: Decaying requires t0 > 0");
            break;
        case StepRuleKind::ConstantGated:
            if (!(tau > 1.0)) throw ConfigError("SolverConfig: ConstantGated requires tau > 1");
            if (p != 2.0 || r != 2.0)
                throw ConfigError("SolverConfig: ConstantGated requires p = r = 2");
            if (t_bar < 0.0) throw ConfigError("SolverConfig: t_bar must be >= 0");
            break;
    }
    if (stop_rule == StopRuleKind::APosterioriDiscrepancy && !(tau > 1.0))
        throw ConfigError("SolverConfig: a-posteriori stopping requires tau > 1");
}

AdmissibilityReport check_admissibility(const SolverConfig& cfg, double sigma) {
    if (!(sigma > 0.0)) throw ConfigError("check_admissibility: sigma must be > 0");
    AdmissibilityReport rep;
    const double p = cfg.p;
    const double curvature = (p - 1.0) / p * std::pow(cfg.mu0 / (2.0 * sigma), 1.0 / (p - 1.0));
    rep.c1 = 1.0 - cfg.eta - curvature;
    rep.c0 = rep.c1 - (1.0 + cfg.eta) / cfg.tau;
    rep.c3 = 1.0 - cfg.eta - cfg.mu0 / (4.0 * sigma) - (1.0 + cfg.eta) / 2.0 -
             (1.0 + cfg.eta) / (2.0 * cfg.tau * cfg.tau);
    rep.c0_applicable = cfg.step_rule == StepRuleKind::AdaptiveDP;
    rep.c3_applicable = cfg.step_rule == StepRuleKind::ConstantGated;
    rep.pass = true;
    if (rep.c0_applicable) rep.pass = rep.c0 > 0.0;
    if (rep.c3_applicable) rep.pass = rep.c3 > 0.0;
    return rep;
}

std::string AdmissibilityReport::summary() const {
    std::ostringstream os;
    os << "c0=" << c0 << (c0_applicable ? (c0 > 0.0 ? " (pass)" : " (FAIL)") : " (n/a)")
       << " c1=" << c1 << " c3=" << c3
       << (c3_applicable ? (c3 > 0.0 ? " (pass)" : " (FAIL)") : " (n/a)");
    return os.str();
}

double mu0_upper_bound(double sigma, double p, double tau) {
    return 2.0 * sigma * std::pow(p / (p - 1.0) * (1.0 - 1.0 / tau), p - 1.0);
}

double step_size(const SolverConfig& cfg, std::size_t iter, double residual_norm,
                 double gradient_norm, double delta_batch, bool full_gate_open, double t_bar) {
    switch (cfg.step_rule) {
        case StepRuleKind::AdaptiveDP:
        case StepRuleKind::AdaptiveNDP: {
            const double gate =
                cfg.step_rule == StepRuleKind::AdaptiveDP ? cfg.tau * delta_batch : 0.0;
            if (!(residual_norm > gate)) return 0.0;
            double t_tilde = cfg.mu1;
            if (gradient_norm > 0.0) {
                const double num = cfg.mu0 * abs_pow(residual_norm, cfg.p * (cfg.r - 1.0));
                t_tilde = std::min(num / abs_pow(gradient_norm, cfg.p), cfg.mu1);
            }
            return t_tilde * abs_pow(residual_norm, cfg.p - cfg.r);
        }
        case StepRuleKind::Decaying:
            // n >= 1 indexing avoids 0^(-alpha).
            return cfg.t0 * std::pow(static_cast<double>(iter + 1), -cfg.alpha);
        case StepRuleKind::ConstantGated:
            return full_gate_open ? t_bar : 0.0;
    }
    return 0.0;
}

SgdSolver::SgdSolver(EquationSystem system, SolverConfig cfg, PenaltySpec penalty,
                     PdhgConfig pdhg, Vector ground_truth)
    : sys_(std::move(system)),
      cfg_(cfg),
      penalty_(penalty),
      pdhg_(pdhg),
      truth_(std::move(ground_truth)),
      sampler_(cfg.seed, std::max<std::size_t>(sys_.size(), 1), std::min(cfg.batch_size, std::max<std::size_t>(sys_.size(), 1))) {
    sys_.validate();
    cfg_.validate();
    pdhg_.validate();
    if (cfg_.batch_size > sys_.size())
        throw InvalidBatchError("SgdSolver: batch size exceeds equation count");
    if (cfg_.r != sys_.r) throw ConfigError("SgdSolver: config r disagrees with system r");
    if (!truth_.empty()) {
        if (truth_.size() != sys_.domain_dim()) throw DimensionError("SgdSolver: ground truth size mismatch");
        truth_feasible_ = std::isfinite(penalty_value(penalty_, truth_));
    }

    pair_ = mirror_step(penalty_, DualVector(sys_.domain_dim(), 0.0), pdhg_, &warm_);

    stride_ = cfg_.telemetry_stride;
    if (stride_ == 0) stride_ = std::max<std::size_t>(1, sys_.size() / cfg_.batch_size);

    threshold_sq_ = 0.0;
    for (double d : sys_.delta) threshold_sq_ += (cfg_.tau * d) * (cfg_.tau * d);

    t_bar_ = cfg_.t_bar;
    if (cfg_.step_rule == StepRuleKind::ConstantGated && t_bar_ == 0.0) {
        // Presampling sweep of the step bound at the initial iterate.
        t_bar_ = cfg_.mu1;
        Vector out, grad(sys_.domain_dim());
        for (std::size_t i = 0; i < sys_.size(); ++i) {
            out.assign(sys_.family->out_dim(i), 0.0);
            sys_.family->apply(i, pair_.x, out);
            for (std::size_t k = 0; k < out.size(); ++k) out[k] -= sys_.noisy[i][k];
            const double res = lr_norm_weighted(out, sys_.family->data_weights(i), 2.0);
            if (res == 0.0) continue;
            std::fill(grad.begin(), grad.end(), 0.0);
            Vector jres(out.size());
            duality_map_weighted(out, sys_.family->data_weights(i), 2.0, jres);
            sys_.family->derivative_adjoint_add(i, pair_.x, jres, 1.0, grad);
            const double gn = norm2(grad);
            if (gn > 0.0) t_bar_ = std::min(t_bar_, cfg_.mu0 * res * res / (gn * gn));
        }
    }
}

void SgdSolver::set_initial(DualVector xi0) {
    if (iter_ != 0) throw ConfigError("SgdSolver: initial iterate fixed after the first step");
    if (xi0.size() != sys_.domain_dim()) throw DimensionError("SgdSolver: initial dual size mismatch");
    warm_ = PdhgState{};
    pair_ = mirror_step(penalty_, std::move(xi0), pdhg_, &warm_);
    ++state_version_;
}

double SgdSolver::full_residual_sq() {
    if (full_cache_version_ == state_version_) return full_cache_;
    double total = 0.0;
    Vector out;
    for (std::size_t i = 0; i < sys_.size(); ++i) {
        out.assign(sys_.family->out_dim(i), 0.0);
        sys_.family->apply(i, pair_.x, out);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] -= sys_.noisy[i][k];
        const double rn = lr_norm_weighted(out, sys_.family->data_weights(i), cfg_.r);
        total += rn * rn;
    }
    full_cache_ = total;
    full_cache_version_ = state_version_;
    return total;
}

double SgdSolver::relative_error() const {
    if (truth_.empty()) throw ConfigError("SgdSolver: no ground truth supplied");
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < truth_.size(); ++k) {
        const double d = pair_.x[k] - truth_[k];
        num += d * d;
        den += truth_[k] * truth_[k];
    }
    return std::sqrt(num) / std::sqrt(den);
}

std::optional<double> SgdSolver::bregman_to_truth() const {
    if (truth_.empty() || !truth_feasible_) return std::nullopt;
    return bregman_distance(penalty_, truth_, pair_);
}

void SgdSolver::fill_telemetry(HistoryRecord& rec) {
    rec.total_sq_residual = full_residual_sq();
    if (!truth_.empty()) {
        rec.rel_error = relative_error();
        if (auto b = bregman_to_truth()) rec.bregman = *b;
    }
}

HistoryRecord SgdSolver::telemetry_record(std::size_t iter) {
    HistoryRecord rec;
    rec.iter = iter;
    fill_telemetry(rec);
    return rec;
}

HistoryRecord SgdSolver::step() {
    switch (cfg_.batch_mode) {
        case BatchMode::Random:
            return step_with_batch(sampler_.next());
        case BatchMode::Cyclic:
            return step_with_batch({iter_ % sys_.size()});
        case BatchMode::Full: {
            std::vector<std::size_t> all(sys_.size());
            for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
            return step_with_batch(std::move(all));
        }
    }
    throw ConfigError("SgdSolver: unknown batch mode");
}

HistoryRecord SgdSolver::step_with_batch(std::vector<std::size_t> batch) {
    const auto t_start = std::chrono::steady_clock::now();
    if (batch.empty()) throw InvalidBatchError("SgdSolver: empty batch");
    std::sort(batch.begin(), batch.end());
    for (std::size_t i : batch)
        if (i >= sys_.size()) throw InvalidBatchError("SgdSolver: batch index out of range");

    // Stacked residual blocks, ascending equation order.
    std::vector<Vector> res_blocks(batch.size());
    double res_pow_sum = 0.0;  // sum of w |res|^r over the stacked block
    double delta_pow_sum = 0.0;
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const std::size_t i = batch[b];
        Vector& res = res_blocks[b];
        res.assign(sys_.family->out_dim(i), 0.0);
        sys_.family->apply(i, pair_.x, res);
        for (std::size_t k = 0; k < res.size(); ++k) res[k] -= sys_.noisy[i][k];
        ensure_finite(res, "sgd step: residual");
        auto w = sys_.family->data_weights(i);
        for (std::size_t k = 0; k < res.size(); ++k) {
            const double t = abs_pow(res[k], cfg_.r);
            res_pow_sum += w.empty() ? t : w[k] * t;
        }
        delta_pow_sum += abs_pow(sys_.delta[i], cfg_.r);
    }
    const double res_norm = res_pow_sum == 0.0 ? 0.0 : std::exp(std::log(res_pow_sum) / cfg_.r);
    const double delta_batch = delta_pow_sum == 0.0 ? 0.0 : std::exp(std::log(delta_pow_sum) / cfg_.r);

    // The full-residual gate is refreshed at the telemetry cadence (the
    // per-iteration full sweep is what the a-posteriori rule itself avoids).
    if (cfg_.step_rule == StepRuleKind::ConstantGated && iter_ % stride_ == 0)
        gate_open_ = full_residual_sq() > threshold_sq_;
    const bool full_gate_open = gate_open_;

    // Gate first; the gradient is only assembled when the step can be nonzero.
    const bool adaptive = cfg_.step_rule == StepRuleKind::AdaptiveDP ||
                          cfg_.step_rule == StepRuleKind::AdaptiveNDP;
    const double gate = cfg_.step_rule == StepRuleKind::AdaptiveDP ? cfg_.tau * delta_batch : 0.0;
    const bool may_move = adaptive ? res_norm > gate
                                   : step_size(cfg_, iter_, res_norm, 1.0, delta_batch,
                                               full_gate_open, t_bar_) > 0.0;

    DualVector grad;
    double grad_norm = 0.0;
    if (may_move) {
        grad.assign(sys_.domain_dim(), 0.0);
        Vector jres;
        for (std::size_t b = 0; b < batch.size(); ++b) {
            const std::size_t i = batch[b];
            jres.assign(res_blocks[b].size(), 0.0);
            duality_map_weighted(res_blocks[b], sys_.family->data_weights(i), cfg_.r, jres);
            sys_.family->derivative_adjoint_add(i, pair_.x, jres, 1.0, grad);
        }
        ensure_finite(grad, "sgd step: gradient");
        grad_norm = norm2(grad);
    }

    const double t = may_move
                         ? step_size(cfg_, iter_, res_norm, grad_norm, delta_batch, full_gate_open, t_bar_)
                         : 0.0;

    if (t != 0.0 && grad_norm != 0.0) {
        DualVector xi = pair_.xi;
        for (std::size_t k = 0; k < xi.size(); ++k) xi[k] -= t * grad[k];
        if (!all_finite(xi)) {
            throw NumericalError("sgd step: non-finite dual iterate at iteration " +
                                 std::to_string(iter_ + 1));
        }
        pair_ = mirror_step(penalty_, std::move(xi), pdhg_, &warm_);
        ++state_version_;
    }
    ++iter_;

    HistoryRecord rec;
    rec.iter = iter_;
    rec.batch.assign(batch.begin(), batch.end());
    rec.step = t;
    rec.batch_residual = res_norm;
    if (iter_ % stride_ == 0) fill_telemetry(rec);
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
    return rec;
}

RunResult SgdSolver::run() {
    RunResult result;
    result.admissibility = check_admissibility(cfg_, penalty_.sigma);
    if (!result.admissibility.pass && cfg_.admissibility == AdmissibilityMode::Enforce)
        throw ConfigError("SgdSolver: admissibility check failed: " + result.admissibility.summary());

    result.records.reserve(std::min<std::size_t>(cfg_.max_iters + 2, 65536));
    result.records.push_back(telemetry_record(0));

    while (iter_ < cfg_.max_iters) {
        if (cfg_.stop_rule == StopRuleKind::APosterioriDiscrepancy && iter_ % stride_ == 0 &&
            full_residual_sq() <= threshold_sq_) {
            result.stopped_by_discrepancy = true;
            break;
        }
        result.records.push_back(step());
    }
    if (cfg_.stop_rule == StopRuleKind::APosterioriDiscrepancy && !result.stopped_by_discrepancy) {
        if (full_residual_sq() <= threshold_sq_)
            result.stopped_by_discrepancy = true;
        else
            result.not_converged = true;
    }
    result.iterations = iter_;
    result.final_pair = pair_;
    return result;
}

HistoryRecord landweber_step(SgdSolver& solver) {
    std::vector<std::size_t> all(solver.system().size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return solver.step_with_batch(std::move(all));
}

HistoryRecord kaczmarz_step(SgdSolver& solver) {
    return solver.step_with_batch({solver.iteration() % solver.system().size()});
}

void write_history_csv(const std::string& path, const std::vector<HistoryRecord>& records,
                       std::uint64_t seed, bool with_timings) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_history_csv: cannot open " + path);
    char buf[64];
    auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(CounterRng::mix(seed)));
    const std::string seed_hash(buf);

    out << "iter,step,batch_residual,total_sq_residual,rel_error,bregman,seed_hash,wall_ms\n";
    for (const HistoryRecord& r : records) {
        out << r.iter << ',' << fmt(r.step) << ',' << fmt(r.batch_residual) << ',';
        if (r.total_sq_residual) out << fmt(*r.total_sq_residual);
        out << ',';
        if (r.rel_error) out << fmt(*r.rel_error);
        out << ',';
        if (r.bregman) out << fmt(*r.bregman);
        out << ',' << seed_hash << ',';
        if (with_timings) out << fmt(r.wall_ms);
        out << '\n';
    }
    if (!out) throw IoError("write_history_csv: write failure on " + path);
}

}  // namespace sgdtheta
