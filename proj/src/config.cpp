#include "sgdtheta/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace sgdtheta {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct KeyValue {
    std::string value;
    std::size_t line;
    mutable bool used = false;
};

/// Sectioned key-value file: "[section]" headers, "key = value" entries,
/// '#'/';' comments.
class ParsedConfig {
public:
    ParsedConfig(const std::string& text, std::string origin) : origin_(std::move(origin)) {
        std::istringstream in(text);
        std::string line, section;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find_first_of("#;");
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') fail(lineno, "unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty()) fail(lineno, "empty section name");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty()) fail(lineno, "empty key");
            if (section.empty()) fail(lineno, "entry before any [section]");
            auto [it, fresh] = entries_.try_emplace(section + "." + key, KeyValue{value, lineno});
            if (!fresh) fail(lineno, "duplicate key '" + section + "." + key + "'");
        }
    }

    [[noreturn]] void fail(std::size_t line, const std::string& msg) const {
        throw ConfigError(origin_ + ":" + std::to_string(line) + ": " + msg);
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        it->second.used = true;
        return it->second.value;
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        it->second.used = true;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second.value, &pos);
            if (pos != it->second.value.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            fail(it->second.line, "field '" + key + "': expected a number, got '" + it->second.value + "'");
        }
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        it->second.used = true;
        try {
            std::size_t pos = 0;
            const unsigned long long v = std::stoull(it->second.value, &pos);
            if (pos != it->second.value.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            fail(it->second.line, "field '" + key + "': expected an unsigned integer");
        }
    }

    void reject_unknown() const {
        for (const auto& [key, kv] : entries_)
            if (!kv.used) fail(kv.line, "unknown field '" + key + "'");
    }

private:
    std::string origin_;
    std::map<std::string, KeyValue> entries_;
};

template <typename T>
T pick(const ParsedConfig& p, const std::string& key,
       std::initializer_list<std::pair<const char*, T>> table, const char* fallback_name) {
    const std::string v = p.get_string(key, fallback_name);
    for (const auto& [name, val] : table)
        if (v == name) return val;
    throw ConfigError("field '" + key + "': unknown value '" + v + "'");
}

}  // namespace

void ExperimentConfig::validate() const {
    if (grid < 2) throw ConfigError("problem.grid must be >= 2");
    if (problem == ProblemKind::Ct) {
        if (angles == 0) throw ConfigError("problem.angles must be >= 1");
        if (lines == 0) throw ConfigError("problem.lines must be >= 1");
        if (grid < 16) throw ConfigError("problem.grid must be >= 16 for the CT phantom");
    } else {
        if (directions == 0) throw ConfigError("problem.directions must be >= 1");
    }
    noise.validate();
    if (penalty == PenaltyVariant::QuadraticTV && !(beta > 0.0))
        throw ConfigError("penalty.beta must be > 0");
    solver.validate();
    pdhg.validate();
    if (noise.r != solver.r)
        throw ConfigError("noise.r and solver.r must agree (both measure the data norm)");
    if (methods.empty()) throw ConfigError("compare.methods must name at least one method");
    for (const std::string& m : methods)
        if (m != "sgd_theta" && m != "sgd_ndp" && m != "sgd_decaying" && m != "constant_gated" &&
            m != "landweber" && m != "kaczmarz")
            throw ConfigError("compare.methods: unknown method '" + m + "'");
    if (out_dir.empty()) throw ConfigError("output.dir must be nonempty");
}

PenaltySpec ExperimentConfig::penalty_spec() const {
    switch (penalty) {
        case PenaltyVariant::Quadratic:
            return PenaltySpec::quadratic();
        case PenaltyVariant::QuadraticNonneg:
            return PenaltySpec::quadratic_nonneg();
        case PenaltyVariant::QuadraticTV:
            return PenaltySpec::quadratic_tv(beta, GridShape{grid, grid});
    }
    throw ConfigError("unknown penalty variant");
}

std::vector<double> ExperimentConfig::angle_list() const {
    std::vector<double> out(angles);
    for (std::size_t k = 0; k < angles; ++k)
        out[k] = 180.0 * static_cast<double>(k + 1) / static_cast<double>(angles);
    return out;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_string(text.str(), path);
}

ExperimentConfig ExperimentConfig::parse_string(const std::string& text, const std::string& origin) {
    ParsedConfig p(text, origin);
    ExperimentConfig cfg;

    cfg.problem = pick<ProblemKind>(
        p, "problem.type", {{"ct", ProblemKind::Ct}, {"schlieren", ProblemKind::Schlieren}}, "ct");
    cfg.grid = p.get_u64("problem.grid", cfg.grid);
    cfg.angles = p.get_u64("problem.angles", cfg.angles);
    cfg.lines = p.get_u64("problem.lines", cfg.lines);
    cfg.directions = p.get_u64("problem.directions", cfg.directions);
    cfg.detectors = p.get_u64("problem.detectors", cfg.detectors);

    cfg.noise.model = pick<NoiseModel>(p, "noise.model",
                                       {{"gaussian", NoiseModel::Gaussian},
                                        {"uniform", NoiseModel::Uniform},
                                        {"saltpepper", NoiseModel::SaltPepper}},
                                       "gaussian");
    cfg.noise.delta_rel = p.get_double("noise.delta_rel", cfg.noise.delta_rel);
    cfg.noise.kappa = p.get_double("noise.kappa", cfg.noise.kappa);
    cfg.noise.r = p.get_double("noise.r", cfg.noise.r);
    cfg.noise.seed = p.get_u64("noise.seed", cfg.noise.seed);

    cfg.penalty = pick<PenaltyVariant>(p, "penalty.variant",
                                       {{"quadratic", PenaltyVariant::Quadratic},
                                        {"quadratic_nonneg", PenaltyVariant::QuadraticNonneg},
                                        {"quadratic_tv", PenaltyVariant::QuadraticTV}},
                                       "quadratic_nonneg");
    cfg.beta = p.get_double("penalty.beta", cfg.beta);

    cfg.solver.step_rule = pick<StepRuleKind>(p, "solver.step_rule",
                                              {{"adaptive_dp", StepRuleKind::AdaptiveDP},
                                               {"adaptive_ndp", StepRuleKind::AdaptiveNDP},
                                               {"decaying", StepRuleKind::Decaying},
                                               {"constant_gated", StepRuleKind::ConstantGated}},
                                              "adaptive_dp");
    cfg.solver.stop_rule = pick<StopRuleKind>(p, "solver.stop_rule",
                                              {{"apriori", StopRuleKind::APrioriMaxIters},
                                               {"aposteriori", StopRuleKind::APosterioriDiscrepancy}},
                                              "apriori");
    cfg.solver.mu0 = p.get_double("solver.mu0", cfg.solver.mu0);
    cfg.solver.mu1 = p.get_double("solver.mu1", cfg.solver.mu1);
    cfg.solver.tau = p.get_double("solver.tau", cfg.solver.tau);
    cfg.solver.p = p.get_double("solver.p", cfg.solver.p);
    cfg.solver.r = p.get_double("solver.r", cfg.solver.r);
    cfg.solver.eta = p.get_double("solver.eta", cfg.solver.eta);
    cfg.solver.t0 = p.get_double("solver.t0", cfg.solver.t0);
    cfg.solver.alpha = p.get_double("solver.alpha", cfg.solver.alpha);
    cfg.solver.t_bar = p.get_double("solver.t_bar", cfg.solver.t_bar);
    cfg.solver.batch_size = p.get_u64("solver.batch_size", cfg.solver.batch_size);
    cfg.solver.max_iters = p.get_u64("solver.max_iters", cfg.solver.max_iters);
    cfg.solver.seed = p.get_u64("solver.seed", cfg.solver.seed);
    cfg.solver.telemetry_stride = p.get_u64("solver.telemetry_stride", cfg.solver.telemetry_stride);

    cfg.pdhg.max_iters = p.get_u64("pdhg.max_iters", cfg.pdhg.max_iters);
    cfg.pdhg.gap_tol = p.get_double("pdhg.gap_tol", cfg.pdhg.gap_tol);
    cfg.pdhg.tau_primal = p.get_double("pdhg.tau_primal", cfg.pdhg.tau_primal);
    cfg.pdhg.sigma_dual = p.get_double("pdhg.sigma_dual", cfg.pdhg.sigma_dual);

    if (p.has("compare.methods")) {
        cfg.methods.clear();
        std::istringstream ms(p.get_string("compare.methods", ""));
        std::string item;
        while (std::getline(ms, item, ',')) {
            item = trim(item);
            if (!item.empty()) cfg.methods.push_back(item);
        }
    }
    cfg.out_dir = p.get_string("output.dir", cfg.out_dir);

    p.reject_unknown();
    cfg.validate();
    return cfg;
}

std::string ExperimentConfig::echo() const {
    std::ostringstream os;
    os.precision(17);
    os << "[problem]\n";
    os << "type = " << (problem == ProblemKind::Ct ? "ct" : "schlieren") << "\n";
    os << "grid = " << grid << "\n";
    if (problem == ProblemKind::Ct)
        os << "angles = " << angles << "\nlines = " << lines << "\n";
    else
        os << "directions = " << directions << "\ndetectors = " << detectors << "\n";
    os << "\n[noise]\n";
    os << "model = "
       << (noise.model == NoiseModel::Gaussian
               ? "gaussian"
               : noise.model == NoiseModel::Uniform ? "uniform" : "saltpepper")
       << "\n";
    os << "delta_rel = " << noise.delta_rel << "\nkappa = " << noise.kappa << "\nr = " << noise.r
       << "\nseed = " << noise.seed << "\n";
    os << "\n[penalty]\n";
    os << "variant = "
       << (penalty == PenaltyVariant::Quadratic
               ? "quadratic"
               : penalty == PenaltyVariant::QuadraticNonneg ? "quadratic_nonneg" : "quadratic_tv")
       << "\n";
    os << "beta = " << beta << "\n";
    os << "\n[solver]\n";
    os << "step_rule = "
       << (solver.step_rule == StepRuleKind::AdaptiveDP
               ? "adaptive_dp"
               : solver.step_rule == StepRuleKind::AdaptiveNDP
                     ? "adaptive_ndp"
                     : solver.step_rule == StepRuleKind::Decaying ? "decaying" : "constant_gated")
       << "\n";
    os << "stop_rule = "
       << (solver.stop_rule == StopRuleKind::APrioriMaxIters ? "apriori" : "aposteriori") << "\n";
    os << "mu0 = " << solver.mu0 << "\nmu1 = " << solver.mu1 << "\ntau = " << solver.tau << "\n";
    os << "p = " << solver.p << "\nr = " << solver.r << "\neta = " << solver.eta << "\n";
    os << "t0 = " << solver.t0 << "\nalpha = " << solver.alpha << "\nt_bar = " << solver.t_bar << "\n";
    os << "batch_size = " << solver.batch_size << "\nmax_iters = " << solver.max_iters << "\n";
    os << "seed = " << solver.seed << "\ntelemetry_stride = " << solver.telemetry_stride << "\n";
    os << "\n[pdhg]\n";
    os << "max_iters = " << pdhg.max_iters << "\ngap_tol = " << pdhg.gap_tol << "\n";
    os << "tau_primal = " << pdhg.tau_primal << "\nsigma_dual = " << pdhg.sigma_dual << "\n";
    os << "\n[compare]\nmethods = ";
    for (std::size_t i = 0; i < methods.size(); ++i) os << (i ? ", " : "") << methods[i];
    os << "\n\n[output]\ndir = " << out_dir << "\n";
    return os.str();
}

SolverConfig method_config(const ExperimentConfig& cfg, const std::string& method,
                           std::size_t method_index) {
    SolverConfig sc = cfg.solver;
    sc.seed = cfg.solver.seed + method_index;  // independent RNG stream per method
    if (method == "sgd_theta") {
        sc.step_rule = StepRuleKind::AdaptiveDP;
        sc.batch_mode = BatchMode::Random;
    } else if (method == "sgd_ndp") {
        sc.step_rule = StepRuleKind::AdaptiveNDP;
        sc.batch_mode = BatchMode::Random;
    } else if (method == "sgd_decaying") {
        sc.step_rule = StepRuleKind::Decaying;
        sc.batch_mode = BatchMode::Random;
    } else if (method == "constant_gated") {
        sc.step_rule = StepRuleKind::ConstantGated;
        sc.batch_mode = BatchMode::Random;
    } else if (method == "landweber") {
        sc.batch_mode = BatchMode::Full;
        sc.batch_size = 1;  // sampler unused in Full mode
    } else if (method == "kaczmarz") {
        sc.batch_mode = BatchMode::Cyclic;
        sc.batch_size = 1;
    } else {
        throw ConfigError("unknown method '" + method + "'");
    }
    return sc;
}

}  // namespace sgdtheta
