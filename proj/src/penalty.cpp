#include "sgdtheta/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sgdtheta {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double half_sq_norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return 0.5 * s;
}
}  // namespace

PenaltySpec PenaltySpec::quadratic() {
    return PenaltySpec{PenaltyVariant::Quadratic, 2.0, 0.5, 0.0, {}};
}

PenaltySpec PenaltySpec::quadratic_nonneg() {
    return PenaltySpec{PenaltyVariant::QuadraticNonneg, 2.0, 0.5, 0.0, {}};
}

PenaltySpec PenaltySpec::quadratic_tv(double beta, GridShape grid) {
    if (!(beta > 0.0)) throw ConfigError("PenaltySpec: TV weight beta must be > 0");
    if (grid.rows == 0 || grid.cols == 0) throw DimensionError("PenaltySpec: TV grid must be nonempty");
    return PenaltySpec{PenaltyVariant::QuadraticTV, 2.0, 1.0 / (2.0 * beta), beta, grid};
}

void PdhgConfig::validate() const {
    if (max_iters == 0) throw ConfigError("PdhgConfig: max_iters must be >= 1");
    if (!(gap_tol > 0.0)) throw ConfigError("PdhgConfig: gap_tol must be > 0");
    if (!(tau_primal > 0.0) || !(sigma_dual > 0.0))
        throw ConfigError("PdhgConfig: step parameters must be > 0");
    if (tau_primal * sigma_dual * 8.0 > 1.0 + 1e-12)
        throw ConfigError("PdhgConfig: requires tau_primal * sigma_dual * 8 <= 1");
}

double tv_isotropic(std::span<const double> x, GridShape grid) {
    if (x.size() != grid.size()) throw DimensionError("tv_isotropic: size mismatch with grid");
    const std::size_t rows = grid.rows, cols = grid.cols;
    double tv = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const double v = x[i * cols + j];
            const double dh = (j + 1 < cols) ? x[i * cols + j + 1] - v : 0.0;
            const double dv = (i + 1 < rows) ? x[(i + 1) * cols + j] - v : 0.0;
            tv += std::sqrt(dh * dh + dv * dv);
        }
    }
    return tv;
}

double penalty_value(const PenaltySpec& spec, std::span<const double> x) {
    switch (spec.variant) {
        case PenaltyVariant::Quadratic:
            return half_sq_norm(x);
        case PenaltyVariant::QuadraticNonneg: {
            for (double v : x)
                if (v < 0.0) return kInf;
            return half_sq_norm(x);
        }
        case PenaltyVariant::QuadraticTV: {
            if (x.size() != spec.grid.size())
                throw DimensionError("penalty_value: size mismatch with TV grid");
            return half_sq_norm(x) / spec.beta + tv_isotropic(x, spec.grid);
        }
    }
    return kInf;
}

double bregman_distance(const PenaltySpec& spec, std::span<const double> target,
                        const BregmanPair& pair) {
    if (target.size() != pair.x.size() || pair.x.size() != pair.xi.size())
        throw DimensionError("bregman_distance: size mismatch");
    ensure_finite(target, "bregman_distance: target");
    const double ft = penalty_value(spec, target);
    if (!std::isfinite(ft)) throw InfeasibleTargetError("bregman_distance: theta(target) is infinite");
    const double fx = penalty_value(spec, pair.x);
    double cross = 0.0;
    for (std::size_t k = 0; k < target.size(); ++k) cross += pair.xi[k] * (target[k] - pair.x[k]);
    return ft - fx - cross;
}

namespace {

// Forward-difference gradient with replicate boundary; dual field layout is
// [horizontal | vertical], each rows*cols.
void grad_apply(std::span<const double> z, GridShape g, std::span<double> out) {
    const std::size_t rows = g.rows, cols = g.cols, npx = g.size();
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const std::size_t k = i * cols + j;
            out[k] = (j + 1 < cols) ? z[k + 1] - z[k] : 0.0;
            out[npx + k] = (i + 1 < rows) ? z[k + cols] - z[k] : 0.0;
        }
}

// Negative divergence (exact transpose of grad_apply).
void grad_adjoint(std::span<const double> p, GridShape g, std::span<double> out) {
    const std::size_t rows = g.rows, cols = g.cols, npx = g.size();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const std::size_t k = i * cols + j;
            if (j + 1 < cols) {
                out[k] -= p[k];
                out[k + 1] += p[k];
            }
            if (i + 1 < rows) {
                out[k] -= p[npx + k];
                out[k + cols] += p[npx + k];
            }
        }
}

double tv_objective(std::span<const double> z, std::span<const double> g,
                    GridShape grid, double beta) {
    double q = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        const double d = z[k] - g[k];
        q += d * d;
    }
    return q / (2.0 * beta) + tv_isotropic(z, grid);
}

}  // namespace

Vector tv_denoise_pdhg(std::span<const double> g, GridShape grid, double beta,
                       const PdhgConfig& cfg, PdhgState* warm) {
    cfg.validate();
    if (g.size() != grid.size()) throw DimensionError("tv_denoise_pdhg: size mismatch with grid");
    if (!(beta > 0.0)) throw ConfigError("tv_denoise_pdhg: beta must be > 0");
    ensure_finite(g, "tv_denoise_pdhg: input");

    const std::size_t npx = grid.size();
    Vector z(g.begin(), g.end());
    Vector p(2 * npx, 0.0);
    if (warm && warm->z.size() == npx && warm->p.size() == 2 * npx) {
        z = warm->z;
        p = warm->p;
    }

    Vector zbar = z, znew(npx), kz(2 * npx), ktp(npx);
    const double tau = cfg.tau_primal, sig = cfg.sigma_dual;

    double best_obj = tv_objective(z, g, grid, beta);
    Vector best = z;

    for (std::size_t it = 0; it < cfg.max_iters; ++it) {
        // Dual ascent + projection onto pointwise unit balls.
        grad_apply(zbar, grid, kz);
        for (std::size_t k = 0; k < npx; ++k) {
            double ph = p[k] + sig * kz[k];
            double pv = p[npx + k] + sig * kz[npx + k];
            const double mag = std::sqrt(ph * ph + pv * pv);
            if (mag > 1.0) {
                ph /= mag;
                pv /= mag;
            }
            p[k] = ph;
            p[npx + k] = pv;
        }

        // Primal prox of 1/(2 beta) ||z - g||^2.
        grad_adjoint(p, grid, ktp);
        const double denom = 1.0 + tau / beta;
        for (std::size_t k = 0; k < npx; ++k)
            znew[k] = (z[k] - tau * ktp[k] + (tau / beta) * g[k]) / denom;

        for (std::size_t k = 0; k < npx; ++k) {
            zbar[k] = 2.0 * znew[k] - z[k];
            z[k] = znew[k];
        }
        if (!all_finite(z)) throw NumericalError("tv_denoise_pdhg: non-finite iterate");

        const double primal = tv_objective(z, g, grid, beta);
        if (primal < best_obj) {
            best_obj = primal;
            best = z;
        }
        // Dual objective <g, K*p> - beta/2 ||K*p||^2 (p is feasible after projection).
        grad_adjoint(p, grid, ktp);
        double dual = 0.0;
        for (std::size_t k = 0; k < npx; ++k) dual += g[k] * ktp[k] - 0.5 * beta * ktp[k] * ktp[k];
        const double gap = (primal - dual) / std::max(1.0, std::fabs(primal));
        if (gap < cfg.gap_tol) break;
    }

    if (warm) {
        warm->z = z;
        warm->p = p;
    }
    return best;
}

BregmanPair mirror_step(const PenaltySpec& spec, const DualVector& xi,
                        const PdhgConfig& pdhg, PdhgState* warm) {
    ensure_finite(xi, "mirror_step: dual vector");
    switch (spec.variant) {
        case PenaltyVariant::Quadratic:
            return BregmanPair{xi, xi};
        case PenaltyVariant::QuadraticNonneg: {
            Vector x(xi.size());
            for (std::size_t k = 0; k < xi.size(); ++k) x[k] = std::max(xi[k], 0.0);
            return BregmanPair{std::move(x), xi};
        }
        case PenaltyVariant::QuadraticTV: {
            if (xi.size() != spec.grid.size())
                throw DimensionError("mirror_step: size mismatch with TV grid");
            Vector g(xi.size());
            for (std::size_t k = 0; k < xi.size(); ++k) g[k] = spec.beta * xi[k];
            Vector x = tv_denoise_pdhg(g, spec.grid, spec.beta, pdhg, warm);
            return BregmanPair{std::move(x), xi};
        }
    }
    throw ConfigError("mirror_step: unknown penalty variant");
}

}  // namespace sgdtheta
