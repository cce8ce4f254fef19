#include "sgdtheta/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "sgdtheta/spaces.hpp"

namespace sgdtheta {

IndexSampler::IndexSampler(std::uint64_t seed, std::size_t count, std::size_t batch_size)
    : seed_(seed), count_(count), batch_size_(batch_size) {
    if (count == 0) throw InvalidBatchError("IndexSampler: need at least one equation");
    if (batch_size == 0) throw InvalidBatchError("IndexSampler: batch size must be >= 1");
    if (batch_size > count) throw InvalidBatchError("IndexSampler: batch size exceeds equation count");
}

std::vector<std::size_t> IndexSampler::batch_at(std::uint64_t n) const {
    CounterRng rng(CounterRng::mix(seed_ ^ CounterRng::mix(0xB5AD4ECEDA1CE2A9ull + n)));
    // Partial Fisher-Yates over a virtual identity array.
    std::unordered_map<std::size_t, std::size_t> moved;
    auto look = [&moved](std::size_t i) {
        auto it = moved.find(i);
        return it == moved.end() ? i : it->second;
    };
    std::vector<std::size_t> out(batch_size_);
    for (std::size_t j = 0; j < batch_size_; ++j) {
        const std::size_t k = j + static_cast<std::size_t>(rng.next_below(count_ - j));
        out[j] = look(k);
        moved[k] = look(j);
    }
    return out;
}

std::vector<std::size_t> IndexSampler::next() { return batch_at(position_++); }

namespace {

struct Ellipse {
    double value, a, b, x0, y0, phi_deg;
};

// Toft intensity table: the superposition spans [0,1] natively.
constexpr Ellipse kSheppLogan[10] = {
    {1.00, 0.6900, 0.9200, 0.00, 0.0000, 0.0},
    {-0.80, 0.6624, 0.8740, 0.00, -0.0184, 0.0},
    {-0.20, 0.1100, 0.3100, 0.22, 0.0000, -18.0},
    {-0.20, 0.1600, 0.4100, -0.22, 0.0000, 18.0},
    {0.10, 0.2100, 0.2500, 0.00, 0.3500, 0.0},
    {0.10, 0.0460, 0.0460, 0.00, 0.1000, 0.0},
    {0.10, 0.0460, 0.0460, 0.00, -0.1000, 0.0},
    {0.10, 0.0460, 0.0230, -0.08, -0.6050, 0.0},
    {0.10, 0.0230, 0.0230, 0.00, -0.6060, 0.0},
    {0.10, 0.0230, 0.0460, 0.06, -0.6050, 0.0},
};

}  // namespace

Vector shepp_logan(std::size_t n) {
    if (n < 16) throw DimensionError("shepp_logan: grid size must be >= 16");
    Vector img(n * n, 0.0);
    const double step = 2.0 / static_cast<double>(n - 1);
    for (const Ellipse& e : kSheppLogan) {
        const double phi = e.phi_deg * M_PI / 180.0;
        const double c = std::cos(phi), s = std::sin(phi);
        for (std::size_t i = 0; i < n; ++i) {
            const double y = 1.0 - static_cast<double>(i) * step;
            for (std::size_t j = 0; j < n; ++j) {
                const double x = -1.0 + static_cast<double>(j) * step;
                const double dx = x - e.x0, dy = y - e.y0;
                const double u = (dx * c + dy * s) / e.a;
                const double v = (-dx * s + dy * c) / e.b;
                if (u * u + v * v <= 1.0) img[i * n + j] += e.value;
            }
        }
    }
    for (double& v : img) v = std::clamp(v, 0.0, 1.0);
    return img;
}

void NoiseSpec::validate() const {
    if (model == NoiseModel::SaltPepper) {
        if (!(kappa >= 0.0 && kappa <= 1.0))
            throw ConfigError("NoiseSpec: kappa must lie in [0,1]");
    } else if (!(delta_rel >= 0.0)) {
        throw ConfigError("NoiseSpec: delta_rel must be >= 0");
    }
    if (!(r > 1.0)) throw InvalidExponentError("NoiseSpec: requires r > 1");
}

NoisyDataset apply_noise(const NoiseSpec& spec, const std::vector<Vector>& exact,
                         const std::vector<Vector>* weights) {
    spec.validate();
    if (exact.empty()) throw DimensionError("apply_noise: empty dataset");
    if (weights && weights->size() != exact.size())
        throw DimensionError("apply_noise: weight table size mismatch");

    NoisyDataset out;
    out.r = spec.r;
    out.noisy.reserve(exact.size());
    out.delta_gate.resize(exact.size());
    out.delta_realized.resize(exact.size());

    auto wspan = [&](std::size_t i) -> std::span<const double> {
        if (!weights || (*weights)[i].empty()) return {};
        return (*weights)[i];
    };

    double ymax = exact[0][0], ymin = exact[0][0];
    if (spec.model == NoiseModel::SaltPepper) {
        for (const Vector& y : exact)
            for (double v : y) {
                ymax = std::max(ymax, v);
                ymin = std::min(ymin, v);
            }
    }

    CounterRng rng(spec.seed);
    for (std::size_t i = 0; i < exact.size(); ++i) {
        const Vector& y = exact[i];
        ensure_finite(y, "apply_noise: exact data");
        Vector noisy = y;
        switch (spec.model) {
            case NoiseModel::Gaussian: {
                const double scale = spec.delta_rel * lr_norm_weighted(y, wspan(i), 2.0);
                for (double& v : noisy) v += scale * rng.next_gaussian();
                out.delta_gate[i] = scale;
                break;
            }
            case NoiseModel::Uniform: {
                const double scale = spec.delta_rel * lr_norm_weighted(y, wspan(i), 2.0);
                for (double& v : noisy) v += scale * rng.next_symmetric();
                out.delta_gate[i] = scale;
                break;
            }
            case NoiseModel::SaltPepper: {
                for (double& v : noisy) {
                    const double u = rng.next_unit();
                    if (u < spec.kappa / 2.0)
                        v = ymax;
                    else if (u < spec.kappa)
                        v = ymin;
                }
                break;
            }
        }
        Vector diff(y.size());
        for (std::size_t k = 0; k < y.size(); ++k) diff[k] = noisy[k] - y[k];
        const bool all_zero = std::all_of(diff.begin(), diff.end(), [](double d) { return d == 0.0; });
        out.delta_realized[i] = all_zero ? 0.0 : lr_norm_weighted(diff, wspan(i), spec.r);
        if (spec.model == NoiseModel::SaltPepper) out.delta_gate[i] = out.delta_realized[i];
        out.noisy.push_back(std::move(noisy));
    }

    double s = 0.0;
    for (double d : out.delta_gate) s += abs_pow(d, spec.r);
    out.total_gate_delta = (s == 0.0) ? 0.0 : std::exp(std::log(s) / spec.r);
    return out;
}

}  // namespace sgdtheta
