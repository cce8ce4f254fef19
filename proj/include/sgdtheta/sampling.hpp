#pragma once

#include <cstdint>
#include <vector>

#include "sgdtheta/rng.hpp"
#include "sgdtheta/types.hpp"

namespace sgdtheta {

/// Reproducible batch sampler over equation indices [0, N).
///
/// Batch n is a without-replacement draw of batch_size indices, derived from
/// (seed, n) alone; successive batches are independent (with replacement
/// across batches). Copying the sampler forks the stream.
class IndexSampler {
public:
    IndexSampler(std::uint64_t seed, std::size_t count, std::size_t batch_size);

    /// Batch for iteration n, in draw order. Pure in (seed, n).
    std::vector<std::size_t> batch_at(std::uint64_t n) const;

    /// Batch at the current position, then advance.
    std::vector<std::size_t> next();

    std::uint64_t position() const { return position_; }
    std::size_t count() const { return count_; }
    std::size_t batch_size() const { return batch_size_; }
    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::size_t count_;
    std::size_t batch_size_;
    std::uint64_t position_ = 0;
};

/// Shepp-Logan head phantom on an n x n grid over [-1,1]^2, n >= 16.
/// Ten-ellipse superposition clipped to [0,1]; row 0 is the top of the image.
Vector shepp_logan(std::size_t n);

enum class NoiseModel { Gaussian, Uniform, SaltPepper };

struct NoiseSpec {
    NoiseModel model = NoiseModel::Gaussian;
    double delta_rel = 0.0;  ///< relative level (Gaussian/Uniform)
    double kappa = 0.0;      ///< corrupted fraction (SaltPepper)
    double r = 2.0;          ///< exponent measuring delta_i
    std::uint64_t seed = 0;

    void validate() const;
};

/// Noisy data with per-equation noise-level bookkeeping.
///
/// `delta_gate` is the level used in step-size gating: the a-priori level
/// delta_rel * ||y_i||_2 for Gaussian/Uniform, the realized ||y_i^d - y_i||_r
/// for SaltPepper. `delta_realized` always stores the realized misfit.
struct NoisyDataset {
    std::vector<Vector> noisy;
    std::vector<double> delta_gate;
    std::vector<double> delta_realized;
    double total_gate_delta = 0.0;  ///< (sum_i delta_gate_i^r)^(1/r)
    double r = 2.0;
};

/// Applies the noise model to per-equation exact data. Optional per-equation
/// quadrature weights define the norms used for scaling and for delta_i
/// (empty = plain coordinate norms).
NoisyDataset apply_noise(const NoiseSpec& spec, const std::vector<Vector>& exact,
                         const std::vector<Vector>* weights = nullptr);

}  // namespace sgdtheta
