#pragma once

#include <memory>
#include <vector>

#include "sgdtheta/operators.hpp"
#include "sgdtheta/sampling.hpp"
#include "sgdtheta/types.hpp"

namespace sgdtheta {

/// A family of forward operators F_i : X -> Y_i sharing discretization data.
/// Linear members satisfy derivative_apply(x, h) = apply(h) - apply(0); every
/// member satisfies the adjoint identity
///   <derivative_apply(x, h), g> = <h, derivative_adjoint(x, g)>
/// in coordinate dot products.
class ForwardOperatorFamily {
public:
    virtual ~ForwardOperatorFamily() = default;

    virtual std::size_t count() const = 0;
    virtual std::size_t domain_dim() const = 0;
    virtual std::size_t out_dim(std::size_t i) const = 0;
    virtual bool is_linear() const = 0;

    virtual void apply(std::size_t i, std::span<const double> x, std::span<double> out) const = 0;
    virtual void derivative_apply(std::size_t i, std::span<const double> x,
                                  std::span<const double> h, std::span<double> out) const = 0;

    /// acc += scale * F_i'(x)^* g.
    virtual void derivative_adjoint_add(std::size_t i, std::span<const double> x,
                                        std::span<const double> g, double scale,
                                        std::span<double> acc) const = 0;

    /// Quadrature weights of Y_i's norm; empty = plain coordinate norm.
    virtual std::span<const double> data_weights(std::size_t) const { return {}; }
};

/// CT family: each equation is one row of a sparse projector (Y_i = R).
class CtRowFamily : public ForwardOperatorFamily {
public:
    explicit CtRowFamily(SparseRowBlock projector);

    std::size_t count() const override { return F_.rows; }
    std::size_t domain_dim() const override { return F_.cols; }
    std::size_t out_dim(std::size_t) const override { return 1; }
    bool is_linear() const override { return true; }

    void apply(std::size_t i, std::span<const double> x, std::span<double> out) const override;
    void derivative_apply(std::size_t i, std::span<const double> x, std::span<const double> h,
                          std::span<double> out) const override;
    void derivative_adjoint_add(std::size_t i, std::span<const double> x,
                                std::span<const double> g, double scale,
                                std::span<double> acc) const override;

    const SparseRowBlock& projector() const { return F_; }

private:
    SparseRowBlock F_;
};

/// Schlieren family: one nonlinear operator per recording direction, with
/// trapezoid-weighted detector norms.
class SchlierenFamily : public ForwardOperatorFamily {
public:
    SchlierenFamily(std::size_t grid_n, std::size_t directions, std::size_t detectors = 0,
                    PoissonSolveConfig poisson = {});

    std::size_t count() const override { return ops_.size(); }
    std::size_t domain_dim() const override { return grid_n_ * grid_n_; }
    std::size_t out_dim(std::size_t i) const override { return ops_[i].out_dim(); }
    bool is_linear() const override { return false; }

    void apply(std::size_t i, std::span<const double> x, std::span<double> out) const override;
    void derivative_apply(std::size_t i, std::span<const double> x, std::span<const double> h,
                          std::span<double> out) const override;
    void derivative_adjoint_add(std::size_t i, std::span<const double> x,
                                std::span<const double> g, double scale,
                                std::span<double> acc) const override;
    std::span<const double> data_weights(std::size_t i) const override;

    const SchlierenOperator& op(std::size_t i) const { return ops_.at(i); }

private:
    std::size_t grid_n_;
    PoissonSolveConfig poisson_;
    std::vector<SchlierenOperator> ops_;
};

/// Dense test family: each equation is one row of a dense matrix.
class DenseRowFamily : public ForwardOperatorFamily {
public:
    DenseRowFamily(std::vector<Vector> rows);

    std::size_t count() const override { return rows_.size(); }
    std::size_t domain_dim() const override { return rows_.empty() ? 0 : rows_[0].size(); }
    std::size_t out_dim(std::size_t) const override { return 1; }
    bool is_linear() const override { return true; }

    void apply(std::size_t i, std::span<const double> x, std::span<double> out) const override;
    void derivative_apply(std::size_t i, std::span<const double> x, std::span<const double> h,
                          std::span<double> out) const override;
    void derivative_adjoint_add(std::size_t i, std::span<const double> x,
                                std::span<const double> g, double scale,
                                std::span<double> acc) const override;

private:
    std::vector<Vector> rows_;
};

/// The N equations F_i(x) = y_i with noisy data and gate noise levels.
struct EquationSystem {
    std::shared_ptr<const ForwardOperatorFamily> family;
    std::vector<Vector> exact;   ///< may be empty when only noisy data exist
    std::vector<Vector> noisy;
    std::vector<double> delta;   ///< per-equation gate levels (0 = exact data)
    double r = 2.0;              ///< data-space exponent, 1 < r < inf

    std::size_t size() const { return family ? family->count() : 0; }
    std::size_t domain_dim() const { return family ? family->domain_dim() : 0; }

    void validate() const;

    /// Builds a system from a family and exact data; attaches noise.
    /// `gate_with_realized` replaces the a-priori gate levels by the realized
    /// misfits ||y_i^d - y_i||_r, which is what the per-path descent theory
    /// assumes (the a-priori Gaussian level does not bound every realization).
    static EquationSystem from_noisy(std::shared_ptr<const ForwardOperatorFamily> family,
                                     std::vector<Vector> exact, const NoiseSpec& noise,
                                     bool gate_with_realized = false);

    /// Exact-data system (all deltas zero).
    static EquationSystem exact_data(std::shared_ptr<const ForwardOperatorFamily> family,
                                     std::vector<Vector> data, double r = 2.0);
};

/// Per-equation exact data y_i = F_i(x_true).
std::vector<Vector> forward_data(const ForwardOperatorFamily& family, std::span<const double> x_true);

}  // namespace sgdtheta
