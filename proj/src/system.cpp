#include "sgdtheta/system.hpp"

#include <cmath>

namespace sgdtheta {

CtRowFamily::CtRowFamily(SparseRowBlock projector) : F_(std::move(projector)) { F_.validate(); }

void CtRowFamily::apply(std::size_t i, std::span<const double> x, std::span<double> out) const {
    if (out.size() != 1) throw DimensionError("CtRowFamily: scalar range expected");
    out[0] = F_.row_dot(i, x);
}

void CtRowFamily::derivative_apply(std::size_t i, std::span<const double>,
                                   std::span<const double> h, std::span<double> out) const {
    apply(i, h, out);
}

void CtRowFamily::derivative_adjoint_add(std::size_t i, std::span<const double>,
                                         std::span<const double> g, double scale,
                                         std::span<double> acc) const {
    if (g.size() != 1) throw DimensionError("CtRowFamily: scalar range expected");
    F_.row_axpy(i, scale * g[0], acc);
}

SchlierenFamily::SchlierenFamily(std::size_t grid_n, std::size_t directions,
                                 std::size_t detectors, PoissonSolveConfig poisson)
    : grid_n_(grid_n), poisson_(poisson) {
    ops_.reserve(directions);
    for (double phi : SchlierenOperator::uniform_angles(directions))
        ops_.emplace_back(grid_n, phi, detectors);
}

void SchlierenFamily::apply(std::size_t i, std::span<const double> x, std::span<double> out) const {
    Vector v = ops_.at(i).apply(x);
    std::copy(v.begin(), v.end(), out.begin());
}

void SchlierenFamily::derivative_apply(std::size_t i, std::span<const double> x,
                                       std::span<const double> h, std::span<double> out) const {
    Vector v = ops_.at(i).derivative_apply(x, h);
    std::copy(v.begin(), v.end(), out.begin());
}

void SchlierenFamily::derivative_adjoint_add(std::size_t i, std::span<const double> x,
                                             std::span<const double> g, double scale,
                                             std::span<double> acc) const {
    DualVector v = ops_.at(i).derivative_adjoint(x, g, poisson_);
    axpy(scale, v, acc);
}

std::span<const double> SchlierenFamily::data_weights(std::size_t i) const {
    return ops_.at(i).detector_weights();
}

DenseRowFamily::DenseRowFamily(std::vector<Vector> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) throw DimensionError("DenseRowFamily: need at least one row");
    for (const Vector& r : rows_)
        if (r.size() != rows_[0].size()) throw DimensionError("DenseRowFamily: ragged rows");
}

void DenseRowFamily::apply(std::size_t i, std::span<const double> x, std::span<double> out) const {
    out[0] = dot(rows_.at(i), x);
}

void DenseRowFamily::derivative_apply(std::size_t i, std::span<const double>,
                                      std::span<const double> h, std::span<double> out) const {
    out[0] = dot(rows_.at(i), h);
}

void DenseRowFamily::derivative_adjoint_add(std::size_t i, std::span<const double>,
                                            std::span<const double> g, double scale,
                                            std::span<double> acc) const {
    axpy(scale * g[0], rows_.at(i), acc);
}

void EquationSystem::validate() const {
    if (!family) throw ConfigError("EquationSystem: missing operator family");
    if (!(r > 1.0)) throw InvalidExponentError("EquationSystem: requires r > 1");
    const std::size_t n = family->count();
    if (noisy.size() != n || delta.size() != n)
        throw DimensionError("EquationSystem: data table size mismatch");
    if (!exact.empty() && exact.size() != n)
        throw DimensionError("EquationSystem: exact data table size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (noisy[i].size() != family->out_dim(i))
            throw DimensionError("EquationSystem: data dimension mismatch");
        if (!(delta[i] >= 0.0)) throw ConfigError("EquationSystem: negative noise level");
    }
}

EquationSystem EquationSystem::from_noisy(std::shared_ptr<const ForwardOperatorFamily> family,
                                          std::vector<Vector> exact, const NoiseSpec& noise,
                                          bool gate_with_realized) {
    std::vector<Vector> weights;
    weights.reserve(family->count());
    bool any = false;
    for (std::size_t i = 0; i < family->count(); ++i) {
        auto w = family->data_weights(i);
        weights.emplace_back(w.begin(), w.end());
        any = any || !w.empty();
    }
    NoisyDataset ds = apply_noise(noise, exact, any ? &weights : nullptr);
    EquationSystem sys;
    sys.family = std::move(family);
    sys.exact = std::move(exact);
    sys.noisy = std::move(ds.noisy);
    sys.delta = gate_with_realized ? std::move(ds.delta_realized) : std::move(ds.delta_gate);
    sys.r = noise.r;
    sys.validate();
    return sys;
}

EquationSystem EquationSystem::exact_data(std::shared_ptr<const ForwardOperatorFamily> family,
                                          std::vector<Vector> data, double r) {
    EquationSystem sys;
    sys.family = std::move(family);
    sys.exact = data;
    sys.noisy = std::move(data);
    sys.delta.assign(sys.family->count(), 0.0);
    sys.r = r;
    sys.validate();
    return sys;
}

std::vector<Vector> forward_data(const ForwardOperatorFamily& family, std::span<const double> x_true) {
    std::vector<Vector> out;
    out.reserve(family.count());
    for (std::size_t i = 0; i < family.count(); ++i) {
        Vector y(family.out_dim(i));
        family.apply(i, x_true, y);
        out.push_back(std::move(y));
    }
    return out;
}

}  // namespace sgdtheta
