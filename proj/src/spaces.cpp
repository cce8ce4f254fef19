#include "sgdtheta/spaces.hpp"

#include <cmath>

namespace sgdtheta {

DataSpaceSpec::DataSpaceSpec(double r_, std::size_t dim_) : r(r_), dim(dim_) {
    if (!(r > 1.0)) throw InvalidExponentError("DataSpaceSpec: requires r > 1");
    if (dim == 0) throw DimensionError("DataSpaceSpec: dim must be positive");
}

double conj_exponent(double p) {
    if (!(p > 1.0)) throw InvalidExponentError("conj_exponent: requires p > 1");
    return p / (p - 1.0);
}

double abs_pow(double v, double e) {
    const double a = std::fabs(v);
    if (a == 0.0) return 0.0;
    if (e == 1.0) return a;
    if (e == 2.0) return a * a;
    // For fractional exponents, exp/log avoids 0^negative traps (zero handled above).
    return std::exp(e * std::log(a));
}

double lr_norm(std::span<const double> y, double r) {
    return lr_norm_weighted(y, {}, r);
}

double lr_norm_weighted(std::span<const double> y, std::span<const double> w, double r) {
    if (!(r >= 1.0)) throw InvalidExponentError("lr_norm: requires r >= 1");
    if (y.empty()) throw DimensionError("lr_norm: empty vector");
    if (!w.empty() && w.size() != y.size()) throw DimensionError("lr_norm: weight length mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double t = abs_pow(y[k], r);
        s += w.empty() ? t : w[k] * t;
    }
    if (s == 0.0) return 0.0;
    if (r == 1.0) return s;
    if (r == 2.0) return std::sqrt(s);
    return std::exp(std::log(s) / r);
}

DualVector duality_map(std::span<const double> y, double r) {
    DualVector out(y.size());
    duality_map_weighted(y, {}, r, out);
    return out;
}

void duality_map_weighted(std::span<const double> y, std::span<const double> w,
                          double r, std::span<double> out) {
    if (!(r > 1.0)) throw InvalidExponentError("duality_map: requires r > 1");
    if (out.size() != y.size()) throw DimensionError("duality_map: output length mismatch");
    if (!w.empty() && w.size() != y.size()) throw DimensionError("duality_map: weight length mismatch");
    const double e = r - 1.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double v = y[k];
        double m = (v == 0.0) ? 0.0 : std::copysign(abs_pow(v, e), v);
        if (!w.empty()) m *= w[k];
        out[k] = m;
    }
}

}  // namespace sgdtheta
