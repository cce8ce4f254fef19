#include "sgdtheta/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace sgdtheta {

double SparseRowBlock::row_dot(std::size_t row, std::span<const double> x) const {
    if (row >= rows) throw DimensionError("SparseRowBlock: row out of range");
    if (x.size() != cols) throw DimensionError("SparseRowBlock: domain size mismatch");
    double s = 0.0;
    for (std::uint64_t k = offsets[row]; k < offsets[row + 1]; ++k)
        s += values[k] * x[indices[k]];
    return s;
}

void SparseRowBlock::row_axpy(std::size_t row, double a, std::span<double> acc) const {
    if (row >= rows) throw DimensionError("SparseRowBlock: row out of range");
    if (acc.size() != cols) throw DimensionError("SparseRowBlock: domain size mismatch");
    for (std::uint64_t k = offsets[row]; k < offsets[row + 1]; ++k)
        acc[indices[k]] += a * values[k];
}

void SparseRowBlock::apply(std::span<const double> x, std::span<double> out) const {
    if (out.size() != rows) throw DimensionError("SparseRowBlock: range size mismatch");
    for (std::size_t r = 0; r < rows; ++r) out[r] = row_dot(r, x);
}

void SparseRowBlock::apply_transpose(std::span<const double> y, std::span<double> out) const {
    if (y.size() != rows || out.size() != cols)
        throw DimensionError("SparseRowBlock: transpose size mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t r = 0; r < rows; ++r) row_axpy(r, y[r], out);
}

double SparseRowBlock::row_norm2(std::size_t row) const {
    if (row >= rows) throw DimensionError("SparseRowBlock: row out of range");
    double s = 0.0;
    for (std::uint64_t k = offsets[row]; k < offsets[row + 1]; ++k) s += values[k] * values[k];
    return std::sqrt(s);
}

void SparseRowBlock::validate() const {
    if (offsets.size() != rows + 1) throw IoError("SparseRowBlock: offsets length mismatch");
    if (offsets.front() != 0 || offsets.back() != values.size() || indices.size() != values.size())
        throw IoError("SparseRowBlock: inconsistent nnz bookkeeping");
    for (std::size_t r = 0; r < rows; ++r)
        if (offsets[r] > offsets[r + 1]) throw IoError("SparseRowBlock: offsets not nondecreasing");
    for (std::uint64_t c : indices)
        if (c >= cols) throw IoError("SparseRowBlock: column index out of range");
    if (!all_finite(values)) throw IoError("SparseRowBlock: non-finite values");
}

namespace {

/// One ray's pixel crossings via parametric grid-line traversal: collect the
/// parameters where the ray crosses vertical/horizontal pixel edges, then
/// attribute each interval to the pixel containing its midpoint.
void trace_ray(std::size_t n, double px, double py, double dx, double dy,
               std::map<std::uint64_t, double>& row) {
    const double half = 0.5 * static_cast<double>(n);
    // Clip to the image box [-half, half]^2 (slab method).
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < 2; ++axis) {
        const double p = axis == 0 ? px : py;
        const double d = axis == 0 ? dx : dy;
        if (d == 0.0) {
            if (p < -half || p > half) return;
        } else {
            double a = (-half - p) / d, b = (half - p) / d;
            if (a > b) std::swap(a, b);
            t0 = std::max(t0, a);
            t1 = std::min(t1, b);
        }
    }
    if (!(t0 < t1)) return;

    std::vector<double> cuts;
    cuts.reserve(2 * n + 2);
    cuts.push_back(t0);
    cuts.push_back(t1);
    for (std::size_t k = 0; k <= n; ++k) {
        const double line = -half + static_cast<double>(k);
        if (dx != 0.0) {
            const double t = (line - px) / dx;
            if (t > t0 && t < t1) cuts.push_back(t);
        }
        if (dy != 0.0) {
            const double t = (line - py) / dy;
            if (t > t0 && t < t1) cuts.push_back(t);
        }
    }
    std::sort(cuts.begin(), cuts.end());

    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double len = cuts[k + 1] - cuts[k];
        if (len <= 0.0) continue;
        const double tm = 0.5 * (cuts[k] + cuts[k + 1]);
        const double x = px + tm * dx, y = py + tm * dy;
        const auto col = static_cast<std::int64_t>(std::floor(x + half));
        const auto rix = static_cast<std::int64_t>(std::floor(half - y));
        if (col < 0 || col >= static_cast<std::int64_t>(n) || rix < 0 ||
            rix >= static_cast<std::int64_t>(n))
            continue;
        row[static_cast<std::uint64_t>(rix) * n + static_cast<std::uint64_t>(col)] += len;
    }
}

}  // namespace

SparseRowBlock build_parallel_tomo(std::size_t n, const std::vector<double>& angles_deg,
                                   std::size_t n_lines) {
    if (n < 2) throw DimensionError("build_parallel_tomo: grid size must be >= 2");
    if (angles_deg.empty()) throw ConfigError("build_parallel_tomo: empty angle list");
    if (n_lines == 0) throw ConfigError("build_parallel_tomo: need at least one line");

    SparseRowBlock F;
    F.rows = angles_deg.size() * n_lines;
    F.cols = n * n;
    F.offsets.reserve(F.rows + 1);
    F.offsets.push_back(0);

    for (double deg : angles_deg) {
        const double phi = deg * M_PI / 180.0;
        double cx = std::cos(phi), sx = std::sin(phi);
        // Snap sub-ulp trig residue so multiples of 90 degrees give exactly
        // axis-aligned rays (cos(pi/2) evaluates to ~6e-17, not 0).
        if (std::fabs(cx) < 1e-12) cx = 0.0;
        if (std::fabs(sx) < 1e-12) sx = 0.0;
        for (std::size_t j = 0; j < n_lines; ++j) {
            const double t = static_cast<double>(j) - 0.5 * static_cast<double>(n_lines - 1);
            std::map<std::uint64_t, double> row;
            // Ray: t * (cx, sx) + s * (-sx, cx).
            trace_ray(n, t * cx, t * sx, -sx, cx, row);
            for (const auto& [col, len] : row) {
                F.indices.push_back(col);
                F.values.push_back(len);
            }
            F.offsets.push_back(F.values.size());
        }
    }
    return F;
}

Vector radon_row_apply(const SparseRowBlock& block, std::size_t row_begin,
                       std::size_t row_end, std::span<const double> x) {
    if (row_begin > row_end || row_end > block.rows)
        throw DimensionError("radon_row_apply: row range out of bounds");
    Vector out(row_end - row_begin);
    for (std::size_t r = row_begin; r < row_end; ++r) out[r - row_begin] = block.row_dot(r, x);
    return out;
}

Vector poisson_apply(std::span<const double> u, GridShape grid) {
    if (u.size() != grid.size()) throw DimensionError("poisson_apply: size mismatch");
    if (grid.rows != grid.cols || grid.rows < 2) throw DimensionError("poisson_apply: need square grid, n >= 2");
    const std::size_t n = grid.rows;
    const double h = 2.0 / static_cast<double>(n - 1);
    const double ih2 = 1.0 / (h * h);
    Vector out(u.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t k = i * n + j;
            const double up = (i > 0) ? u[k - n] : 0.0;
            const double dn = (i + 1 < n) ? u[k + n] : 0.0;
            const double lf = (j > 0) ? u[k - 1] : 0.0;
            const double rt = (j + 1 < n) ? u[k + 1] : 0.0;
            out[k] = u[k] + ih2 * (4.0 * u[k] - up - dn - lf - rt);
        }
    return out;
}

Vector poisson_solve(std::span<const double> w, GridShape grid, const PoissonSolveConfig& cfg) {
    if (w.size() != grid.size()) throw DimensionError("poisson_solve: size mismatch");
    if (!(cfg.cg_tol > 0.0)) throw ConfigError("poisson_solve: cg_tol must be > 0");
    ensure_finite(w, "poisson_solve: right-hand side");

    const std::size_t m = w.size();
    const std::size_t cap = cfg.cg_max_iters ? cfg.cg_max_iters : 10 * m;
    Vector u(m, 0.0);
    const double bnorm = norm2(w);
    if (bnorm == 0.0) return u;

    Vector r(w.begin(), w.end()), d = r, ad(m);
    double rr = dot(r, r);
    for (std::size_t it = 0; it < cap; ++it) {
        ad = poisson_apply(d, grid);
        const double alpha = rr / dot(d, ad);
        for (std::size_t k = 0; k < m; ++k) {
            u[k] += alpha * d[k];
            r[k] -= alpha * ad[k];
        }
        const double rr_new = dot(r, r);
        if (std::sqrt(rr_new) <= cfg.cg_tol * bnorm) return u;
        const double beta = rr_new / rr;
        for (std::size_t k = 0; k < m; ++k) d[k] = r[k] + beta * d[k];
        rr = rr_new;
    }
    throw ConvergenceError("poisson_solve: CG failed to reach tolerance within iteration cap");
}

SchlierenOperator::SchlierenOperator(std::size_t grid_n, double angle_rad, std::size_t detectors)
    : n_(grid_n), angle_(angle_rad) {
    if (grid_n < 2) throw DimensionError("SchlierenOperator: grid size must be >= 2");
    const std::size_t n_det =
        detectors ? detectors : static_cast<std::size_t>(std::ceil(1.5 * static_cast<double>(grid_n)));
    if (n_det < 2) throw DimensionError("SchlierenOperator: need at least two detectors");

    const double root2 = std::sqrt(2.0);
    const double h = 2.0 / static_cast<double>(n_ - 1);      // grid spacing
    const double ds = 2.0 * root2 / static_cast<double>(n_det - 1);
    const double cx = std::cos(angle_rad), sx = std::sin(angle_rad);
    const auto quad_count = static_cast<std::size_t>(std::ceil(2.0 * root2 / h));

    radon_.rows = n_det;
    radon_.cols = n_ * n_;
    radon_.offsets.push_back(0);

    for (std::size_t j = 0; j < n_det; ++j) {
        const double s = -root2 + static_cast<double>(j) * ds;
        std::map<std::uint64_t, double> row;
        for (std::size_t k = 0; k < quad_count; ++k) {
            const double r = -root2 + (static_cast<double>(k) + 0.5) * h;
            const double x = s * cx - r * sx;
            const double y = s * sx + r * cx;
            if (x < -1.0 || x > 1.0 || y < -1.0 || y > 1.0) continue;
            // Bilinear weights on the node grid; row 0 at y = +1.
            double gc = (x + 1.0) / h;
            double gr = (1.0 - y) / h;
            auto c0 = static_cast<std::size_t>(std::min(gc, static_cast<double>(n_ - 2)));
            auto r0 = static_cast<std::size_t>(std::min(gr, static_cast<double>(n_ - 2)));
            const double fc = gc - static_cast<double>(c0);
            const double fr = gr - static_cast<double>(r0);
            row[r0 * n_ + c0] += h * (1.0 - fr) * (1.0 - fc);
            row[r0 * n_ + c0 + 1] += h * (1.0 - fr) * fc;
            row[(r0 + 1) * n_ + c0] += h * fr * (1.0 - fc);
            row[(r0 + 1) * n_ + c0 + 1] += h * fr * fc;
        }
        for (const auto& [col, v] : row) {
            radon_.indices.push_back(col);
            radon_.values.push_back(v);
        }
        radon_.offsets.push_back(radon_.values.size());
    }

    weights_.assign(n_det, ds);
    weights_.front() = 0.5 * ds;
    weights_.back() = 0.5 * ds;
}

Vector SchlierenOperator::radon(std::span<const double> f) const {
    Vector out(radon_.rows);
    radon_.apply(f, out);
    return out;
}

Vector SchlierenOperator::apply(std::span<const double> f) const {
    Vector rf = radon(f);
    for (double& v : rf) v = v * v;
    return rf;
}

Vector SchlierenOperator::derivative_apply(std::span<const double> f,
                                           std::span<const double> h) const {
    const Vector rf = radon(f);
    Vector rh = radon(h);
    for (std::size_t k = 0; k < rh.size(); ++k) rh[k] = 2.0 * rf[k] * rh[k];
    return rh;
}

DualVector SchlierenOperator::derivative_adjoint(std::span<const double> f,
                                                 std::span<const double> g,
                                                 const PoissonSolveConfig& cfg) const {
    if (g.size() != radon_.rows) throw DimensionError("SchlierenOperator: detector size mismatch");
    ensure_finite(g, "schlieren derivative_adjoint: input");
    Vector rf = radon(f);
    for (std::size_t k = 0; k < rf.size(); ++k) rf[k] = 2.0 * g[k] * rf[k];
    Vector w(radon_.cols);
    radon_.apply_transpose(rf, w);
    return poisson_solve(w, grid(), cfg);
}

std::vector<double> SchlierenOperator::uniform_angles(std::size_t count) {
    if (count == 0) throw ConfigError("SchlierenOperator: need at least one direction");
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(count);
    return out;
}

}  // namespace sgdtheta
