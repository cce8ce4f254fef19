#include <cmath>
#include <limits>

#include <doctest.h>

#include "sgdtheta/checks.hpp"
#include "sgdtheta/penalty.hpp"
#include "sgdtheta/rng.hpp"
#include "sgdtheta/spaces.hpp"

using namespace sgdtheta;

TEST_CASE("penalty values") {
    SUBCASE("quadratic") {
        CHECK(penalty_value(PenaltySpec::quadratic(), Vector{3.0, 4.0}) == doctest::Approx(12.5));
    }
    SUBCASE("nonnegativity indicator") {
        const double v = penalty_value(PenaltySpec::quadratic_nonneg(), Vector{1.0, -1.0});
        CHECK(std::isinf(v));
        CHECK(penalty_value(PenaltySpec::quadratic_nonneg(), Vector{1.0, 2.0}) ==
              doctest::Approx(2.5));
    }
    SUBCASE("quadratic + TV on a 2x2 image") {
        const PenaltySpec spec = PenaltySpec::quadratic_tv(5.0, {2, 2});
        // image rows (0,1),(0,1): two unit horizontal jumps, quadratic part 2/(2*5).
        CHECK(penalty_value(spec, Vector{0.0, 1.0, 0.0, 1.0}) == doctest::Approx(2.2).epsilon(1e-14));
    }
    SUBCASE("dimension mismatch") {
        const PenaltySpec spec = PenaltySpec::quadratic_tv(5.0, {2, 2});
        CHECK_THROWS_AS(penalty_value(spec, Vector{1.0, 2.0}), DimensionError);
    }
    SUBCASE("TV spec keeps sigma * 2 beta = 1") {
        const PenaltySpec spec = PenaltySpec::quadratic_tv(5.0, {4, 4});
        CHECK(spec.sigma * 2.0 * spec.beta == 1.0);
        CHECK(spec.p == 2.0);
    }
}

TEST_CASE("bregman distance") {
    SUBCASE("quadratic closed form") {
        const BregmanPair pair{Vector{0.0, 0.0}, DualVector{0.0, 0.0}};
        CHECK(bregman_distance(PenaltySpec::quadratic(), Vector{1.0, 0.0}, pair) ==
              doctest::Approx(0.5));
    }
    SUBCASE("zero distance to itself") {
        const PenaltySpec spec = PenaltySpec::quadratic_nonneg();
        const BregmanPair pair = mirror_step(spec, DualVector{0.7, -0.3});
        CHECK(bregman_distance(spec, pair.x, pair) == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("nonneg hand value") {
        const PenaltySpec spec = PenaltySpec::quadratic_nonneg();
        const BregmanPair pair = mirror_step(spec, DualVector{1.0});
        CHECK(bregman_distance(spec, Vector{2.0}, pair) == doctest::Approx(0.5));
    }
    SUBCASE("infeasible target") {
        const PenaltySpec spec = PenaltySpec::quadratic_nonneg();
        const BregmanPair pair = mirror_step(spec, DualVector{1.0});
        CHECK_THROWS_AS(bregman_distance(spec, Vector{-1.0}, pair), InfeasibleTargetError);
    }
}

TEST_CASE("bregman distance dominates sigma ||target - x||^2") {
    CounterRng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        DualVector xi(6);
        Vector target(6);
        for (double& v : xi) v = 2.0 * rng.next_symmetric();
        for (double& v : target) v = rng.next_unit();  // feasible for nonneg

        for (const PenaltySpec& spec : {PenaltySpec::quadratic(), PenaltySpec::quadratic_nonneg()}) {
            const BregmanPair pair = mirror_step(spec, xi);
            double dist2 = 0.0;
            for (std::size_t k = 0; k < 6; ++k)
                dist2 += (target[k] - pair.x[k]) * (target[k] - pair.x[k]);
            const double d = bregman_distance(spec, target, pair);
            CHECK(d >= spec.sigma * dist2 - 1e-12);
        }
    }
    SUBCASE("TV variant with PDHG pairs") {
        PdhgConfig cfg;
        cfg.max_iters = 5000;
        cfg.gap_tol = 1e-10;
        const PenaltySpec spec = PenaltySpec::quadratic_tv(2.0, {2, 3});
        for (int trial = 0; trial < 20; ++trial) {
            DualVector xi(6);
            Vector target(6);
            for (double& v : xi) v = rng.next_symmetric();
            for (double& v : target) v = rng.next_symmetric();
            const BregmanPair pair = mirror_step(spec, xi, cfg);
            double dist2 = 0.0;
            for (std::size_t k = 0; k < 6; ++k)
                dist2 += (target[k] - pair.x[k]) * (target[k] - pair.x[k]);
            const double d = bregman_distance(spec, target, pair);
            CHECK(d >= spec.sigma * dist2 - 1e-6);
        }
    }
}

TEST_CASE("mirror step closed forms") {
    SUBCASE("nonneg clamps") {
        const BregmanPair pair =
            mirror_step(PenaltySpec::quadratic_nonneg(), DualVector{1.0, -2.0, 0.5});
        CHECK(pair.x == Vector{1.0, 0.0, 0.5});
        CHECK(pair.xi == DualVector{1.0, -2.0, 0.5});
    }
    SUBCASE("quadratic at zero") {
        const BregmanPair pair = mirror_step(PenaltySpec::quadratic(), DualVector{0.0, 0.0});
        CHECK(pair.x == Vector{0.0, 0.0});
    }
    SUBCASE("TV of a constant dual is beta * xi") {
        const PenaltySpec spec = PenaltySpec::quadratic_tv(5.0, {3, 3});
        const BregmanPair pair = mirror_step(spec, DualVector(9, 0.04));
        for (double v : pair.x) CHECK(v == doctest::Approx(0.2).epsilon(1e-12));
    }
}

TEST_CASE("mirror step is the argmin of theta(z) - <xi, z>") {
    CounterRng rng(41);
    for (const PenaltySpec& spec : {PenaltySpec::quadratic(), PenaltySpec::quadratic_nonneg()}) {
        DualVector xi(5);
        for (double& v : xi) v = 2.0 * rng.next_symmetric();
        const BregmanPair pair = mirror_step(spec, xi);
        const double at_min = penalty_value(spec, pair.x) - dot(xi, pair.x);
        for (int trial = 0; trial < 1000; ++trial) {
            Vector z(5);
            for (double& v : z) v = 3.0 * rng.next_symmetric();
            const double fz = penalty_value(spec, z);
            if (std::isinf(fz)) continue;  // infeasible z trivially dominates
            CHECK(fz - dot(xi, z) >= at_min - 1e-10);
        }
    }
}

TEST_CASE("three-point identity for the quadratic penalty") {
    CounterRng rng(53);
    const PenaltySpec spec = PenaltySpec::quadratic();
    for (int trial = 0; trial < 50; ++trial) {
        DualVector xa(7), xb(7);
        Vector target(7);
        for (double& v : xa) v = 2.0 * rng.next_symmetric();
        for (double& v : xb) v = 2.0 * rng.next_symmetric();
        for (double& v : target) v = 2.0 * rng.next_symmetric();
        const BregmanPair pa = mirror_step(spec, xa);
        const BregmanPair pb = mirror_step(spec, xb);
        const double lhs = bregman_distance(spec, target, pb) - bregman_distance(spec, target, pa);
        // theta*(xi) = 1/2 ||xi||^2 in closed form.
        const double conj_b = 0.5 * dot(xb, xb);
        const double conj_a = 0.5 * dot(xa, xa);
        double cross = 0.0;
        for (std::size_t k = 0; k < 7; ++k) cross += (xb[k] - xa[k]) * target[k];
        CHECK(lhs == doctest::Approx(conj_b - conj_a - cross).epsilon(1e-10));
    }
}

TEST_CASE("tv denoise basics") {
    SUBCASE("constant image is a fixed point") {
        const Vector g(12, 0.7);
        const Vector z = tv_denoise_pdhg(g, {3, 4}, 1.5);
        CHECK(z == g);
    }
    SUBCASE("two-column image shrinks toward the mean") {
        // Column-constant 2x2 image behaves like the 1D two-point prox.
        const Vector g{0.0, 10.0, 0.0, 10.0};
        PdhgConfig cfg;
        cfg.max_iters = 20000;
        cfg.gap_tol = 1e-12;
        const Vector z = tv_denoise_pdhg(g, {2, 2}, 1.0, cfg);
        const Vector oracle = tv_prox_1d_oracle(Vector{0.0, 10.0}, 1.0);
        CHECK(oracle[0] == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(oracle[1] == doctest::Approx(9.0).epsilon(1e-10));
        CHECK(std::fabs(z[0] - oracle[0]) <= 1e-4);
        CHECK(std::fabs(z[1] - oracle[1]) <= 1e-4);
        CHECK(std::fabs(z[2] - oracle[0]) <= 1e-4);
        CHECK(std::fabs(z[3] - oracle[1]) <= 1e-4);
    }
    SUBCASE("objective never increases and the mean is preserved") {
        CounterRng rng(67);
        const GridShape grid{5, 6};
        for (int trial = 0; trial < 25; ++trial) {
            Vector g(grid.size());
            for (double& v : g) v = 3.0 * rng.next_symmetric();
            const Vector z = tv_denoise_pdhg(g, grid, 2.5);
            auto objective = [&](const Vector& v) {
                double q = 0.0;
                for (std::size_t k = 0; k < v.size(); ++k) q += (v[k] - g[k]) * (v[k] - g[k]);
                return q / (2.0 * 2.5) + tv_isotropic(v, grid);
            };
            CHECK(objective(z) <= objective(g) + 1e-12);
            double mg = 0.0, mz = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k) {
                mg += g[k];
                mz += z[k];
            }
            CHECK(mz / g.size() == doctest::Approx(mg / g.size()).epsilon(1e-8));
        }
    }
    SUBCASE("non-finite input is rejected") {
        Vector g(4, 1.0);
        g[2] = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(tv_denoise_pdhg(g, {2, 2}, 1.0), NumericalError);
    }
}

TEST_CASE("pdhg matches the 1D oracle on short signals") {
    CounterRng rng(71);
    PdhgConfig cfg;
    cfg.max_iters = 20000;
    cfg.gap_tol = 1e-11;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t len = 2 + rng.next_below(4);
        const double beta = 0.2 + 2.0 * rng.next_unit();
        Vector g(len);
        for (double& v : g) v = 2.0 * rng.next_symmetric();
        const Vector want = tv_prox_1d_oracle(g, beta);
        const Vector got = tv_denoise_pdhg(g, GridShape{1, len}, beta, cfg);
        for (std::size_t k = 0; k < len; ++k)
            CHECK(std::fabs(got[k] - want[k]) <= 1e-3);
    }
}

TEST_CASE("1D oracle sanity") {
    SUBCASE("constant signal unchanged") {
        const Vector z = tv_prox_1d_oracle(Vector{2.0, 2.0, 2.0}, 1.0);
        for (double v : z) CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("objective at the oracle beats small perturbations") {
        CounterRng rng(73);
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t len = 2 + rng.next_below(4);
            const double beta = 0.3 + rng.next_unit();
            Vector g(len);
            for (double& v : g) v = 2.0 * rng.next_symmetric();
            const Vector z = tv_prox_1d_oracle(g, beta);
            auto obj = [&](const Vector& v) {
                double q = 0.0;
                for (std::size_t k = 0; k < len; ++k) q += (v[k] - g[k]) * (v[k] - g[k]);
                q /= 2.0 * beta;
                for (std::size_t k = 0; k + 1 < len; ++k) q += std::fabs(v[k + 1] - v[k]);
                return q;
            };
            const double base = obj(z);
            for (std::size_t k = 0; k < len; ++k) {
                Vector zp = z;
                zp[k] += 1e-6;
                CHECK(obj(zp) >= base - 1e-12);
                zp[k] -= 2e-6;
                CHECK(obj(zp) >= base - 1e-12);
            }
        }
    }
}

TEST_CASE("pdhg warm start reproduces the cold solution") {
    CounterRng rng(79);
    const GridShape grid{4, 4};
    Vector g(grid.size());
    for (double& v : g) v = rng.next_symmetric();
    PdhgConfig cfg;
    cfg.max_iters = 4000;
    cfg.gap_tol = 1e-10;
    PdhgState warm;
    const Vector first = tv_denoise_pdhg(g, grid, 1.0, cfg, &warm);
    const Vector second = tv_denoise_pdhg(g, grid, 1.0, cfg, &warm);
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(second[k] == doctest::Approx(first[k]).epsilon(1e-7));
}

TEST_CASE("pdhg config validation") {
    PdhgConfig bad;
    bad.tau_primal = 1.0;
    bad.sigma_dual = 1.0;  // product * 8 > 1
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
