#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "johnwalk/corpus.hpp"
#include "johnwalk/walk.hpp"

using namespace johnwalk;
using namespace johnwalk::walk;

TEST_CASE("radius") {
    CHECK(radius(1, 0.5) == 0.5);
    CHECK(radius(4, 1.0) == doctest::Approx(1.0 / 32).epsilon(1e-15));
    for (Index n : {1, 2, 3, 7}) CHECK(radius(n, 0.3) / radius(4 * n, 0.3) == doctest::Approx(32.0).epsilon(1e-14));
    CHECK_THROWS_AS(radius(0, 1.0), InputError);
    CHECK_THROWS_AS(radius(2, 0.0), InputError);
    CHECK(default_gap(2) == doctest::Approx(2.0 / 1024).epsilon(1e-15));
}

TEST_CASE("proposals are uniform on the scaled ellipsoid") {
    const Index n = 3;
    const std::int64_t N = 100000;
    Rng rng = make_rng(11);
    const Ellipsoid unit(Mat::Identity(n, n), Vec::Zero(n));
    Vec sum = Vec::Zero(n);
    Mat cov = Mat::Zero(n, n);
    for (std::int64_t k = 0; k < N; ++k) {
        const Vec z = propose(unit, 1.0, rng);
        CHECK(local_norm(unit, z) <= 1.0 + 1e-12);
        sum += z;
        cov += z * z.transpose();
    }
    // each coordinate of the uniform ball has variance 1/(n+2)
    const double var = 1.0 / double(n + 2);
    const Vec mean = sum / double(N);
    CHECK(mean.cwiseAbs().maxCoeff() <= 4.0 * std::sqrt(var / double(N)));
    cov /= double(N);
    CHECK((cov - var * Mat::Identity(n, n)).cwiseAbs().maxCoeff() <= 0.01);

    Mat E(2, 2);
    E << 2, 0.5, 0.5, 1;
    Vec c(2);
    c << 1, -1;
    const Ellipsoid ell(E, c);
    for (int k = 0; k < 10000; ++k) CHECK(local_norm(ell, propose(ell, 0.1, rng)) <= 0.1 + 1e-12);
}

TEST_CASE("box symmetrizations are diagonal") {
    const Polytope cube = corpus::cube(3);
    WalkConfig cfg;
    cfg.gap = 1e-13;
    Rng rng = make_rng(2);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    for (int k = 0; k < 20; ++k) {
        Vec z(3);
        z << u(rng), u(rng), u(rng);
        const Mat E = john_ellipsoid(cube, z, cfg).ellipsoid.E();
        const Vec d = (1.0 - z.cwiseAbs().array()).matrix();
        CHECK((E - Mat(d.asDiagonal())).norm() <= 1e-9);
    }
}

TEST_CASE("step accounting") {
    const Polytope P = corpus::simplex(3);
    WalkConfig cfg;
    cfg.c = 2.0;
    cfg.seed = 3;
    WalkState s = init_state(P, Vec::Zero(3), cfg);
    CHECK(s.solver_calls == 1);
    for (int k = 0; k < 3000; ++k) {
        const Vec x = s.x;
        const Tallies before = s.tallies;
        const auto calls = s.solver_calls;
        john_step(P, s, cfg);
        CHECK(s.tallies.total() == before.total() + 1);
        if (s.tallies.lazy_hold > before.lazy_hold || s.tallies.reject_outside > before.reject_outside) {
            CHECK(s.solver_calls == calls);
            CHECK(s.x == x);
        } else {
            CHECK(s.solver_calls == calls + 1);
            if (s.tallies.accept > before.accept) {
                CHECK(interior(P, s.x));
                CHECK((s.ell.center() - s.x).norm() == 0.0);
            } else {
                CHECK(s.x == x);
            }
        }
    }
    CHECK(s.step_count == 3000);
    CHECK(s.tallies.lazy_hold > 1300);
    CHECK(s.tallies.lazy_hold < 1700);
    CHECK(s.tallies.reject_reversibility > 0);
    CHECK(s.tallies.accept > 0);
}

TEST_CASE("no filter rejections from the center of the cube") {
    for (Index n : {2, 3}) {
        const Polytope P = corpus::cube(n);
        WalkConfig cfg;
        cfg.lazy = false;
        cfg.c = 2.0;
        cfg.seed = 9;
        const WalkState start = init_state(P, Vec::Zero(n), cfg);
        WalkState s = start;
        for (int k = 0; k < 500; ++k) {
            WalkState t = start;
            t.rng = s.rng;
            john_step(P, t, cfg);
            s.rng = t.rng;
            CHECK(t.tallies.reject_filter == 0);
            CHECK(t.tallies.lazy_hold == 0);
        }
    }
}

TEST_CASE("chains") {
    const Polytope P = corpus::simplex(2);
    WalkConfig cfg;
    cfg.seed = 21;
    cfg.c = 1.0;
    const Vec x0 = Vec::Zero(2);
    const auto zero = run_chain(P, x0, 0, cfg);
    REQUIRE(zero.samples.size() == 1);
    CHECK(zero.samples[0] == x0);

    const auto a = run_chain(P, x0, 500, cfg, 4);
    const auto b = run_chain(P, x0, 500, cfg, 4);
    REQUIRE(a.samples.size() == 501);
    CHECK(a.samples == b.samples);
    CHECK(a.tallies.total() == 500);
    for (const Vec& x : a.samples) CHECK(interior(P, x));
    const auto c = run_chain(P, x0, 500, cfg, 5);
    CHECK(c.samples != a.samples);

    const auto ser = run_chains(P, x0, 200, 4, cfg, kernels::Exec::serial);
    const auto par = run_chains(P, x0, 200, 4, cfg, kernels::Exec::parallel);
    for (int k = 0; k < 4; ++k) {
        CHECK(ser[size_t(k)].samples == par[size_t(k)].samples);
        CHECK(ser[size_t(k)].solver_calls == par[size_t(k)].solver_calls);
    }
    CHECK(ser[0].samples == run_chain(P, x0, 200, cfg, 0).samples);

    CHECK_THROWS_AS(run_chain(P, Vec::Zero(3), 5, cfg), InputError);
    Vec corner(2);
    corner << -1.0, 0.0;
    CHECK_THROWS_AS(run_chain(P, corner, 5, cfg), InputError);
    CHECK_THROWS_AS(run_chain(P, x0, -1, cfg), InputError);
    CHECK_THROWS_AS(run_chains(P, x0, 5, 0, cfg), InputError);

    Mat A(1, 2);
    A << 1, 0;
    const Polytope half(A, Vec::Ones(1));
    CHECK_THROWS_AS(run_chain(half, x0, 5, cfg), UnboundedError);
}

TEST_CASE("filter probability two ways") {
    Rng rng = make_rng(8);
    std::normal_distribution<double> g;
    for (int k = 0; k < 100; ++k) {
        Mat B(3, 3), C(3, 3);
        for (Index i = 0; i < 9; ++i) {
            B.data()[i] = g(rng);
            C.data()[i] = g(rng);
        }
        const Ellipsoid ex(B * B.transpose() + 0.1 * Mat::Identity(3, 3), Vec::Zero(3));
        const Ellipsoid ez(C * C.transpose() + 0.1 * Mat::Identity(3, 3), Vec::Ones(3));
        const double r = 0.05;
        const double a = std::min(1.0, std::exp(ex.logdet() - ez.logdet()));
        const double b = std::min(1.0, std::exp(log_volume(ex, r) - log_volume(ez, r)));
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
    const Ellipsoid unit(Mat::Identity(2, 2), Vec::Zero(2));
    CHECK(log_volume(unit, 1.0) == doctest::Approx(std::log(M_PI)).epsilon(1e-14));
}

TEST_CASE("kernel density is symmetric") {
    const Polytope P = corpus::simplex(3);
    WalkConfig cfg;
    const double r = radius(3, 2.0);
    Rng rng = make_rng(12);
    int positive = 0;
    for (int k = 0; k < 100; ++k) {
        const Vec x = 0.3 * uniform_ball(3, rng);
        const Ellipsoid ex = john_ellipsoid(P, x, cfg).ellipsoid;
        const Vec y = propose(ex, r, rng);
        const Ellipsoid ey = john_ellipsoid(P, y, cfg).ellipsoid;
        const double a = transition_density(ex, ey, r);
        const double b = transition_density(ey, ex, r);
        CHECK(a == b);
        if (a > 0.0) ++positive;
    }
    CHECK(positive > 50);
}

TEST_CASE("ball walk") {
    const Polytope P = corpus::simplex(2);
    const Vec x0 = Vec::Zero(2);
    const auto tiny = run_ball_walk(P, x0, 1000, 1e-9, 1);
    CHECK(tiny.tallies.accept == 1000);
    const auto big = run_ball_walk(P, x0, 5000, 0.8, 1);
    CHECK(big.tallies.accept + big.tallies.reject_outside == 5000);
    CHECK(big.tallies.reject_outside > 0);
    for (const Vec& x : big.samples) CHECK(contains(P, x));
    CHECK(run_ball_walk(P, x0, 100, 0.8, 1).samples == run_ball_walk(P, x0, 100, 0.8, 1).samples);
    Rng rng = make_rng(0);
    CHECK_THROWS_AS(ball_walk_step(P, x0, 0.0, rng), InputError);
}

TEST_CASE("hit-and-run in one dimension is exact") {
    Mat A(2, 1);
    A << 1, -1;
    const Polytope I(A, Vec::Ones(2));
    Vec x(1);
    x << 0.7;
    Rng rng = make_rng(17);
    const int N = 100000;
    std::vector<double> u(N);
    for (int k = 0; k < N; ++k) {
        u[size_t(k)] = hit_and_run_step(I, x, rng)(0);
        CHECK(std::abs(u[size_t(k)]) < 1.0);
    }
    std::sort(u.begin(), u.end());
    double D = 0.0;
    for (int k = 0; k < N; ++k) {
        const double F = 0.5 * (u[size_t(k)] + 1.0);
        D = std::max({D, std::abs(F - double(k) / N), std::abs(F - double(k + 1) / N)});
    }
    // 0.1% critical value of the Kolmogorov distribution
    CHECK(D <= 1.95 / std::sqrt(double(N)));
}

TEST_CASE("walk names") {
    CHECK(parse_walk_kind("hitrun") == WalkKind::hitrun);
    CHECK(std::string(to_string(WalkKind::ball)) == "ball");
    CHECK_THROWS_AS(parse_walk_kind("dikin"), InputError);
}
