#include <doctest.h>

#include <cmath>

#include "johnwalk/corpus.hpp"
#include "johnwalk/diagnostics.hpp"

using namespace johnwalk;
using namespace johnwalk::diagnostics;

namespace {

std::vector<double> ar1(double phi, std::int64_t N, std::uint64_t seed) {
    walk::Rng rng = walk::make_rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> x(static_cast<std::size_t>(N));
    double v = g(rng) / std::sqrt(1.0 - phi * phi);
    for (auto& e : x) {
        e = v;
        v = phi * v + g(rng);
    }
    return x;
}

std::vector<Vec> uniform_square(std::int64_t N, walk::Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vec> s(static_cast<std::size_t>(N), Vec(2));
    for (auto& x : s) x << u(rng), u(rng);
    return s;
}

} // namespace

TEST_CASE("record format") {
    const std::vector<Record> r{{"n2.det_dev_scaled", 0.5, 3.0, true}, {"x", 1e-12, 0.0, false}};
    CHECK(format_records(r) == "n2.det_dev_scaled 0.5 3 pass\nx 1e-12 0 fail\n");
}

TEST_CASE("single-step ellipsoid bounds on the cube") {
    const Index n = 3;
    const Polytope cube = corpus::cube(n);
    // closed form at y = t e1: E_y = diag(1 - t, 1, 1)
    walk::WalkConfig cfg;
    for (double t : {0.0, 0.01, 0.1}) {
        const Vec y = t * Vec::Unit(n, 0);
        const auto sol = walk::john_ellipsoid(cube, y, cfg);
        CHECK(std::exp(sol.ellipsoid.logdet()) == doctest::Approx(1.0 - t).epsilon(1e-9));
    }

    LemmaOptions opt;
    opt.seed = 4;
    opt.exec = kernels::Exec::serial;
    const auto a = check_step_lemmas(cube, Vec::Zero(n), 60, opt);
    CHECK(a.failures == 0);
    CHECK(a.trials == 60);
    CHECK(a.max_det_dev <= 3.0);
    CHECK(a.min_eig_dev <= 3.0);
    CHECK(a.crossratio_violations == 0);
    opt.exec = kernels::Exec::parallel;
    const auto b = check_step_lemmas(cube, Vec::Zero(n), 60, opt);
    CHECK(a.max_det_dev == b.max_det_dev);
    CHECK(a.min_eig_dev == b.min_eig_dev);
    for (const auto& rec : to_records(a)) CHECK(rec.pass);
    CHECK_THROWS_AS(check_step_lemmas(cube, Vec::Zero(n), 0, opt), InputError);

    // an off-center point on a random polytope
    walk::Rng rng = walk::make_rng(6);
    const Polytope P = corpus::random_polytope(4, 12, rng);
    const Vec x = 0.2 * analytic_center(P);
    const auto c = check_step_lemmas(P, x, 40, opt);
    CHECK(c.failures == 0);
    CHECK(c.crossratio_violations == 0);
    CHECK(c.max_det_dev <= 3.0);
}

TEST_CASE("total variation between uniform ellipsoids") {
    walk::Rng rng = walk::make_rng(1);
    const Ellipsoid a(Mat::Identity(3, 3), Vec::Zero(3));
    auto tv = estimate_tv_overlap(a, a, 1000, rng);
    CHECK(tv.value == 0.0);
    CHECK(tv.se == 0.0);
    const Ellipsoid far(Mat::Identity(3, 3), 3.0 * Vec::Unit(3, 0));
    tv = estimate_tv_overlap(a, far, 1000, rng);
    CHECK(tv.value == 1.0);
    for (Index n : {2, 5, 10}) {
        const double t = 0.125;
        const Ellipsoid b(Mat::Identity(n, n), Vec::Zero(n));
        const Ellipsoid c(Mat::Identity(n, n), (t / std::sqrt(double(n))) * Vec::Unit(n, 0));
        tv = estimate_tv_overlap(b, c, 100000, rng);
        CHECK(tv.value <= t + 3.0 * tv.se);
        CHECK(tv.value > 0.0);
    }
    CHECK_THROWS_AS(estimate_tv_overlap(a, a, 0, rng), InputError);
}

TEST_CASE("spherical caps") {
    walk::Rng rng = walk::make_rng(2);
    auto c = cap_volume_check(5, 0.0, 200000, rng);
    CHECK(std::abs(c.ratio - 0.5) <= 4.0 * c.se);
    CHECK(c.pass);
    c = cap_volume_check(4, 0.5, 1000, rng);
    CHECK(c.bound == 0.0);
    CHECK(c.pass);
    // exact fraction of the unit 4-ball beyond u_1 = 0.2 by quadrature
    c = cap_volume_check(4, 0.2, 200000, rng);
    CHECK(c.bound == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(std::abs(c.ratio - 0.33360956282535986) <= 4.0 * c.se);
    CHECK(c.pass);
    CHECK_THROWS_AS(cap_volume_check(4, 0.6, 10, rng), InputError);
}

TEST_CASE("chi-square statistic and p-value") {
    // four cells of mass 1/4 with counts 110, 90, 115, 85
    const Polytope sq = corpus::cube(2);
    const Vec lo = -Vec::Ones(2), hi = Vec::Ones(2);
    std::vector<Vec> s;
    const int counts[4] = {110, 90, 115, 85};
    for (int c = 0; c < 4; ++c) {
        Vec p(2);
        p << (c / 2 == 0 ? -0.5 : 0.5), (c % 2 == 0 ? -0.5 : 0.5);
        for (int k = 0; k < counts[c]; ++k) s.push_back(p);
    }
    ChiSquareOptions opt;
    opt.grid_per_axis = 2;
    opt.mc_per_cell = 100;
    auto r = uniformity_chi_square(s, sq, lo, hi, opt);
    for (double m : r.cell_mass) CHECK(m == 0.25);
    CHECK(r.counts == std::vector<std::int64_t>{110, 90, 115, 85});
    CHECK(r.statistic == doctest::Approx(6.5).epsilon(1e-14));
    CHECK(r.dof == 3.0);
    CHECK(r.p_value == doctest::Approx(0.08966250398816791).epsilon(1e-12));
    opt.variance_inflation = 2.0;
    r = uniformity_chi_square(s, sq, lo, hi, opt);
    CHECK(r.p_value == doctest::Approx(0.35466255978248934).epsilon(1e-12));

    std::vector<Vec> same(1000, Vec::Zero(2));
    opt = {};
    CHECK(uniformity_chi_square(same, sq, lo, hi, opt).p_value < 1e-12);
    CHECK_THROWS_AS(uniformity_chi_square(std::vector<Vec>(20, Vec::Zero(2)), sq, lo, hi, opt), InputError);
    std::vector<Vec> outside(200, Vec::Zero(2));
    outside[0] << 3.0, 0.0;
    CHECK_THROWS_AS(uniformity_chi_square(outside, sq, lo, hi, opt), InputError);
}

TEST_CASE("chi-square calibration on iid uniform samples") {
    const Polytope sq = corpus::cube(2);
    const Vec lo = -Vec::Ones(2), hi = Vec::Ones(2);
    walk::Rng rng = walk::make_rng(5);
    int small = 0;
    double mean = 0.0;
    const int runs = 40;
    for (int k = 0; k < runs; ++k) {
        const auto s = uniform_square(2000, rng);
        const double p = uniformity_chi_square(s, sq, lo, hi).p_value;
        mean += p / runs;
        if (p < 0.01) ++small;
    }
    CHECK(small <= 3);
    CHECK(mean > 0.35);
    CHECK(mean < 0.65);

    // a triangle inside its bounding box: masses follow the area
    const Polytope tri = corpus::simplex(2);
    const auto r = uniformity_chi_square(std::vector<Vec>(2000, Vec::Zero(2)), tri, -Vec::Ones(2), 2.0 * Vec::Ones(2),
                                         {3, 20000, 0, 1.0});
    // cells of side 1: three full cells, three half cells, three empty
    int full = 0, half = 0, empty = 0;
    for (double m : r.cell_mass) {
        if (std::abs(m - 1.0 / 4.5) < 0.01) ++full;
        if (std::abs(m - 0.5 / 4.5) < 0.01) ++half;
        if (m == 0.0) ++empty;
    }
    CHECK(full == 3);
    CHECK(half == 3);
    CHECK(empty == 3);
}

TEST_CASE("effective sample size") {
    const auto iid = ar1(0.0, 10000, 1);
    const double e = ess(iid);
    CHECK(e >= 8000);
    CHECK(e <= 12000);
    CHECK(ess(iid, kernels::Exec::serial) == ess(iid, kernels::Exec::parallel));

    const auto x = ar1(0.5, 100000, 2);
    const double expect = 100000.0 / 3.0;
    CHECK(std::abs(ess(x) - expect) <= 0.2 * expect);
    CHECK(autocorrelation_time(x) == doctest::Approx(100000.0 / ess(x)));

    // long strongly correlated series take the transform path
    const auto slow = ar1(0.99, 2000000, 3);
    const double tau = 199.0;
    CHECK(std::abs(autocorrelation_time(slow) - tau) <= 0.2 * tau);

    CHECK(ess(std::vector<double>(100, 2.5)) == 1.0);
    CHECK_THROWS_AS(ess(std::vector<double>(5, 1.0)), InputError);

    const auto m = mcmc_mean(x);
    CHECK(std::abs(m.value) <= 4.0 * m.se);
    // sd of the mean of AR(1) with unit innovations: sqrt(tau var / N)
    CHECK(m.se == doctest::Approx(std::sqrt(3.0 * (1.0 / 0.75) / 100000.0)).epsilon(0.1));
}

TEST_CASE("feasible matrix construction") {
    walk::Rng rng = walk::make_rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = 2 + trial % 4;
        const SymmetricPolytope S = corpus::random_symmetric(n, 3 * n, rng);
        const auto sol = solve_mve(S, MveMethod::oracle, 1e-12);
        const ContactSet cs = extract_contacts(sol, S);
        const Vec y = walk::radius(n, 0.5) * walk::uniform_ball(n, rng);
        CHECK(feasible_matrix_violation(cs.points, y) <= 1e-10);
    }
    const std::vector<Vec> axis{Vec::Unit(2, 0)};
    CHECK_THROWS_AS(feasible_matrix_violation(axis, Vec::Zero(2)), InputError);
    CHECK(std::isinf(feasible_matrix_violation(axis, Vec::Ones(2))));
}

TEST_CASE("semidefinite Cauchy-Schwarz") {
    walk::Rng rng = walk::make_rng(14);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 1 + trial % 5;
        std::vector<double> a(static_cast<size_t>(k));
        std::vector<Mat> A(static_cast<size_t>(k), Mat(3, 2));
        for (int i = 0; i < k; ++i) {
            a[size_t(i)] = g(rng);
            for (Index j = 0; j < 6; ++j) A[size_t(i)].data()[j] = g(rng);
        }
        CHECK(semidef_cauchy_schwarz_gap(a, A) >= -1e-10);
    }
    // equality when every A_i is a_i B
    Mat B(2, 2);
    B << 1, 2, 3, 4;
    const std::vector<double> a{1.0, -2.0, 0.5};
    std::vector<Mat> A;
    for (double v : a) A.push_back(v * B);
    CHECK(std::abs(semidef_cauchy_schwarz_gap(a, A)) <= 1e-10);
    CHECK_THROWS_AS(semidef_cauchy_schwarz_gap(a, std::vector<Mat>{}), InputError);
}

TEST_CASE("coordinate extraction") {
    std::vector<Vec> s(3, Vec(2));
    s[0] << 1, 2;
    s[1] << 3, 4;
    s[2] << 5, 6;
    CHECK(coordinate(s, 1) == std::vector<double>{2, 4, 6});
}
