#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "johnwalk/geometry.hpp"
#include "johnwalk/kernels.hpp"
#include "johnwalk/walk.hpp"

namespace johnwalk::diagnostics {

// One metric per line: "name value bound pass|fail".
struct Record {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
};

std::string format_records(const std::vector<Record>& records);

struct LemmaReport {
    Index n = 0;
    std::int64_t trials = 0;
    double max_det_dev = 0.0;   // max |det E_y - 1| n^2
    double min_eig_dev = 0.0;   // max (1 - d_min(E_y)) n
    double max_trace_excess = 0.0; // max tr(E_y^2) - n
    std::int64_t crossratio_violations = 0;
    std::int64_t failures = 0;  // solver errors, counted rather than thrown
    std::vector<std::string> notes;
};

struct LemmaOptions {
    double c = 0.5;
    std::uint64_t seed = 0;
    walk::WalkConfig solver; // solver, gap and options for every ellipsoid
    kernels::Exec exec = kernels::Exec::parallel;
};

// Maps P affinely so the John ellipsoid of its symmetrization at x is the
// unit ball centered at 0, then for each trial draws y uniformly from the
// ball of radius c n^-5/2 and records the deviations of E_y from I and any
// violation of cross_ratio(0, y) >= |y| / sqrt(n). Draws happen serially up
// front, so reports do not depend on the thread count.
LemmaReport check_step_lemmas(const Polytope& P, const Vec& x, std::int64_t trials, const LemmaOptions& options);

std::vector<Record> to_records(const LemmaReport& r, double det_bound = 3.0, double eig_bound = 3.0);

struct McEstimate {
    double value = 0.0;
    double se = 0.0;
};

// Total variation distance between the uniform distributions on two
// ellipsoids: 1 - E_1[1{z in E_2} min(1, vol E_1 / vol E_2)].
McEstimate estimate_tv_overlap(const Ellipsoid& e1, const Ellipsoid& e2, std::int64_t mc_samples, walk::Rng& rng);

struct CapResult {
    double ratio = 0.0; // fraction of the unit ball with u_1 >= t
    double se = 0.0;
    double bound = 0.0; // (1 - t sqrt n) / 2
    bool pass = false;  // ratio >= bound - 3 se
};

CapResult cap_volume_check(Index n, double t, std::int64_t mc_samples, walk::Rng& rng);

struct ChiSquareResult {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 0.0;
    double min_expected = 0.0;
    std::vector<double> cell_mass; // normalized uniform-on-P mass per cell
    std::vector<std::int64_t> counts;
};

struct ChiSquareOptions {
    int grid_per_axis = 4;
    std::int64_t mc_per_cell = 20000;
    std::uint64_t seed = 0;
    // The statistic is divided by this before the p-value is taken. For
    // correlated chains pass the integrated autocorrelation time of the
    // cell indicators; 1 is the iid test.
    double variance_inflation = 1.0;
};

// Pearson test of cell counts over a regular grid on [lo, hi] against the
// uniform distribution on P, cell masses by Monte Carlo on cell and P.
ChiSquareResult uniformity_chi_square(std::span<const Vec> samples, const Polytope& P, const Vec& lo, const Vec& hi,
                                      const ChiSquareOptions& options = {});

// Grid cell of each sample (row-major over axes), -1 outside [lo, hi].
std::vector<std::int64_t> cell_index(std::span<const Vec> samples, const Vec& lo, const Vec& hi, int grid_per_axis);

// Effective sample size by Geyer's initial positive sequence. A constant
// series gives 1.
double ess(std::span<const double> series, kernels::Exec exec = kernels::Exec::parallel);

// N / ess
double autocorrelation_time(std::span<const double> series, kernels::Exec exec = kernels::Exec::parallel);

// Mean and its Monte Carlo standard error sqrt(var / ess).
McEstimate mcmc_mean(std::span<const double> series);

// Component k of each sample.
std::vector<double> coordinate(std::span<const Vec> samples, Index k);

// The matrix beta (I - alpha y y^T) with beta = 1 - |y|/sqrt(n) and
// alpha = 2 sqrt(n)/|y|, checked against |E u_i| + <u_i, y> <= 1 for unit
// contact points u_i. Returns the largest constraint value minus 1 (<= 0 when
// feasible); +inf if the matrix is not positive definite.
double feasible_matrix_violation(std::span<const Vec> contacts, const Vec& y);

// Smallest eigenvalue of (sum a_i^2)(sum A_i A_i^T) - (sum a_i A_i)(sum a_i A_i)^T.
double semidef_cauchy_schwarz_gap(std::span<const double> alphas, std::span<const Mat> As);

} // namespace johnwalk::diagnostics
