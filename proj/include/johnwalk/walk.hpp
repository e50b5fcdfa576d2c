#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "johnwalk/geometry.hpp"
#include "johnwalk/kernels.hpp"
#include "johnwalk/mve.hpp"

namespace johnwalk::walk {

using Rng = std::mt19937_64;

// Stream for chain `index` of a run seeded with `seed`.
Rng make_rng(std::uint64_t seed, std::uint64_t index = 0);

struct WalkConfig {
    double c = 0.5;
    bool lazy = true;
    MveMethod solver = MveMethod::oracle;
    double gap = 0.0; // <= 0 selects default_gap(n)
    std::uint64_t seed = 0;
    MveOptions mve;
};

// 2 n^-10
double default_gap(Index n);

// c n^-5/2
double radius(Index n, double c);

struct Tallies {
    std::int64_t lazy_hold = 0;
    std::int64_t reject_outside = 0;
    std::int64_t reject_reversibility = 0;
    std::int64_t reject_filter = 0;
    std::int64_t accept = 0;

    std::int64_t total() const { return lazy_hold + reject_outside + reject_reversibility + reject_filter + accept; }
    Tallies& operator+=(const Tallies& o);
};

struct WalkState {
    Vec x;
    Ellipsoid ell; // John ellipsoid of the symmetrization at x, centered at x
    std::int64_t step_count = 0;
    std::int64_t solver_calls = 0;
    Tallies tallies;
    Rng rng;
};

// Uniform point of the unit ball: Gaussian direction, radius U^(1/n).
Vec uniform_ball(Index n, Rng& rng);
Vec uniform_sphere(Index n, Rng& rng);

// Uniform point of {center + r E u : |u| <= 1}.
Vec propose(const Ellipsoid& ell, double r, Rng& rng);

// John ellipsoid of symmetrize(P, x) with the configured solver and gap.
JohnSolution john_ellipsoid(const Polytope& P, const Vec& x, const WalkConfig& config);

WalkState init_state(const Polytope& P, const Vec& x0, const WalkConfig& config, std::uint64_t chain = 0);

// One step of the walk: lazy coin, proposal from E_x(r), reversibility guard
// x in E_z(r), then the filter min(1, det E_x / det E_z). Solver failures are
// rethrown with the step number.
void john_step(const Polytope& P, WalkState& state, const WalkConfig& config);

struct ChainResult {
    std::vector<Vec> samples; // steps + 1 points starting with x0
    Tallies tallies;
    std::int64_t solver_calls = 0;
};

ChainResult run_chain(const Polytope& P, const Vec& x0, std::int64_t steps, const WalkConfig& config,
                      std::uint64_t chain = 0);

// Independent chains; chain k uses make_rng(config.seed, k) whatever the
// scheduling, so both variants return identical results.
std::vector<ChainResult> run_chains(const Polytope& P, const Vec& x0, std::int64_t steps, int chains,
                                    const WalkConfig& config, kernels::Exec exec = kernels::Exec::parallel);

// Move to a uniform point of the radius-delta ball about x if it lies in P.
Vec ball_walk_step(const Polytope& P, const Vec& x, double delta, Rng& rng);

// Uniform point on the chord through x along a uniform direction.
Vec hit_and_run_step(const Polytope& P, const Vec& x, Rng& rng);

enum class WalkKind { john, ball, hitrun };
const char* to_string(WalkKind k);
WalkKind parse_walk_kind(const std::string& s);

// Baseline chains with the same seeding and output convention as run_chain.
ChainResult run_ball_walk(const Polytope& P, const Vec& x0, std::int64_t steps, double delta, std::uint64_t seed,
                          std::uint64_t chain = 0);
ChainResult run_hit_and_run(const Polytope& P, const Vec& x0, std::int64_t steps, std::uint64_t seed,
                            std::uint64_t chain = 0);

// log volume of {center + r E u : |u| <= 1}
double log_volume(const Ellipsoid& ell, double r);

// Off-diagonal kernel density of the non-lazy walk from x to y:
// min(1 / vol E_x(r), 1 / vol E_y(r)) when y in E_x(r) and x in E_y(r), else 0.
double transition_density(const Ellipsoid& ex, const Ellipsoid& ey, double r);

} // namespace johnwalk::walk
