#include "johnwalk/walk.hpp"

#include <cmath>
#include <exception>
#include <optional>
#include <numbers>
#include <string>

namespace johnwalk::walk {

Rng make_rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(index), std::uint32_t(index >> 32)};
    return Rng(seq);
}

double default_gap(Index n) { return 2.0 * std::pow(double(n), -10.0); }

double radius(Index n, double c) {
    if (n < 1 || !(c > 0.0)) throw InputError("radius: need n >= 1 and c > 0");
    return c * std::pow(double(n), -2.5);
}

Tallies& Tallies::operator+=(const Tallies& o) {
    lazy_hold += o.lazy_hold;
    reject_outside += o.reject_outside;
    reject_reversibility += o.reject_reversibility;
    reject_filter += o.reject_filter;
    accept += o.accept;
    return *this;
}

Vec uniform_sphere(Index n, Rng& rng) {
    std::normal_distribution<double> normal;
    Vec g(n);
    double norm = 0.0;
    while (!(norm > 0.0)) {
        for (Index i = 0; i < n; ++i) g(i) = normal(rng);
        norm = g.norm();
    }
    return g / norm;
}

Vec uniform_ball(Index n, Rng& rng) {
    Vec u = uniform_sphere(n, rng);
    std::uniform_real_distribution<double> unif;
    return std::pow(unif(rng), 1.0 / double(n)) * u;
}

Vec propose(const Ellipsoid& ell, double r, Rng& rng) { return ell.point(uniform_ball(ell.dim(), rng), r); }

JohnSolution john_ellipsoid(const Polytope& P, const Vec& x, const WalkConfig& config) {
    const double gap = config.gap > 0.0 ? config.gap : default_gap(P.dim());
    return solve_mve(symmetrize(P, x), config.solver, gap, config.mve);
}

WalkState init_state(const Polytope& P, const Vec& x0, const WalkConfig& config, std::uint64_t chain) {
    if (x0.size() != P.dim()) throw InputError("walk: start point has the wrong dimension");
    if (!interior(P, x0)) throw InputError("walk: start point is not strictly interior");
    return WalkState{x0, john_ellipsoid(P, x0, config).ellipsoid, 0, 1, {}, make_rng(config.seed, chain)};
}

namespace {

[[noreturn]] void rethrow_with_step(std::int64_t step) {
    const std::string where = "step " + std::to_string(step) + ": ";
    try {
        throw;
    } catch (const UnboundedError& e) {
        throw UnboundedError(where + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(where + e.what());
    } catch (const InputError& e) {
        throw InputError(where + e.what());
    }
}

} // namespace

void john_step(const Polytope& P, WalkState& s, const WalkConfig& config) {
    const Index n = P.dim();
    const double r = radius(n, config.c);
    std::uniform_real_distribution<double> unif;
    ++s.step_count;

    if (config.lazy && unif(s.rng) < 0.5) {
        ++s.tallies.lazy_hold;
        return;
    }
    const Vec z = propose(s.ell, r, s.rng);
    if (!interior(P, z)) {
        ++s.tallies.reject_outside;
        return;
    }
    std::optional<Ellipsoid> ez;
    try {
        ez.emplace(john_ellipsoid(P, z, config).ellipsoid);
    } catch (const Error&) {
        rethrow_with_step(s.step_count);
    }
    ++s.solver_calls;
    if (local_norm(*ez, s.x) > r) {
        ++s.tallies.reject_reversibility;
        return;
    }
    const double log_ratio = s.ell.logdet() - ez->logdet();
    if (log_ratio < 0.0 && !(unif(s.rng) < std::exp(log_ratio))) {
        ++s.tallies.reject_filter;
        return;
    }
    ++s.tallies.accept;
    s.x = z;
    s.ell = std::move(*ez);
}

ChainResult run_chain(const Polytope& P, const Vec& x0, std::int64_t steps, const WalkConfig& config,
                      std::uint64_t chain) {
    if (steps < 0) throw InputError("run_chain: negative step count");
    WalkState s = init_state(P, x0, config, chain);
    ChainResult out;
    out.samples.reserve(std::size_t(steps) + 1);
    out.samples.push_back(x0);
    for (std::int64_t k = 0; k < steps; ++k) {
        john_step(P, s, config);
        out.samples.push_back(s.x);
    }
    out.tallies = s.tallies;
    out.solver_calls = s.solver_calls;
    return out;
}

std::vector<ChainResult> run_chains(const Polytope& P, const Vec& x0, std::int64_t steps, int chains,
                                    const WalkConfig& config, kernels::Exec exec) {
    if (chains < 1) throw InputError("run_chains: need at least one chain");
    std::vector<ChainResult> out(static_cast<std::size_t>(chains));
    if (exec == kernels::Exec::serial) {
        for (int k = 0; k < chains; ++k) out[std::size_t(k)] = run_chain(P, x0, steps, config, std::uint64_t(k));
        return out;
    }
    std::vector<std::exception_ptr> errors(out.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (int k = 0; k < chains; ++k) {
        try {
            out[std::size_t(k)] = run_chain(P, x0, steps, config, std::uint64_t(k));
        } catch (...) {
            errors[std::size_t(k)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

Vec ball_walk_step(const Polytope& P, const Vec& x, double delta, Rng& rng) {
    if (!(delta > 0.0)) throw InputError("ball walk: delta must be positive");
    Vec z = x + delta * uniform_ball(x.size(), rng);
    return contains(P, z) ? z : x;
}

Vec hit_and_run_step(const Polytope& P, const Vec& x, Rng& rng) {
    const Vec dir = uniform_sphere(x.size(), rng);
    const Chord c = chord(P, x, dir);
    std::uniform_real_distribution<double> unif(c.t_minus, c.t_plus);
    double t = unif(rng);
    while (t <= c.t_minus || t >= c.t_plus) t = unif(rng);
    return x + t * dir;
}

const char* to_string(WalkKind k) {
    switch (k) {
    case WalkKind::john:
        return "john";
    case WalkKind::ball:
        return "ball";
    case WalkKind::hitrun:
        return "hitrun";
    }
    return "?";
}

WalkKind parse_walk_kind(const std::string& s) {
    if (s == "john") return WalkKind::john;
    if (s == "ball") return WalkKind::ball;
    if (s == "hitrun") return WalkKind::hitrun;
    throw InputError("unknown walk '" + s + "' (expected john, ball or hitrun)");
}

namespace {

template <class Step>
ChainResult run_baseline(const Polytope& P, const Vec& x0, std::int64_t steps, std::uint64_t seed,
                         std::uint64_t chain, Step step) {
    if (steps < 0) throw InputError("walk: negative step count");
    if (x0.size() != P.dim()) throw InputError("walk: start point has the wrong dimension");
    if (!interior(P, x0)) throw InputError("walk: start point is not strictly interior");
    Rng rng = make_rng(seed, chain);
    ChainResult out;
    out.samples.reserve(std::size_t(steps) + 1);
    out.samples.push_back(x0);
    Vec x = x0;
    for (std::int64_t k = 0; k < steps; ++k) {
        Vec y = step(x, rng);
        if (y == x) {
            ++out.tallies.reject_outside;
        } else {
            ++out.tallies.accept;
        }
        x = std::move(y);
        out.samples.push_back(x);
    }
    return out;
}

} // namespace

ChainResult run_ball_walk(const Polytope& P, const Vec& x0, std::int64_t steps, double delta, std::uint64_t seed,
                          std::uint64_t chain) {
    return run_baseline(P, x0, steps, seed, chain,
                        [&](const Vec& x, Rng& rng) { return ball_walk_step(P, x, delta, rng); });
}

ChainResult run_hit_and_run(const Polytope& P, const Vec& x0, std::int64_t steps, std::uint64_t seed,
                            std::uint64_t chain) {
    return run_baseline(P, x0, steps, seed, chain, [&](const Vec& x, Rng& rng) { return hit_and_run_step(P, x, rng); });
}

double log_volume(const Ellipsoid& ell, double r) {
    const double n = double(ell.dim());
    const double log_unit_ball = 0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n + 1.0);
    return log_unit_ball + n * std::log(r) + ell.logdet();
}

double transition_density(const Ellipsoid& ex, const Ellipsoid& ey, double r) {
    if (local_norm(ex, ey.center()) > r || local_norm(ey, ex.center()) > r) return 0.0;
    return std::exp(-std::max(log_volume(ex, r), log_volume(ey, r)));
}

} // namespace johnwalk::walk
