#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "johnwalk/corpus.hpp"
#include "johnwalk/diagnostics.hpp"
#include "johnwalk/io.hpp"
#include "johnwalk/mve.hpp"
#include "johnwalk/walk.hpp"

using namespace johnwalk;

namespace {

std::vector<double> parse_point(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str() || *end != '\0' || !std::isfinite(v)) {
            throw InputError("--start: bad coordinate '" + cell + "'");
        }
        out.push_back(v);
    }
    return out;
}

Vec start_point(const Polytope& P, const std::optional<std::vector<double>>& start) {
    if (!start) return analytic_center(P);
    if (Index(start->size()) != P.dim()) {
        throw InputError("--start has " + std::to_string(start->size()) + " coordinates, polytope dimension is " +
                         std::to_string(P.dim()));
    }
    return Vec::Map(start->data(), Index(start->size()));
}

// Radius of the largest ball about x inside P, over sqrt(n).
double default_delta(const Polytope& P, const Vec& x) {
    const Vec dist = P.slacks(x).cwiseQuotient(P.A().rowwise().norm());
    return dist.minCoeff() / std::sqrt(double(P.dim()));
}

walk::WalkConfig walk_config(const io::RunManifest& m) {
    walk::WalkConfig cfg;
    cfg.c = m.c;
    cfg.lazy = m.lazy;
    cfg.solver = parse_mve_method(m.solver);
    cfg.gap = m.gap;
    cfg.seed = m.seed;
    if (!(cfg.c > 0.0)) throw InputError("--c must be positive");
    if (cfg.gap < 0.0) throw InputError("--gap must be positive");
    return cfg;
}

walk::ChainResult run_walk(const Polytope& P, const Vec& x0, const io::RunManifest& m) {
    switch (walk::parse_walk_kind(m.walk)) {
    case walk::WalkKind::john:
        return walk::run_chain(P, x0, m.steps, walk_config(m));
    case walk::WalkKind::ball:
        return walk::run_ball_walk(P, x0, m.steps, m.delta > 0.0 ? m.delta : default_delta(P, x0), m.seed);
    case walk::WalkKind::hitrun:
        return walk::run_hit_and_run(P, x0, m.steps, m.seed);
    }
    throw InputError("unknown walk");
}

void print_tallies(const walk::Tallies& t) {
    std::printf("steps %lld\n", static_cast<long long>(t.total()));
    std::printf("accept %lld\n", static_cast<long long>(t.accept));
    std::printf("lazy_hold %lld\n", static_cast<long long>(t.lazy_hold));
    std::printf("reject_outside %lld\n", static_cast<long long>(t.reject_outside));
    std::printf("reject_reversibility %lld\n", static_cast<long long>(t.reject_reversibility));
    std::printf("reject_filter %lld\n", static_cast<long long>(t.reject_filter));
}

int do_sample(io::RunManifest m, const std::string& manifest_path) {
    if (m.steps < 0) throw InputError("--steps must be nonnegative");
    if (m.output_path.empty()) throw InputError("--output is required");
    const Polytope P = io::load_polytope(m.polytope_path);
    walk::parse_walk_kind(m.walk);
    parse_mve_method(m.solver);
    const Vec x0 = start_point(P, m.start);
    if (!interior(P, x0)) throw InputError("start point is not strictly interior");

    io::write_manifest(m, manifest_path.empty() ? m.output_path + ".manifest.json" : manifest_path);
    const walk::ChainResult res = run_walk(P, x0, m);
    io::emit_samples(res.samples, P.dim(), m.output_path);
    print_tallies(res.tallies);
    return 0;
}

int do_mve(const std::string& path, const std::optional<std::vector<double>>& start, const std::string& solver,
           double gap) {
    const Polytope P = io::load_polytope(path);
    const Vec x = start_point(P, start);
    const SymmetricPolytope S = symmetrize(P, x);
    if (!(gap > 0.0)) gap = walk::default_gap(P.dim());
    JohnSolution sol = solve_mve(S, parse_mve_method(solver), gap);
    const Mat& E = sol.ellipsoid.E();

    std::printf("solver %s\n", to_string(sol.solver));
    std::printf("iterations %lld\n", static_cast<long long>(sol.iterations));
    std::printf("center");
    for (Index k = 0; k < x.size(); ++k) std::printf(" %.17g", x(k));
    std::printf("\nE\n");
    for (Index i = 0; i < E.rows(); ++i) {
        for (Index k = 0; k < E.cols(); ++k) std::printf(k ? " %.17g" : "%.17g", E(i, k));
        std::printf("\n");
    }
    std::printf("logdet %.17g\n", sol.ellipsoid.logdet());
    std::printf("logdet_gap %.6g\n", sol.logdet_gap);
    try {
        const ContactSet cs = extract_contacts(sol, S);
        const JohnResiduals r = verify_john_conditions(cs, P.dim());
        std::printf("contacts %zu\n", cs.points.size());
        std::printf("residual_frobenius %.6g\n", r.frobenius);
        std::printf("residual_sum %.6g\n", r.sum);
        std::printf("residual_centroid %.6g\n", r.centroid);
    } catch (const NumericalError& e) {
        std::printf("contacts unavailable (%s)\n", e.what());
    }
    return 0;
}

std::pair<Index, Index> parse_range(const std::string& s) {
    const auto colon = s.find(':');
    try {
        if (colon == std::string::npos) {
            const Index v = std::stol(s);
            return {v, v};
        }
        return {std::stol(s.substr(0, colon)), std::stol(s.substr(colon + 1))};
    } catch (const std::exception&) {
        throw InputError("--n-range: expected N or LO:HI, got '" + s + "'");
    }
}

int do_diagnose(const std::string& path, const std::string& range, std::int64_t trials, double c, std::uint64_t seed) {
    diagnostics::LemmaOptions opt;
    opt.c = c;
    opt.seed = seed;
    std::vector<diagnostics::Record> records;
    bool ok = true;
    auto run = [&](const Polytope& P) {
        const Vec x = analytic_center(P);
        const auto rep = diagnostics::check_step_lemmas(P, x, trials, opt);
        for (auto& r : diagnostics::to_records(rep)) {
            ok = ok && r.pass;
            records.push_back(std::move(r));
        }
    };
    if (!path.empty()) {
        run(io::load_polytope(path));
    } else {
        const auto [lo, hi] = parse_range(range);
        if (lo < 1 || hi < lo) throw InputError("--n-range: need 1 <= LO <= HI");
        walk::Rng rng = walk::make_rng(seed, 1);
        for (Index n = lo; n <= hi; ++n) run(corpus::random_polytope(n, 3 * n, rng));
    }
    std::fputs(diagnostics::format_records(records).c_str(), stdout);
    return ok ? 0 : 1;
}

int do_bench(const std::string& path, std::int64_t steps, std::uint64_t seed, double c) {
    const Polytope P = io::load_polytope(path);
    const Vec x0 = analytic_center(P);
    std::vector<diagnostics::Record> records;
    for (const char* kind : {"john", "ball", "hitrun"}) {
        io::RunManifest m;
        m.walk = kind;
        m.steps = steps;
        m.seed = seed;
        m.c = c;
        const auto t0 = std::chrono::steady_clock::now();
        const walk::ChainResult res = run_walk(P, x0, m);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        double min_ess = std::numeric_limits<double>::infinity();
        for (Index k = 0; k < P.dim(); ++k) {
            min_ess = std::min(min_ess, diagnostics::ess(diagnostics::coordinate(res.samples, k)));
        }
        records.push_back({std::string(kind) + ".min_ess", min_ess, 0.0, true});
        records.push_back({std::string(kind) + ".seconds", secs, 0.0, true});
        records.push_back({std::string(kind) + ".ess_per_second", min_ess / std::max(secs, 1e-9), 0.0, true});
    }
    std::fputs(diagnostics::format_records(records).c_str(), stdout);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"John's walk sampler for polytopes {x : A x <= b}"};
    app.set_version_flag("--version", std::string(io::kVersion));
    app.require_subcommand(1);

    io::RunManifest m;
    std::string manifest_path;
    std::string start_text;
    auto* sample = app.add_subcommand("sample", "Run a walk and write samples as CSV");
    sample->add_option("--polytope", m.polytope_path, "Polytope JSON file")->required();
    sample->add_option("--walk", m.walk, "john, ball or hitrun")->capture_default_str();
    sample->add_option("--steps", m.steps, "Number of steps")->capture_default_str();
    sample->add_option("--seed", m.seed, "Random seed")->capture_default_str();
    sample->add_option("--c", m.c, "Radius constant")->capture_default_str();
    sample->add_option("--lazy", m.lazy, "Lazy coin (true/false)")->capture_default_str();
    sample->add_option("--solver", m.solver, "oracle or vaidya")->capture_default_str();
    sample->add_option("--gap", m.gap, "Ellipsoid log det gap (default 2 n^-10)");
    sample->add_option("--delta", m.delta, "Ball walk radius (default inradius at the start over sqrt n)");
    sample->add_option("--start", start_text, "Start point x1,...,xn (default analytic center)");
    sample->add_option("--output", m.output_path, "Sample CSV path")->required();
    sample->add_option("--manifest", manifest_path, "Manifest path (default OUTPUT.manifest.json)");

    std::string replay_path, replay_output, replay_manifest;
    auto* replay = app.add_subcommand("replay", "Repeat a run from its manifest");
    replay->add_option("input", replay_path, "Manifest JSON of the run to repeat")->required();
    replay->add_option("--output", replay_output, "Override the sample CSV path");
    replay->add_option("--manifest", replay_manifest, "Where to write the manifest of this run");

    std::string mve_path, mve_start, mve_solver = "oracle";
    double mve_gap = 0.0;
    auto* mve = app.add_subcommand("mve", "John ellipsoid of the symmetrization at a point");
    mve->add_option("--polytope", mve_path, "Polytope JSON file")->required();
    mve->add_option("--start", mve_start, "Symmetrization point (default analytic center)");
    mve->add_option("--solver", mve_solver, "oracle or vaidya")->capture_default_str();
    mve->add_option("--gap", mve_gap, "Log det gap (default 2 n^-10)");

    std::string diag_path, diag_range = "2:8";
    std::int64_t diag_trials = 200;
    double diag_c = 0.5;
    std::uint64_t diag_seed = 0;
    auto* diagnose = app.add_subcommand("diagnose", "Check the single-step ellipsoid bounds");
    diagnose->add_option("--polytope", diag_path, "Polytope JSON file (default random polytopes per n)");
    diagnose->add_option("--n-range", diag_range, "Dimensions LO:HI")->capture_default_str();
    diagnose->add_option("--trials", diag_trials, "Trials per instance")->capture_default_str();
    diagnose->add_option("--c", diag_c, "Radius constant")->capture_default_str();
    diagnose->add_option("--seed", diag_seed, "Random seed")->capture_default_str();

    std::string bench_path;
    std::int64_t bench_steps = 2000;
    std::uint64_t bench_seed = 0;
    double bench_c = 0.5;
    auto* bench = app.add_subcommand("bench", "ESS per second of the three walks");
    bench->add_option("--polytope", bench_path, "Polytope JSON file")->required();
    bench->add_option("--steps", bench_steps, "Steps per walk")->capture_default_str();
    bench->add_option("--seed", bench_seed, "Random seed")->capture_default_str();
    bench->add_option("--c", bench_c, "Radius constant for john")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*sample) {
            if (!start_text.empty()) m.start = parse_point(start_text);
            return do_sample(m, manifest_path);
        }
        if (*replay) {
            io::RunManifest r = io::read_manifest(replay_path);
            if (r.command != "sample") throw InputError(replay_path + ": only sample runs can be replayed");
            if (!replay_output.empty()) r.output_path = replay_output;
            return do_sample(r, replay_manifest);
        }
        if (*mve) {
            std::optional<std::vector<double>> s;
            if (!mve_start.empty()) s = parse_point(mve_start);
            return do_mve(mve_path, s, mve_solver, mve_gap);
        }
        if (*diagnose) return do_diagnose(diag_path, diag_range, diag_trials, diag_c, diag_seed);
        if (*bench) return do_bench(bench_path, bench_steps, bench_seed, bench_c);
    } catch (const InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
    return 0;
}
