#include "johnwalk/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

namespace johnwalk::diagnostics {

std::string format_records(const std::vector<Record>& records) {
    std::ostringstream os;
    char buf[64];
    for (const auto& r : records) {
        os << r.name;
        std::snprintf(buf, sizeof buf, " %.10g", r.value);
        os << buf;
        std::snprintf(buf, sizeof buf, " %.10g", r.bound);
        os << buf << (r.pass ? " pass" : " fail") << '\n';
    }
    return os.str();
}

namespace {

struct Trial {
    double det_dev = 0.0;
    double eig_dev = 0.0;
    double trace_excess = 0.0;
    bool cr_violation = false;
    bool failed = false;
    std::string note;
};

Trial run_trial(const Polytope& Pn, const Vec& y, const walk::WalkConfig& cfg) {
    const double n = double(Pn.dim());
    Trial t;
    try {
        const Mat E = walk::john_ellipsoid(Pn, y, cfg).ellipsoid.E();
        Eigen::SelfAdjointEigenSolver<Mat> es(E);
        const double logdet = es.eigenvalues().array().log().sum();
        t.det_dev = std::abs(std::expm1(logdet)) * n * n;
        t.eig_dev = std::max(0.0, 1.0 - es.eigenvalues().minCoeff()) * n;
        t.trace_excess = (E * E).trace() - n;
        if (y.norm() > 0.0) {
            t.cr_violation = cross_ratio(Pn, Vec::Zero(y.size()), y) < y.norm() / std::sqrt(n) - 1e-9;
        }
    } catch (const Error& e) {
        t.failed = true;
        t.note = e.what();
    }
    return t;
}

} // namespace

LemmaReport check_step_lemmas(const Polytope& P, const Vec& x, std::int64_t trials, const LemmaOptions& opt) {
    if (trials <= 0) throw InputError("check_step_lemmas: trials must be positive");
    const Index n = P.dim();

    // Affine frame u -> x + E_x u, where the John ellipsoid at x becomes the unit ball.
    const Mat Ex = walk::john_ellipsoid(P, x, opt.solver).ellipsoid.E();
    const Polytope Pn(P.A() * Ex, P.b() - P.A() * x);

    walk::Rng rng = walk::make_rng(opt.seed);
    const double r = walk::radius(n, opt.c);
    std::vector<Vec> ys(static_cast<std::size_t>(trials));
    for (auto& y : ys) y = r * walk::uniform_ball(n, rng);

    std::vector<Trial> out(ys.size());
    if (opt.exec == kernels::Exec::serial) {
        for (std::size_t i = 0; i < ys.size(); ++i) out[i] = run_trial(Pn, ys[i], opt.solver);
    } else {
        const std::int64_t count = trials;
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t i = 0; i < count; ++i) out[std::size_t(i)] = run_trial(Pn, ys[std::size_t(i)], opt.solver);
    }

    LemmaReport rep;
    rep.n = n;
    rep.trials = trials;
    for (const auto& t : out) {
        if (t.failed) {
            ++rep.failures;
            rep.notes.push_back(t.note);
            continue;
        }
        rep.max_det_dev = std::max(rep.max_det_dev, t.det_dev);
        rep.min_eig_dev = std::max(rep.min_eig_dev, t.eig_dev);
        rep.max_trace_excess = std::max(rep.max_trace_excess, t.trace_excess);
        if (t.cr_violation) ++rep.crossratio_violations;
    }
    return rep;
}

std::vector<Record> to_records(const LemmaReport& r, double det_bound, double eig_bound) {
    const std::string p = "n" + std::to_string(r.n) + ".";
    return {
        {p + "det_dev_scaled", r.max_det_dev, det_bound, r.max_det_dev <= det_bound},
        {p + "min_eig_dev_scaled", r.min_eig_dev, eig_bound, r.min_eig_dev <= eig_bound},
        {p + "crossratio_violations", double(r.crossratio_violations), 0.0, r.crossratio_violations == 0},
        {p + "solver_failures", double(r.failures), 0.0, r.failures == 0},
    };
}

McEstimate estimate_tv_overlap(const Ellipsoid& e1, const Ellipsoid& e2, std::int64_t mc, walk::Rng& rng) {
    if (mc <= 0) throw InputError("estimate_tv_overlap: need a positive sample count");
    if (e1.dim() != e2.dim()) throw InputError("estimate_tv_overlap: dimension mismatch");
    const double w = std::min(1.0, std::exp(e1.logdet() - e2.logdet()));
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::int64_t k = 0; k < mc; ++k) {
        const Vec z = walk::propose(e1, 1.0, rng);
        const double v = local_norm(e2, z) <= 1.0 ? w : 0.0;
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / double(mc);
    const double var = std::max(0.0, sum2 / double(mc) - mean * mean);
    return {1.0 - mean, std::sqrt(var / double(mc))};
}

CapResult cap_volume_check(Index n, double t, std::int64_t mc, walk::Rng& rng) {
    if (mc <= 0) throw InputError("cap_volume_check: need a positive sample count");
    if (n < 1 || t < 0.0 || t > 1.0 / std::sqrt(double(n)) + 1e-15) {
        throw InputError("cap_volume_check: need 0 <= t <= 1/sqrt(n)");
    }
    std::int64_t hits = 0;
    for (std::int64_t k = 0; k < mc; ++k) {
        if (walk::uniform_ball(n, rng)(0) >= t) ++hits;
    }
    CapResult c;
    c.ratio = double(hits) / double(mc);
    c.se = std::sqrt(c.ratio * (1.0 - c.ratio) / double(mc));
    c.bound = 0.5 * (1.0 - t * std::sqrt(double(n)));
    c.pass = c.ratio >= c.bound - 3.0 * c.se;
    return c;
}

std::vector<std::int64_t> cell_index(std::span<const Vec> samples, const Vec& lo, const Vec& hi, int g) {
    std::vector<std::int64_t> out;
    out.reserve(samples.size());
    for (const Vec& s : samples) {
        std::int64_t idx = 0;
        bool inside = true;
        for (Index k = 0; k < s.size(); ++k) {
            const double f = (s(k) - lo(k)) / (hi(k) - lo(k));
            if (!(f >= 0.0 && f <= 1.0)) {
                inside = false;
                break;
            }
            idx = idx * g + std::min<std::int64_t>(g - 1, std::int64_t(f * g));
        }
        out.push_back(inside ? idx : -1);
    }
    return out;
}

ChiSquareResult uniformity_chi_square(std::span<const Vec> samples, const Polytope& P, const Vec& lo, const Vec& hi,
                                      const ChiSquareOptions& opt) {
    const Index n = P.dim();
    if (lo.size() != n || hi.size() != n) throw InputError("uniformity_chi_square: box has the wrong dimension");
    if (!((hi - lo).minCoeff() > 0.0)) throw InputError("uniformity_chi_square: empty bounding box");
    if (opt.grid_per_axis < 1 || opt.mc_per_cell < 1) throw InputError("uniformity_chi_square: bad grid settings");
    if (!(opt.variance_inflation > 0.0)) throw InputError("uniformity_chi_square: variance inflation must be positive");
    if (samples.empty()) throw InputError("uniformity_chi_square: no samples");

    const int g = opt.grid_per_axis;
    std::int64_t cells = 1;
    for (Index k = 0; k < n; ++k) cells *= g;
    const Vec width = (hi - lo) / double(g);

    ChiSquareResult res;
    res.cell_mass.assign(std::size_t(cells), 0.0);
    walk::Rng rng = walk::make_rng(opt.seed);
    std::uniform_real_distribution<double> unif;
    double total = 0.0;
    for (std::int64_t c = 0; c < cells; ++c) {
        Vec base(n);
        std::int64_t rest = c;
        for (Index k = n - 1; k >= 0; --k) {
            base(k) = lo(k) + double(rest % g) * width(k);
            rest /= g;
        }
        std::int64_t in = 0;
        Vec z(n);
        for (std::int64_t s = 0; s < opt.mc_per_cell; ++s) {
            for (Index k = 0; k < n; ++k) z(k) = base(k) + unif(rng) * width(k);
            if (contains(P, z)) ++in;
        }
        res.cell_mass[std::size_t(c)] = double(in) / double(opt.mc_per_cell);
        total += res.cell_mass[std::size_t(c)];
    }
    if (!(total > 0.0)) throw InputError("uniformity_chi_square: bounding box misses the polytope");
    for (auto& m : res.cell_mass) m /= total;

    res.counts.assign(std::size_t(cells), 0);
    for (std::int64_t idx : cell_index(samples, lo, hi, g)) {
        if (idx < 0) throw InputError("uniformity_chi_square: sample outside the bounding box");
        ++res.counts[std::size_t(idx)];
    }

    const double N = double(samples.size());
    res.min_expected = std::numeric_limits<double>::infinity();
    int occupied = 0;
    for (std::int64_t c = 0; c < cells; ++c) {
        const double mass = res.cell_mass[std::size_t(c)];
        const double count = double(res.counts[std::size_t(c)]);
        if (mass == 0.0) {
            // A sample in a cell with no estimated mass is an outright misfit.
            if (count > 0.0) res.statistic = std::numeric_limits<double>::infinity();
            continue;
        }
        ++occupied;
        const double expected = N * mass;
        res.min_expected = std::min(res.min_expected, expected);
        res.statistic += (count - expected) * (count - expected) / expected;
    }
    if (res.min_expected < 5.0) {
        throw InputError("uniformity_chi_square: too few samples per cell (smallest expected count " +
                         std::to_string(res.min_expected) + ")");
    }
    res.dof = double(occupied - 1);
    res.statistic /= opt.variance_inflation;
    if (res.dof < 1.0) {
        res.p_value = 1.0;
    } else if (!std::isfinite(res.statistic)) {
        res.p_value = 0.0;
    } else {
        res.p_value = boost::math::gamma_q(0.5 * res.dof, 0.5 * res.statistic);
    }
    return res;
}

double ess(std::span<const double> x, kernels::Exec exec) {
    const Index N = Index(x.size());
    if (N < 10) throw InputError("ess: series needs at least 10 values");
    Index lag = std::min<Index>(N - 1, 128);
    for (;;) {
        // Direct sums while cheap, then the whole range at once by FFT.
        const bool direct = double(N) * double(lag) <= 6.0e7;
        if (!direct) lag = N - 1;
        const Vec gamma = direct ? kernels::autocovariance(x, lag, exec) : kernels::autocovariance_fft(x, lag);
        const double g0 = gamma(0);
        if (!(g0 > 0.0)) return 1.0;
        // Geyer: sum the pair sums Gamma_k = gamma_2k + gamma_2k+1 while they
        // stay positive, forced monotone.
        double sum = 0.0;
        double prev = std::numeric_limits<double>::infinity();
        bool terminated = false;
        for (Index k = 0; 2 * k + 1 <= lag; ++k) {
            double pair = gamma(2 * k) + gamma(2 * k + 1);
            if (pair <= 0.0) {
                terminated = true;
                break;
            }
            pair = std::min(pair, prev);
            prev = pair;
            sum += pair;
        }
        if (terminated || lag >= N - 1) {
            const double tau = std::max(2.0 * sum / g0 - 1.0, 1.0 / double(N));
            return double(N) / tau;
        }
        lag = std::min<Index>(N - 1, 4 * lag);
    }
}

double autocorrelation_time(std::span<const double> x, kernels::Exec exec) { return double(x.size()) / ess(x, exec); }

McEstimate mcmc_mean(std::span<const double> x) {
    if (x.empty()) throw InputError("mcmc_mean: empty series");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= double(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= double(x.size());
    return {mean, std::sqrt(var / ess(x))};
}

std::vector<double> coordinate(std::span<const Vec> samples, Index k) {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const Vec& s : samples) out.push_back(s(k));
    return out;
}

double feasible_matrix_violation(std::span<const Vec> contacts, const Vec& y) {
    const Index n = y.size();
    const double ny = y.norm();
    if (!(ny > 0.0)) throw InputError("feasible_matrix_violation: y must be nonzero");
    const double sn = std::sqrt(double(n));
    const double beta = 1.0 - ny / sn;
    const double alpha = 2.0 * sn / ny;
    const Mat E = beta * (Mat::Identity(n, n) - alpha * y * y.transpose());
    if (!(beta > 0.0) || !(1.0 - alpha * ny * ny > 0.0)) return std::numeric_limits<double>::infinity();
    double worst = -std::numeric_limits<double>::infinity();
    for (const Vec& u : contacts) worst = std::max(worst, (E * u).norm() + u.dot(y) - 1.0);
    return worst;
}

double semidef_cauchy_schwarz_gap(std::span<const double> alphas, std::span<const Mat> As) {
    if (alphas.size() != As.size() || As.empty()) throw InputError("semidef_cauchy_schwarz_gap: size mismatch");
    const Index r = As[0].rows();
    double a2 = 0.0;
    Mat outer = Mat::Zero(r, r);
    Mat lin = Mat::Zero(r, As[0].cols());
    for (std::size_t i = 0; i < As.size(); ++i) {
        a2 += alphas[i] * alphas[i];
        outer += As[i] * As[i].transpose();
        lin += alphas[i] * As[i];
    }
    const Mat D = a2 * outer - lin * lin.transpose();
    return Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (D + D.transpose()), Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

} // namespace johnwalk::diagnostics
