#include "johnwalk/vaidya.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

namespace johnwalk::vaidya {

std::int64_t iteration_bound(Index d, double L, double rho, const VaidyaParams& p) {
    if (d < 1) throw InputError("iteration_bound: d must be at least 1");
    if (L < 1.0) throw InputError("iteration_bound: L must be at least 1");
    if (!(rho > 0.0)) throw InputError("iteration_bound: rho must be positive");
    const double dd = static_cast<double>(d);
    const double bracket = 1.4 * L + 2.0 * std::log(dd) + 2.0 * std::log(1.0 + 1.0 / p.eps) +
                           0.5 * std::log((1.0 + p.tau) / (1.0 - p.eps)) + 2.0 * std::log(rho) - std::log(2.0);
    return static_cast<std::int64_t>(std::ceil(dd * bracket / p.delta_v));
}

namespace {

class DegenerateError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

struct Local {
    Vec s;      // slacks
    Mat Hs;     // diag(1/s) G
    Eigen::LLT<Mat> H;
    Vec sigma;  // leverages
    double V = 0.0;
};

class Engine {
  public:
    Engine(Index d, const VaidyaParams& p, const Vec& center) : d_(d), p_(p) {
        if (d < 1) throw InputError("cutting plane: dimension must be positive");
        if (!(p.rho > 0.0)) throw InputError("cutting plane: rho must be positive");
        if (!(p.eps > 0.0 && p.eps < 1.0 && p.tau > 0.0 && p.tau < 1.0)) {
            throw InputError("cutting plane: eps and tau must lie in (0, 1)");
        }
        Vec c = center.size() == 0 ? Vec::Zero(d) : center;
        if (c.size() != d) throw InputError("cutting plane: center has the wrong dimension");
        state_.normals.resize(2 * d, d);
        state_.normals.topRows(d) = Mat::Identity(d, d);
        state_.normals.bottomRows(d) = -Mat::Identity(d, d);
        state_.offsets.resize(2 * d);
        state_.offsets.head(d) = c.array() + p.rho;
        state_.offsets.tail(d) = -(c.array() - p.rho);
        state_.iterate = c;
        cap_ = static_cast<Index>(p.max_constraints_factor) * d;
        stats_.max_active = 2 * d;
    }

    CutState& state() { return state_; }
    RunStats& stats() { return stats_; }
    Index dim() const { return d_; }

    Local local(const Vec& x) const {
        Local L;
        const Mat& G = state_.normals;
        L.s = state_.offsets - G * x;
        if (!(L.s.minCoeff() > 0.0)) throw DegenerateError("iterate left the localization set");
        L.Hs = L.s.cwiseInverse().asDiagonal() * G;
        L.H.compute(L.Hs.transpose() * L.Hs);
        if (L.H.info() != Eigen::Success) throw DegenerateError("localization set is numerically degenerate");
        const Mat K = L.H.solve(L.Hs.transpose()); // d x k
        L.sigma = (L.Hs.array() * K.transpose().array()).rowwise().sum();
        L.V = L.H.matrixLLT().diagonal().array().log().sum(); // 1/2 log det H
        if (!std::isfinite(L.V) || !L.sigma.allFinite()) {
            throw DegenerateError("localization set is numerically degenerate");
        }
        return L;
    }

    double barrier(const Vec& x) const {
        const Vec s = state_.offsets - state_.normals * x;
        if (!(s.minCoeff() > 0.0)) return std::numeric_limits<double>::infinity();
        const Mat Hs = s.cwiseInverse().asDiagonal() * state_.normals;
        Eigen::LLT<Mat> H(Hs.transpose() * Hs);
        if (H.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
        return H.matrixLLT().diagonal().array().log().sum();
    }

    // Newton steps on V with the approximate Hessian Q = G^T diag(sigma / s^2) G.
    Local recenter() {
        Vec& x = state_.iterate;
        Local L = local(x);
        for (int k = 0; k < p_.max_newton_steps; ++k) {
            const Vec w = L.sigma.cwiseQuotient(L.s);
            const Vec g = state_.normals.transpose() * w;
            const Mat Qs = L.sigma.cwiseSqrt().asDiagonal() * L.Hs;
            Eigen::LLT<Mat> Q(Qs.transpose() * Qs);
            if (Q.info() != Eigen::Success) throw DegenerateError("volumetric Hessian is singular");
            const Vec dx = -Q.solve(g);
            const double dec = std::sqrt(std::max(0.0, -g.dot(dx)));
            if (!std::isfinite(dec)) throw DegenerateError("volumetric Newton step failed");
            if (dec < p_.newton_tol) break;

            const Vec gd = state_.normals * dx;
            double alpha = 1.0;
            for (Index i = 0; i < gd.size(); ++i) {
                if (gd(i) > 0.0) alpha = std::min(alpha, 0.95 * L.s(i) / gd(i));
            }
            const double slope = g.dot(dx);
            int tries = 0;
            while (barrier(x + alpha * dx) > L.V + 0.25 * alpha * slope && tries < 40) {
                alpha *= 0.5;
                ++tries;
            }
            if (tries == 40) break;
            x += alpha * dx;
            L = local(x);
        }
        return L;
    }

    void drop(Index i) {
        Mat& G = state_.normals;
        Vec& h = state_.offsets;
        const Index last = G.rows() - 1;
        if (i != last) {
            G.row(i) = G.row(last);
            h(i) = h(last);
        }
        G.conservativeResize(last, Eigen::NoChange);
        h.conservativeResize(last);
        ++stats_.cuts_dropped;
    }

    // Central cuts pass through x; x then steps back along -H^-1 w to half
    // the Dikin radius so it stays strictly inside. Shallow cuts are shifted
    // outward so that their leverage at x is tau.
    void add(const Vec& w, const Local& L) {
        const Vec Hw = L.H.solve(w);
        const double wHw = w.dot(Hw);
        const Index k = state_.normals.rows();
        state_.normals.conservativeResize(k + 1, Eigen::NoChange);
        state_.offsets.conservativeResize(k + 1);
        state_.normals.row(k) = w.transpose();
        if (p_.cuts == CutPlacement::shallow) {
            state_.offsets(k) = w.dot(state_.iterate) + std::sqrt((1.0 - p_.tau) / p_.tau * wHw);
        } else {
            state_.offsets(k) = w.dot(state_.iterate);
            state_.iterate -= (0.5 / std::sqrt(wHw)) * Hw;
        }
        ++stats_.cuts_added;
        stats_.max_active = std::max(stats_.max_active, k + 1);
    }

    bool at_capacity() const { return state_.normals.rows() >= cap_; }

    // Proven upper bound on log(vol(S) / vol(B^d)) from an approximate
    // analytic center z: with eta the barrier Newton decrement at z,
    // S lies in {z + D : D^T H D <= R^2} for the R computed below.
    double log_volume_bound() const {
        const Mat& G = state_.normals;
        const Vec& h = state_.offsets;
        const double k = static_cast<double>(G.rows());
        Vec z = state_.iterate;
        for (int it = 0; it < 100; ++it) {
            const Vec s = h - G * z;
            const Mat Hs = s.cwiseInverse().asDiagonal() * G;
            Eigen::LLT<Mat> H(Hs.transpose() * Hs);
            if (H.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
            const Vec r = G.transpose() * s.cwiseInverse();
            const Vec dz = -H.solve(r);
            const double eta = std::sqrt(std::max(0.0, -r.dot(dz)));
            if (eta < 0.1 || it == 99) {
                if (!(eta < 1.0)) return std::numeric_limits<double>::infinity();
                const double a = 1.0 - eta * eta;
                const double R = (eta * (k - 1.0) + std::sqrt(eta * eta * (k - 1.0) * (k - 1.0) + a * (k * k - k))) / a;
                return double(d_) * std::log(R) - H.matrixLLT().diagonal().array().log().sum();
            }
            double step = eta > 0.25 ? 1.0 / (1.0 + eta) : 1.0;
            const Vec gd = G * dz;
            for (Index i = 0; i < gd.size(); ++i) {
                if (gd(i) > 0.0) step = std::min(step, 0.95 * s(i) / gd(i));
            }
            z += step * dz;
        }
        return std::numeric_limits<double>::infinity();
    }

    VolumeCertificate certificate() const {
        VolumeCertificate c;
        c.iterations = stats_.iterations;
        c.log_volume_ratio_bound = log_volume_bound();
        c.log_target_ratio = -double(d_) * p_.L * std::log(2.0);
        c.proven = c.log_volume_ratio_bound < c.log_target_ratio;
        return c;
    }

    Index argmin_sigma(const Local& L) const {
        Index i = 0;
        L.sigma.minCoeff(&i);
        return i;
    }

  private:
    Index d_;
    VaidyaParams p_;
    CutState state_;
    RunStats stats_;
    Index cap_ = 0;
};

std::int64_t budget(Index d, const VaidyaParams& p) {
    return p.max_iterations > 0 ? p.max_iterations : iteration_bound(d, p.L, p.rho, p);
}

void check_cut(const Cut& cut, const Vec& x, Index d) {
    if (cut.normal.size() != d || !cut.normal.allFinite() || !std::isfinite(cut.level)) {
        throw OracleInconsistencyError("oracle returned a malformed cut");
    }
    if (cut.normal.norm() == 0.0) throw OracleInconsistencyError("oracle returned a zero cut normal");
    const double viol = cut.normal.dot(x) - cut.level;
    if (viol < -1e-9 * (1.0 + std::abs(cut.level))) {
        throw OracleInconsistencyError("oracle cut does not separate the query point");
    }
}

// Tracks |V_t - V_{t-window}| for the practical-mode stagnation exit.
class StagnationWatch {
  public:
    explicit StagnationWatch(const VaidyaParams& p) : p_(p) {}
    bool push(double V) {
        if (p_.mode != Mode::practical) return false;
        hist_.push_back(V);
        if (static_cast<int>(hist_.size()) > p_.stagnation_window + 1) hist_.pop_front();
        return static_cast<int>(hist_.size()) == p_.stagnation_window + 1 &&
               std::abs(hist_.back() - hist_.front()) < p_.stagnation_tol;
    }

  private:
    const VaidyaParams& p_;
    std::deque<double> hist_;
};

} // namespace

FeasibilityResult vaidya_feasibility(const SeparationOracle& oracle, Index d, const VaidyaParams& params,
                                     const Vec& center) {
    Engine eng(d, params, center);
    const std::int64_t T = budget(d, params);
    StagnationWatch watch(params);
    FeasibilityResult out;

    Local L = eng.local(eng.state().iterate);
    try {
        for (std::int64_t t = 0; t < T; ++t) {
            eng.stats().iterations = t + 1;
            const Index imin = eng.argmin_sigma(L);
            if (L.sigma(imin) < params.eps) {
                eng.drop(imin);
            } else {
                const Vec x = eng.state().iterate;
                ++eng.stats().oracle_calls;
                const auto cut = oracle(x);
                if (!cut) {
                    out.point = x;
                    out.stats = eng.stats();
                    return out;
                }
                check_cut(*cut, x, d);
                if (eng.at_capacity()) eng.drop(imin);
                eng.add(cut->normal, eng.local(x));
            }
            L = eng.recenter();
            if (watch.push(L.V)) {
                eng.stats().stagnated = true;
                break;
            }
            if (t % 10 == 9) {
                const auto cert = eng.certificate();
                if (cert.proven) {
                    out.certificate = cert;
                    out.stats = eng.stats();
                    return out;
                }
            }
        }
    } catch (const DegenerateError&) {
        eng.stats().degenerate = true;
    }
    out.certificate = eng.certificate();
    out.stats = eng.stats();
    return out;
}

MinimizeResult vaidya_minimize(const Objective& f, const Subgradient& subgrad, const SeparationOracle& feasible,
                               Index d, const VaidyaParams& params, const MinimizeOptions& options) {
    Engine eng(d, params, options.center);
    const std::int64_t T = budget(d, params);
    StagnationWatch watch(params);
    MinimizeResult out;
    auto& history = eng.state().history;

    Index best = -1;
    std::int64_t since_check = 0;
    Local L = eng.local(eng.state().iterate);
    try {
        for (std::int64_t t = 0; t < T; ++t) {
            eng.stats().iterations = t + 1;
            const Index imin = eng.argmin_sigma(L);
            if (L.sigma(imin) < params.eps) {
                eng.drop(imin);
            } else {
                const Vec x = eng.state().iterate;
                ++eng.stats().oracle_calls;
                Vec w;
                if (const auto cut = feasible(x)) {
                    check_cut(*cut, x, d);
                    // A feasibility cut must keep every point already accepted.
                    const Index first = std::max<Index>(0, Index(history.size()) - 64);
                    for (Index j = first; j < Index(history.size()); ++j) {
                        if (cut->normal.dot(history[size_t(j)].first) > cut->level + 1e-9 * (1.0 + std::abs(cut->level))) {
                            throw OracleInconsistencyError("oracle cut excludes a previously accepted point");
                        }
                    }
                    w = cut->normal;
                } else {
                    const double fx = f(x);
                    history.emplace_back(x, fx);
                    if (best < 0 || fx < history[size_t(best)].second) best = Index(history.size()) - 1;
                    w = subgrad(x);
                    if (w.size() != d) throw OracleInconsistencyError("subgradient has the wrong dimension");
                    if (w.norm() == 0.0) {
                        out.zero_subgradient = true;
                        best = Index(history.size()) - 1;
                        break;
                    }
                    if (params.mode == Mode::practical && options.converged &&
                        ++since_check >= std::max(1, options.check_every)) {
                        since_check = 0;
                        if (options.converged(history[size_t(best)].first, history[size_t(best)].second)) {
                            eng.stats().converged = true;
                            break;
                        }
                    }
                }
                if (eng.at_capacity()) eng.drop(imin);
                eng.add(w, eng.local(x));
            }
            L = eng.recenter();
            if (options.observer) options.observer(eng.state());
            if (watch.push(L.V)) {
                eng.stats().stagnated = true;
                break;
            }
        }
    } catch (const DegenerateError&) {
        eng.stats().degenerate = true;
    }

    out.stats = eng.stats();
    if (best < 0) {
        throw NoFeasiblePointError("cutting plane: no feasible iterate found", eng.certificate());
    }
    out.argmin = history[size_t(best)].first;
    out.value = history[size_t(best)].second;
    out.history = std::move(history);
    return out;
}

} // namespace johnwalk::vaidya
