#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "johnwalk/errors.hpp"
#include "johnwalk/linalg.hpp"

// Volumetric-center cutting-plane method for convex feasibility and
// minimization over R^d, started from the box {|x - center|_inf <= rho}.
//
// The localization set is {z : G z <= h}. At the current iterate x (kept
// near the volumetric center, the minimizer of V(z) = 1/2 log det H(z) with
// H the log-barrier Hessian) every iteration either drops the constraint
// with the smallest leverage sigma_i = g_i^T H^-1 g_i / s_i^2 when it falls
// below eps, or queries the oracle and adds a cut with normal w through x
// (or, with CutPlacement::shallow, placed so that its leverage at x equals
// tau). Newton steps on V re-center after every change.
namespace johnwalk::vaidya {

enum class Mode {
    full_bound, // run the full iteration bound
    practical, // also stop on convergence callbacks and barrier stagnation
};

enum class CutPlacement {
    central, // through the iterate
    shallow, // shifted so the new cut's leverage at the iterate is tau
};

struct VaidyaParams {
    double eps = 0.005;
    double tau = 0.007;
    double delta_v = 0.00037;
    double L = 10.0;
    double rho = 1.0;
    int max_constraints_factor = 201;

    Mode mode = Mode::full_bound;
    CutPlacement cuts = CutPlacement::central;
    int stagnation_window = 50;
    double stagnation_tol = 1e-12;
    // 0 selects iteration_bound(d, L, rho).
    std::int64_t max_iterations = 0;
    int max_newton_steps = 50;
    double newton_tol = 1e-7;
};

// ceil(d [1.4 L + 2 ln d + 2 ln(1 + 1/eps) + 0.5 ln((1 + tau)/(1 - eps)) + 2 ln rho - ln 2] / delta_v)
std::int64_t iteration_bound(Index d, double L, double rho, const VaidyaParams& params = {});

// The target set lies in {z : normal . z <= level}.
struct Cut {
    Vec normal;
    double level = 0.0;
};

// nullopt accepts the query point; otherwise a cut separating it.
using SeparationOracle = std::function<std::optional<Cut>(const Vec&)>;

struct CutState {
    Mat normals; // active constraint rows g_i
    Vec offsets; // h_i
    Vec iterate;
    std::vector<std::pair<Vec, double>> history; // feasible iterates and objective values
};

// Upper bound on the localization set volume, proven from an approximate
// analytic center, compared against the 2^-L ball.
struct VolumeCertificate {
    std::int64_t iterations = 0;
    double log_volume_ratio_bound = 0.0; // log(vol(S) / vol(unit ball)) upper bound
    double log_target_ratio = 0.0;       // -d L ln 2
    bool proven = false;                 // bound < target
};

struct RunStats {
    std::int64_t iterations = 0;
    std::int64_t oracle_calls = 0;
    std::int64_t cuts_added = 0;
    std::int64_t cuts_dropped = 0;
    Index max_active = 0;
    bool stagnated = false;
    bool converged = false;
    bool degenerate = false;
};

struct FeasibilityResult {
    std::optional<Vec> point;
    std::optional<VolumeCertificate> certificate;
    RunStats stats;
};

// `center` defaults to the origin.
FeasibilityResult vaidya_feasibility(const SeparationOracle& oracle, Index d, const VaidyaParams& params,
                                     const Vec& center = Vec());

struct MinimizeOptions {
    Vec center;
    // Practical mode: polled with the best feasible point every `check_every`
    // feasible iterates; returning true stops the run.
    std::function<bool(const Vec& best, double best_value)> converged;
    int check_every = 20;
    // Observer called after every iteration (tests use it to watch the state).
    std::function<void(const CutState&)> observer;
};

struct MinimizeResult {
    Vec argmin;
    double value = 0.0;
    bool zero_subgradient = false;
    std::vector<std::pair<Vec, double>> history;
    RunStats stats;
};

using Objective = std::function<double(const Vec&)>;
using Subgradient = std::function<Vec(const Vec&)>;

MinimizeResult vaidya_minimize(const Objective& f, const Subgradient& subgrad, const SeparationOracle& feasible,
                               Index d, const VaidyaParams& params, const MinimizeOptions& options = {});

class NoFeasiblePointError : public NumericalError {
  public:
    NoFeasiblePointError(const std::string& what, VolumeCertificate cert)
        : NumericalError(what), certificate_(cert) {}
    const VolumeCertificate& certificate() const { return certificate_; }

  private:
    VolumeCertificate certificate_;
};

class OracleInconsistencyError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

} // namespace johnwalk::vaidya
