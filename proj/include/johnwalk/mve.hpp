#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "johnwalk/errors.hpp"
#include "johnwalk/geometry.hpp"
#include "johnwalk/vaidya.hpp"

// Maximum-volume inscribed ellipsoid of an origin-symmetric polytope
// {y : |<a_i, y>| <= 1}. The ellipsoid is centered at the symmetry center, so
// the unknown is the shape matrix alone: maximize log det E subject to
// |E a_i| <= 1, or in X = E^2, maximize log det X subject to a_i^T X a_i <= 1.
namespace johnwalk {

enum class MveMethod { oracle, vaidya };

const char* to_string(MveMethod m);
MveMethod parse_mve_method(const std::string& s);

struct ContactSet {
    std::vector<Vec> points;    // unit vectors u_i in coordinates where the ellipsoid is the unit ball
    std::vector<double> weights; // c_i > 0
    std::vector<Index> rows;    // row of the symmetric polytope touching at u_i
    double fit_residual = 0.0;  // |sum c_i u_i u_i^T - I|_F from the weight fit
};

struct JohnResiduals {
    double frobenius = 0.0; // |sum c_i u_i u_i^T - I|_F
    double sum = 0.0;       // |sum c_i - n|
    double centroid = 0.0;  // |sum c_i u_i|
};

struct JohnSolution {
    Ellipsoid ellipsoid; // centered at the polytope's anchor
    std::optional<ContactSet> contacts;
    double logdet_gap = 0.0; // proven upper bound on optimal log det - achieved log det
    MveMethod solver = MveMethod::oracle;
    std::int64_t iterations = 0;
};

class MveBudgetError : public NumericalError {
  public:
    MveBudgetError(const std::string& what, JohnSolution best) : NumericalError(what), best_(std::move(best)) {}
    const JohnSolution& best() const { return best_; }

  private:
    JohnSolution best_;
};

struct MveOptions {
    // Khachiyan iteration cap.
    std::int64_t max_oracle_iterations = 2'000'000;
    // Cutting-plane settings for MveMethod::vaidya. rho and L are filled in
    // from the instance (rho = row count, L = floor(1 + 10 log2 n) + 1).
    vaidya::Mode vaidya_mode = vaidya::Mode::practical;
    std::int64_t vaidya_max_iterations = 0; // 0: the iteration bound
};

JohnSolution solve_mve(const SymmetricPolytope& S, MveMethod method, double gap, const MveOptions& options = {});

// Minimum-volume origin-centered ellipsoid enclosing the given points (one
// per row), which is the minimum-volume enclosing ellipsoid of {+-p_i}.
// Khachiyan multiplicative-weight ascent with Todd-Yildirim away steps on
// the weights w; M = sum w_i p_i p_i^T and kappa_i = p_i^T M^-1 p_i.
struct MveeResult {
    Mat moment;      // M
    Vec weights;     // w, sums to 1
    double max_form; // max_i kappa_i, at least n; at most n (1 + tol) on success
    std::int64_t iterations = 0;

    // {y : y^T (max_form M)^-1 y <= 1}, which contains every point.
    Ellipsoid enclosing() const;
};

MveeResult solve_mvee_polar(const Mat& points, double tol, std::int64_t max_iterations = 2'000'000);

struct DikinPreconditioned {
    Mat T;     // H^{1/2}, H = sum over all rows a_i a_i^T
    Mat T_inv; // H^{-1/2}
    SymmetricPolytope body; // rows a_i^T H^{-1/2}; its Dikin ellipsoid at 0 is the unit ball
};

DikinPreconditioned dikin_precondition(const SymmetricPolytope& S);

struct MveOracleAnswer {
    enum class Kind { feasible, constraint, psd };
    Kind kind = Kind::feasible;
    // Cut in svec coordinates: the feasible set (or, for `feasible`, the
    // improving set) lies in {Z : <normal, svec Z> <= level}.
    Vec normal;
    double level = 0.0;
    Index row = -1; // violated row for `constraint`
    Vec eigvec;     // v for `psd`
};

// Separation oracle for {X : a_i^T X a_i <= 1 for all i, X >= I/n} with
// objective -log det X: feasible -> objective cut -X^-1; otherwise the first
// violated row a a^T, or -v v^T (level -1/n) for an eigenvector with eigenvalue below 1/n.
MveOracleAnswer separation_oracle_mve(const Mat& X, const SymmetricPolytope& S);

// Tight rows (1 - |E a_i| <= slack_tol) as unit contact points, with weights
// from nonnegative least squares on sum c_i u_i u_i^T = I. Opposite contact
// points share their direction's weight equally.
ContactSet extract_contacts(const JohnSolution& sol, const SymmetricPolytope& S, double slack_tol = 1e-7);

JohnResiduals verify_john_conditions(const ContactSet& cs, Index n);

// Lagrangian dual bound on (optimal log det E - log det E) for a feasible
// centered ellipsoid E of S; +inf if no certificate could be formed.
double certified_gap(const SymmetricPolytope& S, const Mat& E);

} // namespace johnwalk
