#pragma once

#include <utility>

#include "johnwalk/linalg.hpp"

namespace johnwalk {

// {x : A x <= b}. Boundedness is not checked here; chord() and the ellipsoid
// solvers raise UnboundedError when they run into it.
class Polytope {
  public:
    Polytope(Mat A, Vec b);

    const Mat& A() const { return A_; }
    const Vec& b() const { return b_; }
    Index dim() const { return A_.cols(); }
    Index rows() const { return A_.rows(); }

    // b - A x
    Vec slacks(const Vec& x) const;

  private:
    Mat A_;
    Vec b_;
};

// Origin-symmetric body {y : |<a_i, y>| <= 1} stored with both signs of every
// row: rows i and i + m are negatives of each other. `anchor` is the point of
// the original space that maps to y = 0.
class SymmetricPolytope {
  public:
    // `half` holds the m rows a_i; the stored matrix is [half; -half].
    SymmetricPolytope(const Mat& half, Vec anchor);

    const Mat& rows() const { return rows_; }
    Mat half_rows() const { return rows_.topRows(rows_.rows() / 2); }
    const Vec& anchor() const { return anchor_; }
    Index dim() const { return rows_.cols(); }
    Index row_count() const { return rows_.rows(); }

    // The body as a Polytope in the centered coordinates y = x - anchor.
    Polytope centered() const;

  private:
    Mat rows_;
    Vec anchor_;
};

// {E u + center : |u| <= 1} with E symmetric positive definite.
class Ellipsoid {
  public:
    Ellipsoid(Mat E, Vec center);

    const Mat& E() const { return E_; }
    const Vec& center() const { return center_; }
    double logdet() const { return logdet_; }
    const Mat& inverse() const { return inv_; }
    double condition() const { return cond_; }
    Index dim() const { return E_.rows(); }

    // Map a unit-ball point into the ellipsoid scaled by r.
    Vec point(const Vec& u, double r = 1.0) const { return center_ + r * (E_ * u); }

  private:
    Mat E_;
    Vec center_;
    Mat inv_;
    double logdet_ = 0.0;
    double cond_ = 1.0;
};

inline constexpr double kMembershipTol = 1e-12;

// Closed membership: A x <= b + tol (1 + |b|) row-wise.
bool contains(const Polytope& P, const Vec& x, double tol = kMembershipTol);

// Strict interior: every slack is positive.
bool interior(const Polytope& P, const Vec& x);

// K intersected with its reflection through x, rows scaled so the
// right-hand side is 1. Throws InputError naming the first row whose slack
// is not positive.
SymmetricPolytope symmetrize(const Polytope& P, const Vec& x);

// sqrt((y - c)^T E^-2 (y - c)).
double local_norm(const Ellipsoid& ell, const Vec& y);

struct Chord {
    Vec p;
    Vec q;
    double t_minus = 0.0;
    double t_plus = 0.0;
};

// Extreme feasible points x + t dir on both sides of x.
Chord chord(const Polytope& P, const Vec& x, const Vec& dir);

// |x - y| |p - q| / (|p - x| |y - q|) for the chord through x and y.
double cross_ratio(const Polytope& P, const Vec& x, const Vec& y);

// Minimizer of -sum log(b - A x). Finds a strictly feasible start with a
// phase-one barrier when `start` is absent or not interior.
Vec analytic_center(const Polytope& P, const Vec* start = nullptr);

} // namespace johnwalk
