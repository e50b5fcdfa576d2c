#include "johnwalk/geometry.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "johnwalk/errors.hpp"

namespace johnwalk {

namespace {

void require_dim(Index expected, Index got, const char* what) {
    if (expected != got) {
        throw InputError(std::string(what) + ": dimension mismatch (expected " + std::to_string(expected) +
                         ", got " + std::to_string(got) + ")");
    }
}

} // namespace

Polytope::Polytope(Mat A, Vec b) : A_(std::move(A)), b_(std::move(b)) {
    if (A_.rows() != b_.size()) {
        throw InputError("polytope: A has " + std::to_string(A_.rows()) + " rows but b has " +
                         std::to_string(b_.size()) + " entries");
    }
    if (A_.rows() == 0 || A_.cols() == 0) throw InputError("polytope: empty constraint matrix");
    if (!A_.allFinite() || !b_.allFinite()) throw InputError("polytope: non-finite entry");
    for (Index i = 0; i < A_.rows(); ++i) {
        if (A_.row(i).cwiseAbs().maxCoeff() == 0.0) {
            throw InputError("polytope: row " + std::to_string(i) + " of A is zero");
        }
    }
}

Vec Polytope::slacks(const Vec& x) const {
    require_dim(dim(), x.size(), "slacks");
    return b_ - A_ * x;
}

SymmetricPolytope::SymmetricPolytope(const Mat& half, Vec anchor) : anchor_(std::move(anchor)) {
    require_dim(half.cols(), anchor_.size(), "symmetric polytope anchor");
    if (half.rows() == 0) throw InputError("symmetric polytope: no rows");
    if (!half.allFinite()) throw InputError("symmetric polytope: non-finite row");
    rows_.resize(2 * half.rows(), half.cols());
    rows_.topRows(half.rows()) = half;
    rows_.bottomRows(half.rows()) = -half;
}

Polytope SymmetricPolytope::centered() const { return Polytope(rows_, Vec::Ones(rows_.rows())); }

Ellipsoid::Ellipsoid(Mat E, Vec center) : E_(std::move(E)), center_(std::move(center)) {
    if (E_.rows() != E_.cols()) throw InputError("ellipsoid: shape matrix is not square");
    require_dim(E_.rows(), center_.size(), "ellipsoid center");
    if (!E_.allFinite()) throw NumericalError("ellipsoid: non-finite shape matrix");
    if (linalg::symmetry_residual(E_) > 1e-12) throw InputError("ellipsoid: shape matrix is not symmetric");
    E_ = 0.5 * (E_ + E_.transpose());

    Eigen::SelfAdjointEigenSolver<Mat> es(E_);
    const Vec& lam = es.eigenvalues();
    if (!(lam.minCoeff() > 0.0)) throw NumericalError("ellipsoid: shape matrix is not positive definite");
    logdet_ = lam.array().log().sum();
    cond_ = lam.maxCoeff() / lam.minCoeff();
    inv_ = es.eigenvectors() * lam.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

bool contains(const Polytope& P, const Vec& x, double tol) {
    require_dim(P.dim(), x.size(), "contains");
    const Vec ax = P.A() * x;
    for (Index i = 0; i < P.rows(); ++i) {
        if (ax(i) > P.b()(i) + tol * (1.0 + std::abs(P.b()(i)))) return false;
    }
    return true;
}

bool interior(const Polytope& P, const Vec& x) { return P.slacks(x).minCoeff() > 0.0; }

SymmetricPolytope symmetrize(const Polytope& P, const Vec& x) {
    const Vec s = P.slacks(x);
    for (Index i = 0; i < s.size(); ++i) {
        if (!(s(i) > 0.0)) {
            throw InputError("symmetrize: point is not interior (row " + std::to_string(i) + " has slack " +
                             std::to_string(s(i)) + ")");
        }
    }
    return SymmetricPolytope(s.cwiseInverse().asDiagonal() * P.A(), x);
}

double local_norm(const Ellipsoid& ell, const Vec& y) {
    require_dim(ell.dim(), y.size(), "local_norm");
    if (ell.condition() > 1e14) {
        throw NumericalError("local_norm: ellipsoid is numerically singular (condition " +
                             std::to_string(ell.condition()) + ")");
    }
    return (ell.inverse() * (y - ell.center())).norm();
}

Chord chord(const Polytope& P, const Vec& x, const Vec& dir) {
    require_dim(P.dim(), dir.size(), "chord direction");
    if (!contains(P, x)) throw InputError("chord: base point is outside the polytope");
    if (dir.norm() == 0.0) throw InputError("chord: zero direction");

    const Vec s = P.slacks(x).cwiseMax(0.0);
    const Vec ad = P.A() * dir;
    double t_plus = std::numeric_limits<double>::infinity();
    double t_minus = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < s.size(); ++i) {
        if (ad(i) > 0.0) {
            t_plus = std::min(t_plus, s(i) / ad(i));
        } else if (ad(i) < 0.0) {
            t_minus = std::max(t_minus, s(i) / ad(i));
        }
    }
    if (!std::isfinite(t_plus) || !std::isfinite(t_minus)) {
        throw UnboundedError("polytope unbounded along direction");
    }
    return Chord{x + t_minus * dir, x + t_plus * dir, t_minus, t_plus};
}

double cross_ratio(const Polytope& P, const Vec& x, const Vec& y) {
    const Vec d = y - x;
    if (d.norm() == 0.0) throw InputError("cross_ratio: x and y coincide");
    const Chord c = chord(P, x, d);
    // In units of |d|: x at 0, y at 1, p at t-, q at t+.
    return (c.t_plus - c.t_minus) / ((-c.t_minus) * (c.t_plus - 1.0));
}

namespace {

// Damped Newton on -sum log(b - A x) from a strictly feasible x.
Vec center_from(const Polytope& P, Vec x) {
    for (int it = 0; it < 500; ++it) {
        const Vec s = P.slacks(x);
        const Vec inv_s = s.cwiseInverse();
        const Vec g = P.A().transpose() * inv_s;
        const Mat Hs = inv_s.asDiagonal() * P.A();
        const Mat H = Hs.transpose() * Hs;
        Eigen::LLT<Mat> llt(H);
        if (llt.info() != Eigen::Success || llt.rcond() < 1e-14) {
            throw UnboundedError("analytic center: log-barrier Hessian is singular (polytope unbounded)");
        }
        const Vec dx = -llt.solve(g);
        const double decrement = std::sqrt(std::max(0.0, -g.dot(dx)));
        if (decrement < 1e-10) break;

        double step = decrement > 0.25 ? 1.0 / (1.0 + decrement) : 1.0;
        const Vec adx = P.A() * dx;
        for (Index i = 0; i < s.size(); ++i) {
            if (adx(i) > 0.0) step = std::min(step, 0.99 * s(i) / adx(i));
        }
        x += step * dx;
        if (!(x.norm() < 1e12)) throw UnboundedError("analytic center: iterates diverge (polytope unbounded)");
    }
    return x;
}

// Phase one: minimize t subject to A x - b <= t with a barrier until t < 0.
Vec phase_one(const Polytope& P, Vec x) {
    const Index n = P.dim();
    const Index m = P.rows();
    double t = (-P.slacks(x)).maxCoeff() + 1.0;

    for (double mu = 1.0; mu < 1e12; mu *= 10.0) {
        for (int it = 0; it < 200; ++it) {
            const Vec z = P.slacks(x).array() + t;
            // Variables (x, t); constraint gradients c_i = (-a_i, 1).
            Mat C(m, n + 1);
            C.leftCols(n) = -P.A();
            C.col(n).setOnes();
            const Vec inv_z = z.cwiseInverse();
            Vec g = -C.transpose() * inv_z;
            g(n) += mu;
            const Mat Cs = inv_z.asDiagonal() * C;
            const Mat H = Cs.transpose() * Cs;
            Eigen::LDLT<Mat> ldlt(H);
            const Vec d = -ldlt.solve(g);
            if (!d.allFinite()) throw UnboundedError("analytic center: phase one Hessian is singular");
            const double decrement = std::sqrt(std::max(0.0, -g.dot(d)));

            double step = decrement > 0.25 ? 1.0 / (1.0 + decrement) : 1.0;
            const Vec cd = C * d;
            for (Index i = 0; i < m; ++i) {
                if (cd(i) < 0.0) step = std::min(step, -0.99 * z(i) / cd(i));
            }
            x += step * d.head(n);
            t += step * d(n);
            if (t < 0.0 && interior(P, x)) return x;
            if (decrement < 1e-8) break;
        }
    }
    throw InputError("analytic center: polytope has empty interior");
}

} // namespace

Vec analytic_center(const Polytope& P, const Vec* start) {
    Vec x = start ? *start : Vec::Zero(P.dim());
    require_dim(P.dim(), x.size(), "analytic_center start");
    if (!interior(P, x)) x = phase_one(P, x);
    return center_from(P, x);
}

} // namespace johnwalk
