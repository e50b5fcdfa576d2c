#include "johnwalk/linalg.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "johnwalk/errors.hpp"

namespace johnwalk::linalg {

Index smat_order(Index d) {
    const auto n = static_cast<Index>(std::llround((std::sqrt(8.0 * double(d) + 1.0) - 1.0) / 2.0));
    if (svec_dim(n) != d) {
        throw InputError("svec length " + std::to_string(d) + " is not a triangular number");
    }
    return n;
}

Vec svec(const Mat& X) {
    const Index n = X.rows();
    Vec v(svec_dim(n));
    Index k = 0;
    for (Index j = 0; j < n; ++j) {
        v(k++) = X(j, j);
        for (Index i = j + 1; i < n; ++i) {
            v(k++) = M_SQRT2 * 0.5 * (X(i, j) + X(j, i));
        }
    }
    return v;
}

Mat smat(const Vec& v) {
    const Index n = smat_order(v.size());
    Mat X(n, n);
    Index k = 0;
    for (Index j = 0; j < n; ++j) {
        X(j, j) = v(k++);
        for (Index i = j + 1; i < n; ++i) {
            X(i, j) = X(j, i) = v(k++) / M_SQRT2;
        }
    }
    return X;
}

double symmetry_residual(const Mat& X) {
    const double scale = X.norm();
    if (scale == 0.0) return 0.0;
    return (X - X.transpose()).norm() / scale;
}

namespace {

Eigen::SelfAdjointEigenSolver<Mat> checked_eigen(const Mat& X) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (X + X.transpose()));
    if (es.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition failed");
    }
    if (!(es.eigenvalues().minCoeff() > 0.0)) {
        throw NumericalError("matrix is not positive definite (min eigenvalue " +
                             std::to_string(es.eigenvalues().minCoeff()) + ")");
    }
    return es;
}

} // namespace

Mat sqrt_spd(const Mat& X) {
    const auto es = checked_eigen(X);
    const Mat& V = es.eigenvectors();
    return V * es.eigenvalues().cwiseSqrt().asDiagonal() * V.transpose();
}

Mat inv_sqrt_spd(const Mat& X) {
    const auto es = checked_eigen(X);
    const Mat& V = es.eigenvectors();
    return V * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * V.transpose();
}

double logdet_spd(const Mat& X) {
    Eigen::LLT<Mat> llt(0.5 * (X + X.transpose()));
    if (llt.info() != Eigen::Success) {
        throw NumericalError("log det of a matrix that is not positive definite");
    }
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

Vec nnls(const Mat& A, const Vec& b, int max_iter) {
    const Index m = A.rows();
    const Index n = A.cols();
    if (b.size() != m) throw InputError("nnls: right-hand side length mismatch");
    if (max_iter <= 0) max_iter = static_cast<int>(3 * n + 30);

    const double tol = 10.0 * std::numeric_limits<double>::epsilon() * A.cwiseAbs().colwise().sum().maxCoeff() *
                       double(std::max(m, n));

    Vec x = Vec::Zero(n);
    std::vector<bool> passive(static_cast<size_t>(n), false);

    auto solve_passive = [&](Vec& z) {
        std::vector<Index> idx;
        for (Index j = 0; j < n; ++j)
            if (passive[size_t(j)]) idx.push_back(j);
        Mat Ap(m, Index(idx.size()));
        for (size_t k = 0; k < idx.size(); ++k) Ap.col(Index(k)) = A.col(idx[k]);
        const Vec zp = Ap.colPivHouseholderQr().solve(b);
        z.setZero(n);
        for (size_t k = 0; k < idx.size(); ++k) z(idx[k]) = zp(Index(k));
    };

    Vec w = A.transpose() * (b - A * x);
    for (int outer = 0; outer < max_iter; ++outer) {
        Index jmax = -1;
        double wmax = tol;
        for (Index j = 0; j < n; ++j) {
            if (!passive[size_t(j)] && w(j) > wmax) {
                wmax = w(j);
                jmax = j;
            }
        }
        if (jmax < 0) break;
        passive[size_t(jmax)] = true;

        Vec z;
        for (int inner = 0; inner <= max_iter; ++inner) {
            solve_passive(z);
            bool all_positive = true;
            for (Index j = 0; j < n; ++j)
                if (passive[size_t(j)] && z(j) <= tol) all_positive = false;
            if (all_positive) break;

            double alpha = std::numeric_limits<double>::infinity();
            for (Index j = 0; j < n; ++j) {
                if (passive[size_t(j)] && z(j) <= tol) alpha = std::min(alpha, x(j) / (x(j) - z(j)));
            }
            x += alpha * (z - x);
            for (Index j = 0; j < n; ++j) {
                if (passive[size_t(j)] && std::abs(x(j)) <= tol) {
                    passive[size_t(j)] = false;
                    x(j) = 0.0;
                }
            }
        }
        x = z;
        w = A.transpose() * (b - A * x);
    }
    return x.cwiseMax(0.0);
}

} // namespace johnwalk::linalg
