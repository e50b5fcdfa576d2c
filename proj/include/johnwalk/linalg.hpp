#pragma once

#include <Eigen/Dense>

namespace johnwalk {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

namespace linalg {

// Dimension of the space of n x n symmetric matrices.
constexpr Index svec_dim(Index n) { return n * (n + 1) / 2; }

// Inverse of svec_dim; throws if d is not triangular.
Index smat_order(Index d);

// Lower triangle, column by column, with off-diagonals scaled by sqrt(2) so
// that svec(X).dot(svec(Y)) == trace(X Y) for symmetric X, Y.
Vec svec(const Mat& X);
Mat smat(const Vec& v);

double symmetry_residual(const Mat& X);

// Symmetric square root and inverse square root of an SPD matrix through its
// eigendecomposition. Throws NumericalError if an eigenvalue is not positive.
Mat sqrt_spd(const Mat& X);
Mat inv_sqrt_spd(const Mat& X);

// log det via Cholesky; throws NumericalError when X is not positive definite.
double logdet_spd(const Mat& X);

// Lawson-Hanson active set solver for min |A x - b| subject to x >= 0.
Vec nnls(const Mat& A, const Vec& b, int max_iter = 0);

} // namespace linalg
} // namespace johnwalk
