#include "johnwalk/mve.hpp"

#include <cmath>
#include <limits>

#include "johnwalk/kernels.hpp"

namespace johnwalk {

const char* to_string(MveMethod m) { return m == MveMethod::oracle ? "oracle" : "vaidya"; }

MveMethod parse_mve_method(const std::string& s) {
    if (s == "oracle") return MveMethod::oracle;
    if (s == "vaidya") return MveMethod::vaidya;
    throw InputError("unknown ellipsoid solver '" + s + "' (expected oracle or vaidya)");
}

Ellipsoid MveeResult::enclosing() const {
    return Ellipsoid(linalg::sqrt_spd(max_form * moment), Vec::Zero(moment.rows()));
}

namespace {

Mat weighted_moment(const Mat& P, const Vec& w) { return P.transpose() * w.asDiagonal() * P; }

Mat checked_inverse(const Mat& M) {
    Eigen::LLT<Mat> llt(M);
    if (llt.info() != Eigen::Success || llt.rcond() < 1e-13) {
        throw InputError("point set does not span the space (rank-deficient)");
    }
    return llt.solve(Mat::Identity(M.rows(), M.cols()));
}

} // namespace

MveeResult solve_mvee_polar(const Mat& P, double tol, std::int64_t max_iterations) {
    const Index k = P.rows();
    const Index n = P.cols();
    if (k == 0 || n == 0) throw InputError("solve_mvee_polar: empty point set");
    if (!(tol > 0.0)) throw InputError("solve_mvee_polar: tolerance must be positive");
    if (!P.allFinite()) throw InputError("solve_mvee_polar: non-finite point");

    const double nn = static_cast<double>(n);
    Vec w = Vec::Constant(k, 1.0 / double(k));
    Mat Minv = checked_inverse(weighted_moment(P, w));
    Vec kappa = kernels::row_quadratic_forms(P, Minv);

    MveeResult out;
    std::int64_t it = 0;
    for (; it < max_iterations; ++it) {
        Index up = 0;
        const double kmax = kappa.maxCoeff(&up);
        if (kmax <= nn * (1.0 + tol)) break;

        Index down = -1;
        double kmin = std::numeric_limits<double>::infinity();
        for (Index i = 0; i < k; ++i) {
            if (w(i) > 0.0 && kappa(i) < kmin) {
                kmin = kappa(i);
                down = i;
            }
        }

        // Toward step on the most violated point, or an away step on the
        // least useful supported point when that promises more.
        Index j = up;
        double lambda = (kmax - nn) / (nn * (kmax - 1.0));
        if (down >= 0 && (nn - kmin) / nn > (kmax - nn) / nn) {
            j = down;
            const double drop = -w(j) / (1.0 - w(j));
            lambda = kmin > 1.0 ? std::max((kmin - nn) / (nn * (kmin - 1.0)), drop) : drop;
        }
        if (w(j) >= 1.0 && lambda < 0.0) break;

        // Sherman-Morrison on M' = (1 - lambda) (M + mu p p^T).
        const double mu = lambda / (1.0 - lambda);
        const Vec v = Minv * P.row(j).transpose();
        const Vec g = P * v;
        const double denom = 1.0 + mu * kappa(j);
        Minv = (Minv - (mu / denom) * v * v.transpose()) / (1.0 - lambda);
        kappa = (kappa - (mu / denom) * g.cwiseAbs2()) / (1.0 - lambda);
        w *= (1.0 - lambda);
        w(j) += lambda;
        if (w(j) < 1e-300) w(j) = 0.0;

        if (it % 256 == 255) {
            w /= w.sum();
            Minv = checked_inverse(weighted_moment(P, w));
            kappa = kernels::row_quadratic_forms(P, Minv);
        }
    }

    w /= w.sum();
    out.moment = weighted_moment(P, w);
    Minv = checked_inverse(out.moment);
    kappa = kernels::row_quadratic_forms(P, Minv);
    out.weights = w;
    out.max_form = std::max(kappa.maxCoeff(), nn);
    out.iterations = it;
    return out;
}

DikinPreconditioned dikin_precondition(const SymmetricPolytope& S) {
    const Mat& A = S.rows();
    const Mat H = A.transpose() * A;
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    const Vec& lam = es.eigenvalues();
    if (!(lam.minCoeff() > 1e-12 * std::max(1.0, lam.maxCoeff()))) {
        throw UnboundedError("dikin_precondition: log-barrier Hessian is singular (body unbounded)");
    }
    const Mat& V = es.eigenvectors();
    Mat T = V * lam.cwiseSqrt().asDiagonal() * V.transpose();
    Mat T_inv = V * lam.cwiseSqrt().cwiseInverse().asDiagonal() * V.transpose();
    SymmetricPolytope body(S.half_rows() * T_inv, S.anchor());
    return DikinPreconditioned{std::move(T), std::move(T_inv), std::move(body)};
}

MveOracleAnswer separation_oracle_mve(const Mat& X, const SymmetricPolytope& S) {
    const Index n = S.dim();
    if (X.rows() != n || X.cols() != n) throw InputError("separation oracle: matrix has the wrong shape");
    if ((X - X.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, X.cwiseAbs().maxCoeff())) {
        throw InputError("separation oracle: matrix is not symmetric");
    }
    const Mat Xs = 0.5 * (X + X.transpose());
    const Mat half = S.half_rows();
    MveOracleAnswer ans;

    const Vec forms = kernels::row_quadratic_forms(half, Xs);
    for (Index i = 0; i < forms.size(); ++i) {
        if (forms(i) > 1.0 + 1e-12) {
            ans.kind = MveOracleAnswer::Kind::constraint;
            ans.row = i;
            const Vec a = half.row(i).transpose();
            ans.normal = linalg::svec(a * a.transpose());
            ans.level = 1.0;
            return ans;
        }
    }

    Eigen::SelfAdjointEigenSolver<Mat> es(Xs);
    Index imin = 0;
    const double dmin = es.eigenvalues().minCoeff(&imin);
    if (dmin < 1.0 / double(n)) {
        ans.kind = MveOracleAnswer::Kind::psd;
        ans.eigvec = es.eigenvectors().col(imin);
        ans.normal = linalg::svec(-ans.eigvec * ans.eigvec.transpose());
        ans.level = -1.0 / double(n);
        return ans;
    }

    ans.kind = MveOracleAnswer::Kind::feasible;
    const Mat Xinv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    ans.normal = linalg::svec(-Xinv);
    ans.level = ans.normal.dot(linalg::svec(Xs));
    return ans;
}

double certified_gap(const SymmetricPolytope& S, const Mat& E) {
    const Index n = S.dim();
    const double nn = double(n);
    // Whitened rows b_i = E a_i; the candidate dual weights fit sum w_i b_i b_i^T = I.
    const Mat B = S.half_rows() * E;
    const Vec norms2 = B.rowwise().squaredNorm();
    const Index m = B.rows();
    const Vec target = linalg::svec(Mat::Identity(n, n));

    double best = std::numeric_limits<double>::infinity();
    for (double theta = 1.0; theta >= 1e-10; theta *= 0.1) {
        std::vector<Index> idx;
        for (Index i = 0; i < m; ++i)
            if (1.0 - norms2(i) <= theta) idx.push_back(i);
        if (Index(idx.size()) < n) continue;
        Mat cols(target.size(), Index(idx.size()));
        for (size_t k = 0; k < idx.size(); ++k) {
            const Vec b = B.row(idx[k]).transpose();
            cols.col(Index(k)) = linalg::svec(b * b.transpose());
        }
        const Vec c = linalg::nnls(cols, target);
        const double total = c.sum();
        if (!(total > 0.0)) continue;
        // Dual bound in whitened coordinates, where the candidate is I:
        // log det X* <= n log(sum w / n) - log det W.
        Mat W = Mat::Zero(n, n);
        for (size_t k = 0; k < idx.size(); ++k) {
            const Vec b = B.row(idx[k]).transpose();
            W += c(Index(k)) * b * b.transpose();
        }
        Eigen::LLT<Mat> llt(W);
        if (llt.info() != Eigen::Success) continue;
        const double logdet_W = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
        const double bound_whitened = nn * std::log(total / nn) - logdet_W;
        // Rows violated by up to a rounding error would make the bound slightly
        // negative; clamp at zero.
        best = std::min(best, std::max(0.0, 0.5 * bound_whitened));
    }
    return best;
}

namespace {

JohnSolution solve_oracle(const SymmetricPolytope& S, double gap, const MveOptions& opt) {
    const Index n = S.dim();
    const double nn = double(n);
    MveeResult res;
    try {
        res = solve_mvee_polar(S.half_rows(), gap / (2.0 * nn), opt.max_oracle_iterations);
    } catch (const InputError&) {
        throw UnboundedError("solve_mve: symmetrized body is unbounded (rows do not span)");
    }
    const Mat Q = res.max_form * res.moment;
    JohnSolution sol{Ellipsoid(linalg::inv_sqrt_spd(Q), S.anchor()), std::nullopt,
                     0.5 * nn * std::log(res.max_form / nn), MveMethod::oracle, res.iterations};
    if (sol.logdet_gap > gap) {
        throw MveBudgetError("solve_mve: ellipsoid iteration budget exhausted before the gap was met", sol);
    }
    return sol;
}

JohnSolution solve_cutting_plane(const SymmetricPolytope& S, double gap, const MveOptions& opt) {
    const Index n = S.dim();
    const DikinPreconditioned pre = dikin_precondition(S);
    const SymmetricPolytope& body = pre.body;
    const Index d = linalg::svec_dim(n);

    vaidya::VaidyaParams params;
    params.mode = opt.vaidya_mode;
    params.rho = double(S.row_count());
    params.L = std::floor(1.0 + 10.0 * std::log2(double(n))) + 1.0;
    params.max_iterations = opt.vaidya_max_iterations;

    auto oracle = [&](const Vec& v) -> std::optional<vaidya::Cut> {
        const auto ans = separation_oracle_mve(linalg::smat(v), body);
        if (ans.kind == MveOracleAnswer::Kind::feasible) return std::nullopt;
        return vaidya::Cut{ans.normal, ans.level};
    };
    auto f = [](const Vec& v) { return -linalg::logdet_spd(linalg::smat(v)); };
    auto subgrad = [](const Vec& v) {
        const Mat X = linalg::smat(v);
        return linalg::svec(-X.llt().solve(Mat::Identity(X.rows(), X.cols())));
    };
    auto gap_of = [&](const Vec& v) { return certified_gap(body, linalg::sqrt_spd(linalg::smat(v))); };

    vaidya::MinimizeOptions mopt;
    mopt.center = linalg::svec(Mat::Identity(n, n));
    mopt.converged = [&](const Vec& best, double) { return gap_of(best) <= gap; };

    vaidya::MinimizeResult res;
    try {
        res = vaidya::vaidya_minimize(f, subgrad, oracle, d, params, mopt);
    } catch (const vaidya::NoFeasiblePointError& e) {
        throw NumericalError(std::string("solve_mve: ") + e.what());
    }

    const Mat X = linalg::smat(res.argmin);
    const Mat E = linalg::sqrt_spd(pre.T_inv * X * pre.T_inv);
    JohnSolution sol{Ellipsoid(E, S.anchor()), std::nullopt, gap_of(res.argmin), MveMethod::vaidya,
                     res.stats.iterations};
    if (!(sol.logdet_gap <= gap)) {
        throw MveBudgetError("solve_mve: cutting-plane budget exhausted before the gap was met", sol);
    }
    return sol;
}

} // namespace

JohnSolution solve_mve(const SymmetricPolytope& S, MveMethod method, double gap, const MveOptions& options) {
    if (!(gap > 0.0)) throw InputError("solve_mve: gap must be positive");
    return method == MveMethod::oracle ? solve_oracle(S, gap, options) : solve_cutting_plane(S, gap, options);
}

ContactSet extract_contacts(const JohnSolution& sol, const SymmetricPolytope& S, double slack_tol) {
    const Index n = S.dim();
    const Mat V = S.half_rows() * sol.ellipsoid.E(); // rows (E a_i)^T
    const Index m = V.rows();

    std::vector<Index> tight;
    for (Index i = 0; i < m; ++i) {
        if (1.0 - V.row(i).norm() <= slack_tol) tight.push_back(i);
    }
    if (Index(tight.size()) < n) {
        throw NumericalError("contact set rank-deficient (" + std::to_string(tight.size()) + " tight directions in dimension " +
                             std::to_string(n) + ")");
    }

    const Vec target = linalg::svec(Mat::Identity(n, n));
    Mat cols(target.size(), Index(tight.size()));
    std::vector<Vec> dirs;
    for (size_t k = 0; k < tight.size(); ++k) {
        Vec u = V.row(tight[k]).transpose();
        u.normalize();
        cols.col(Index(k)) = linalg::svec(u * u.transpose());
        dirs.push_back(std::move(u));
    }
    const Vec c = linalg::nnls(cols, target);

    ContactSet cs;
    for (size_t k = 0; k < tight.size(); ++k) {
        if (!(c(Index(k)) > 0.0)) continue;
        const double half_weight = 0.5 * c(Index(k));
        cs.points.push_back(dirs[k]);
        cs.weights.push_back(half_weight);
        cs.rows.push_back(tight[k]);
        cs.points.push_back(-dirs[k]);
        cs.weights.push_back(half_weight);
        cs.rows.push_back(tight[k] + m);
    }
    cs.fit_residual = (cols * c - target).norm();
    return cs;
}

JohnResiduals verify_john_conditions(const ContactSet& cs, Index n) {
    Mat sum_outer = Mat::Zero(n, n);
    Vec centroid = Vec::Zero(n);
    double total = 0.0;
    for (size_t i = 0; i < cs.points.size(); ++i) {
        const Vec& u = cs.points[i];
        if (u.size() != n) throw InputError("verify_john_conditions: contact point has the wrong dimension");
        sum_outer += cs.weights[i] * u * u.transpose();
        centroid += cs.weights[i] * u;
        total += cs.weights[i];
    }
    return JohnResiduals{(sum_outer - Mat::Identity(n, n)).norm(), std::abs(total - double(n)), centroid.norm()};
}

} // namespace johnwalk
