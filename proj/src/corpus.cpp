#include "johnwalk/corpus.hpp"

#include <cmath>

namespace johnwalk::corpus {

Polytope cube(Index n) {
    Mat A(2 * n, n);
    A << Mat::Identity(n, n), -Mat::Identity(n, n);
    return Polytope(A, Vec::Ones(2 * n));
}

Polytope box(const Vec& h) {
    const Index n = h.size();
    Mat A(2 * n, n);
    A << Mat::Identity(n, n), -Mat::Identity(n, n);
    Vec b(2 * n);
    b << h, h;
    return Polytope(A, b);
}

Polytope cross_polytope(Index n) {
    const Index m = Index(1) << n;
    Mat A(m, n);
    for (Index r = 0; r < m; ++r)
        for (Index k = 0; k < n; ++k) A(r, k) = (r >> k) & 1 ? -1.0 : 1.0;
    return Polytope(A, Vec::Ones(m));
}

Polytope simplex(Index n) {
    Mat A(n + 1, n);
    A << -Mat::Identity(n, n), Mat::Ones(1, n);
    Vec b = Vec::Ones(n + 1);
    return Polytope(A, b);
}

Polytope random_polytope(Index n, Index m, walk::Rng& rng) {
    if (m < n + 1) throw InputError("random_polytope: need m >= n + 1");
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(0.5, 1.5);
    const Polytope s = simplex(n);
    Mat A(m, n);
    Vec b(m);
    A.topRows(n + 1) = s.A();
    b.head(n + 1) = s.b();
    for (Index i = n + 1; i < m; ++i) {
        Vec a(n);
        for (Index k = 0; k < n; ++k) a(k) = normal(rng);
        A.row(i) = a.normalized().transpose();
        b(i) = unif(rng);
    }
    return Polytope(A, b);
}

SymmetricPolytope random_symmetric(Index n, Index m, walk::Rng& rng) {
    if (m < n) throw InputError("random_symmetric: need m >= n");
    std::normal_distribution<double> normal;
    Mat half(m, n);
    for (Index i = 0; i < m; ++i)
        for (Index k = 0; k < n; ++k) half(i, k) = normal(rng);
    return SymmetricPolytope(half, Vec::Zero(n));
}

std::vector<Instance> standard(std::uint64_t seed) {
    walk::Rng rng = walk::make_rng(seed);
    std::vector<Instance> out;
    out.push_back({"cube2", cube(2)});
    out.push_back({"cube4", cube(4)});
    Vec h(2);
    h << 2.0, 1.0;
    out.push_back({"box2", box(h)});
    out.push_back({"cross3", cross_polytope(3)});
    out.push_back({"simplex2", simplex(2)});
    out.push_back({"simplex4", simplex(4)});
    out.push_back({"random2", random_polytope(2, 8, rng)});
    out.push_back({"random3", random_polytope(3, 10, rng)});
    out.push_back({"random5", random_polytope(5, 14, rng)});
    return out;
}

std::vector<Vec> vertices(const Polytope& P) {
    const Index n = P.dim();
    const Index m = P.rows();
    std::vector<Vec> out;
    std::vector<Index> idx(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) idx[std::size_t(k)] = k;
    if (m < n) return out;
    for (;;) {
        Mat A(n, n);
        Vec b(n);
        for (Index k = 0; k < n; ++k) {
            A.row(k) = P.A().row(idx[std::size_t(k)]);
            b(k) = P.b()(idx[std::size_t(k)]);
        }
        Eigen::FullPivLU<Mat> lu(A);
        if (lu.isInvertible()) {
            const Vec v = lu.solve(b);
            if (contains(P, v, 1e-9)) {
                bool dup = false;
                for (const Vec& w : out) dup = dup || (w - v).norm() <= 1e-9 * (1.0 + v.norm());
                if (!dup) out.push_back(v);
            }
        }
        // next combination
        Index k = n - 1;
        while (k >= 0 && idx[std::size_t(k)] == m - n + k) --k;
        if (k < 0) break;
        ++idx[std::size_t(k)];
        for (Index j = k + 1; j < n; ++j) idx[std::size_t(j)] = idx[std::size_t(j - 1)] + 1;
    }
    return out;
}

} // namespace johnwalk::corpus
