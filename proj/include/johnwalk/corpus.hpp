#pragma once

#include <string>
#include <vector>

#include "johnwalk/geometry.hpp"
#include "johnwalk/walk.hpp"

// Test and benchmark polytopes.
namespace johnwalk::corpus {

// [-1, 1]^n
Polytope cube(Index n);

// |x_i| <= half_widths_i
Polytope box(const Vec& half_widths);

// |x|_1 <= 1, all 2^n sign rows.
Polytope cross_polytope(Index n);

// x_i >= -1, sum x_i <= 1
Polytope simplex(Index n);

// The simplex rows plus m - n - 1 random unit normals with offsets in
// [0.5, 1.5], so the result is bounded and contains a ball about 0.
Polytope random_polytope(Index n, Index m, walk::Rng& rng);

// m Gaussian half rows, centered at the origin.
SymmetricPolytope random_symmetric(Index n, Index m, walk::Rng& rng);

struct Instance {
    std::string name;
    Polytope P;
};

// Small instances used across the property tests (n <= 5).
std::vector<Instance> standard(std::uint64_t seed = 7);

// Vertices of a bounded polytope by brute force over n-subsets of rows.
// Only for small m; duplicates within 1e-9 are merged.
std::vector<Vec> vertices(const Polytope& P);

} // namespace johnwalk::corpus
