#pragma once

// Sandwiching the projection of a bounded full-dimensional convex quadratic set onto
// its first p coordinates between two concentric balls after a linear map.

#include <vector>

#include "micqp/cqs.hpp"

namespace micqp {

/// Smallest k with k^2 >= p, by binary search.
std::size_t ceil_sqrt(std::size_t p);

/// Simplex in R^p with facets c^i^T y <= d_i, facet i opposite vertex i, scaled so
/// that d_i - c^i^T v^i = 1.
struct Simplex {
  std::vector<RatVector> vertices;  ///< p + 1 points
  std::vector<RatVector> normals;
  RatVector offsets;

  /// Throws if the vertices are affinely dependent.
  static Simplex from_vertices(std::vector<RatVector> vertices);
  std::size_t dim() const { return vertices.size() - 1; }
  /// Columns v^i - v^0, i = 1..p.
  RatMatrix edge_matrix() const;
  /// |det(edge_matrix)| / p!
  Rational volume() const;
};

/// p + 1 affinely independent points of proj_p(Q), taken from LP optima over an
/// inner polytope of Q.
std::vector<RatVector> seed_simplex(const ConvexQuadraticSet& Q, std::size_t p);

struct GrowthTrace {
  Simplex simplex;
  std::vector<Rational> volumes;  ///< volume after each accepted expansion, starting with S0
  std::vector<std::size_t> facets;  ///< facet replaced at each expansion
};

/// Replaces vertices while some facet admits a point of Q at distance 3/2 (in facet
/// units) beyond either side; the lowest-index facet (lower side first) wins.
GrowthTrace grow_simplex(const ConvexQuadraticSet& Q, std::size_t p, Simplex s0);

struct SandwichResult {
  RatMatrix B;  ///< p x p, the inverse of the grown simplex's edge matrix
  RatVector a;
  Rational r;
  Rational R;
  GrowthTrace growth;
};

/// B(a, r) within B proj_p(Q) within B(a, R), r = 1/(p + ceil_sqrt(p)), R = 2 ceil_sqrt(p).
SandwichResult sandwich(const ConvexQuadraticSet& Q, std::size_t p);

}  // namespace micqp
