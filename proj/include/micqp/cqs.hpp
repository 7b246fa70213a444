#pragma once

// Convex quadratic sets {x : W x <= w, x^T H x + h^T x <= eta}: the full-dimensionality
// test, inner polytopes, tangent faces, and the mixed-integer preserving reduction to a
// full-dimensional set.

#include <optional>
#include <vector>

#include "micqp/convex_qp.hpp"

namespace micqp {

struct ConvexQuadraticSet {
  Polyhedron P;
  RatMatrix H;
  RatVector h;
  Rational eta;

  ConvexQuadraticSet() = default;
  ConvexQuadraticSet(Polyhedron P_, RatMatrix H_, RatVector h_, Rational eta_);
  /// The set P itself (zero quadratic, eta = 0).
  static ConvexQuadraticSet from_polyhedron(Polyhedron P_);

  std::size_t n() const { return P.n(); }
  std::size_t p() const { return P.p; }
  QpObjective objective() const { return {H, h}; }
  bool quadratic_is_zero() const;

  bool contains(std::span<const Rational> x) const;
  bool contains_mixed_integer(std::span<const Rational> x) const;
  /// Preimage under tau: P substituted, H' = M^T H M, h' = 2 M^T H xbar + M^T h,
  /// eta' = eta - xbar^T H xbar - h^T xbar.
  ConvexQuadraticSet substitute(const AffineParam& tau) const;

  friend bool operator==(const ConvexQuadraticSet&, const ConvexQuadraticSet&) = default;
};

/// The equation system 2 H x = -h.
struct AffineSubspace {
  RatMatrix A;
  RatVector b;
  bool contains(std::span<const Rational> x) const { return A * x == RatVector(b); }
};

AffineSubspace stationary_affine_subspace(const QpObjective& obj);

/// Whether the recession cone {W r <= 0, H r = 0, h^T r <= 0} of Q has zero projection
/// on the first k coordinates, i.e. the projection of a nonempty Q is bounded.
bool projection_bounded(const ConvexQuadraticSet& Q, std::size_t k);

/// A point of P with q(x) <= eta - 1 when q is unbounded below on P, else a minimizer.
/// nullopt when P is empty.
std::optional<RatVector> deep_point(const ConvexQuadraticSet& Q);

struct TangentFace {
  Polyhedron face;                 ///< P with the tight rows duplicated as equalities
  std::vector<std::size_t> tight;  ///< rows of P set to equality
  RatVector normal;                ///< gradient 2 H xbar + h at the QP minimizer
  Rational offset;                 ///< normal^T xbar
};

/// Requires P full-dimensional, min over P equal to eta and min over R^n below eta.
TangentFace tangent_face(const ConvexQuadraticSet& Q);

/// Requires P full-dimensional and min over P below eta (or a zero quadratic with
/// eta >= 0). Returns P intersected with a cube around a deep point.
Polyhedron inner_polytope(const ConvexQuadraticSet& Q);

enum class FulldimTag { FullDim, LowDimAffine, LowDimFace, LowDimPolyhedron, EmptySet };

struct FulldimCertificate {
  FulldimTag tag = FulldimTag::EmptySet;
  Polyhedron polytope;                 ///< FullDim
  AffineSubspace subspace;             ///< LowDimAffine
  TangentFace face;                    ///< LowDimFace
  std::vector<std::size_t> equalities; ///< LowDimPolyhedron: implicit equalities of P
};

FulldimCertificate classify_fulldim(const ConvexQuadraticSet& Q);

struct CqsReduction {
  AffineParam tau;
  ConvexQuadraticSet reduced;      ///< full-dimensional, tau.pPrime integer variables
  std::vector<std::size_t> tight;  ///< rows of P set to equality by face descents
  std::size_t descents = 0;
};

/// nullopt certifies that Q has no mixed-integer point. Otherwise Q = tau(Q') with
/// mixed-integer points in bijection and Q' full-dimensional.
std::optional<CqsReduction> fulldim_reduce_cqs(const ConvexQuadraticSet& Q);

}  // namespace micqp
