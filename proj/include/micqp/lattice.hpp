#pragma once

// Exact LLL reduction and the flatness dichotomy for lattices Lambda(B) = {B mu : mu in Z^p}.

#include "micqp/linalg.hpp"

namespace micqp {

struct LllResult {
  RatMatrix basis;  ///< B U, columns size-reduced and Lovasz-reduced at delta = 3/4
  UnimodularCert U;
};

/// Reduces the columns of an invertible B.
LllResult lll_reduce(const RatMatrix& B);

/// Gram-Schmidt vectors (columns) and coefficients mu(i, j), j < i, of the columns of B.
struct GramSchmidt {
  RatMatrix star;
  RatMatrix mu;
  RatVector norms;  ///< squared norms of the columns of star
};

GramSchmidt gram_schmidt(const RatMatrix& B);

enum class FlatnessKind { LatticePoint, ThinDirection };

struct FlatnessOutcome {
  FlatnessKind kind = FlatnessKind::LatticePoint;
  RatVector z;   ///< LatticePoint: z in Lambda(B) with |z - a| <= r
  RatVector mu;  ///< LatticePoint: B^{-1} z
  RatVector d;   ///< ThinDirection: B^T d integral, 2 r |d| <= p 2^{p(p-1)/4}
  RatVector c;   ///< ThinDirection: B^T d
};

/// Babai nearest-plane rounding of a in the reduced basis; on a miss, the shortest row
/// of the inverse reduced basis (a dual lattice vector) as thin direction.
FlatnessOutcome flatness(std::span<const Rational> a, const Rational& r, const RatMatrix& B);

/// (p 2^{p(p-1)/4})^2 = p^2 2^{p(p-1)/2}.
Integer flatness_bound_squared(std::size_t p);

}  // namespace micqp
