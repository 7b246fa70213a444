#pragma once

// Integer reflexive generalized inverses and the parametrization of the
// mixed-integer solutions of a linear equation system.

#include <optional>

#include "micqp/linalg.hpp"

namespace micqp {

/// A# with A A# A = A, A# A A# = A#, and A# A = U diag(I_r, 0) U^{-1} integral.
struct IntegerReflexiveGinv {
  RatMatrix Asharp;  ///< n x m
  UnimodularCert U;  ///< n x n
  std::size_t r = 0; ///< rank(A)
};

IntegerReflexiveGinv integer_reflexive_ginv(const RatMatrix& a);

/// Affine map tau(x') = xbar + M x' from R^{nPrime} to R^n whose first pPrime
/// coordinates are the integer ones.
struct AffineParam {
  RatVector xbar;
  RatMatrix M;  ///< n x nPrime, full column rank
  std::size_t pPrime = 0;
  std::size_t nPrime = 0;

  static AffineParam identity(std::size_t n, std::size_t p);

  RatVector apply(std::span<const Rational> xprime) const;
  /// (M^T M)^{-1} M^T (x - xbar); exact inverse on the image of the map.
  RatVector preimage(std::span<const Rational> x) const;
  /// Composition this o inner: x = xbar + M (inner.xbar + inner.M x'').
  AffineParam compose(const AffineParam& inner) const;
};

/// Either the mixed-integer solution set of W x = w is empty (nullopt), or the map
/// tau with {x : Wx = w} = tau(R^n') and the mixed-integer solutions equal to
/// tau(Z^p' x R^(n'-p')).
std::optional<AffineParam> parametrize_mixed_integer_solutions(const RatMatrix& W,
                                                               std::span<const Rational> w,
                                                               std::size_t p);

}  // namespace micqp
