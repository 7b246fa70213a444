#pragma once

// Exact minimization of a convex quadratic x^T H x + h^T x over a polyhedron.

#include "micqp/polyhedra.hpp"

namespace micqp {

struct QpObjective {
  RatMatrix H;  ///< symmetric positive semidefinite
  RatVector h;

  static QpObjective zero(std::size_t n) { return {RatMatrix(n, n), zeros(n)}; }
  std::size_t n() const { return h.size(); }
  Rational operator()(std::span<const Rational> x) const;
  RatVector gradient(std::span<const Rational> x) const;  ///< 2 H x + h
  /// Objective of x' -> q(xbar + M x') minus its constant term q(xbar).
  QpObjective substitute(const AffineParam& tau) const;

  friend bool operator==(const QpObjective&, const QpObjective&) = default;
};

struct PsdCheck {
  bool psd = true;
  std::size_t pivot_index = 0;  ///< row/column of the failing pivot
  Rational pivot;               ///< its value (negative, or zero with a nonzero remainder)
};

/// Symmetric-pivoting rational LDL^T; a negative pivot or a zero pivot with a
/// nonzero remainder proves H is not PSD.
PsdCheck check_psd(const RatMatrix& H);

class NotPsdError : public Error {
 public:
  explicit NotPsdError(const PsdCheck& c);
  PsdCheck check;
};

enum class QpStatus { Infeasible, Unbounded, Optimal };

struct QpResult {
  QpStatus status = QpStatus::Infeasible;
  RatVector x;            ///< Optimal: minimizer; Unbounded: a feasible point
  Rational value;         ///< Optimal only
  RatVector ray;          ///< Unbounded: W r <= 0, H r = 0, h^T r <= -1
  RatVector multipliers;  ///< Optimal: KKT multipliers, one per row of W
  std::size_t iterations = 0;
};

QpResult qp_min(const QpObjective& obj, const Polyhedron& P);

/// qp_min with x_i = fixed_i appended for i < fixed.size().
QpResult qp_min_on_slice(const QpObjective& obj, const Polyhedron& P,
                         std::span<const Rational> fixed);

/// Stationarity 2Hx + h + W^T lambda = 0, lambda >= 0, Wx <= w, complementary slackness.
bool verify_kkt(const QpObjective& obj, const Polyhedron& P, std::span<const Rational> x,
                std::span<const Rational> lambda);

/// The direction certificate for unboundedness.
bool verify_unbounded_ray(const QpObjective& obj, const Polyhedron& P,
                          std::span<const Rational> ray);

}  // namespace micqp
