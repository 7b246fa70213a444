#pragma once

// Polyhedra {x : W x <= w} with a leading block of integer variables: exact LP,
// implicit equalities, and the mixed-integer preserving full-dimensional reduction.

#include <optional>
#include <vector>

#include "micqp/diophantine.hpp"
#include "micqp/linalg.hpp"

namespace micqp {

/// {x in R^n : W x <= w}; the first p coordinates are the integer ones.
struct Polyhedron {
  RatMatrix W;
  RatVector w;
  std::size_t p = 0;

  Polyhedron() = default;
  Polyhedron(RatMatrix W_, RatVector w_, std::size_t p_);
  /// R^n with no constraints.
  static Polyhedron free_space(std::size_t n, std::size_t p = 0);

  std::size_t n() const { return W.cols(); }
  std::size_t m() const { return W.rows(); }

  bool contains(std::span<const Rational> x) const;
  bool contains_mixed_integer(std::span<const Rational> x) const;

  void add_row(std::span<const Rational> a, const Rational& b);
  /// a^T x = b as the pair a^T x <= b, -a^T x <= -b.
  void add_equality(std::span<const Rational> a, const Rational& b);
  /// lo_i <= x_i <= hi_i for i < lo.size().
  void add_box(std::span<const Rational> lo, std::span<const Rational> hi);
  /// Rows of tau^{-1}: W M x' <= w - W xbar, with p' integer variables.
  Polyhedron substitute(const AffineParam& tau) const;

  friend bool operator==(const Polyhedron&, const Polyhedron&) = default;
};

enum class LpStatus { Infeasible, Unbounded, Optimal };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  RatVector x;       ///< Optimal: minimizer; Unbounded: a feasible point
  Rational value;    ///< Optimal only
  RatVector ray;     ///< Unbounded: W ray <= 0, c^T ray < 0
  RatVector dual;    ///< Optimal: y >= 0, c + W^T y = 0, y_i (w_i - W_i x) = 0
  RatVector farkas;  ///< Infeasible: y >= 0, W^T y = 0, w^T y < 0
  std::size_t pivots = 0;
};

/// Exact minimum of c^T x over P (two-phase simplex with Bland's rule).
LpResult lp_min(std::span<const Rational> c, const Polyhedron& P);

/// A point of P, or nullopt if P is empty.
std::optional<RatVector> find_point(const Polyhedron& P);

/// Indices i with W_i x = w_i on all of P. Throws PreconditionError if P is empty.
std::vector<std::size_t> implicit_equalities(const Polyhedron& P);

bool is_fulldim_polyhedron(const Polyhedron& P);

struct PolyhedronReduction {
  AffineParam tau;
  Polyhedron reduced;  ///< full-dimensional, in R^{tau.nPrime} with tau.pPrime integer variables
  std::vector<std::size_t> source_rows;  ///< row of P each reduced row came from
};

/// nullopt certifies that P has no mixed-integer point; otherwise P = tau(P') with
/// the mixed-integer points in bijection.
std::optional<PolyhedronReduction> fulldim_reduce_polyhedron(const Polyhedron& P);

/// W r <= 0.
bool recession_ray_check(const Polyhedron& P, std::span<const Rational> r);

/// Worker cap read from MIQCP_THREADS (default 1).
std::size_t thread_cap();

}  // namespace micqp
