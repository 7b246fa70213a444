#pragma once

// Mixed integer convex quadratic programming: min x^T H x + h^T x over
// {W x <= w} with the first p variables integral.

#include <optional>
#include <string>
#include <vector>

#include "micqp/cqs.hpp"
#include "micqp/lattice.hpp"
#include "micqp/rounding.hpp"

namespace micqp {

/// lo_i <= x_i <= hi_i on the first lo.size() variables.
struct Box {
  RatVector lo;
  RatVector hi;
  friend bool operator==(const Box&, const Box&) = default;
};

struct MicqpInstance {
  QpObjective obj;
  Polyhedron P;  ///< carries p
  std::optional<Box> box;

  std::size_t n() const { return P.n(); }
  std::size_t p() const { return P.p; }
  /// P with the box rows appended.
  Polyhedron constrained() const;
  friend bool operator==(const MicqpInstance&, const MicqpInstance&) = default;
};

/// 2^(2^(cls+1) s^2).
Integer magnitude_bound(std::size_t s, unsigned cls);

/// Encoding length of the system after scaling each row to integers.
std::size_t scaled_size(const ConvexQuadraticSet& Q);

struct TraceEvent {
  enum class Kind { Empty, Continuous, LatticePoint, Branch, Radius };
  Kind kind = Kind::Empty;
  std::size_t depth = 0;
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t descents = 0;     ///< face descents in the full-dimensional reduction
  std::size_t expansions = 0;   ///< simplex expansions in the sandwich step
  Integer band_lo, band_hi;     ///< Branch: gamma range scanned
  std::size_t band_count = 0;   ///< Branch: number of gamma values in the band
  std::size_t band_limit = 0;   ///< Branch: floor(4 ceil(sqrt p)^3 p 2^{p(p-1)/4}) + 1
  Integer radius;               ///< Radius: box radius of this round
};

struct FeasibilityTrace {
  std::vector<TraceEvent> events;
  std::vector<std::string> warnings;
  std::size_t max_depth = 0;
};

/// A point of Q with integral first p coordinates, or nullopt if none exists.
/// Without a declared box and with an unbounded projection, box radii grow up to the
/// magnitude bound (a warning is recorded).
std::optional<RatVector> feasibility(const ConvexQuadraticSet& Q, FeasibilityTrace* trace = nullptr);

enum class SolveStatus { Infeasible, Unbounded, Optimal };

struct BoundednessResult {
  SolveStatus status = SolveStatus::Infeasible;  ///< Optimal stands for bounded
  RatVector point;
  RatVector ray;
};

BoundednessResult boundedness(const MicqpInstance& inst, FeasibilityTrace* trace = nullptr);

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  RatVector x;      ///< Optimal: minimizer; Unbounded: feasible point
  Rational value;   ///< Optimal
  RatVector ray;    ///< Unbounded
  Rational lower;   ///< Optimal: final strict lower bound of the bracket
  Integer denominator_bound;
  std::size_t feasibility_calls = 0;
};

SolveResult optimize(const MicqpInstance& inst, FeasibilityTrace* trace = nullptr);

/// Enumerates the integer assignments in the box; requires a box on all integer variables.
SolveResult oracle_optimize(const MicqpInstance& inst);

}  // namespace micqp
