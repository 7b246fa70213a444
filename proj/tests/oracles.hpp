#pragma once

// Brute-force geometry oracles over small bounded sets, plus random instance builders.

#include <map>
#include <optional>
#include <random>
#include <set>

#include "micqp/cqs.hpp"
#include "support.hpp"

namespace micqp::testing {

/// All vertices of a bounded polyhedron: every n-subset of rows solved exactly.
inline std::vector<RatVector> polytope_vertices(const Polyhedron& P) {
  const std::size_t n = P.n(), m = P.m();
  std::set<RatVector> out;
  if (n == 0) return {RatVector{}};
  if (m < n) return {};
  std::vector<bool> sel(m, false);
  std::fill(sel.begin(), sel.begin() + static_cast<long>(n), true);
  do {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < m; ++i)
      if (sel[i]) rows.push_back(i);
    const RatMatrix a = P.W.select_rows(rows);
    if (rank(a) != n) continue;
    RatVector b;
    for (auto i : rows) b.push_back(P.w[i]);
    const auto x = solve(a, b);
    if (x && P.contains(*x)) out.insert(*x);
  } while (std::prev_permutation(sel.begin(), sel.end()));
  return {out.begin(), out.end()};
}

/// Minimum of q over P by stationary points of every face.
inline std::optional<Rational> face_qp_oracle(const QpObjective& obj, const Polyhedron& P) {
  const std::size_t n = P.n(), m = P.m();
  std::optional<Rational> best;
  for (unsigned long mask = 0; mask < (1ul << m); ++mask) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1ul) rows.push_back(i);
    const std::size_t k = rows.size();
    if (k > n + 2) continue;
    RatMatrix kkt(n + k, n + k);
    RatVector rhs(n + k);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) kkt(i, j) = 2 * obj.H(i, j);
      rhs[i] = -obj.h[i];
    }
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t j = 0; j < n; ++j) {
        kkt(n + a, j) = P.W(rows[a], j);
        kkt(j, n + a) = P.W(rows[a], j);
      }
      rhs[n + a] = P.w[rows[a]];
    }
    // Least-squares style: any solution of the (possibly singular) system is a candidate.
    const auto sol = solve(kkt, rhs);
    if (!sol) continue;
    const RatVector x(sol->begin(), sol->begin() + static_cast<long>(n));
    if (!P.contains(x)) continue;
    const Rational v = obj(x);
    if (!best || v < *best) best = v;
  }
  return best;
}

inline QpObjective random_psd_objective(std::mt19937& rng, std::size_t n, int range = 2) {
  const std::size_t k = rng() % (n + 1);
  const RatMatrix L = random_int_matrix(rng, k, n, -range, range);
  RatVector h(n);
  for (auto& v : h) v = Q(static_cast<long>(rng() % 9) - 4, 1 + static_cast<long>(rng() % 2));
  return {L.transpose() * L, h};
}

/// Integer points of Q inside [lo, hi]^n (pure-integer view).
inline std::set<RatVector> integer_points(const ConvexQuadraticSet& Q, long lo, long hi) {
  std::set<RatVector> out;
  for_each_lattice_point(Q.n(), lo, hi, [&](const RatVector& x) {
    if (Q.contains(x)) out.insert(x);
  });
  return out;
}

/// Integer bounds on each coordinate of a bounded polyhedron, by LP.
inline std::optional<std::pair<long, long>> coordinate_range(const Polyhedron& P) {
  long lo = 0, hi = 0;
  for (std::size_t i = 0; i < P.n(); ++i) {
    for (int s : {1, -1}) {
      const LpResult r = lp_min(scale(unit_vector(P.n(), i), s), P);
      if (r.status == LpStatus::Infeasible) return std::pair<long, long>{0, -1};
      if (r.status != LpStatus::Optimal) return std::nullopt;
      const Rational v = s * r.value;
      lo = std::min(lo, floor(v).get_si());
      hi = std::max(hi, ceil(v).get_si());
    }
  }
  return std::pair<long, long>{lo, hi};
}

}  // namespace micqp::testing
