#pragma once

// Random instance generators and brute-force oracles shared by the test suites.
// Nothing here calls into the implementation paths it is used to check.

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "micqp/linalg.hpp"

namespace micqp::testing {

inline Rational Q(long a, long b = 1) { return make_rational(a, b); }

inline RatVector V(std::initializer_list<Rational> xs) { return RatVector(xs); }

inline RatMatrix random_int_matrix(std::mt19937& rng, std::size_t rows, std::size_t cols,
                                   int lo, int hi) {
  std::uniform_int_distribution<int> dist(lo, hi);
  RatMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

/// Low-rank integer matrix: product of random factors with inner dimension k.
inline RatMatrix random_rank_matrix(std::mt19937& rng, std::size_t rows, std::size_t cols,
                                    std::size_t k, int range) {
  return random_int_matrix(rng, rows, k, -range, range) *
         random_int_matrix(rng, k, cols, -range, range);
}

/// Determinant by Leibniz expansion over all permutations.
inline Rational leibniz_det(const RatMatrix& m) {
  const std::size_t n = m.rows();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rational det = 0;
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inversions;
    Rational term = inversions % 2 ? -1 : 1;
    for (std::size_t i = 0; i < n; ++i) term *= m(i, perm[i]);
    det += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

/// Rank as the largest k with a nonzero k x k minor (exhaustive; tiny matrices only).
inline std::size_t minor_rank(const RatMatrix& m) {
  const std::size_t lim = std::min(m.rows(), m.cols());
  std::size_t best = 0;
  for (std::size_t k = 1; k <= lim; ++k) {
    std::vector<bool> rsel(m.rows(), false), csel(m.cols(), false);
    std::fill(rsel.begin(), rsel.begin() + static_cast<long>(k), true);
    bool found = false;
    do {
      std::fill(csel.begin(), csel.end(), false);
      std::fill(csel.begin(), csel.begin() + static_cast<long>(k), true);
      do {
        RatMatrix sub(k, k);
        std::size_t a = 0;
        for (std::size_t i = 0; i < m.rows(); ++i) {
          if (!rsel[i]) continue;
          std::size_t b = 0;
          for (std::size_t j = 0; j < m.cols(); ++j)
            if (csel[j]) sub(a, b++) = m(i, j);
          ++a;
        }
        if (sgn(leibniz_det(sub)) != 0) found = true;
      } while (!found && std::prev_permutation(csel.begin(), csel.end()));
    } while (!found && std::prev_permutation(rsel.begin(), rsel.end()));
    if (!found) break;
    best = k;
  }
  return best;
}

/// Calls f on every integer vector in [lo, hi]^dim.
inline void for_each_lattice_point(std::size_t dim, long lo, long hi,
                                   const std::function<void(const RatVector&)>& f) {
  RatVector y(dim, Rational(lo));
  if (dim == 0) {
    f(y);
    return;
  }
  for (;;) {
    f(y);
    std::size_t k = 0;
    while (k < dim && y[k] == hi) y[k++] = lo;
    if (k == dim) return;
    y[k] += 1;
  }
}

/// Whether A x = b has a rational solution, by comparing ranks of A and [A | b].
inline bool consistent_by_rank(const RatMatrix& a, const RatVector& b) {
  RatMatrix aug(a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    aug(i, a.cols()) = b[i];
  }
  return rank(aug) == rank(a);
}

}  // namespace micqp::testing
