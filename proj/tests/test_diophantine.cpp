#include <doctest.h>

#include <set>

#include "micqp/diophantine.hpp"
#include "support.hpp"

using namespace micqp;
using micqp::testing::Q;

namespace {

void check_ginv_identities(const RatMatrix& a, const IntegerReflexiveGinv& g) {
  CHECK(a * g.Asharp * a == a);
  CHECK(g.Asharp * a * g.Asharp == g.Asharp);
  CHECK((g.Asharp * a).is_integer());
  CHECK(g.U.valid());
  RatMatrix d(a.cols(), a.cols());
  for (std::size_t i = 0; i < g.r; ++i) d(i, i) = 1;
  CHECK(g.Asharp * a == g.U.U * d * g.U.Uinv);
  CHECK(g.r == rank(a));
}

}  // namespace

TEST_CASE("integer reflexive ginv examples") {
  {
    const auto g = integer_reflexive_ginv(RatMatrix::identity(3));
    CHECK(g.Asharp == RatMatrix::identity(3));
    CHECK(g.U.U == RatMatrix::identity(3));
    CHECK(g.r == 3);
  }
  {
    const RatMatrix a{{1, 2}};
    const auto g = integer_reflexive_ginv(a);
    CHECK(g.Asharp == RatMatrix{{1}, {0}});
    CHECK(g.Asharp * a == RatMatrix{{1, 2}, {0, 0}});
    check_ginv_identities(a, g);
  }
  {
    const RatMatrix a{{2, 0}, {0, 0}};
    const auto g = integer_reflexive_ginv(a);
    CHECK(g.Asharp == RatMatrix{{Q(1, 2), 0}, {0, 0}});
    CHECK(g.Asharp * a == RatMatrix{{1, 0}, {0, 0}});
    check_ginv_identities(a, g);
  }
  {
    const RatMatrix a(2, 3);
    const auto g = integer_reflexive_ginv(a);
    CHECK(g.Asharp == RatMatrix(3, 2));
    check_ginv_identities(a, g);
  }
}

TEST_CASE("integer reflexive ginv on random rational matrices") {
  std::mt19937 rng(5);
  for (int t = 0; t < 150; ++t) {
    const std::size_t m = 1 + rng() % 5, n = 1 + rng() % 5;
    RatMatrix a = micqp::testing::random_rank_matrix(rng, m, n, 1 + rng() % 4, 3);
    a = Rational(1, 1 + static_cast<long>(rng() % 4)) * a;
    check_ginv_identities(a, integer_reflexive_ginv(a));
  }
}

TEST_CASE("parametrize examples") {
  SUBCASE("unconstrained") {
    const auto t = parametrize_mixed_integer_solutions(RatMatrix(1, 2), std::vector<Rational>{0}, 1);
    REQUIRE(t);
    CHECK(t->xbar == RatVector{0, 0});
    CHECK(t->M == RatMatrix::identity(2));
    CHECK(t->pPrime == 1);
    CHECK(t->nPrime == 2);
  }
  SUBCASE("fractional forced integer") {
    CHECK_FALSE(parametrize_mixed_integer_solutions(RatMatrix{{1, 0}}, std::vector<Rational>{Q(1, 2)}, 1));
  }
  SUBCASE("2y + z = 1") {
    const RatMatrix W{{2, 1}};
    const RatVector w{1};
    const auto t = parametrize_mixed_integer_solutions(W, w, 1);
    REQUIRE(t);
    CHECK(t->xbar == RatVector{0, 1});
    CHECK(t->M == RatMatrix{{1}, {-2}});
    CHECK(t->pPrime == 1);
    CHECK(t->nPrime == 1);
    // Oracle: for y in -3..3 the unique z = 1 - 2y; tau must hit it with an integer x'.
    for (long y = -3; y <= 3; ++y) {
      const RatVector x{Rational(y), Rational(1 - 2 * y)};
      const RatVector xp = t->preimage(x);
      CHECK(is_integer(std::span<const Rational>(xp)));
      CHECK(t->apply(xp) == x);
    }
  }
  SUBCASE("p = 0 is a plain linear solve") {
    const auto t = parametrize_mixed_integer_solutions(RatMatrix{{1, 1}}, std::vector<Rational>{Q(1, 3)}, 0);
    REQUIRE(t);
    CHECK(t->pPrime == 0);
    CHECK(t->nPrime == 1);
    CHECK(dot(RatVector{1, 1}, t->apply(RatVector{Q(5, 7)})) == Q(1, 3));
    CHECK_FALSE(parametrize_mixed_integer_solutions(RatMatrix{{1, 1}, {2, 2}}, std::vector<Rational>{1, 3}, 0));
  }
}

TEST_CASE("parametrize: formula for (p', n') and solution membership") {
  std::mt19937 rng(9);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng() % 5, m = 1 + rng() % 4, p = rng() % (n + 1);
    const RatMatrix W = micqp::testing::random_rank_matrix(rng, m, n, 1 + rng() % 3, 2);
    // Right-hand side from a mixed-integer point so the system is usually solvable.
    RatVector x0(n);
    for (std::size_t i = 0; i < n; ++i)
      x0[i] = i < p ? Rational(static_cast<long>(rng() % 5) - 2) : Q(static_cast<long>(rng() % 7) - 3, 2);
    RatVector w = W * x0;
    if (t % 5 == 0) w[0] += Q(1, 3);
    const auto tau = parametrize_mixed_integer_solutions(W, w, p);
    if (t % 5 != 0) REQUIRE(tau);
    if (!tau) continue;
    const std::size_t rw = rank(W);
    const std::size_t rb = rank(W.block(0, p, m, n - p));
    CHECK(tau->nPrime == n - rw);
    CHECK(tau->pPrime == p - rw + rb);
    CHECK(rank(tau->M) == tau->nPrime);
    for (int s = 0; s < 5; ++s) {
      RatVector xp(tau->nPrime);
      for (std::size_t i = 0; i < xp.size(); ++i)
        xp[i] = i < tau->pPrime ? Rational(static_cast<long>(rng() % 9) - 4)
                                : Q(static_cast<long>(rng() % 9) - 4, 3);
      const RatVector x = tau->apply(xp);
      CHECK(W * x == w);
      CHECK(is_integer(std::span<const Rational>(x).first(p)));
    }
    // The seeded point has an integral preimage.
    if (W * x0 != w) continue;
    const RatVector xp0 = tau->preimage(x0);
    CHECK(tau->apply(xp0) == x0);
    CHECK(is_integer(std::span<const Rational>(xp0).first(tau->pPrime)));
  }
}

TEST_CASE("parametrize: integer-supported valid equality forces p' <= p - 1") {
  std::mt19937 rng(21);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng() % 4, p = 1 + rng() % (n - 1);
    RatMatrix W = micqp::testing::random_int_matrix(rng, 2, n, -3, 3);
    // Make the combination W_0 + W_1 vanish on the continuous block.
    for (std::size_t j = p; j < n; ++j) W(1, j) = -W(0, j);
    RatVector d(n);
    for (std::size_t j = 0; j < p; ++j) d[j] = W(0, j) + W(1, j);
    if (is_zero(std::span<const Rational>(d))) continue;
    RatVector x0(n);
    for (std::size_t i = 0; i < n; ++i) x0[i] = static_cast<long>(rng() % 3);
    const auto tau = parametrize_mixed_integer_solutions(W, W * x0, p);
    REQUIRE(tau);
    CHECK(tau->pPrime + 1 <= p);
  }
}

TEST_CASE("compose and preimage of affine maps") {
  const AffineParam outer{{1, 2}, RatMatrix{{1}, {-2}}, 1, 1};
  const AffineParam inner{{3}, RatMatrix(1, 0), 0, 0};
  const AffineParam c = outer.compose(inner);
  CHECK(c.xbar == RatVector{4, -4});
  CHECK(c.nPrime == 0);
  CHECK(outer.preimage(RatVector{4, -4}) == RatVector{3});
}
