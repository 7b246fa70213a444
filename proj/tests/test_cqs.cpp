#include <doctest.h>

#include "micqp/cqs.hpp"
#include "oracles.hpp"

using namespace micqp;
using micqp::testing::Q;

namespace {

// {x1 >= 1, x1^2 <= 1} in R^2, optionally with -5 <= x2 <= 5.
ConvexQuadraticSet tangent_example(bool boxed, std::size_t p = 0) {
  Polyhedron P(RatMatrix{{-1, 0}}, {-1}, p);
  if (boxed) {
    P.add_row(RatVector{0, 1}, 5);
    P.add_row(RatVector{0, -1}, 5);
  }
  return {P, RatMatrix{{1, 0}, {0, 0}}, {0, 0}, 1};
}

ConvexQuadraticSet disk_in_box() {
  Polyhedron P(RatMatrix(0, 2), {}, 0);
  P.add_box(RatVector{-2, -2}, RatVector{2, 2});
  return {P, RatMatrix::identity(2), {0, 0}, 1};
}

// Points of a bounded Q on a grid of step 1/4 inside [-r, r]^n.
std::vector<RatVector> grid_points(const ConvexQuadraticSet& S, long r) {
  std::vector<RatVector> out;
  micqp::testing::for_each_lattice_point(S.n(), -4 * r, 4 * r, [&](const RatVector& y) {
    const RatVector x = scale(y, Q(1, 4));
    if (S.contains(x)) out.push_back(x);
  });
  return out;
}

}  // namespace

TEST_CASE("stationary_affine_subspace examples") {
  const auto a = stationary_affine_subspace({RatMatrix::identity(2), {0, 0}});
  CHECK(a.contains(RatVector{0, 0}));
  CHECK_FALSE(a.contains(RatVector{1, 0}));
  const auto line = stationary_affine_subspace({RatMatrix{{1, 0}, {0, 0}}, {0, 0}});
  CHECK(line.contains(RatVector{0, 7}));
  CHECK_FALSE(line.contains(RatVector{1, 0}));
  const auto pt = stationary_affine_subspace({RatMatrix::identity(2), {-2, 0}});
  CHECK(pt.contains(RatVector{1, 0}));
  CHECK_FALSE(pt.contains(RatVector{0, 0}));
}

TEST_CASE("substitution identity for the pulled-back quadratic") {
  std::mt19937 rng(5);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng() % 4, k = 1 + rng() % n;
    const QpObjective o = micqp::testing::random_psd_objective(rng, n);
    const Rational eta = Q(static_cast<long>(rng() % 21) - 5, 1 + static_cast<long>(rng() % 3));
    const ConvexQuadraticSet S(Polyhedron(RatMatrix(0, n), {}, 0), o.H, o.h, eta);
    AffineParam tau;
    tau.M = micqp::testing::random_int_matrix(rng, n, k, -2, 2);
    tau.xbar.resize(n);
    for (auto& v : tau.xbar) v = Q(static_cast<long>(rng() % 7) - 3, 1 + static_cast<long>(rng() % 2));
    tau.nPrime = k;
    const ConvexQuadraticSet sub = S.substitute(tau);
    for (int s = 0; s < 10; ++s) {
      RatVector xp(k);
      for (auto& v : xp) v = Q(static_cast<long>(rng() % 9) - 4, 1 + static_cast<long>(rng() % 3));
      const RatVector x = tau.apply(xp);
      CHECK(o(x) - eta == sub.objective()(xp) - sub.eta);
      CHECK(S.contains(x) == sub.contains(xp));
    }
  }
}

TEST_CASE("tangent_face examples") {
  const TangentFace f = tangent_face(tangent_example(false));
  CHECK(f.tight == std::vector<std::size_t>{0});
  CHECK(f.face.contains(RatVector{1, 9}));
  CHECK_FALSE(f.face.contains(RatVector{2, 0}));
  CHECK(f.normal == RatVector{2, 0});

  // (x1 - 1)^2 <= 1 with x1 >= 2.
  const ConvexQuadraticSet S2(Polyhedron(RatMatrix{{-1, 0}}, {-2}, 0), RatMatrix{{1, 0}, {0, 0}}, {-2, 0}, 0);
  const TangentFace f2 = tangent_face(S2);
  CHECK(f2.face.contains(RatVector{2, -3}));
  CHECK_FALSE(f2.face.contains(RatVector{Q(5, 2), 0}));

  CHECK_THROWS_AS(tangent_face(disk_in_box()), PreconditionError);
}

TEST_CASE("inner_polytope examples") {
  SUBCASE("interval") {
    Polyhedron P(RatMatrix(0, 1), {}, 0);
    P.add_box(RatVector{-1}, RatVector{1});
    const ConvexQuadraticSet S(P, RatMatrix{{1}}, {0}, 1);
    const Polyhedron F = inner_polytope(S);
    CHECK(is_fulldim_polyhedron(F));
    for (const auto& v : micqp::testing::polytope_vertices(F)) CHECK(S.contains(v));
  }
  SUBCASE("inactive quadratic on the unit square") {
    Polyhedron P(RatMatrix(0, 2), {}, 0);
    P.add_box(RatVector{0, 0}, RatVector{1, 1});
    const ConvexQuadraticSet S(P, RatMatrix::identity(2), {0, 0}, 10);
    const Polyhedron F = inner_polytope(S);
    CHECK(is_fulldim_polyhedron(F));
    const auto verts = micqp::testing::polytope_vertices(F);
    CHECK(verts.size() == 4);
    for (const auto& v : verts) CHECK(S.contains(v));
  }
  SUBCASE("minimum equal to eta is rejected") {
    CHECK_THROWS_AS(inner_polytope(tangent_example(true)), PreconditionError);
  }
}

TEST_CASE("classify_fulldim examples") {
  CHECK(classify_fulldim(disk_in_box()).tag == FulldimTag::FullDim);

  const ConvexQuadraticSet point(Polyhedron::free_space(2), RatMatrix::identity(2), {0, 0}, 0);
  const auto c = classify_fulldim(point);
  REQUIRE(c.tag == FulldimTag::LowDimAffine);
  CHECK(c.subspace.contains(RatVector{0, 0}));

  const auto f = classify_fulldim(tangent_example(false));
  REQUIRE(f.tag == FulldimTag::LowDimFace);
  CHECK(f.face.tight == std::vector<std::size_t>{0});

  const ConvexQuadraticSet empty(Polyhedron::free_space(1), RatMatrix{{1}}, {0}, -1);
  CHECK(classify_fulldim(empty).tag == FulldimTag::EmptySet);
}

TEST_CASE("classify_fulldim on random sets against independent checks") {
  std::mt19937 rng(17);
  int full = 0, low = 0;
  for (int t = 0; t < 120; ++t) {
    const std::size_t n = 1 + rng() % 2;
    const QpObjective o = micqp::testing::random_psd_objective(rng, n);
    Polyhedron P(RatMatrix(0, n), {}, 0);
    P.add_box(RatVector(n, Rational(-2)), RatVector(n, Rational(2)));
    bool flat = false;
    if (rng() % 3 == 0) {
      RatVector a(n);
      for (auto& v : a) v = static_cast<long>(rng() % 5) - 2;
      P.add_equality(a, static_cast<long>(rng() % 3) - 1);
      flat = !is_zero(a);
    }
    // Eta at, above or below the minimum over P.
    const auto mn = micqp::testing::face_qp_oracle(o, P);
    if (!mn) continue;
    const Rational eta = *mn + Q(static_cast<long>(rng() % 3) - 1, 2);
    const ConvexQuadraticSet S(P, o.H, o.h, eta);
    const FulldimCertificate c = classify_fulldim(S);

    // A zero quadratic leaves Q = P whenever eta >= 0.
    const bool zero_q = o.H.is_zero() && is_zero(o.h);
    const bool expect_full = !flat && (*mn < eta || (zero_q && *mn == eta));
    CHECK((c.tag == FulldimTag::FullDim) == expect_full);
    CHECK((c.tag == FulldimTag::EmptySet) == (*mn > eta));
    const auto pts = grid_points(S, 2);
    switch (c.tag) {
      case FulldimTag::FullDim:
        ++full;
        CHECK(is_fulldim_polyhedron(c.polytope));
        for (const auto& v : micqp::testing::polytope_vertices(c.polytope)) CHECK(S.contains(v));
        break;
      case FulldimTag::LowDimAffine:
        ++low;
        for (const auto& x : pts) CHECK(c.subspace.contains(x));
        break;
      case FulldimTag::LowDimFace:
        ++low;
        for (const auto& x : pts) CHECK(c.face.face.contains(x));
        break;
      case FulldimTag::LowDimPolyhedron:
        ++low;
        for (const auto& x : pts)
          for (auto i : c.equalities) CHECK(dot(P.W.row(i), x) == P.w[i]);
        break;
      case FulldimTag::EmptySet:
        CHECK(pts.empty());
        break;
    }
  }
  CHECK(full > 10);
  CHECK(low > 10);
}

TEST_CASE("fulldim_reduce_cqs examples") {
  SUBCASE("full-dimensional set is kept") {
    const ConvexQuadraticSet S = disk_in_box();
    const auto r = fulldim_reduce_cqs(S);
    REQUIRE(r);
    CHECK(r->tau.M == RatMatrix::identity(2));
    CHECK(r->tau.xbar == RatVector{0, 0});
    CHECK(r->reduced == S);
    CHECK(r->descents == 0);
  }
  SUBCASE("a single point") {
    const ConvexQuadraticSet S(Polyhedron::free_space(2, 1), RatMatrix::identity(2), {0, 0}, 0);
    const auto r = fulldim_reduce_cqs(S);
    REQUIRE(r);
    CHECK(r->tau.nPrime == 0);
    CHECK(r->tau.apply(RatVector{}) == RatVector{0, 0});
  }
  SUBCASE("one face descent") {
    const ConvexQuadraticSet S = tangent_example(true, 2);
    const auto r = fulldim_reduce_cqs(S);
    REQUIRE(r);
    CHECK(r->descents == 1);
    CHECK(r->tau.nPrime == 1);
    CHECK(r->tau.pPrime == 1);
    CHECK(classify_fulldim(r->reduced).tag == FulldimTag::FullDim);
    const auto orig = micqp::testing::integer_points(S, -6, 6);
    CHECK(orig.size() == 11);
    std::set<RatVector> mapped;
    micqp::testing::for_each_lattice_point(1, -20, 20, [&](const RatVector& y) {
      if (r->reduced.contains(y)) mapped.insert(r->tau.apply(y));
    });
    CHECK(mapped == orig);
  }
  SUBCASE("non-integral tangency is empty") {
    // x1 >= 1/2 and x1^2 <= 1/4 force x1 = 1/2.
    const ConvexQuadraticSet S(Polyhedron(RatMatrix{{-1}}, {Q(-1, 2)}, 1), RatMatrix{{1}}, {0}, Q(1, 4));
    CHECK_FALSE(fulldim_reduce_cqs(S));
  }
}

TEST_CASE("fulldim_reduce_cqs keeps integer points in bijection on degenerate sets") {
  std::mt19937 rng(41);
  int reduced = 0;
  for (int t = 0; t < 80; ++t) {
    const std::size_t n = 2 + rng() % 2;
    Polyhedron P(RatMatrix(0, n), {}, n);
    P.add_box(RatVector(n, Rational(-3)), RatVector(n, Rational(3)));
    QpObjective o = micqp::testing::random_psd_objective(rng, n);
    // Tight quadratic: eta equal to the minimum over P, often forcing a low-dimensional set.
    const auto mn = micqp::testing::face_qp_oracle(o, P);
    REQUIRE(mn);
    const ConvexQuadraticSet S(P, o.H, o.h, rng() % 2 ? *mn : *mn + 1);
    const auto orig = micqp::testing::integer_points(S, -3, 3);
    const auto r = fulldim_reduce_cqs(S);
    if (!r) {
      CHECK(orig.empty());
      continue;
    }
    ++reduced;
    CHECK(r->reduced.p() == r->tau.pPrime);
    if (r->tau.nPrime > 0) CHECK(classify_fulldim(r->reduced).tag == FulldimTag::FullDim);
    for (const auto& x : orig) {
      const RatVector xp = r->tau.preimage(x);
      CHECK(r->tau.apply(xp) == x);
      CHECK(r->reduced.contains_mixed_integer(xp));
    }
    const auto range = micqp::testing::coordinate_range(r->reduced.P);
    if (!range) continue;
    std::set<RatVector> mapped;
    micqp::testing::for_each_lattice_point(r->tau.nPrime, range->first, range->second,
                                           [&](const RatVector& y) {
                                             if (r->reduced.contains(y)) mapped.insert(r->tau.apply(y));
                                           });
    CHECK(mapped == orig);
  }
  CHECK(reduced > 40);
}

TEST_CASE("projection_bounded and deep_point") {
  const ConvexQuadraticSet half(Polyhedron(RatMatrix{{-1, 0}}, {0}, 1), RatMatrix(2, 2), {0, 1}, 0);
  CHECK_FALSE(projection_bounded(half, 1));
  const auto pt = deep_point(half);
  REQUIRE(pt);
  CHECK(half.contains(*pt));
  CHECK(projection_bounded(disk_in_box(), 2));
  // Bounded by the quadratic alone.
  const ConvexQuadraticSet bowl(Polyhedron::free_space(2, 2), RatMatrix::identity(2), {0, 0}, 4);
  CHECK(projection_bounded(bowl, 2));
  const ConvexQuadraticSet trough(Polyhedron::free_space(2, 2), RatMatrix{{1, 0}, {0, 0}}, {0, 0}, 4);
  CHECK(projection_bounded(trough, 1));
  CHECK_FALSE(projection_bounded(trough, 2));
}
