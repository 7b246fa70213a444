#include "micqp/cqs.hpp"

#include <algorithm>
#include <set>

namespace micqp {

ConvexQuadraticSet::ConvexQuadraticSet(Polyhedron P_, RatMatrix H_, RatVector h_, Rational eta_)
    : P(std::move(P_)), H(std::move(H_)), h(std::move(h_)), eta(std::move(eta_)) {
  if (H.rows() != P.n() || H.cols() != P.n() || h.size() != P.n())
    throw Error("ConvexQuadraticSet: dimension mismatch");
  const PsdCheck c = check_psd(H);
  if (!c.psd) throw NotPsdError(c);
}

ConvexQuadraticSet ConvexQuadraticSet::from_polyhedron(Polyhedron P_) {
  const std::size_t n = P_.n();
  return {std::move(P_), RatMatrix(n, n), zeros(n), Rational(0)};
}

bool ConvexQuadraticSet::quadratic_is_zero() const { return H.is_zero() && is_zero(h); }

bool ConvexQuadraticSet::contains(std::span<const Rational> x) const {
  return P.contains(x) && objective()(x) <= eta;
}

bool ConvexQuadraticSet::contains_mixed_integer(std::span<const Rational> x) const {
  return P.contains_mixed_integer(x) && objective()(x) <= eta;
}

ConvexQuadraticSet ConvexQuadraticSet::substitute(const AffineParam& tau) const {
  const QpObjective o = objective().substitute(tau);
  return {P.substitute(tau), o.H, o.h, eta - objective()(tau.xbar)};
}

AffineSubspace stationary_affine_subspace(const QpObjective& obj) {
  return {2 * obj.H, scale(obj.h, -1)};
}

bool projection_bounded(const ConvexQuadraticSet& Q, std::size_t k) {
  const std::size_t n = Q.n();
  Polyhedron cone(Q.P.W, zeros(Q.P.m()), 0);
  for (std::size_t i = 0; i < n; ++i) cone.add_equality(Q.H.row(i), 0);
  cone.add_row(Q.h, 0);
  cone.add_box(RatVector(n, Rational(-1)), RatVector(n, Rational(1)));
  for (std::size_t i = 0; i < k; ++i) {
    for (int s : {1, -1}) {
      const LpResult r = lp_min(scale(unit_vector(n, i), s), cone);
      if (r.status != LpStatus::Optimal || sgn(r.value) != 0) return false;
    }
  }
  return true;
}

std::optional<RatVector> deep_point(const ConvexQuadraticSet& Q) {
  const QpObjective obj = Q.objective();
  QpResult r = qp_min(obj, Q.P);
  switch (r.status) {
    case QpStatus::Infeasible:
      return std::nullopt;
    case QpStatus::Optimal:
      return std::move(r.x);
    case QpStatus::Unbounded: {
      // Along the ray q drops by at least 1 per unit step.
      Rational lambda = obj(r.x) - Q.eta + 1;
      if (sgn(lambda) < 0) lambda = 0;
      return add(r.x, scale(r.ray, lambda));
    }
  }
  return std::nullopt;
}

TangentFace tangent_face(const ConvexQuadraticSet& Q) {
  if (!is_fulldim_polyhedron(Q.P)) throw PreconditionError("tangent_face: P is not full-dimensional");
  const QpObjective obj = Q.objective();
  const QpResult over_p = qp_min(obj, Q.P);
  if (over_p.status != QpStatus::Optimal || over_p.value != Q.eta)
    throw PreconditionError("tangent_face: minimum over P differs from eta");
  const QpResult free = qp_min(obj, Polyhedron::free_space(Q.n()));
  if (free.status == QpStatus::Optimal && free.value >= Q.eta)
    throw PreconditionError("tangent_face: unconstrained minimum is not below eta");

  TangentFace out;
  out.normal = obj.gradient(over_p.x);
  out.offset = dot(out.normal, over_p.x);
  Polyhedron probe = Q.P;
  probe.add_equality(out.normal, out.offset);
  for (auto i : implicit_equalities(probe))
    if (i < Q.P.m()) out.tight.push_back(i);
  out.face = Q.P;
  for (auto i : out.tight) out.face.add_row(scale(Q.P.W.row(i), -1), -Q.P.w[i]);
  return out;
}

Polyhedron inner_polytope(const ConvexQuadraticSet& Q) {
  const std::size_t n = Q.n();
  RatVector xbar;
  Rational delta = 1;
  if (Q.quadratic_is_zero()) {
    if (sgn(Q.eta) < 0) throw PreconditionError("inner_polytope: set is empty");
    auto pt = find_point(Q.P);
    if (!pt) throw PreconditionError("inner_polytope: P is empty");
    xbar = std::move(*pt);
  } else {
    if (!is_fulldim_polyhedron(Q.P))
      throw PreconditionError("inner_polytope: P is not full-dimensional");
    auto pt = deep_point(Q);
    const QpObjective obj = Q.objective();
    if (!pt || obj(*pt) >= Q.eta)
      throw PreconditionError("inner_polytope: minimum over P is not below eta");
    xbar = std::move(*pt);
    const Rational slack = Q.eta - obj(xbar);

    // Lipschitz constant 2 alpha beta n (n+2) on [-beta, beta]^n.
    const Integer alpha = Integer(1) << static_cast<mp_bitcnt_t>(bit_size(Q.H) + bit_size(Q.h));
    const Integer beta = (Integer(1) << static_cast<mp_bitcnt_t>(bit_size(xbar))) + 1;
    const Rational lipschitz = Rational(2 * alpha * beta * static_cast<unsigned long>(n * (n + 2)));
    const Rational lipschitz_delta = std::min(Rational(1), Rational(slack / lipschitz));

    // Direct bound on the unit cube: |q(xbar+u) - q(xbar)| <= (sum |H_ij| + |g|_1) |u|_inf.
    Rational direct = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) direct += abs(Q.H(i, j));
    for (const auto& g : obj.gradient(xbar)) direct += abs(g);
    const Rational direct_delta = std::min(Rational(1), Rational(slack / direct));
    delta = std::max(lipschitz_delta, direct_delta);
  }
  Polyhedron out = Q.P;
  RatVector lo(n), hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = xbar[i] - delta;
    hi[i] = xbar[i] + delta;
  }
  out.add_box(lo, hi);
  return out;
}

FulldimCertificate classify_fulldim(const ConvexQuadraticSet& Q) {
  FulldimCertificate out;
  if (Q.quadratic_is_zero()) {
    if (sgn(Q.eta) < 0 || !find_point(Q.P)) return out;
    if (is_fulldim_polyhedron(Q.P)) {
      out.tag = FulldimTag::FullDim;
      out.polytope = inner_polytope(Q);
    } else {
      out.tag = FulldimTag::LowDimPolyhedron;
      out.equalities = implicit_equalities(Q.P);
    }
    return out;
  }
  const QpObjective obj = Q.objective();
  const QpResult over_p = qp_min(obj, Q.P);
  if (over_p.status == QpStatus::Infeasible) return out;
  if (over_p.status == QpStatus::Optimal && over_p.value > Q.eta) return out;
  if (!is_fulldim_polyhedron(Q.P)) {
    out.tag = FulldimTag::LowDimPolyhedron;
    out.equalities = implicit_equalities(Q.P);
    return out;
  }
  if (over_p.status == QpStatus::Unbounded || over_p.value < Q.eta) {
    out.tag = FulldimTag::FullDim;
    out.polytope = inner_polytope(Q);
    return out;
  }
  const QpResult free = qp_min(obj, Polyhedron::free_space(Q.n()));
  if (free.status == QpStatus::Optimal && free.value == Q.eta) {
    out.tag = FulldimTag::LowDimAffine;
    out.subspace = stationary_affine_subspace(obj);
  } else {
    out.tag = FulldimTag::LowDimFace;
    out.face = tangent_face(Q);
  }
  return out;
}

namespace {

// Q pulled back through a polyhedral reduction of (a face of) its polyhedron.
ConvexQuadraticSet pull_back(const ConvexQuadraticSet& Q, const PolyhedronReduction& red) {
  const QpObjective o = Q.objective().substitute(red.tau);
  return {red.reduced, o.H, o.h, Q.eta - Q.objective()(red.tau.xbar)};
}

}  // namespace

std::optional<CqsReduction> fulldim_reduce_cqs(const ConvexQuadraticSet& Q) {
  const std::size_t m = Q.P.m();
  if (Q.quadratic_is_zero()) {
    if (sgn(Q.eta) < 0) return std::nullopt;
    auto red = fulldim_reduce_polyhedron(Q.P);
    if (!red) return std::nullopt;
    return CqsReduction{red->tau, pull_back(Q, *red), {}, 0};
  }
  if (Q.H.is_zero()) {
    // Linear constraint h^T x <= eta folded into the polyhedron.
    Polyhedron lin = Q.P;
    lin.add_row(Q.h, Q.eta);
    auto red = fulldim_reduce_polyhedron(lin);
    if (!red) return std::nullopt;
    return CqsReduction{red->tau, pull_back(Q, *red), {}, 0};
  }

  std::set<std::size_t> tight;
  for (std::size_t descents = 0;; ++descents) {
    Polyhedron face = Q.P;
    for (auto i : tight) face.add_row(scale(Q.P.W.row(i), -1), -Q.P.w[i]);
    auto red = fulldim_reduce_polyhedron(face);
    if (!red) return std::nullopt;
    ConvexQuadraticSet sub = pull_back(Q, *red);
    auto done = [&](ConvexQuadraticSet reduced, AffineParam tau) {
      return CqsReduction{std::move(tau), std::move(reduced),
                          std::vector<std::size_t>(tight.begin(), tight.end()), descents};
    };
    if (sub.quadratic_is_zero()) {
      if (sgn(sub.eta) < 0) return std::nullopt;
      return done(std::move(sub), red->tau);
    }

    const QpObjective obj = sub.objective();
    const QpResult over_face = qp_min(obj, sub.P);
    if (over_face.status == QpStatus::Infeasible)
      throw Error("fulldim_reduce_cqs: reduced face is empty");
    if (over_face.status == QpStatus::Unbounded || over_face.value < sub.eta)
      return done(std::move(sub), red->tau);
    if (over_face.value > sub.eta) return std::nullopt;

    const QpResult free = qp_min(obj, Polyhedron::free_space(sub.n()));
    if (free.status == QpStatus::Optimal && free.value == sub.eta) {
      // The set is the face cut by the stationary subspace.
      const AffineSubspace a = stationary_affine_subspace(obj);
      Polyhedron cut = sub.P;
      for (std::size_t i = 0; i < a.A.rows(); ++i) cut.add_equality(a.A.row(i), a.b[i]);
      auto red2 = fulldim_reduce_polyhedron(cut);
      if (!red2) return std::nullopt;
      return done(pull_back(sub, *red2), red->tau.compose(red2->tau));
    }

    const TangentFace tf = tangent_face(sub);
    std::size_t added = 0;
    for (auto k : tf.tight) {
      const std::size_t src = red->source_rows[k];
      if (src < m && tight.insert(src).second) ++added;
    }
    if (added == 0) throw Error("fulldim_reduce_cqs: face descent made no progress");
  }
}

}  // namespace micqp
