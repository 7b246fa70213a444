#include "micqp/solver.hpp"

#include <algorithm>

namespace micqp {

Polyhedron MicqpInstance::constrained() const {
  Polyhedron out = P;
  if (box) out.add_box(box->lo, box->hi);
  return out;
}

Integer magnitude_bound(std::size_t s, unsigned cls) {
  if (s == 0) throw PreconditionError("magnitude_bound: s must be positive");
  const std::size_t exponent = (std::size_t{1} << (cls + 1)) * s * s;
  Integer out = 1;
  out <<= static_cast<mp_bitcnt_t>(exponent);
  return out;
}

namespace {

Integer lcm_of_denominators(std::span<const Rational> xs) {
  Integer l = 1;
  for (const auto& x : xs) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  return l;
}

Integer ceil_isqrt(const Integer& v) {
  Integer s = sqrt(v);
  if (s * s < v) s += 1;
  return s;
}

std::size_t scaled_row_size(RatVector row) {
  const Integer l = lcm_of_denominators(row);
  std::size_t s = 0;
  for (auto& x : row) s += bit_size(Rational(x * l));
  return s;
}

}  // namespace

std::size_t scaled_size(const ConvexQuadraticSet& Q) {
  std::size_t s = 0;
  for (std::size_t i = 0; i < Q.P.m(); ++i) {
    RatVector row(Q.P.W.row(i).begin(), Q.P.W.row(i).end());
    row.push_back(Q.P.w[i]);
    s += scaled_row_size(std::move(row));
  }
  RatVector quad;
  for (std::size_t i = 0; i < Q.n(); ++i)
    for (std::size_t j = 0; j < Q.n(); ++j) quad.push_back(Q.H(i, j));
  quad.insert(quad.end(), Q.h.begin(), Q.h.end());
  quad.push_back(Q.eta);
  s += scaled_row_size(std::move(quad));
  return std::max<std::size_t>(s, 1);
}

namespace {

// floor(4 ceil(sqrt p)^3 p 2^{p(p-1)/4}) + 1, via the integer square root of its square.
std::size_t band_limit(std::size_t p) {
  const Integer k = static_cast<unsigned long>(ceil_sqrt(p));
  Integer sq = 16 * k * k * k * k * k * k * static_cast<unsigned long>(p * p);
  sq <<= static_cast<mp_bitcnt_t>(p * (p - 1) / 2);
  const Integer root = sqrt(sq);
  return root.get_ui() + 1;
}

// Rational U >= sqrt(v), exact when v is a perfect square.
Rational sqrt_upper(const Rational& v) {
  if (mpz_perfect_square_p(v.get_num_mpz_t()) && mpz_perfect_square_p(v.get_den_mpz_t())) {
    const Integer num = sqrt(Integer(v.get_num()));
    const Integer den = sqrt(Integer(v.get_den()));
    return Rational(num, den);
  }
  const Integer K = Integer(1) << 32;
  const Integer scaled = floor(v * Rational(K * K));
  Rational out(Integer(sqrt(scaled) + 1), K);
  out.canonicalize();
  return out;
}

ConvexQuadraticSet pull_back(const ConvexQuadraticSet& Q, const PolyhedronReduction& red) {
  const QpObjective o = Q.objective().substitute(red.tau);
  return {red.reduced, o.H, o.h, Q.eta - Q.objective()(red.tau.xbar)};
}

TraceEvent event(TraceEvent::Kind kind, const ConvexQuadraticSet& Q) {
  TraceEvent ev;
  ev.kind = kind;
  ev.n = Q.n();
  ev.p = Q.p();
  return ev;
}

void record(FeasibilityTrace* trace, TraceEvent ev) {
  if (!trace) return;
  trace->max_depth = std::max(trace->max_depth, ev.depth);
  trace->events.push_back(std::move(ev));
}

std::optional<RatVector> point_in(const ConvexQuadraticSet& Q) {
  auto pt = deep_point(Q);
  if (!pt || !Q.contains(*pt)) return std::nullopt;
  return pt;
}

std::optional<RatVector> search(const ConvexQuadraticSet& Q, std::size_t depth,
                                FeasibilityTrace* trace) {
  TraceEvent ev = event(TraceEvent::Kind::Empty, Q);
  ev.depth = depth;
  const auto red = fulldim_reduce_cqs(Q);
  if (!red) {
    record(trace, ev);
    return std::nullopt;
  }
  ev.descents = red->descents;
  const ConvexQuadraticSet& sub = red->reduced;
  const std::size_t p = sub.p();

  if (p == 0) {
    auto pt = point_in(sub);
    ev.kind = pt ? TraceEvent::Kind::Continuous : TraceEvent::Kind::Empty;
    record(trace, ev);
    if (!pt) return std::nullopt;
    return red->tau.apply(*pt);
  }

  const SandwichResult sw = sandwich(sub, p);
  ev.expansions = sw.growth.facets.size();
  const FlatnessOutcome fo = flatness(sw.a, sw.r, sw.B);

  if (fo.kind == FlatnessKind::LatticePoint) {
    ev.kind = TraceEvent::Kind::LatticePoint;
    record(trace, ev);
    if (!is_integer(std::span<const Rational>(fo.mu))) throw Error("feasibility: lattice point not integral");
    ConvexQuadraticSet slice = sub;
    for (std::size_t i = 0; i < p; ++i) slice.P.add_equality(unit_vector(sub.n(), i), fo.mu[i]);
    auto pt = point_in(slice);
    if (!pt) throw Error("feasibility: lattice point does not lift to the set");
    return red->tau.apply(*pt);
  }

  // Every integer point of proj_p lies on c^T y = gamma with gamma in the band.
  const Rational U = sqrt_upper(squared_norm(fo.d));
  const Rational center = dot(fo.d, sw.a);
  ev.kind = TraceEvent::Kind::Branch;
  ev.band_lo = ceil(center - sw.R * U);
  ev.band_hi = floor(center + sw.R * U);
  const Integer count = ev.band_hi < ev.band_lo ? Integer(0) : Integer(ev.band_hi - ev.band_lo + 1);
  ev.band_count = count.get_ui();
  ev.band_limit = band_limit(p);
  if (ev.band_count > ev.band_limit) throw Error("feasibility: hyperplane band exceeds the width bound");
  record(trace, ev);

  RatVector c(sub.n());
  for (std::size_t i = 0; i < p; ++i) c[i] = fo.c[i];
  for (Integer gamma = ev.band_lo; gamma <= ev.band_hi; ++gamma) {
    Polyhedron slice = sub.P;
    slice.add_equality(c, Rational(gamma));
    const auto sred = fulldim_reduce_polyhedron(slice);
    if (!sred) continue;
    if (sred->tau.pPrime + 1 > p) throw Error("feasibility: hyperplane slice kept all integer variables");
    auto res = search(pull_back(sub, *sred), depth + 1, trace);
    if (res) return red->tau.apply(sred->tau.apply(*res));
  }
  return std::nullopt;
}

}  // namespace

std::optional<RatVector> feasibility(const ConvexQuadraticSet& Q, FeasibilityTrace* trace) {
  if (!point_in(Q)) {
    record(trace, event(TraceEvent::Kind::Empty, Q));
    return std::nullopt;
  }
  if (Q.p() == 0 || projection_bounded(Q, Q.p())) return search(Q, 0, trace);

  const Integer bound = magnitude_bound(scaled_size(Q), 4);
  if (trace)
    trace->warnings.push_back("projection onto the integer variables is unbounded and no box was declared; "
                              "growing a box up to 2^" +
                              std::to_string(mpz_sizeinbase(bound.get_mpz_t(), 2) - 1) +
                              ", which can be very slow");
  for (Integer radius = 1;;) {
    ConvexQuadraticSet boxed = Q;
    boxed.P.add_box(RatVector(Q.p(), Rational(-radius)), RatVector(Q.p(), Rational(radius)));
    TraceEvent ev = event(TraceEvent::Kind::Radius, Q);
    ev.radius = radius;
    record(trace, ev);
    if (auto res = search(boxed, 0, trace)) return res;
    if (radius == bound) return std::nullopt;
    radius = radius < 2 ? Integer(2) : Integer(radius * radius);
    if (radius > bound) radius = bound;
  }
}

namespace {

std::optional<RatVector> descent_ray(const QpObjective& obj, const Polyhedron& P) {
  Polyhedron cone(P.W, zeros(P.m()), 0);
  for (std::size_t i = 0; i < P.n(); ++i) cone.add_equality(obj.H.row(i), 0);
  cone.add_row(obj.h, -1);
  return find_point(cone);
}

// Bound on the denominator of the optimal value of any integer slice: the value is
// (h^T x - lambda^T w) / 2 at a basic solution of the integer-scaled KKT system.
Integer value_denominator_bound(const QpObjective& obj, const Polyhedron& P) {
  const std::size_t n = P.n(), m = P.m();
  RatVector all;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) all.push_back(2 * obj.H(i, j));
  all.insert(all.end(), obj.h.begin(), obj.h.end());
  for (std::size_t i = 0; i < m; ++i)
    for (const auto& x : P.W.row(i)) all.push_back(x);
  const Integer sigma = lcm_of_denominators(all);

  Integer delta = 1;
  for (std::size_t i = 0; i < n; ++i) {
    Rational sq = 0;
    for (std::size_t j = 0; j < n; ++j) sq += 4 * obj.H(i, j) * obj.H(i, j);
    for (std::size_t j = 0; j < m; ++j) sq += P.W(j, i) * P.W(j, i);
    const Integer norm = ceil_isqrt(Integer(sq * Rational(sigma * sigma)));
    delta *= std::max(Integer(1), norm);
  }
  for (std::size_t j = 0; j < m; ++j) {
    RatVector row(P.W.row(j).begin(), P.W.row(j).end());
    row.push_back(P.w[j]);
    const Integer s = lcm_of_denominators(row);
    const Integer norm = ceil_isqrt(Integer(squared_norm(P.W.row(j)) * Rational(s * s)));
    delta *= std::max(Integer(1), norm);
  }
  RatVector rhs = obj.h;
  rhs.insert(rhs.end(), P.w.begin(), P.w.end());
  return 2 * delta * lcm_of_denominators(rhs);
}

RatVector integer_part(std::span<const Rational> x, std::size_t p) {
  return RatVector(x.begin(), x.begin() + static_cast<long>(p));
}

}  // namespace

BoundednessResult boundedness(const MicqpInstance& inst, FeasibilityTrace* trace) {
  BoundednessResult out;
  const Polyhedron pc = inst.constrained();
  auto x0 = feasibility(ConvexQuadraticSet::from_polyhedron(pc), trace);
  if (!x0) return out;
  out.point = std::move(*x0);
  if (auto ray = descent_ray(inst.obj, pc)) {
    out.status = SolveStatus::Unbounded;
    out.ray = std::move(*ray);
  } else {
    out.status = SolveStatus::Optimal;
  }
  return out;
}

SolveResult optimize(const MicqpInstance& inst, FeasibilityTrace* trace) {
  SolveResult out;
  const BoundednessResult b = boundedness(inst, trace);
  out.feasibility_calls = 1;
  if (b.status != SolveStatus::Optimal) {
    out.status = b.status;
    out.x = b.point;
    out.ray = b.ray;
    return out;
  }
  const Polyhedron pc = inst.constrained();
  const std::size_t p = inst.p();
  const QpResult relax = qp_min(inst.obj, pc);
  if (relax.status != QpStatus::Optimal) throw Error("optimize: relaxation is not bounded");

  RatVector best_y = integer_part(b.point, p);
  QpResult best = qp_min_on_slice(inst.obj, pc, best_y);
  if (best.status != QpStatus::Optimal) throw Error("optimize: slice of a feasible point is not solvable");
  Rational upper = best.value;
  Rational lower = relax.value - 1;

  out.denominator_bound = value_denominator_bound(inst.obj, pc);
  const Rational d2(out.denominator_bound * out.denominator_bound);
  const Rational stop = 1 / (2 * d2);
  const Rational eps = 1 / (4 * d2);

  // True iff some mixed-integer point has value <= eta; improves the incumbent.
  auto probe = [&](const Rational& eta) {
    ++out.feasibility_calls;
    auto x = feasibility(ConvexQuadraticSet(pc, inst.obj.H, inst.obj.h, eta), trace);
    if (!x) return false;
    RatVector y = integer_part(*x, p);
    QpResult s = qp_min_on_slice(inst.obj, pc, y);
    if (s.status != QpStatus::Optimal) throw Error("optimize: slice of a feasible point is not solvable");
    if (s.value < upper || (s.value == upper && y < best_y)) {
      upper = s.value;
      best_y = std::move(y);
      best = std::move(s);
    }
    return true;
  };

  while (upper - lower >= stop) {
    const Rational below = upper - eps;
    if (!probe(below)) {
      lower = below;
      break;
    }
    if (upper - lower < stop) break;
    const Rational mid = (lower + upper) / 2;
    if (!probe(mid)) lower = mid;
  }
  out.status = SolveStatus::Optimal;
  out.x = std::move(best.x);
  out.value = upper;
  out.lower = lower;
  return out;
}

SolveResult oracle_optimize(const MicqpInstance& inst) {
  const std::size_t p = inst.p();
  if (!inst.box || inst.box->lo.size() < p)
    throw PreconditionError("oracle_optimize: requires a box on every integer variable");
  const Polyhedron pc = inst.constrained();
  SolveResult out;

  std::vector<Integer> lo(p), hi(p);
  for (std::size_t i = 0; i < p; ++i) {
    lo[i] = ceil(inst.box->lo[i]);
    hi[i] = floor(inst.box->hi[i]);
    if (lo[i] > hi[i]) return out;
  }
  std::vector<Integer> y = lo;
  bool any = false;
  RatVector first_point;
  QpResult best;
  for (;;) {
    const RatVector fixed(y.begin(), y.end());
    QpResult r = qp_min_on_slice(inst.obj, pc, fixed);
    if (r.status != QpStatus::Infeasible) {
      if (!any) first_point = r.x;
      if (r.status == QpStatus::Optimal && (!any || best.status != QpStatus::Optimal || r.value < best.value))
        best = std::move(r);
      any = true;
    }
    // Odometer in lexicographic order, last coordinate fastest.
    std::size_t k = p;
    while (k > 0 && y[k - 1] == hi[k - 1]) {
      y[k - 1] = lo[k - 1];
      --k;
    }
    if (k == 0) break;
    ++y[k - 1];
  }
  ++out.feasibility_calls;
  if (!any) return out;
  if (auto ray = descent_ray(inst.obj, pc)) {
    out.status = SolveStatus::Unbounded;
    out.x = std::move(first_point);
    out.ray = std::move(*ray);
    return out;
  }
  out.status = SolveStatus::Optimal;
  out.x = std::move(best.x);
  out.value = best.value;
  return out;
}

}  // namespace micqp
