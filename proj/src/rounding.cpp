#include "micqp/rounding.hpp"

namespace micqp {

std::size_t ceil_sqrt(std::size_t p) {
  if (p == 0) throw PreconditionError("ceil_sqrt: p must be positive");
  std::size_t lo = 1, hi = p;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (mid * mid >= p)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

RatMatrix Simplex::edge_matrix() const {
  const std::size_t p = dim();
  RatMatrix m(p, p);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < p; ++i) m(i, j) = vertices[j + 1][i] - vertices[0][i];
  return m;
}

Rational Simplex::volume() const {
  Rational v = abs(determinant(edge_matrix()));
  for (std::size_t k = 2; k <= dim(); ++k) v /= static_cast<unsigned long>(k);
  return v;
}

Simplex Simplex::from_vertices(std::vector<RatVector> vertices) {
  if (vertices.size() < 2) throw PreconditionError("Simplex: need at least two vertices");
  Simplex s;
  s.vertices = std::move(vertices);
  const std::size_t p = s.dim();
  for (const auto& v : s.vertices)
    if (v.size() != p) throw PreconditionError("Simplex: vertex dimension mismatch");
  const auto inv = inverse(s.edge_matrix());
  if (!inv) throw PreconditionError("Simplex: vertices are affinely dependent");

  // Barycentric rows: z = inv (y - v0); facet i >= 1 is z_i >= 0, facet 0 is sum z <= 1.
  const RatVector& v0 = s.vertices[0];
  RatVector sum(p);
  s.normals.resize(p + 1);
  s.offsets.resize(p + 1);
  for (std::size_t i = 0; i < p; ++i) {
    RatVector row(inv->row(i).begin(), inv->row(i).end());
    sum = add(sum, row);
    s.normals[i + 1] = scale(row, -1);
    s.offsets[i + 1] = -dot(row, v0);
  }
  s.normals[0] = sum;
  s.offsets[0] = dot(sum, v0) + 1;
  return s;
}

namespace {

RatVector project(std::span<const Rational> x, std::size_t p) {
  return RatVector(x.begin(), x.begin() + static_cast<long>(p));
}

RatVector lift(std::span<const Rational> c, std::size_t n) {
  RatVector out(n);
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i];
  return out;
}

// Coarse dyadic point past the cut with y in proj Q, else y itself. Rounds each coordinate
// toward the cut side so that normal^T y only moves away from the threshold.
RatVector coarse_vertex(const ConvexQuadraticSet& Q, std::span<const Rational> normal, int side,
                        RatVector y) {
  const std::size_t bits = bit_size(y);
  if (bits <= 64 * y.size()) return y;
  const QpObjective obj = Q.objective();
  for (mp_bitcnt_t k = 8; k * y.size() < bits; k *= 2) {
    const Integer den = Integer(1) << k;
    RatVector z(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) {
      const Rational scaled = y[j] * Rational(den);
      const bool up = sgn(normal[j]) * side > 0;
      z[j] = Rational(up ? ceil(scaled) : floor(scaled), den);
      z[j].canonicalize();
    }
    const QpResult r = qp_min_on_slice(obj, Q.P, z);
    if (r.status == QpStatus::Optimal && r.value <= Q.eta) return z;
  }
  return y;
}

void check_dims(const ConvexQuadraticSet& Q, std::size_t p) {
  if (p == 0 || p > Q.n()) throw PreconditionError("rounding: p must lie in 1..n");
}

}  // namespace

std::vector<RatVector> seed_simplex(const ConvexQuadraticSet& Q, std::size_t p) {
  check_dims(Q, p);
  const FulldimCertificate cert = classify_fulldim(Q);
  if (cert.tag != FulldimTag::FullDim)
    throw PreconditionError("seed_simplex: set is not full-dimensional");
  const Polyhedron& F = cert.polytope;
  const std::size_t n = Q.n();

  auto v0 = find_point(F);
  if (!v0) throw Error("seed_simplex: inner polytope is empty");
  std::vector<RatVector> pts{project(*v0, p)};
  for (std::size_t t = 0; t < p; ++t) {
    RatMatrix diffs(0, p);
    for (std::size_t i = 1; i < pts.size(); ++i) diffs.append_row(sub(pts[i], pts[0]));
    const RatMatrix ns = diffs.rows() == 0 ? RatMatrix::identity(p) : null_space(diffs);
    const RatVector c = lift(ns.column(0), n);
    const Rational base = dot(c, *v0);
    bool extended = false;
    for (int sign : {1, -1}) {
      const LpResult r = lp_min(scale(c, sign), F);
      if (r.status != LpStatus::Optimal) throw Error("seed_simplex: LP over inner polytope failed");
      if (dot(c, r.x) != base) {
        pts.push_back(project(r.x, p));
        extended = true;
        break;
      }
    }
    if (!extended) throw Error("seed_simplex: inner polytope is flat along a projected direction");
  }
  return pts;
}

GrowthTrace grow_simplex(const ConvexQuadraticSet& Q, std::size_t p, Simplex s0) {
  check_dims(Q, p);
  if (s0.dim() != p) throw PreconditionError("grow_simplex: simplex dimension mismatch");
  if (!projection_bounded(Q, p)) throw PreconditionError("grow_simplex: projection is unbounded");
  const std::size_t n = Q.n();
  GrowthTrace out;
  out.simplex = std::move(s0);
  out.volumes.push_back(out.simplex.volume());
  const Rational three_halves = make_rational(3, 2);

  for (;;) {
    const Simplex& s = out.simplex;
    bool expanded = false;
    for (std::size_t i = 0; i <= p && !expanded; ++i) {
      const RatVector c = lift(s.normals[i], n);
      const Rational gap = s.offsets[i] - dot(s.normals[i], s.vertices[i]);
      for (int side : {-1, 1}) {
        // side -1: c^T x <= d - 3/2 gap; side +1: c^T x >= d + 3/2 gap.
        ConvexQuadraticSet cut = Q;
        if (side < 0)
          cut.P.add_row(c, s.offsets[i] - three_halves * gap);
        else
          cut.P.add_row(scale(c, -1), -(s.offsets[i] + three_halves * gap));
        auto pt = deep_point(cut);
        if (!pt || Q.objective()(*pt) > Q.eta) continue;
        std::vector<RatVector> verts = s.vertices;
        verts[i] = coarse_vertex(Q, s.normals[i], side, project(*pt, p));
        Simplex next = Simplex::from_vertices(std::move(verts));
        const Rational vol = next.volume();
        if (vol < three_halves * out.volumes.back())
          throw Error("grow_simplex: expansion below the 3/2 volume factor");
        out.simplex = std::move(next);
        out.volumes.push_back(vol);
        out.facets.push_back(i);
        expanded = true;
        break;
      }
    }
    if (!expanded) return out;
  }
}

SandwichResult sandwich(const ConvexQuadraticSet& Q, std::size_t p) {
  check_dims(Q, p);
  const Simplex s0 = Simplex::from_vertices(seed_simplex(Q, p));
  SandwichResult out;
  out.growth = grow_simplex(Q, p, s0);
  const auto B = inverse(out.growth.simplex.edge_matrix());
  if (!B) throw Error("sandwich: grown simplex is degenerate");
  out.B = *B;
  const std::size_t k = ceil_sqrt(p);
  out.r = make_rational(1, static_cast<long>(p + k));
  out.R = make_rational(static_cast<long>(2 * k));
  const RatVector atilde(p, out.r);
  out.a = add(atilde, out.B * out.growth.simplex.vertices[0]);
  return out;
}

}  // namespace micqp
