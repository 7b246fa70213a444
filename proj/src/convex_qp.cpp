#include "micqp/convex_qp.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace micqp {

Rational QpObjective::operator()(std::span<const Rational> x) const {
  return quad_form(H, x) + dot(h, x);
}

RatVector QpObjective::gradient(std::span<const Rational> x) const {
  return add(scale(H * x, 2), h);
}

QpObjective QpObjective::substitute(const AffineParam& tau) const {
  const RatMatrix mt = tau.M.transpose();
  return {mt * H * tau.M, add(scale(mt * (H * tau.xbar), 2), mt * h)};
}

PsdCheck check_psd(const RatMatrix& H) {
  if (!H.is_symmetric()) throw Error("check_psd: matrix not symmetric");
  const std::size_t n = H.rows();
  RatMatrix a = H;
  std::vector<bool> done(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t piv = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      if (sgn(a(i, i)) < 0) return {false, i, a(i, i)};
      if (piv == n && sgn(a(i, i)) > 0) piv = i;
    }
    if (piv == n) {
      // All remaining pivots are zero: PSD iff the remaining block vanishes.
      for (std::size_t i = 0; i < n; ++i) {
        if (done[i]) continue;
        for (std::size_t j = 0; j < n; ++j)
          if (!done[j] && sgn(a(i, j)) != 0) return {false, i, a(i, i)};
      }
      return {};
    }
    done[piv] = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i] || sgn(a(i, piv)) == 0) continue;
      const Rational f = a(i, piv) / a(piv, piv);
      for (std::size_t j = 0; j < n; ++j)
        if (!done[j] && sgn(a(piv, j)) != 0) a(i, j) -= f * a(piv, j);
    }
  }
  return {};
}

NotPsdError::NotPsdError(const PsdCheck& c)
    : Error("H is not positive semidefinite: LDL^T pivot " + std::to_string(c.pivot_index) +
            " = " + to_string(c.pivot) +
            (sgn(c.pivot) == 0 ? " with nonzero remainder" : "")),
      check(c) {}

namespace {

void validate(const QpObjective& obj, const Polyhedron& P) {
  if (obj.H.rows() != P.n() || obj.H.cols() != P.n() || obj.h.size() != P.n())
    throw Error("qp_min: objective dimension mismatch");
  if (!obj.H.is_symmetric()) throw Error("qp_min: H not symmetric");
  const PsdCheck c = check_psd(obj.H);
  if (!c.psd) throw NotPsdError(c);
}

// {r : W r <= 0, H r = 0, h^T r <= -1}
std::optional<RatVector> descent_ray(const QpObjective& obj, const Polyhedron& P) {
  const std::size_t n = P.n();
  Polyhedron cone(P.W, zeros(P.m()), 0);
  for (std::size_t i = 0; i < n; ++i) cone.add_equality(obj.H.row(i), 0);
  cone.add_row(obj.h, -1);
  return find_point(cone);
}

}  // namespace

QpResult qp_min(const QpObjective& obj, const Polyhedron& P) {
  validate(obj, P);
  const std::size_t n = P.n();
  const std::size_t m = P.m();
  QpResult res;

  auto start = find_point(P);
  if (!start) return res;
  if (auto ray = descent_ray(obj, P)) {
    res.status = QpStatus::Unbounded;
    res.x = std::move(*start);
    res.ray = std::move(*ray);
    return res;
  }

  // Primal active set. The working set rows stay linearly independent because a
  // blocking row always has W_i p > 0 while W_S p = 0.
  RatVector x = std::move(*start);
  std::vector<std::size_t> work;
  {
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < m; ++i)
      if (dot(P.W.row(i), x) == P.w[i]) active.push_back(i);
    for (auto k : row_basis(P.W.select_rows(active))) work.push_back(active[k]);
  }

  std::set<std::pair<std::vector<std::size_t>, RatVector>> seen;
  for (std::size_t iter = 0;; ++iter) {
    res.iterations = iter;
    const RatVector g = obj.gradient(x);
    const RatMatrix ws = P.W.select_rows(work);
    const RatMatrix Z = work.empty() ? RatMatrix::identity(n) : null_space(ws);

    RatVector step = zeros(n);
    bool ray_mode = false;
    if (Z.cols() > 0) {
      const RatMatrix zt = Z.transpose();
      const RatMatrix G = zt * obj.H * Z;
      const RatVector gz = zt * g;
      if (auto u = solve(2 * G, scale(gz, -1))) {
        step = Z * *u;
      } else {
        // Zero-curvature descent direction inside the working face.
        const RatMatrix N = null_space(G);
        step = Z * scale(N * (N.transpose() * gz), -1);
        ray_mode = true;
      }
    }

    if (!ray_mode && is_zero(step)) {
      const auto lambda = solve(ws.transpose(), scale(g, -1));
      if (!lambda) throw Error("qp_min: stationarity system inconsistent");
      std::size_t drop = work.size();
      for (std::size_t k = 0; k < work.size(); ++k)
        if (sgn((*lambda)[k]) < 0 && (drop == work.size() || work[k] < work[drop])) drop = k;
      if (drop == work.size()) {
        res.status = QpStatus::Optimal;
        res.multipliers = zeros(m);
        for (std::size_t k = 0; k < work.size(); ++k) res.multipliers[work[k]] = (*lambda)[k];
        res.value = obj(x);
        res.x = std::move(x);
        return res;
      }
      auto key = std::make_pair(work, x);
      std::sort(key.first.begin(), key.first.end());
      if (!seen.insert(std::move(key)).second) throw Error("qp_min: active-set cycling");
      work.erase(work.begin() + static_cast<long>(drop));
      continue;
    }

    bool have_alpha = !ray_mode;
    Rational alpha = 1;
    std::size_t block = m;
    std::vector<bool> in_work(m, false);
    for (auto i : work) in_work[i] = true;
    for (std::size_t i = 0; i < m; ++i) {
      if (in_work[i]) continue;
      const Rational wp = dot(P.W.row(i), step);
      if (sgn(wp) <= 0) continue;
      Rational ratio = (P.w[i] - dot(P.W.row(i), x)) / wp;
      if (!have_alpha || ratio < alpha || (ratio == alpha && (block == m || i < block))) {
        alpha = std::move(ratio);
        block = i;
        have_alpha = true;
      }
    }
    if (!have_alpha) throw Error("qp_min: descent ray escaped the bounded-objective check");
    if (sgn(alpha) != 0) x = add(x, scale(step, alpha));
    if (block != m) work.push_back(block);
  }
}

QpResult qp_min_on_slice(const QpObjective& obj, const Polyhedron& P,
                         std::span<const Rational> fixed) {
  if (fixed.size() > P.n()) throw Error("qp_min_on_slice: too many fixed coordinates");
  Polyhedron pinned = P;
  for (std::size_t i = 0; i < fixed.size(); ++i) pinned.add_equality(unit_vector(P.n(), i), fixed[i]);
  return qp_min(obj, pinned);
}

bool verify_kkt(const QpObjective& obj, const Polyhedron& P, std::span<const Rational> x,
                std::span<const Rational> lambda) {
  if (lambda.size() != P.m() || x.size() != P.n()) return false;
  if (!P.contains(x)) return false;
  RatVector station = obj.gradient(x);
  for (std::size_t i = 0; i < P.m(); ++i) {
    if (sgn(lambda[i]) < 0) return false;
    if (sgn(lambda[i]) == 0) continue;
    if (dot(P.W.row(i), x) != P.w[i]) return false;
    for (std::size_t j = 0; j < P.n(); ++j) station[j] += lambda[i] * P.W(i, j);
  }
  return is_zero(station);
}

bool verify_unbounded_ray(const QpObjective& obj, const Polyhedron& P,
                          std::span<const Rational> ray) {
  return recession_ray_check(P, ray) && is_zero(obj.H * ray) && dot(obj.h, ray) <= -1;
}

}  // namespace micqp
