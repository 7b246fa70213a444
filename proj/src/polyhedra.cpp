#include "micqp/polyhedra.hpp"

#include <algorithm>
#include <cstdlib>
#include <future>
#include <string>

namespace micqp {

// Polyhedron ------------------------------------------------------------------

Polyhedron::Polyhedron(RatMatrix W_, RatVector w_, std::size_t p_)
    : W(std::move(W_)), w(std::move(w_)), p(p_) {
  if (W.rows() != w.size()) throw Error("Polyhedron: rhs length mismatch");
  if (p > W.cols()) throw Error("Polyhedron: p exceeds n");
}

Polyhedron Polyhedron::free_space(std::size_t n, std::size_t p) {
  return Polyhedron(RatMatrix(0, n), {}, p);
}

bool Polyhedron::contains(std::span<const Rational> x) const {
  if (x.size() != n()) throw Error("Polyhedron::contains: dimension mismatch");
  for (std::size_t i = 0; i < m(); ++i)
    if (dot(W.row(i), x) > w[i]) return false;
  return true;
}

bool Polyhedron::contains_mixed_integer(std::span<const Rational> x) const {
  return contains(x) && is_integer(x.first(p));
}

// Arguments may alias rows of W or entries of w, so copy before growing.
void Polyhedron::add_row(std::span<const Rational> a, const Rational& b) {
  const RatVector row(a.begin(), a.end());
  const Rational rhs = b;
  W.append_row(row);
  w.push_back(rhs);
}

void Polyhedron::add_equality(std::span<const Rational> a, const Rational& b) {
  const RatVector row(a.begin(), a.end());
  const Rational rhs = b;
  add_row(row, rhs);
  add_row(scale(row, -1), -rhs);
}

void Polyhedron::add_box(std::span<const Rational> lo, std::span<const Rational> hi) {
  if (lo.size() != hi.size() || lo.size() > n()) throw Error("add_box: dimension mismatch");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    RatVector e = unit_vector(n(), i);
    add_row(e, hi[i]);
    add_row(scale(e, -1), -lo[i]);
  }
}

Polyhedron Polyhedron::substitute(const AffineParam& tau) const {
  return Polyhedron(W * tau.M, sub(w, W * tau.xbar), tau.pPrime);
}

std::size_t thread_cap() {
  const char* env = std::getenv("MIQCP_THREADS");
  if (!env) return 1;
  try {
    const long v = std::stol(env);
    return v < 1 ? 1 : static_cast<std::size_t>(v);
  } catch (...) {
    return 1;
  }
}

// Simplex ---------------------------------------------------------------------

namespace {

// Dense tableau over columns [x+ (n) | x- (n) | s (m) | a (k)], rows B^{-1}[A | b].
class Tableau {
 public:
  Tableau(const Polyhedron& P) : n_(P.n()), m_(P.m()) {
    for (std::size_t i = 0; i < m_; ++i)
      if (sgn(P.w[i]) < 0) art_rows_.push_back(i);
    cols_ = 2 * n_ + m_ + art_rows_.size();
    t_.assign(m_, RatVector(cols_ + 1));
    basis_.resize(m_);
    sigma_.assign(m_, 1);
    initial_.resize(m_);
    std::size_t next_art = 2 * n_ + m_;
    for (std::size_t i = 0; i < m_; ++i) {
      const int sg = sgn(P.w[i]) < 0 ? -1 : 1;
      sigma_[i] = sg;
      for (std::size_t j = 0; j < n_; ++j) {
        t_[i][j] = sg * P.W(i, j);
        t_[i][n_ + j] = -sg * P.W(i, j);
      }
      t_[i][2 * n_ + i] = sg;
      t_[i][cols_] = sg * P.w[i];
      if (sg < 0) {
        t_[i][next_art] = 1;
        basis_[i] = next_art++;
      } else {
        basis_[i] = 2 * n_ + i;
      }
      initial_[i] = basis_[i];
    }
  }

  bool is_artificial(std::size_t j) const { return j >= 2 * n_ + m_ && j < cols_; }

  // Runs simplex on cost vector `cost` (length cols_). Returns false if unbounded,
  // with the entering column stored in `ray_col`.
  bool optimize(const RatVector& cost, bool allow_artificial, std::size_t* ray_col) {
    compute_reduced(cost);
    for (;;) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (!allow_artificial && is_artificial(j)) continue;
        if (sgn(d_[j]) < 0) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) return true;
      std::size_t leave = m_;
      Rational best;
      for (std::size_t i = 0; i < m_; ++i) {
        if (sgn(t_[i][enter]) <= 0) continue;
        Rational ratio = t_[i][cols_] / t_[i][enter];
        if (leave == m_ || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = std::move(ratio);
        }
      }
      if (leave == m_) {
        *ray_col = enter;
        return false;
      }
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    ++pivots_;
    const Rational inv = 1 / t_[r][c];
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j <= cols_; ++j) {
      if (sgn(t_[r][j]) == 0) continue;
      t_[r][j] *= inv;
      nz.push_back(j);
    }
    const auto eliminate = [&](RatVector& row) {
      if (sgn(row[c]) == 0) return;
      const Rational f = row[c];
      for (auto j : nz) row[j] -= f * t_[r][j];
    };
    for (std::size_t i = 0; i < m_; ++i)
      if (i != r) eliminate(t_[i]);
    // Reduced costs share the column layout but have no rhs entry.
    if (sgn(d_[c]) != 0) {
      const Rational f = d_[c];
      for (auto j : nz)
        if (j < cols_) d_[j] -= f * t_[r][j];
      obj_ -= f * t_[r][cols_];
    }
    basis_[r] = c;
  }

  void compute_reduced(const RatVector& cost) {
    d_ = RatVector(cost.begin(), cost.end());
    obj_ = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      const Rational& cb = cost[basis_[i]];
      if (sgn(cb) == 0) continue;
      for (std::size_t j = 0; j < cols_; ++j)
        if (sgn(t_[i][j]) != 0) d_[j] -= cb * t_[i][j];
      obj_ -= cb * t_[i][cols_];
    }
  }

  // Drives zero-level artificials out of the basis after phase 1.
  void purge_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[i])) continue;
      for (std::size_t j = 0; j < 2 * n_ + m_; ++j) {
        if (sgn(t_[i][j]) != 0) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  RatVector primal_x() const {
    RatVector x(n_);
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t b = basis_[i];
      if (b < n_) x[b] += t_[i][cols_];
      else if (b < 2 * n_) x[b - n_] -= t_[i][cols_];
    }
    return x;
  }

  RatVector ray_x(std::size_t enter) const {
    RatVector r(n_);
    const auto bump = [&](std::size_t var, const Rational& amount) {
      if (var < n_) r[var] += amount;
      else if (var < 2 * n_) r[var - n_] -= amount;
    };
    bump(enter, 1);
    for (std::size_t i = 0; i < m_; ++i) bump(basis_[i], -t_[i][enter]);
    return r;
  }

  // y_i = -pi_i sigma_i where pi = c_B^T B^{-1}; B^{-1} columns are the initial basis columns.
  RatVector dual(const RatVector& cost) const {
    RatVector y(m_);
    for (std::size_t k = 0; k < m_; ++k) {
      Rational pi = 0;
      for (std::size_t i = 0; i < m_; ++i) {
        const Rational& cb = cost[basis_[i]];
        if (sgn(cb) != 0) pi += cb * t_[i][initial_[k]];
      }
      y[k] = -pi * sigma_[k];
    }
    return y;
  }

  std::size_t cols() const { return cols_; }
  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  std::size_t pivots() const { return pivots_; }
  const Rational& objective() const { return obj_; }
  bool has_artificials() const { return !art_rows_.empty(); }

 private:
  std::size_t n_, m_, cols_ = 0;
  std::vector<std::size_t> art_rows_;
  std::vector<RatVector> t_;
  std::vector<std::size_t> basis_;
  std::vector<int> sigma_;
  std::vector<std::size_t> initial_;
  RatVector d_;
  Rational obj_;  // -(current objective value)
  std::size_t pivots_ = 0;
};

}  // namespace

LpResult lp_min(std::span<const Rational> c, const Polyhedron& P) {
  if (c.size() != P.n()) throw Error("lp_min: objective dimension mismatch");
  Tableau tab(P);
  LpResult res;
  std::size_t ray_col = 0;

  if (tab.has_artificials()) {
    RatVector phase1(tab.cols());
    for (std::size_t j = 0; j < tab.cols(); ++j)
      if (tab.is_artificial(j)) phase1[j] = 1;
    tab.optimize(phase1, true, &ray_col);
    if (sgn(tab.objective()) != 0) {
      res.status = LpStatus::Infeasible;
      res.farkas = tab.dual(phase1);
      res.pivots = tab.pivots();
      return res;
    }
    tab.purge_artificials();
  }

  RatVector cost(tab.cols());
  for (std::size_t j = 0; j < P.n(); ++j) {
    cost[j] = c[j];
    cost[P.n() + j] = -c[j];
  }
  const bool bounded = tab.optimize(cost, false, &ray_col);
  res.x = tab.primal_x();
  res.pivots = tab.pivots();
  if (!bounded) {
    res.status = LpStatus::Unbounded;
    res.ray = tab.ray_x(ray_col);
    return res;
  }
  res.status = LpStatus::Optimal;
  res.value = dot(c, res.x);
  res.dual = tab.dual(cost);
  return res;
}

std::optional<RatVector> find_point(const Polyhedron& P) {
  const LpResult r = lp_min(zeros(P.n()), P);
  if (r.status == LpStatus::Infeasible) return std::nullopt;
  return r.x;
}

// Implicit equalities -----------------------------------------------------------

std::vector<std::size_t> implicit_equalities(const Polyhedron& P) {
  const auto start = find_point(P);
  if (!start) throw PreconditionError("implicit_equalities: polyhedron is empty");

  const std::size_t m = P.m();
  enum class Row { Unknown, Slack, Tight };
  std::vector<Row> state(m, Row::Unknown);
  const auto mark_slack_at = [&](const RatVector& x) {
    for (std::size_t i = 0; i < m; ++i)
      if (state[i] == Row::Unknown && dot(P.W.row(i), x) < P.w[i]) state[i] = Row::Slack;
  };
  mark_slack_at(*start);

  const auto probe = [&](std::size_t i) { return lp_min(P.W.row(i), P); };
  const auto record = [&](std::size_t i, const LpResult& r) {
    if (r.status == LpStatus::Optimal && r.value == P.w[i]) {
      state[i] = Row::Tight;
    } else {
      state[i] = Row::Slack;
      if (r.status == LpStatus::Optimal) mark_slack_at(r.x);
    }
  };

  const std::size_t workers = thread_cap();
  if (workers <= 1) {
    for (std::size_t i = 0; i < m; ++i)
      if (state[i] == Row::Unknown) record(i, probe(i));
  } else {
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < m; ++i)
      if (state[i] == Row::Unknown) todo.push_back(i);
    for (std::size_t b = 0; b < todo.size(); b += workers) {
      std::vector<std::future<LpResult>> jobs;
      const std::size_t e = std::min(todo.size(), b + workers);
      for (std::size_t k = b; k < e; ++k)
        jobs.push_back(std::async(std::launch::async, probe, todo[k]));
      for (std::size_t k = b; k < e; ++k) {
        const LpResult r = jobs[k - b].get();
        const std::size_t i = todo[k];
        state[i] = (r.status == LpStatus::Optimal && r.value == P.w[i]) ? Row::Tight : Row::Slack;
      }
    }
  }

  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m; ++i)
    if (state[i] == Row::Tight) out.push_back(i);
  return out;
}

bool is_fulldim_polyhedron(const Polyhedron& P) {
  // max t s.t. W x + t 1 <= w, t <= 1.
  const std::size_t n = P.n();
  Polyhedron lifted(hstack(P.W, RatMatrix(P.m(), 1)), P.w, 0);
  for (std::size_t i = 0; i < P.m(); ++i) lifted.W(i, n) = 1;
  lifted.add_row(unit_vector(n + 1, n), 1);
  const LpResult r = lp_min(scale(unit_vector(n + 1, n), -1), lifted);
  return r.status == LpStatus::Optimal && sgn(r.value) < 0;
}

std::optional<PolyhedronReduction> fulldim_reduce_polyhedron(const Polyhedron& P) {
  if (!find_point(P)) return std::nullopt;
  const auto eq = implicit_equalities(P);

  PolyhedronReduction out;
  if (eq.empty()) {
    out.tau = AffineParam::identity(P.n(), P.p);
    out.reduced = P;
    out.source_rows.resize(P.m());
    for (std::size_t i = 0; i < P.m(); ++i) out.source_rows[i] = i;
    return out;
  }

  RatVector weq;
  for (auto i : eq) weq.push_back(P.w[i]);
  auto tau = parametrize_mixed_integer_solutions(P.W.select_rows(eq), weq, P.p);
  if (!tau) return std::nullopt;

  const Polyhedron sub = P.substitute(*tau);
  // Rows that vanish identically (the implicit equalities among them) are dropped.
  out.reduced = Polyhedron(RatMatrix(0, sub.n()), {}, sub.p);
  for (std::size_t i = 0; i < sub.m(); ++i) {
    if (is_zero(sub.W.row(i))) {
      if (sgn(sub.w[i]) < 0) throw Error("fulldim_reduce_polyhedron: inconsistent zero row");
      continue;
    }
    out.reduced.add_row(sub.W.row(i), sub.w[i]);
    out.source_rows.push_back(i);
  }
  out.tau = std::move(*tau);
  return out;
}

bool recession_ray_check(const Polyhedron& P, std::span<const Rational> r) {
  if (r.size() != P.n()) throw Error("recession_ray_check: dimension mismatch");
  for (std::size_t i = 0; i < P.m(); ++i)
    if (sgn(dot(P.W.row(i), r)) > 0) return false;
  return true;
}

}  // namespace micqp
