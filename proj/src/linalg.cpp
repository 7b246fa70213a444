#include "micqp/linalg.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace micqp {

// Scalars ---------------------------------------------------------------------

Rational make_rational(long num, long den) {
  if (den == 0) throw Error("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational parse_rational(const std::string& text) {
  const auto bad = [&](const char* why) {
    return Error("malformed rational \"" + text + "\": " + why);
  };
  if (text.empty()) throw bad("empty");
  const auto valid_int = [](const std::string& s) {
    std::size_t k = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (k == s.size()) return false;
    return std::all_of(s.begin() + static_cast<long>(k), s.end(),
                       [](char c) { return c >= '0' && c <= '9'; });
  };
  const auto slash = text.find('/');
  std::string num = text.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
  if (!valid_int(num) || !valid_int(den)) throw bad("expected integer or a/b");
  if (num[0] == '+') num.erase(0, 1);
  if (den[0] == '+') den.erase(0, 1);
  Integer n(num, 10);
  Integer d(den, 10);
  if (d == 0) throw bad("zero denominator");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(10); }

Integer floor(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Integer ceil(const Rational& q) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Integer round_nearest(const Rational& q) { return floor(q + Rational(1, 2)); }

bool is_integer(const Rational& q) { return q.get_den() == 1; }

bool is_canonical(const Rational& q) {
  if (q.get_den() <= 0) return false;
  Integer g;
  mpz_gcd(g.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return g == 1;
}

namespace {
std::size_t ceil_log2_plus_one(const Integer& a) {
  // ceil(log2(|a| + 1)) is the bit length of |a|.
  Integer m = abs(a);
  return m == 0 ? 0 : mpz_sizeinbase(m.get_mpz_t(), 2);
}
}  // namespace

std::size_t bit_size(const Rational& q) {
  return 1 + ceil_log2_plus_one(q.get_num()) + ceil_log2_plus_one(q.get_den());
}

// Vectors ---------------------------------------------------------------------

RatVector zeros(std::size_t n) { return RatVector(n); }

RatVector unit_vector(std::size_t n, std::size_t i) {
  RatVector e(n);
  e[i] = 1;
  return e;
}

Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
  if (a.size() != b.size()) throw Error("dot: dimension mismatch");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (sgn(a[i]) != 0 && sgn(b[i]) != 0) s += a[i] * b[i];
  }
  return s;
}

RatVector add(std::span<const Rational> a, std::span<const Rational> b) {
  if (a.size() != b.size()) throw Error("add: dimension mismatch");
  RatVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

RatVector sub(std::span<const Rational> a, std::span<const Rational> b) {
  if (a.size() != b.size()) throw Error("sub: dimension mismatch");
  RatVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

RatVector scale(std::span<const Rational> a, const Rational& s) {
  RatVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
  return r;
}

RatVector concat(std::span<const Rational> a, std::span<const Rational> b) {
  RatVector r(a.begin(), a.end());
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

bool is_zero(std::span<const Rational> a) {
  return std::all_of(a.begin(), a.end(), [](const Rational& q) { return sgn(q) == 0; });
}

bool is_integer(std::span<const Rational> a) {
  return std::all_of(a.begin(), a.end(), [](const Rational& q) { return is_integer(q); });
}

Rational squared_norm(std::span<const Rational> a) { return dot(a, a); }

std::size_t bit_size(std::span<const Rational> a) {
  std::size_t s = 0;
  for (const auto& q : a) s += bit_size(q);
  return s;
}

// Matrices --------------------------------------------------------------------

RatMatrix::RatMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

RatMatrix::RatMatrix(std::initializer_list<std::initializer_list<Rational>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error("RatMatrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

RatMatrix RatMatrix::identity(std::size_t n) {
  RatMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RatMatrix RatMatrix::from_rows(const std::vector<RatVector>& rows, std::size_t cols) {
  RatMatrix m(0, cols);
  for (const auto& r : rows) m.append_row(r);
  return m;
}

RatMatrix RatMatrix::from_columns(const std::vector<RatVector>& cols, std::size_t rows) {
  RatMatrix m(rows, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].size() != rows) throw Error("from_columns: dimension mismatch");
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
  }
  return m;
}

RatMatrix RatMatrix::diagonal(std::span<const Rational> d) {
  RatMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

RatVector RatMatrix::row_vector(std::size_t i) const {
  auto r = row(i);
  return {r.begin(), r.end()};
}

RatVector RatMatrix::column(std::size_t j) const {
  RatVector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

void RatMatrix::append_row(std::span<const Rational> r) {
  if (r.size() != cols_) throw Error("append_row: dimension mismatch");
  data_.insert(data_.end(), r.begin(), r.end());
  ++rows_;
}

RatMatrix RatMatrix::transpose() const {
  RatMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

RatMatrix RatMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr,
                           std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw Error("block: out of range");
  RatMatrix b(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

RatMatrix RatMatrix::select_rows(std::span<const std::size_t> idx) const {
  RatMatrix s(0, cols_);
  for (auto i : idx) s.append_row(row(i));
  return s;
}

RatMatrix RatMatrix::select_columns(std::span<const std::size_t> idx) const {
  RatMatrix s(rows_, idx.size());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < idx.size(); ++k) s(i, k) = (*this)(i, idx[k]);
  return s;
}

bool RatMatrix::is_zero() const { return micqp::is_zero(std::span<const Rational>(data_)); }

bool RatMatrix::is_integer() const {
  return micqp::is_integer(std::span<const Rational>(data_));
}

bool RatMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

RatMatrix operator*(const RatMatrix& a, const RatMatrix& b) {
  if (a.cols() != b.rows()) throw Error("matrix product: dimension mismatch");
  RatMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Rational& aik = a(i, k);
      if (sgn(aik) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j)
        if (sgn(b(k, j)) != 0) c(i, j) += aik * b(k, j);
    }
  return c;
}

RatMatrix operator+(const RatMatrix& a, const RatMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error("matrix sum: dimension mismatch");
  RatMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

RatMatrix operator-(const RatMatrix& a, const RatMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error("matrix difference: dimension mismatch");
  RatMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

RatMatrix operator*(const Rational& s, const RatMatrix& a) {
  RatMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
  return c;
}

RatVector operator*(const RatMatrix& a, std::span<const Rational> x) {
  if (a.cols() != x.size()) throw Error("matrix-vector product: dimension mismatch");
  RatVector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

RatMatrix hstack(const RatMatrix& a, const RatMatrix& b) {
  if (a.rows() != b.rows()) throw Error("hstack: row mismatch");
  RatMatrix c(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) c(i, a.cols() + j) = b(i, j);
  }
  return c;
}

RatMatrix vstack(const RatMatrix& a, const RatMatrix& b) {
  if (a.cols() != b.cols()) throw Error("vstack: column mismatch");
  RatMatrix c = a;
  for (std::size_t i = 0; i < b.rows(); ++i) c.append_row(b.row(i));
  return c;
}

Rational quad_form(const RatMatrix& h, std::span<const Rational> x) {
  return dot(x, h * x);
}

std::size_t bit_size(const RatMatrix& m) {
  return bit_size(std::span<const Rational>(m.entries()));
}

std::string to_string(const RatMatrix& m) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << (i ? ", [" : "[");
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << m(i, j);
    os << "]";
  }
  os << "]";
  return os.str();
}

// Elimination ---------------------------------------------------------------

namespace {

using IntMatrix = std::vector<std::vector<Integer>>;

// Each row multiplied by the lcm of its denominators; returns the scale factors.
IntMatrix integer_rows(const RatMatrix& m, std::vector<Integer>* scales) {
  IntMatrix out(m.rows(), std::vector<Integer>(m.cols()));
  if (scales) scales->assign(m.rows(), Integer(1));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Integer l = 1;
    for (const auto& q : m.row(i)) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const Rational& q = m(i, j);
      out[i][j] = q.get_num() * (l / q.get_den());
    }
    if (scales) (*scales)[i] = l;
  }
  return out;
}

// Fraction-free forward elimination in place. Returns rank; `swaps` counts row swaps.
std::size_t bareiss(IntMatrix& a, std::size_t cols, int* swaps) {
  const std::size_t rows = a.size();
  Integer prev = 1;
  std::size_t r = 0;
  if (swaps) *swaps = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    if (piv != r) {
      std::swap(a[piv], a[r]);
      if (swaps) ++*swaps;
    }
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        Integer t = a[r][c] * a[i][j] - a[i][c] * a[r][j];
        mpz_divexact(a[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      a[i][c] = 0;
    }
    prev = a[r][c];
    ++r;
  }
  return r;
}

struct Rref {
  RatMatrix m;
  std::vector<std::size_t> pivot_cols;
};

// Reduced row echelon form of [A | extra columns].
Rref rref(RatMatrix m) {
  Rref out;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t piv = r;
    while (piv < m.rows() && sgn(m(piv, c)) == 0) ++piv;
    if (piv == m.rows()) continue;
    if (piv != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(r, j));
    const Rational inv = 1 / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || sgn(m(i, c)) == 0) continue;
      const Rational f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j)
        if (sgn(m(r, j)) != 0) m(i, j) -= f * m(r, j);
    }
    out.pivot_cols.push_back(c);
    ++r;
  }
  out.m = std::move(m);
  return out;
}

}  // namespace

std::size_t rank(const RatMatrix& m) {
  if (m.empty()) return 0;
  IntMatrix a = integer_rows(m, nullptr);
  return bareiss(a, m.cols(), nullptr);
}

Rational determinant(const RatMatrix& m) {
  if (m.rows() != m.cols()) throw Error("determinant: matrix not square");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  std::vector<Integer> scales;
  IntMatrix a = integer_rows(m, &scales);
  int swaps = 0;
  if (bareiss(a, n, &swaps) < n) return 0;
  Rational det(a[n - 1][n - 1]);
  for (const auto& s : scales) det /= s;
  if (swaps % 2) det = -det;
  det.canonicalize();
  return det;
}

std::vector<std::size_t> row_basis(const RatMatrix& m) {
  // Incremental elimination: keep reduced copies of the accepted rows.
  std::vector<RatVector> reduced;
  std::vector<std::size_t> pivots;
  std::vector<std::size_t> basis;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    RatVector v = m.row_vector(i);
    for (std::size_t k = 0; k < reduced.size(); ++k) {
      const std::size_t c = pivots[k];
      if (sgn(v[c]) == 0) continue;
      const Rational f = v[c] / reduced[k][c];
      for (std::size_t j = 0; j < v.size(); ++j)
        if (sgn(reduced[k][j]) != 0) v[j] -= f * reduced[k][j];
    }
    auto it = std::find_if(v.begin(), v.end(), [](const Rational& q) { return sgn(q) != 0; });
    if (it == v.end()) continue;
    pivots.push_back(static_cast<std::size_t>(it - v.begin()));
    reduced.push_back(std::move(v));
    basis.push_back(i);
  }
  return basis;
}

std::optional<RatMatrix> inverse(const RatMatrix& m) {
  if (m.rows() != m.cols()) throw Error("inverse: matrix not square");
  const std::size_t n = m.rows();
  Rref r = rref(hstack(m, RatMatrix::identity(n)));
  if (r.pivot_cols.size() < n || (n > 0 && r.pivot_cols[n - 1] != n - 1)) return std::nullopt;
  return r.m.block(0, n, n, n);
}

std::optional<RatVector> solve(const RatMatrix& a, std::span<const Rational> b) {
  if (a.rows() != b.size()) throw Error("solve: dimension mismatch");
  RatMatrix aug(a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    aug(i, a.cols()) = b[i];
  }
  Rref r = rref(std::move(aug));
  RatVector x(a.cols());
  for (std::size_t k = 0; k < r.pivot_cols.size(); ++k) {
    if (r.pivot_cols[k] == a.cols()) return std::nullopt;
    x[r.pivot_cols[k]] = r.m(k, a.cols());
  }
  return x;
}

RatMatrix null_space(const RatMatrix& a) {
  const std::size_t n = a.cols();
  Rref r = rref(a);
  std::vector<bool> is_pivot(n, false);
  for (auto c : r.pivot_cols) is_pivot[c] = true;
  std::vector<RatVector> basis;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    RatVector v(n);
    v[f] = 1;
    for (std::size_t k = 0; k < r.pivot_cols.size(); ++k) v[r.pivot_cols[k]] = -r.m(k, f);
    basis.push_back(std::move(v));
  }
  return RatMatrix::from_columns(basis, n);
}

// Unimodular transforms -------------------------------------------------------

UnimodularCert UnimodularCert::identity(std::size_t n) {
  return {RatMatrix::identity(n), RatMatrix::identity(n)};
}

bool UnimodularCert::valid() const {
  if (U.rows() != U.cols() || Uinv.rows() != U.rows() || Uinv.cols() != U.cols()) return false;
  if (!U.is_integer() || !Uinv.is_integer()) return false;
  if (U * Uinv != RatMatrix::identity(U.rows())) return false;
  return abs(determinant(U)) == 1;
}

RowBasisSplit row_basis_permute(const RatMatrix& a) {
  const std::size_t m = a.rows();
  RowBasisSplit out;
  const auto basis = row_basis(a);
  std::vector<bool> in_basis(m, false);
  for (auto i : basis) in_basis[i] = true;
  out.order = basis;
  for (std::size_t i = 0; i < m; ++i)
    if (!in_basis[i]) out.order.push_back(i);

  RatMatrix p(m, m);
  for (std::size_t k = 0; k < m; ++k) p(k, out.order[k]) = 1;
  out.perm = {p, p.transpose()};
  out.A1 = a.select_rows(std::span(out.order.data(), basis.size()));
  out.A2 = a.select_rows(std::span(out.order.data() + basis.size(), m - basis.size()));
  return out;
}

ColumnReduction column_reduce_unimodular(const RatMatrix& a1) {
  const std::size_t r = a1.rows();
  const std::size_t n = a1.cols();
  if (rank(a1) != r) throw PreconditionError("column_reduce_unimodular: rows not independent");

  RatMatrix a = a1;
  RatMatrix u = RatMatrix::identity(n);
  RatMatrix uinv = RatMatrix::identity(n);

  // U <- U E with E = I - q e_src e_dst^T, i.e. col_dst -= q col_src; U^{-1} <- E^{-1} U^{-1}.
  const auto col_axpy = [&](std::size_t dst, std::size_t src, const Rational& q) {
    for (std::size_t i = 0; i < r; ++i) a(i, dst) -= q * a(i, src);
    for (std::size_t i = 0; i < n; ++i) u(i, dst) -= q * u(i, src);
    for (std::size_t j = 0; j < n; ++j) uinv(src, j) += q * uinv(dst, j);
  };
  const auto col_swap = [&](std::size_t x, std::size_t y) {
    if (x == y) return;
    for (std::size_t i = 0; i < r; ++i) std::swap(a(i, x), a(i, y));
    for (std::size_t i = 0; i < n; ++i) std::swap(u(i, x), u(i, y));
    for (std::size_t j = 0; j < n; ++j) std::swap(uinv(x, j), uinv(y, j));
  };

  for (std::size_t i = 0; i < r; ++i) {
    for (;;) {
      std::size_t piv = n;
      std::size_t nonzero = 0;
      for (std::size_t j = i; j < n; ++j) {
        if (sgn(a(i, j)) == 0) continue;
        ++nonzero;
        if (piv == n || abs(a(i, j)) < abs(a(i, piv))) piv = j;
      }
      if (piv == n) throw PreconditionError("column_reduce_unimodular: rows not independent");
      if (nonzero == 1) {
        col_swap(i, piv);
        break;
      }
      // Euclidean step: every other entry is reduced below |pivot| in absolute value.
      for (std::size_t j = i; j < n; ++j) {
        if (j == piv || sgn(a(i, j)) == 0) continue;
        Rational ratio = a(i, j) / a(i, piv);
        Integer q;
        mpz_tdiv_q(q.get_mpz_t(), ratio.get_num_mpz_t(), ratio.get_den_mpz_t());
        if (q != 0) col_axpy(j, piv, Rational(q));
      }
    }
  }
  ColumnReduction out;
  out.K1 = a.block(0, 0, r, r);
  out.U = {std::move(u), std::move(uinv)};
  return out;
}

}  // namespace micqp
