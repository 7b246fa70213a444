#pragma once

// Exact rational linear algebra: scalars, dense matrices, rank/determinant by
// fraction-free elimination, and unimodular column reduction.

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace micqp {

using Rational = mpq_class;
using Integer = mpz_class;
using RatVector = std::vector<Rational>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

Rational make_rational(long num, long den = 1);
/// Parses "a/b" or "a"; throws Error on malformed input or zero denominator.
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);

Integer floor(const Rational& q);
Integer ceil(const Rational& q);
/// Nearest integer, halves rounded up.
Integer round_nearest(const Rational& q);
bool is_integer(const Rational& q);
bool is_canonical(const Rational& q);

/// Encoding length of a rational: 1 + ceil(log2(|a|+1)) + ceil(log2(b+1)).
std::size_t bit_size(const Rational& q);

// Dense vectors --------------------------------------------------------------

RatVector zeros(std::size_t n);
RatVector unit_vector(std::size_t n, std::size_t i);
Rational dot(std::span<const Rational> a, std::span<const Rational> b);
RatVector add(std::span<const Rational> a, std::span<const Rational> b);
RatVector sub(std::span<const Rational> a, std::span<const Rational> b);
RatVector scale(std::span<const Rational> a, const Rational& s);
RatVector concat(std::span<const Rational> a, std::span<const Rational> b);
bool is_zero(std::span<const Rational> a);
bool is_integer(std::span<const Rational> a);
Rational squared_norm(std::span<const Rational> a);
std::size_t bit_size(std::span<const Rational> a);

// Dense matrices --------------------------------------------------------------

/// Row-major dense matrix of rationals.
class RatMatrix {
 public:
  RatMatrix() = default;
  RatMatrix(std::size_t rows, std::size_t cols);
  RatMatrix(std::initializer_list<std::initializer_list<Rational>> rows);

  static RatMatrix identity(std::size_t n);
  static RatMatrix from_rows(const std::vector<RatVector>& rows, std::size_t cols);
  static RatMatrix from_columns(const std::vector<RatVector>& cols, std::size_t rows);
  static RatMatrix diagonal(std::span<const Rational> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const Rational> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<Rational> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  RatVector row_vector(std::size_t i) const;
  RatVector column(std::size_t j) const;
  const std::vector<Rational>& entries() const { return data_; }

  void append_row(std::span<const Rational> r);
  RatMatrix transpose() const;
  RatMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  RatMatrix select_rows(std::span<const std::size_t> idx) const;
  RatMatrix select_columns(std::span<const std::size_t> idx) const;

  bool is_zero() const;
  bool is_integer() const;
  bool is_symmetric() const;

  friend bool operator==(const RatMatrix& a, const RatMatrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

RatMatrix operator*(const RatMatrix& a, const RatMatrix& b);
RatMatrix operator+(const RatMatrix& a, const RatMatrix& b);
RatMatrix operator-(const RatMatrix& a, const RatMatrix& b);
RatMatrix operator*(const Rational& s, const RatMatrix& a);
RatVector operator*(const RatMatrix& a, std::span<const Rational> x);
inline RatVector operator*(const RatMatrix& a, const RatVector& x) {
  return a * std::span<const Rational>(x);
}
RatMatrix hstack(const RatMatrix& a, const RatMatrix& b);
RatMatrix vstack(const RatMatrix& a, const RatMatrix& b);
/// Quadratic form x^T H x.
Rational quad_form(const RatMatrix& h, std::span<const Rational> x);
std::size_t bit_size(const RatMatrix& m);
std::string to_string(const RatMatrix& m);

// Elimination ---------------------------------------------------------------

/// Rank over Q, by Bareiss elimination on the row-wise integer scaling.
std::size_t rank(const RatMatrix& m);

/// Exact determinant of a square matrix (Bareiss).
Rational determinant(const RatMatrix& m);

/// Indices of the first maximal linearly independent set of rows, scanned top to bottom.
std::vector<std::size_t> row_basis(const RatMatrix& m);

std::optional<RatMatrix> inverse(const RatMatrix& m);

/// Some solution of A x = b (free variables set to zero), or nullopt when inconsistent.
std::optional<RatVector> solve(const RatMatrix& a, std::span<const Rational> b);

/// Columns form a basis of {x : A x = 0}.
RatMatrix null_space(const RatMatrix& a);

// Unimodular transforms -----------------------------------------------------

/// Integer matrix U with integer inverse Uinv.
struct UnimodularCert {
  RatMatrix U;
  RatMatrix Uinv;

  static UnimodularCert identity(std::size_t n);
  /// U * Uinv == I, both integer, |det U| == 1.
  bool valid() const;
};

struct RowBasisSplit {
  UnimodularCert perm;  ///< permutation matrix; perm.U * A stacks A1 over A2
  RatMatrix A1;         ///< rank(A) independent rows
  RatMatrix A2;         ///< remaining rows
  std::vector<std::size_t> order;  ///< original row index of each stacked row
};

RowBasisSplit row_basis_permute(const RatMatrix& a);

struct ColumnReduction {
  UnimodularCert U;  ///< A1 * U == [K1 | 0]
  RatMatrix K1;      ///< r x r, invertible (lower triangular)
};

/// Column-reduces a full-row-rank matrix with elementary unimodular column operations.
ColumnReduction column_reduce_unimodular(const RatMatrix& a1);

}  // namespace micqp
