#include "micqp/diophantine.hpp"

namespace micqp {

IntegerReflexiveGinv integer_reflexive_ginv(const RatMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  const RowBasisSplit split = row_basis_permute(a);
  const std::size_t r = split.A1.rows();

  IntegerReflexiveGinv out;
  out.r = r;
  if (r == 0) {
    out.Asharp = RatMatrix(n, m);
    out.U = UnimodularCert::identity(n);
    return out;
  }
  ColumnReduction red = column_reduce_unimodular(split.A1);
  const auto k1inv = inverse(red.K1);
  if (!k1inv) throw Error("integer_reflexive_ginv: K1 singular");

  // K#_I = [[K1^{-1}, 0], [0, 0]] (n x m); A# = U K#_I W.
  RatMatrix ksharp(n, m);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) ksharp(i, j) = (*k1inv)(i, j);
  out.Asharp = red.U.U * ksharp * split.perm.U;
  out.U = std::move(red.U);
  return out;
}

AffineParam AffineParam::identity(std::size_t n, std::size_t p) {
  return {zeros(n), RatMatrix::identity(n), p, n};
}

RatVector AffineParam::apply(std::span<const Rational> xprime) const {
  if (xprime.size() != nPrime) throw Error("AffineParam::apply: dimension mismatch");
  return add(xbar, M * xprime);
}

RatVector AffineParam::preimage(std::span<const Rational> x) const {
  if (x.size() != xbar.size()) throw Error("AffineParam::preimage: dimension mismatch");
  if (nPrime == 0) return {};
  const RatMatrix mt = M.transpose();
  const auto sol = solve(mt * M, mt * sub(x, xbar));
  if (!sol) throw Error("AffineParam::preimage: M lacks full column rank");
  return *sol;
}

AffineParam AffineParam::compose(const AffineParam& inner) const {
  if (inner.xbar.size() != nPrime) throw Error("AffineParam::compose: dimension mismatch");
  return {add(xbar, M * inner.xbar), M * inner.M, inner.pPrime, inner.nPrime};
}

std::optional<AffineParam> parametrize_mixed_integer_solutions(const RatMatrix& W,
                                                               std::span<const Rational> w,
                                                               std::size_t p) {
  const std::size_t m = W.rows();
  const std::size_t n = W.cols();
  if (w.size() != m) throw Error("parametrize: rhs length mismatch");
  if (p > n) throw Error("parametrize: p exceeds n");
  const std::size_t q = n - p;

  const RatMatrix A = W.block(0, 0, m, p);
  const RatMatrix B = W.block(0, p, m, q);

  const IntegerReflexiveGinv bg = integer_reflexive_ginv(B);
  const RatMatrix proj = RatMatrix::identity(m) - B * bg.Asharp;  // I - B B#
  const RatMatrix C = proj * A;
  const RatVector d = proj * w;
  const IntegerReflexiveGinv cg = integer_reflexive_ginv(C);

  // Solvability: C#_I d integral and C C#_I d = d.
  const RatVector ybar = cg.Asharp * d;
  if (!is_integer(std::span<const Rational>(ybar))) return std::nullopt;
  if (C * ybar != d) return std::nullopt;

  const RatMatrix bsharp_a = bg.Asharp * A;
  const RatVector zbar = sub(bg.Asharp * w, bsharp_a * ybar);

  const std::size_t p_prime = p - cg.r;
  const std::size_t q_prime = q - bg.r;
  // Trailing columns of U_C, U_B span the integer kernel directions.
  const RatMatrix R = cg.U.U.block(0, cg.r, p, p_prime);
  const RatMatrix T = bg.U.U.block(0, bg.r, q, q_prime);
  const RatMatrix S = RatMatrix(q, p_prime) - bsharp_a * R;  // -B# A R

  AffineParam out;
  out.xbar = concat(ybar, zbar);
  out.pPrime = p_prime;
  out.nPrime = p_prime + q_prime;
  out.M = RatMatrix(n, out.nPrime);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p_prime; ++j) out.M(i, j) = R(i, j);
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = 0; j < p_prime; ++j) out.M(p + i, j) = S(i, j);
    for (std::size_t j = 0; j < q_prime; ++j) out.M(p + i, p_prime + j) = T(i, j);
  }
  return out;
}

}  // namespace micqp
