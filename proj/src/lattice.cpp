#include "micqp/lattice.hpp"

#include <utility>

namespace micqp {

GramSchmidt gram_schmidt(const RatMatrix& B) {
  const std::size_t p = B.cols();
  GramSchmidt gs{RatMatrix(B.rows(), p), RatMatrix(p, p), RatVector(p)};
  for (std::size_t i = 0; i < p; ++i) {
    RatVector v = B.column(i);
    for (std::size_t j = 0; j < i; ++j) {
      const RatVector sj = gs.star.column(j);
      gs.mu(i, j) = dot(B.column(i), sj) / gs.norms[j];
      v = sub(v, scale(sj, gs.mu(i, j)));
    }
    for (std::size_t k = 0; k < v.size(); ++k) gs.star(k, i) = v[k];
    gs.norms[i] = squared_norm(v);
    if (sgn(gs.norms[i]) == 0) throw PreconditionError("gram_schmidt: columns are dependent");
  }
  return gs;
}

namespace {

void column_axpy(RatMatrix& m, std::size_t dst, std::size_t src, const Rational& q) {
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, dst) -= q * m(i, src);
}

void swap_columns(RatMatrix& m, std::size_t a, std::size_t b) {
  for (std::size_t i = 0; i < m.rows(); ++i) std::swap(m(i, a), m(i, b));
}

}  // namespace

LllResult lll_reduce(const RatMatrix& B) {
  const std::size_t p = B.cols();
  if (B.rows() != p || sgn(determinant(B)) == 0) throw PreconditionError("lll_reduce: B must be invertible");
  const Rational delta = make_rational(3, 4);
  RatMatrix b = B;
  RatMatrix U = RatMatrix::identity(p);
  GramSchmidt gs = gram_schmidt(b);
  std::size_t k = 1;
  while (k < p) {
    for (std::size_t j = k; j-- > 0;) {
      const Integer q = round_nearest(gs.mu(k, j));
      if (q == 0) continue;
      const Rational qr(q);
      column_axpy(b, k, j, qr);
      column_axpy(U, k, j, qr);
      for (std::size_t l = 0; l < j; ++l) gs.mu(k, l) -= qr * gs.mu(j, l);
      gs.mu(k, j) -= qr;
    }
    const Rational& m = gs.mu(k, k - 1);
    if (gs.norms[k] >= (delta - m * m) * gs.norms[k - 1]) {
      ++k;
    } else {
      swap_columns(b, k, k - 1);
      swap_columns(U, k, k - 1);
      gs = gram_schmidt(b);
      k = k > 1 ? k - 1 : 1;
    }
  }
  auto uinv = inverse(U);
  return {std::move(b), {std::move(U), std::move(*uinv)}};
}

Integer flatness_bound_squared(std::size_t p) {
  Integer out = static_cast<unsigned long>(p * p);
  out <<= static_cast<mp_bitcnt_t>(p * (p - 1) / 2);
  return out;
}

FlatnessOutcome flatness(std::span<const Rational> a, const Rational& r, const RatMatrix& B) {
  const std::size_t p = B.cols();
  if (B.rows() != p || a.size() != p) throw PreconditionError("flatness: dimension mismatch");
  if (sgn(r) < 0) throw PreconditionError("flatness: negative radius");
  const LllResult red = lll_reduce(B);
  const GramSchmidt gs = gram_schmidt(red.basis);

  // Babai nearest plane.
  RatVector y(a.begin(), a.end());
  RatVector coeff(p);
  for (std::size_t i = p; i-- > 0;) {
    const Rational c(round_nearest(dot(y, gs.star.column(i)) / gs.norms[i]));
    coeff[i] = c;
    y = sub(y, scale(red.basis.column(i), c));
  }
  FlatnessOutcome out;
  const RatVector z = sub(a, y);
  if (squared_norm(y) <= r * r) {
    out.kind = FlatnessKind::LatticePoint;
    out.z = z;
    out.mu = red.U.U * coeff;
    return out;
  }

  const auto inv = inverse(red.basis);
  std::size_t best = 0;
  Rational best_norm = squared_norm(inv->row(0));
  for (std::size_t i = 1; i < p; ++i) {
    Rational nrm = squared_norm(inv->row(i));
    if (nrm < best_norm) {
      best_norm = std::move(nrm);
      best = i;
    }
  }
  out.kind = FlatnessKind::ThinDirection;
  out.d = RatVector(inv->row(best).begin(), inv->row(best).end());
  out.c = B.transpose() * out.d;
  if (4 * r * r * best_norm > Rational(flatness_bound_squared(p)))
    throw Error("flatness: width bound violated");
  return out;
}

}  // namespace micqp
