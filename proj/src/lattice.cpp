#include "mtors/lattice.hpp"

#include "mtors/modular.hpp"
#include "mtors/normal_form.hpp"

#include <algorithm>

namespace mtors {

namespace {

void check_dims(const Lattice& a, const Lattice& b) {
  if (a.dim() != b.dim())
    throw Error(ErrorKind::DimensionMismatch,
                "lattices of dimension " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
}

Integer lcm(const Integer& a, const Integer& b) {
  Integer l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

// Product of a (mostly sparse) k x k matrix with a k x n matrix.
IntMatrix sparse_product(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix out = IntMatrix::Zero(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index t = 0; t < a.cols(); ++t)
      if (a(i, t) != 0) row_addmul(out.row(i), a(i, t), b.row(t));
  return out;
}

RatMatrix apply_rows(const Lattice& l, const RatMatrix& phi) {
  // rows x -> (phi x^T)^T
  RatMatrix rb = l.rational_basis();
  RatMatrix out = RatMatrix::Zero(rb.rows(), phi.rows());
  for (Index i = 0; i < rb.rows(); ++i)
    for (Index r = 0; r < phi.rows(); ++r) {
      Rational s = 0;
      for (Index c = 0; c < phi.cols(); ++c)
        if (rb(i, c) != 0 && phi(r, c) != 0) s += phi(r, c) * rb(i, c);
      out(i, r) = s;
    }
  return out;
}

std::pair<IntRow, Integer> split(const RatMatrix& rows, Index i) {
  Integer den = 1;
  for (Index j = 0; j < rows.cols(); ++j) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), rows(i, j).get_den_mpz_t());
  IntRow num(rows.cols());
  for (Index j = 0; j < rows.cols(); ++j) num(j) = den / Integer(rows(i, j).get_den()) * Integer(rows(i, j).get_num());
  return {num, den};
}

}  // namespace

Lattice::Lattice(Index dim) : dim_(dim), basis_(0, dim) {}

void Lattice::finish() {
  dim_ = basis_.cols();
  if (denom_ < 0) {
    denom_ = -denom_;
    basis_ = -basis_;
  }
  if (basis_.rows() == 0) denom_ = 1;
  Integer g = content(basis_);
  mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), denom_.get_mpz_t());
  if (g > 1) {
    for (Index i = 0; i < basis_.rows(); ++i)
      for (Index j = 0; j < basis_.cols(); ++j)
        if (basis_(i, j) != 0) mpz_divexact(basis_(i, j).get_mpz_t(), basis_(i, j).get_mpz_t(), g.get_mpz_t());
    denom_ /= g;
  }
  pivots_.clear();
  support_.assign(static_cast<size_t>(basis_.rows()), {});
  for (Index i = 0; i < basis_.rows(); ++i) {
    Index p = -1;
    for (Index j = 0; j < basis_.cols(); ++j)
      if (basis_(i, j) != 0) {
        if (p < 0) p = j;
        support_[i].push_back(j);
      }
    pivots_.push_back(p);
  }
}

Lattice Lattice::from_rows(const IntMatrix& rows, const Integer& denom) {
  if (denom == 0) throw Error(ErrorKind::DimensionMismatch, "zero denominator");
  Lattice l;
  l.basis_ = hnf_basis(rows);
  l.denom_ = denom;
  l.finish();
  return l;
}

Lattice Lattice::from_rational_rows(const RatMatrix& rows) {
  auto [num, den] = clear_denominators(rows);
  return from_rows(num, den);
}

Lattice Lattice::with_modulus(const IntMatrix& rows, const Integer& denom, const Integer& modulus) {
  Lattice l;
  l.basis_ = hnf_mod(rows, modulus);
  l.denom_ = denom;
  l.finish();
  return l;
}

Lattice Lattice::standard(Index dim) { return from_hnf(identity_matrix(dim), 1); }

Lattice Lattice::from_hnf(IntMatrix basis, Integer denom) {
  Lattice l;
  l.basis_ = std::move(basis);
  l.denom_ = std::move(denom);
  l.finish();
  return l;
}

RatMatrix Lattice::rational_basis() const {
  RatMatrix out(basis_.rows(), basis_.cols());
  for (Index i = 0; i < basis_.rows(); ++i)
    for (Index j = 0; j < basis_.cols(); ++j) {
      out(i, j) = Rational(basis_(i, j), denom_);
      out(i, j).canonicalize();
    }
  return out;
}

Integer Lattice::pivot_product() const {
  Integer p = 1;
  for (Index i = 0; i < rank(); ++i) p *= basis_(i, pivots_[i]);
  return p;
}

std::optional<IntRow> Lattice::coordinates(const IntRow& num, const Integer& den) const {
  if (num.size() != dim_) throw Error(ErrorKind::DimensionMismatch, "vector length does not match lattice");
  IntRow y(dim_);
  for (Index j = 0; j < dim_; ++j) {
    if (num(j) == 0) {
      y(j) = 0;
      continue;
    }
    Integer t = num(j) * denom_;
    if (!mpz_divisible_p(t.get_mpz_t(), den.get_mpz_t())) return std::nullopt;
    mpz_divexact(y(j).get_mpz_t(), t.get_mpz_t(), den.get_mpz_t());
  }
  IntRow c = IntRow::Zero(rank());
  Index j0 = 0;
  for (Index i = 0; i < rank(); ++i) {
    const Index p = pivots_[i];
    for (Index j = j0; j < p; ++j)
      if (y(j) != 0) return std::nullopt;
    if (y(p) != 0) {
      if (!mpz_divisible_p(y(p).get_mpz_t(), basis_(i, p).get_mpz_t())) return std::nullopt;
      mpz_divexact(c(i).get_mpz_t(), y(p).get_mpz_t(), basis_(i, p).get_mpz_t());
      for (Index k : support_[i]) mpz_submul(y(k).get_mpz_t(), c(i).get_mpz_t(), basis_(i, k).get_mpz_t());
    }
    j0 = p + 1;
  }
  for (Index j = j0; j < dim_; ++j)
    if (y(j) != 0) return std::nullopt;
  return c;
}

bool Lattice::contains(const RatVector& v) const {
  RatMatrix row = v.transpose();
  auto [num, den] = split(row, 0);
  return contains(num, den);
}

bool Lattice::in_span(const IntRow& num) const {
  RowVector<Rational> y(dim_);
  for (Index j = 0; j < dim_; ++j) y(j) = num(j);
  Index j0 = 0;
  for (Index i = 0; i < rank(); ++i) {
    const Index p = pivots_[i];
    for (Index j = j0; j < p; ++j)
      if (y(j) != 0) return false;
    if (y(p) != 0) {
      Rational c = y(p) / Rational(basis_(i, p));
      for (Index k : support_[i]) y(k) -= c * Rational(basis_(i, k));
    }
    j0 = p + 1;
  }
  for (Index j = j0; j < dim_; ++j)
    if (y(j) != 0) return false;
  return true;
}

Lattice Lattice::scaled(const Integer& num, const Integer& den) const {
  if (num == 0) return Lattice(dim_);
  Lattice l = *this;
  Integer a = abs(num);
  for (Index i = 0; i < l.basis_.rows(); ++i)
    for (Index j = 0; j < l.basis_.cols(); ++j) l.basis_(i, j) *= a;
  l.denom_ *= abs(den);
  l.finish();
  return l;
}

bool Lattice::operator==(const Lattice& o) const {
  return dim_ == o.dim_ && denom_ == o.denom_ && basis_.rows() == o.basis_.rows() && basis_ == o.basis_;
}

Lattice sum(const Lattice& a, const Lattice& b) {
  check_dims(a, b);
  if (a.rank() == 0) return b;
  if (b.rank() == 0) return a;
  const Integer l = lcm(a.denom(), b.denom());
  const Integer fa = l / a.denom(), fb = l / b.denom();
  IntMatrix rows(a.rank() + b.rank(), a.dim());
  rows.topRows(a.rank()) = a.basis() * fa;
  rows.bottomRows(b.rank()) = b.basis() * fb;
  if (a.full_rank() || b.full_rank()) {
    Integer m = 0;
    if (a.full_rank()) m = fa * a.pivot_product();
    if (b.full_rank()) {
      Integer mb = fb * b.pivot_product();
      if (m == 0 || mb < m) m = mb;
    }
    return Lattice::with_modulus(rows, l, m);
  }
  return Lattice::from_rows(rows, l);
}

Lattice intersect(const Lattice& a, const Lattice& b) {
  check_dims(a, b);
  if (a.rank() == 0 || b.rank() == 0) return Lattice(a.dim());
  if (a.full_rank() && b.full_rank()) return dual(sum(dual(a), dual(b)));
  const Index n = a.dim();
  const Integer l = lcm(a.denom(), b.denom());
  const Integer fa = l / a.denom(), fb = l / b.denom();
  IntMatrix m = IntMatrix::Zero(a.rank() + b.rank(), 2 * n);
  m.block(0, 0, a.rank(), n) = a.basis() * fa;
  m.block(0, n, a.rank(), n) = a.basis() * fa;
  m.block(a.rank(), 0, b.rank(), n) = b.basis() * fb;
  std::vector<Index> piv;
  IntMatrix h = hnf_basis(m, &piv);
  std::vector<Index> keep;
  for (Index i = 0; i < h.rows(); ++i)
    if (piv[i] >= n) keep.push_back(i);
  IntMatrix rows(static_cast<Index>(keep.size()), n);
  for (Index i = 0; i < rows.rows(); ++i) rows.row(i) = h.block(keep[i], n, 1, n);
  return Lattice::from_rows(rows, l);
}

bool contains(const Lattice& a, const Lattice& b) {
  check_dims(a, b);
  for (Index i = 0; i < b.rank(); ++i)
    if (!a.contains(IntRow(b.basis().row(i)), b.denom())) return false;
  return true;
}

Lattice dual(const Lattice& l) {
  if (!l.full_rank()) throw Error(ErrorKind::DimensionMismatch, "dual of a lattice without full rank");
  const Integer delta = l.pivot_product();
  IntMatrix y = solutions_mod(IntMatrix(l.basis().transpose()), l.denom() * delta);
  return Lattice::from_hnf(std::move(y), delta);
}

Lattice preimage_lattice(const RatMatrix& a, const Lattice& h) {
  if (a.rows() != a.cols() || a.cols() != h.dim())
    throw Error(ErrorKind::DimensionMismatch, "preimage_lattice: operator shape does not match lattice");
  RatMatrix ainv = inverse(a);
  return image(h, ainv);
}

Lattice image(const Lattice& l, const RatMatrix& a) {
  if (a.cols() != l.dim()) throw Error(ErrorKind::DimensionMismatch, "image: operator shape does not match lattice");
  if (l.rank() == 0) return Lattice(a.rows());
  return Lattice::from_rational_rows(apply_rows(l, a));
}

FinAbelianGroup::FinAbelianGroup(Lattice ambient, Lattice sub) : ambient_(std::move(ambient)), sub_(std::move(sub)) {
  check_dims(ambient_, sub_);
  if (ambient_.rank() != sub_.rank())
    throw Error(ErrorKind::NotSublattice, "sublattice rank " + std::to_string(sub_.rank()) + " differs from " +
                                              std::to_string(ambient_.rank()));
  const Index k = ambient_.rank();
  relations_ = IntMatrix(k, k);
  for (Index i = 0; i < k; ++i) {
    auto c = ambient_.coordinates(IntRow(sub_.basis().row(i)), sub_.denom());
    if (!c) throw Error(ErrorKind::NotSublattice, "sub lattice is not contained in the ambient lattice");
    relations_.row(i) = *c;
  }
  if (k == 0) {
    index_ = 1;
    return;
  }
  if (ambient_.full_rank()) {
    // [L:H] = det(W_H) dL^n / (det(W_L) dH^n)
    Integer num = sub_.pivot_product(), den = ambient_.pivot_product();
    Integer dl, dh;
    mpz_pow_ui(dl.get_mpz_t(), ambient_.denom().get_mpz_t(), static_cast<unsigned long>(k));
    mpz_pow_ui(dh.get_mpz_t(), sub_.denom().get_mpz_t(), static_cast<unsigned long>(k));
    num *= dl;
    den *= dh;
    index_ = num / den;
  } else {
    index_ = abs(determinant(relations_));
  }
  if (index_ == 1) return;
  invariants_ = hnf_cokernel_invariants(hnf_mod(relations_, index_));
}

Integer FinAbelianGroup::order() const {
  Integer o = 1;
  for (auto& d : invariants_) o *= d;
  return o;
}

Integer FinAbelianGroup::exponent() const { return invariants_.empty() ? Integer(1) : invariants_.back(); }

std::vector<Integer> invariant_factors(const FinAbelianGroup& g) { return g.invariants(); }

FinAbelianGroup fixed_subgroup(const FinAbelianGroup& g, const RatMatrix& phi) {
  const Lattice& L = g.ambient();
  const Lattice& H = g.sub();
  if (phi.rows() != L.dim() || phi.cols() != L.dim())
    throw Error(ErrorKind::DimensionMismatch, "fixed_subgroup: operator shape does not match group");
  RatMatrix imgL = apply_rows(L, phi);
  RatMatrix imgH = apply_rows(H, phi);
  for (Index i = 0; i < imgH.rows(); ++i) {
    auto [num, den] = split(imgH, i);
    if (!H.contains(num, den)) throw Error(ErrorKind::NotStable, "operator does not preserve the sub lattice");
  }
  const Index k = L.rank();
  IntMatrix f(k, k);
  RatMatrix rb = L.rational_basis();
  for (Index i = 0; i < k; ++i) {
    RatMatrix diff = imgL.row(i) - rb.row(i);
    auto [num, den] = split(diff, 0);
    auto c = L.coordinates(num, den);
    if (!c) throw Error(ErrorKind::NotStable, "operator does not preserve the ambient lattice");
    f.row(i) = *c;
  }
  if (g.trivial()) return g;
  const Integer idx = g.order();
  // idx * (rowspan K)^dual, generated by the rows of y
  IntMatrix y = solutions_mod(IntMatrix(g.relations().transpose()), idx);
  std::vector<Index> cols;
  for (Index j = 0; j < k; ++j)
    if (y(j, j) != idx) cols.push_back(j);
  IntMatrix z = IntMatrix::Zero(k, static_cast<Index>(cols.size()));
  for (Index i = 0; i < k; ++i)
    for (Index c = 0; c < z.cols(); ++c) {
      Integer s = 0;
      for (Index t = 0; t < k; ++t)
        if (f(i, t) != 0 && y(cols[c], t) != 0) mpz_addmul(s.get_mpz_t(), f(i, t).get_mpz_t(), y(cols[c], t).get_mpz_t());
      z(i, c) = s;
    }
  IntMatrix cset = z.cols() ? solutions_mod(z, idx) : identity_matrix(k);
  IntMatrix rows = sparse_product(cset, L.basis());
  Lattice fixed;
  if (L.full_rank()) {
    Integer m = L.denom() / H.denom() * H.pivot_product();
    fixed = Lattice::with_modulus(rows, L.denom(), m);
  } else {
    fixed = Lattice::from_rows(rows, L.denom());
  }
  return FinAbelianGroup(std::move(fixed), H);
}

FinAbelianGroup subgroup_generated(const RatMatrix& gens, const Lattice& h) {
  if (gens.rows() > 0 && gens.cols() != h.dim())
    throw Error(ErrorKind::DimensionMismatch, "generator length does not match lattice");
  if (!h.full_rank()) {
    for (Index i = 0; i < gens.rows(); ++i) {
      auto [num, den] = split(gens, i);
      if (!h.in_span(num)) throw Error(ErrorKind::InfiniteOrder, "generator " + std::to_string(i) + " has infinite order");
    }
  }
  if (gens.rows() == 0) return FinAbelianGroup(h, h);
  Lattice g = Lattice::from_rational_rows(gens);
  return FinAbelianGroup(sum(h, g), h);
}

}  // namespace mtors
