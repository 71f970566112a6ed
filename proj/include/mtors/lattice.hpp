#pragma once

#include "mtors/core.hpp"

#include <optional>
#include <vector>

namespace mtors {

// (1/denom) * rowspan(basis) inside Q^dim, with basis in row HNF and
// gcd(content(basis), denom) == 1.  Two lattices are equal iff their
// canonical forms are.
class Lattice {
 public:
  Lattice() = default;
  explicit Lattice(Index dim);  // the zero lattice

  static Lattice from_rows(const IntMatrix& rows, const Integer& denom = 1);
  static Lattice from_rational_rows(const RatMatrix& rows);
  // (1/denom) * (rowspan(rows) + modulus * Z^dim); full rank.
  static Lattice with_modulus(const IntMatrix& rows, const Integer& denom, const Integer& modulus);
  static Lattice standard(Index dim);
  // Caller guarantees `basis` is already a row HNF.
  static Lattice from_hnf(IntMatrix basis, Integer denom);

  Index dim() const { return dim_; }
  Index rank() const { return basis_.rows(); }
  bool full_rank() const { return rank() == dim_; }
  const IntMatrix& basis() const { return basis_; }
  const Integer& denom() const { return denom_; }
  const std::vector<Index>& pivots() const { return pivots_; }
  RatMatrix rational_basis() const;

  // Product of the pivots of the integral basis.
  Integer pivot_product() const;

  // Coordinates c with c * basis / denom == num / den, if the vector lies in
  // the lattice.
  std::optional<IntRow> coordinates(const IntRow& num, const Integer& den = 1) const;
  bool contains(const IntRow& num, const Integer& den = 1) const { return coordinates(num, den).has_value(); }
  bool contains(const RatVector& v) const;
  bool in_span(const IntRow& num) const;

  Lattice scaled(const Integer& num, const Integer& den = 1) const;

  bool operator==(const Lattice& o) const;
  bool operator!=(const Lattice& o) const { return !(*this == o); }

 private:
  void finish();

  Index dim_ = 0;
  IntMatrix basis_;
  Integer denom_ = 1;
  std::vector<Index> pivots_;
  std::vector<std::vector<Index>> support_;
};

Lattice sum(const Lattice& a, const Lattice& b);
Lattice intersect(const Lattice& a, const Lattice& b);
// b is a sublattice of a
bool contains(const Lattice& a, const Lattice& b);
// {y : y.x in Z for all x in L}; L must have full rank.
Lattice dual(const Lattice& l);
// {x : A x in H} for square nonsingular A.
Lattice preimage_lattice(const RatMatrix& a, const Lattice& h);
// {A x : x in L}
Lattice image(const Lattice& l, const RatMatrix& a);

// Finite quotient L/H with H of full rank in L.
class FinAbelianGroup {
 public:
  FinAbelianGroup(Lattice ambient, Lattice sub);

  const Lattice& ambient() const { return ambient_; }
  const Lattice& sub() const { return sub_; }
  const std::vector<Integer>& invariants() const { return invariants_; }
  Integer order() const;
  Integer exponent() const;
  bool trivial() const { return invariants_.empty(); }

  // Rows: coordinates of the sub basis in the ambient basis.
  const IntMatrix& relations() const { return relations_; }

 private:
  Lattice ambient_, sub_;
  IntMatrix relations_;
  Integer index_;
  std::vector<Integer> invariants_;
};

std::vector<Integer> invariant_factors(const FinAbelianGroup& g);
// ({x in L : (phi - 1) x in H}) / H, where phi acts on column vectors.
FinAbelianGroup fixed_subgroup(const FinAbelianGroup& g, const RatMatrix& phi);
// (H + sum Z g_i) / H for the rows g_i of gens.
FinAbelianGroup subgroup_generated(const RatMatrix& gens, const Lattice& h);

}  // namespace mtors
