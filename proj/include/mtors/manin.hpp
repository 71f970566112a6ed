#pragma once

#include "mtors/core.hpp"
#include "mtors/lattice.hpp"

#include <iosfwd>
#include <utility>
#include <vector>

namespace mtors {

// (u, v) mod N, identified with (-u, -v).
struct ManinSymbol {
  long u = 0, v = 0;
  auto operator<=>(const ManinSymbol&) const = default;
};

struct Mat2 {
  long a, b, c, d;
};

inline constexpr Mat2 kS{0, -1, 1, 0};
inline constexpr Mat2 kT{0, -1, 1, -1};

ManinSymbol canonical_symbol(long u, long v, long N);
std::vector<ManinSymbol> enumerate_manin_symbols(long N);
// Right action (u, v) g.
ManinSymbol act(const ManinSymbol& x, const Mat2& g, long N);
// g in SL2(Z) with bottom row == (u, v) mod N.  Throws BadSymbol.
Mat2 lift_to_sl2(long u, long v, long N);

// A point a/c of P^1(Q), with gcd(a, c) = 1 and c >= 0 (c = 0 is infinity).
struct Cusp {
  Integer num = 1, den = 0;
  Cusp() = default;
  Cusp(Integer a, Integer c);
  static Cusp infinity() { return {}; }
  bool operator==(const Cusp& o) const { return num == o.num && den == o.den; }
};

// Class of a/c under Gamma1(N): (c mod N, a mod gcd(c, N)) up to sign.
struct CuspKey {
  long c = 0, a = 0;
  auto operator<=>(const CuspKey&) const = default;
};

CuspKey cusp_key(const Integer& a, const Integer& c, long N);
// All classes, sorted (for prime N the c = 0 classes come first).
std::vector<CuspKey> cusp_keys(long N);
Cusp cusp_representative(const CuspKey& k, long N);

using SparseVec = std::vector<std::pair<Index, long>>;

class SymbolSpace {
 public:
  static SymbolSpace build(long N);

  long level() const { return level_; }
  const std::vector<ManinSymbol>& symbols() const { return symbols_; }
  Index symbol_index(long u, long v) const;
  Index rank() const { return rank_; }

  // Coordinates of the class of a symbol in Z^rank.
  const SparseVec& coords(Index symbol) const { return coords_[symbol]; }
  IntRow dense_coords(Index symbol) const;
  // Basis vector j is the class of sum coef * symbol over this list.
  const SparseVec& generator(Index j) const { return generators_[j]; }

  const std::vector<CuspKey>& cusps() const { return cusps_; }
  Index cusp_index(const Integer& a, const Integer& c) const;
  Index cusp_index(const Cusp& x) const { return cusp_index(x.num, x.den); }

  // ncusps x rank; column j is the boundary of basis vector j.
  const IntMatrix& boundary_matrix() const { return boundary_; }
  IntRow boundary(const IntRow& x) const;

  // Integral cuspidal symbols (rank 2g), saturated.  In its basis every row
  // has a 1 in its pivot column and zeros in the other pivot columns, so the
  // pivot entries of x in H are its coordinates in that basis.
  const Lattice& cuspidal() const { return cuspidal_; }
  const std::vector<Index>& cuspidal_pivots() const { return cuspidal_.pivots(); }

  IntRow path_coords(const Cusp& alpha, const Cusp& beta) const;
  // A path from the first cusp class to class i.
  IntRow path_to(Index cusp) const;

  bool used_dense_quotient() const { return dense_quotient_; }

  void serialize(std::ostream& out) const;
  static SymbolSpace deserialize(std::istream& in);

 private:
  IntRow path_from_infinity(const Cusp& x) const;
  void index_symbols();
  void add_cusps();
  void compute_boundary();
  void compute_cuspidal();

  long level_ = 0;
  Index rank_ = 0;
  bool dense_quotient_ = false;
  std::vector<ManinSymbol> symbols_;
  std::vector<Index> index_;
  std::vector<SparseVec> coords_;
  std::vector<SparseVec> generators_;
  std::vector<CuspKey> cusps_;
  std::vector<Cusp> cusp_reps_;
  IntMatrix boundary_;
  Lattice cuspidal_;
};

// Genus of X1(p) for prime p >= 5.
long genus_x1(long p);

}  // namespace mtors
