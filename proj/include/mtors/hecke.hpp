#pragma once

#include "mtors/core.hpp"
#include "mtors/manin.hpp"

#include <functional>
#include <string>
#include <vector>

namespace mtors {

// Exact operator on symbol-space coordinates; column j is the image of basis
// vector j.
class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  // Throws NotStable unless the matrix preserves the cuspidal lattice.
  OperatorMatrix(const SymbolSpace& space, std::string name, IntMatrix m);

  long level() const { return level_; }
  const std::string& name() const { return name_; }
  const IntMatrix& matrix() const { return matrix_; }
  // Matrix on the basis of the cuspidal lattice, same column convention.
  const IntMatrix& cuspidal_matrix() const { return restricted_; }

 private:
  long level_ = 0;
  std::string name_;
  IntMatrix matrix_, restricted_;
};

// ad - bc = q, a > b >= 0, d > c >= 0.
std::vector<Mat2> heilbronn_matrices(long q);

// Matrix of x -> sum_i x g_i on generators, dropping non-symbols.
IntMatrix symbol_operator(const SymbolSpace& space, const std::function<void(const ManinSymbol&, std::vector<ManinSymbol>&)>& images);

OperatorMatrix hecke_matrix(const SymbolSpace& space, long q);
OperatorMatrix diamond_matrix(const SymbolSpace& space, long d);
OperatorMatrix star_matrix(const SymbolSpace& space);
OperatorMatrix eta_matrix(const SymbolSpace& space, long q);
// T_n for gcd(n, N) = 1 from prime T_q by the usual recurrences.
OperatorMatrix hecke_composite(const SymbolSpace& space, long n);

// Matrix of a cuspidal-stable operator on the basis of the cuspidal lattice.
IntMatrix restrict_to_cuspidal(const SymbolSpace& space, const IntMatrix& m);

// "T3", "T1", "diamond:2", "star", "eta:3".  Throws Parse on unknown names.
OperatorMatrix named_operator(const SymbolSpace& space, const std::string& name);

}  // namespace mtors
