#pragma once

#include "mtors/core.hpp"

#include <vector>

namespace mtors {

struct HnfResult {
  IntMatrix H;                 // rank x cols, zero rows trimmed
  IntMatrix U;                 // rows x rows unimodular, (U*M).topRows(rank) == H
  std::vector<Index> pivots;   // pivot column of each row of H
};

// Row Hermite normal form: upper echelon, positive pivots, entries above a
// pivot reduced into [0, pivot).
HnfResult hnf(const IntMatrix& m);

// Same form without the transform.
IntMatrix hnf_basis(const IntMatrix& m, std::vector<Index>* pivots = nullptr);

// HNF of rowspan(gens) + modulus*Z^n, always n x n.  Work is done modulo
// `modulus`, so entry size stays bounded by it.
IntMatrix hnf_mod(const IntMatrix& gens, const Integer& modulus);

// {c in Z^k : c*z == 0 mod m} for a k x s matrix z, as an HNF basis (k x k).
IntMatrix solutions_mod(const IntMatrix& z, const Integer& m);

struct SnfResult {
  IntMatrix D;  // rows x cols, diagonal d_i | d_{i+1}, d_i >= 0
  IntMatrix U;  // rows x rows unimodular
  IntMatrix V;  // cols x cols unimodular, D == U*M*V
};

SnfResult snf(const IntMatrix& m);

// Nonzero diagonal of the SNF (ones included).
std::vector<Integer> elementary_divisors(const IntMatrix& m);

// Invariant chain (entries > 1) of Z^k / rowspan(m) for square nonsingular m,
// computed modulo `det_multiple`, a positive multiple of |det m|.
std::vector<Integer> cokernel_invariants(const IntMatrix& m, const Integer& det_multiple);

// Invariant chain of Z^n / rowspan(w) for a full-rank square HNF w.  Only
// the columns with pivot > 1 take part.
std::vector<Integer> hnf_cokernel_invariants(const IntMatrix& w);

// Sorts a list of cyclic orders into divisibility order, dropping ones.
std::vector<Integer> normalize_chain(std::vector<Integer> diag);

}  // namespace mtors
