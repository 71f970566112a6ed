#pragma once

#include "mtors/core.hpp"

#include <cstdint>
#include <vector>

namespace mtors {

namespace modp {

using u64 = std::uint64_t;
using ModMatrix = Matrix<u64>;

inline u64 mul(u64 a, u64 b, u64 p) {
  return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % p);
}
inline u64 add(u64 a, u64 b, u64 p) {
  u64 s = a + b;
  return s >= p ? s - p : s;
}
inline u64 sub(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + p - b; }
u64 pow(u64 a, u64 e, u64 p);
u64 inv(u64 a, u64 p);

// Deterministic list of primes in (2^61, 2^62).
const std::vector<u64>& primes(size_t count);

u64 reduce(const Integer& x, u64 p);
ModMatrix reduce(const IntMatrix& m, u64 p);

Index rank(ModMatrix a, u64 p);
u64 det(ModMatrix a, u64 p);
// In-place inverse; false when singular mod p.
bool invert(ModMatrix& a, u64 p);

}  // namespace modp

// Exact determinant by CRT over word-size primes, stopping at the Hadamard bound.
Integer determinant(const IntMatrix& a);

// Rank over Q.  Modular ranks are lower bounds; a full modular rank is final,
// otherwise the answer is confirmed with exact elimination.
Index rank(const IntMatrix& a);

bool is_nonsingular(const IntMatrix& a);

struct RationalSolution {
  IntMatrix numer;  // A * numer == denom * B
  Integer denom;    // positive, lcm of the entry denominators
};

// Exact solution of A X = B for square nonsingular A.  Uses p-adic lifting
// when the entries fit in machine words, fraction-free elimination otherwise.
// Throws SingularOperator when A is singular.
RationalSolution solve(const IntMatrix& a, const IntMatrix& b);

// Fraction-free (Bareiss) elimination; intended for small systems.
RationalSolution solve_bareiss(const IntMatrix& a, const IntMatrix& b);

RatMatrix inverse(const RatMatrix& a);

// Saturated basis (primitive integer rows, HNF) of {x : M x = 0}.
RatMatrix rational_kernel(const RatMatrix& m);
IntMatrix integer_kernel(const IntMatrix& m);

// Exact product; uses machine words when the entry sizes allow it.
IntMatrix multiply(const IntMatrix& a, const IntMatrix& b);

}  // namespace mtors
