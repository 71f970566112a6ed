#pragma once

#include "mtors/core.hpp"
#include "mtors/manin.hpp"

#include <string>
#include <vector>

namespace mtors {

enum class Orbit { Infinity, Zero };

// [x:y] mod p.  Infinity classes are [x:0] with 1 <= x <= (p-1)/2, zero
// classes are [1:y] with 1 <= y <= (p-1)/2.
struct CuspClass {
  long x = 1, y = 0, p = 0;
  Orbit orbit = Orbit::Infinity;
  std::string str() const;
  bool operator==(const CuspClass& o) const { return x == o.x && y == o.y && p == o.p; }
};

// Coefficients indexed like cusp_classes(p).
using CuspDivisor = std::vector<long>;

long degree(const CuspDivisor& d);

void check_prime_level(long p);

// Same order as SymbolSpace::cusps() at level p.
std::vector<CuspClass> cusp_classes(long p);
CuspClass cusp_class_of(const CuspKey& k, long p);
bool is_rational(const CuspClass& c);

// perm[i] = index of sigma_d(class i).
std::vector<Index> galois_cusp_action(long p, long d);
CuspDivisor apply_permutation(const std::vector<Index>& perm, const CuspDivisor& d);

bool generates_mod_sign(long d, long p);
// Smallest primitive root mod p.
long choose_galois_generator(long p);

// c_i - c_0 over the infinity classes, i = 1 .. (p-3)/2.
std::vector<CuspDivisor> rational_difference_divisors(long p);

}  // namespace mtors
