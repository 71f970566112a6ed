#include "mtors/cusps.hpp"

#include <numeric>

namespace mtors {

namespace {

long mod(long a, long n) {
  long r = a % n;
  return r < 0 ? r + n : r;
}

long fold(long x, long p) {
  x = mod(x, p);
  return std::min(x, p - x);
}

long mult_order(long d, long p) {
  long x = mod(d, p), k = 1;
  while (x != 1) {
    x = x * mod(d, p) % p;
    ++k;
  }
  return k;
}

}  // namespace

std::string CuspClass::str() const {
  return "[" + std::to_string(x) + ":" + std::to_string(y) + "]@" + std::to_string(p);
}

long degree(const CuspDivisor& d) { return std::accumulate(d.begin(), d.end(), 0L); }

void check_prime_level(long p) {
  if (p < 5 || !is_prime(p)) throw Error(ErrorKind::BadLevel, std::to_string(p) + " is not a prime >= 5");
}

CuspClass cusp_class_of(const CuspKey& k, long p) {
  if (k.c == 0) return CuspClass{k.a, 0, p, Orbit::Infinity};
  return CuspClass{1, k.c, p, Orbit::Zero};
}

std::vector<CuspClass> cusp_classes(long p) {
  check_prime_level(p);
  std::vector<CuspClass> out;
  for (auto& k : cusp_keys(p)) out.push_back(cusp_class_of(k, p));
  return out;
}

bool is_rational(const CuspClass& c) { return c.orbit == Orbit::Infinity; }

std::vector<Index> galois_cusp_action(long p, long d) {
  check_prime_level(p);
  if (std::gcd(mod(d, p), p) != 1) throw Error(ErrorKind::BadUnit, std::to_string(d) + " is not a unit mod " + std::to_string(p));
  const long h = (p - 1) / 2;
  std::vector<Index> perm(static_cast<size_t>(p - 1));
  for (long i = 0; i < h; ++i) perm[i] = i;
  for (long y = 1; y <= h; ++y) perm[h + y - 1] = h + fold(d * y, p) - 1;
  return perm;
}

CuspDivisor apply_permutation(const std::vector<Index>& perm, const CuspDivisor& d) {
  if (perm.size() != d.size()) throw Error(ErrorKind::DimensionMismatch, "divisor length does not match action");
  CuspDivisor out(d.size(), 0);
  for (size_t i = 0; i < d.size(); ++i) out[perm[i]] += d[i];
  return out;
}

bool generates_mod_sign(long d, long p) {
  if (mod(d, p) == 0) return false;
  long k = mult_order(d, p);
  // order of the class of d in (Z/p)^x / {+-1}
  long x = 1;
  for (long i = 1; i <= k; ++i) {
    x = x * mod(d, p) % p;
    if (x == 1 || x == p - 1) return i == (p - 1) / 2;
  }
  return false;
}

long choose_galois_generator(long p) {
  check_prime_level(p);
  for (long d = 2; d < p; ++d)
    if (mult_order(d, p) == p - 1) return d;
  throw Error(ErrorKind::NotGenerator, "no primitive root mod " + std::to_string(p));
}

std::vector<CuspDivisor> rational_difference_divisors(long p) {
  auto classes = cusp_classes(p);
  std::vector<Index> inf;
  for (Index i = 0; i < static_cast<Index>(classes.size()); ++i)
    if (is_rational(classes[i])) inf.push_back(i);
  std::vector<CuspDivisor> out;
  for (size_t i = 1; i < inf.size(); ++i) {
    CuspDivisor d(classes.size(), 0);
    d[inf[i]] += 1;
    d[inf[0]] -= 1;
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace mtors
