#include "mtors/factor.hpp"

#include <algorithm>
#include <map>

namespace mtors {

namespace {

// Brent's variant of Pollard rho; returns a proper divisor or 0.
Integer rho(const Integer& n, unsigned long c, unsigned long budget) {
  Integer y = 2, x, g = 1, q = 1, ys, t;
  unsigned long r = 1, spent = 0;
  const unsigned long m = 128;
  auto f = [&](Integer& v) {
    v = v * v + c;
    mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
  };
  while (g == 1) {
    x = y;
    for (unsigned long i = 0; i < r; ++i) f(y);
    for (unsigned long k = 0; k < r && g == 1; k += m) {
      ys = y;
      for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
        f(y);
        t = abs(x - y);
        q = q * t % n;
      }
      g = gcd(q, n);
      spent += m;
      if (spent > budget) return 0;
    }
    r *= 2;
  }
  if (g == n) {
    do {
      f(ys);
      g = gcd(abs(x - ys), n);
    } while (g == 1);
  }
  return g == n ? Integer(0) : g;
}

void split(const Integer& n, unsigned long budget, std::map<Integer, unsigned>& out) {
  if (n == 1) return;
  if (mpz_probab_prime_p(n.get_mpz_t(), 30)) {
    ++out[n];
    return;
  }
  for (unsigned long c = 1; c < 8; ++c) {
    Integer d = rho(n, c, budget);
    if (d != 0) {
      split(d, budget, out);
      split(n / d, budget, out);
      return;
    }
  }
  ++out[n];
}

}  // namespace

std::vector<std::pair<Integer, unsigned>> factor(const Integer& n, unsigned long budget) {
  if (n < 1) throw Error(ErrorKind::Parse, "cannot factor " + n.get_str());
  std::map<Integer, unsigned> out;
  Integer rest = n;
  for (unsigned long p = 2; p < 10000; p += (p == 2 ? 1 : 2)) {
    if (rest == 1) break;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      rest /= p;
      ++out[Integer(p)];
    }
  }
  split(rest, budget, out);
  return {out.begin(), out.end()};
}

}  // namespace mtors
