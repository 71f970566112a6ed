#include "mtors/modular.hpp"

#include "mtors/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

namespace mtors {

namespace modp {

u64 pow(u64 a, u64 e, u64 p) {
  u64 r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mul(r, a, p);
    a = mul(a, a, p);
    e >>= 1;
  }
  return r;
}

u64 inv(u64 a, u64 p) { return pow(a, p - 2, p); }

const std::vector<u64>& primes(size_t count) {
  static std::vector<u64> list;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  // Readers index into the list without the lock, so it must not move.
  if (list.capacity() < 8192) list.reserve(8192);
  if (count > 8192) throw Error(ErrorKind::DimensionMismatch, "too many CRT primes requested");
  if (list.size() < count) {
    Integer x = list.empty() ? Integer(1) << 61 : Integer(list.back());
    while (list.size() < count) {
      mpz_nextprime(x.get_mpz_t(), x.get_mpz_t());
      list.push_back(x.get_ui());
    }
  }
  return list;
}

u64 reduce(const Integer& x, u64 p) {
  if (x.fits_slong_p()) {
    long v = x.get_si();
    long r = v % static_cast<long>(p);
    return static_cast<u64>(r < 0 ? r + static_cast<long>(p) : r);
  }
  return mpz_fdiv_ui(x.get_mpz_t(), p);
}

ModMatrix reduce(const IntMatrix& m, u64 p) {
  ModMatrix out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out(i, j) = reduce(m(i, j), p);
  return out;
}

Index rank(ModMatrix a, u64 p) {
  const Index m = a.rows(), n = a.cols();
  Index r = 0;
  for (Index j = 0; j < n && r < m; ++j) {
    Index piv = -1;
    for (Index i = r; i < m; ++i)
      if (a(i, j)) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != r) a.row(piv).swap(a.row(r));
    u64 iv = inv(a(r, j), p);
    for (Index i = r + 1; i < m; ++i) {
      if (!a(i, j)) continue;
      u64 f = mul(a(i, j), iv, p);
      for (Index k = j; k < n; ++k)
        if (a(r, k)) a(i, k) = sub(a(i, k), mul(f, a(r, k), p), p);
    }
    ++r;
  }
  return r;
}

u64 det(ModMatrix a, u64 p) {
  const Index n = a.rows();
  u64 d = 1;
  for (Index j = 0; j < n; ++j) {
    Index piv = -1;
    for (Index i = j; i < n; ++i)
      if (a(i, j)) {
        piv = i;
        break;
      }
    if (piv < 0) return 0;
    if (piv != j) {
      a.row(piv).swap(a.row(j));
      d = p - d;
      if (d == p) d = 0;
    }
    d = mul(d, a(j, j), p);
    u64 iv = inv(a(j, j), p);
    for (Index i = j + 1; i < n; ++i) {
      if (!a(i, j)) continue;
      u64 f = mul(a(i, j), iv, p);
      for (Index k = j; k < n; ++k)
        if (a(j, k)) a(i, k) = sub(a(i, k), mul(f, a(j, k), p), p);
    }
  }
  return d;
}

bool invert(ModMatrix& a, u64 p) {
  const Index n = a.rows();
  ModMatrix b = ModMatrix::Zero(n, 2 * n);
  b.leftCols(n) = a;
  for (Index i = 0; i < n; ++i) b(i, n + i) = 1;
  for (Index j = 0; j < n; ++j) {
    Index piv = -1;
    for (Index i = j; i < n; ++i)
      if (b(i, j)) {
        piv = i;
        break;
      }
    if (piv < 0) return false;
    if (piv != j) b.row(piv).swap(b.row(j));
    u64 iv = inv(b(j, j), p);
    for (Index k = 0; k < 2 * n; ++k) b(j, k) = mul(b(j, k), iv, p);
    for (Index i = 0; i < n; ++i) {
      if (i == j || !b(i, j)) continue;
      u64 f = b(i, j);
      for (Index k = j; k < 2 * n; ++k)
        if (b(j, k)) b(i, k) = sub(b(i, k), mul(f, b(j, k), p), p);
    }
  }
  a = b.rightCols(n);
  return true;
}

}  // namespace modp

namespace {

// log2 of the Hadamard bound prod_i |row_i|.
double hadamard_log2(const IntMatrix& a) {
  double total = 0;
  for (Index i = 0; i < a.rows(); ++i) {
    double s = 0;
    long maxexp = 0;
    for (Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0) maxexp = std::max<long>(maxexp, static_cast<long>(mpz_sizeinbase(a(i, j).get_mpz_t(), 2)));
    for (Index j = 0; j < a.cols(); ++j) {
      if (a(i, j) == 0) continue;
      long e;
      double m = mpz_get_d_2exp(&e, a(i, j).get_mpz_t());
      s += std::ldexp(m * m, static_cast<int>(2 * (e - maxexp)));
    }
    if (s > 0) total += 0.5 * std::log2(s) + static_cast<double>(maxexp);
  }
  return total;
}

size_t max_bits(const IntMatrix& a) {
  size_t b = 0;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0) b = std::max(b, mpz_sizeinbase(a(i, j).get_mpz_t(), 2));
  return b;
}

// Lifting keeps residuals in 128-bit words: n * |A| * 2^62 must stay below 2^126.
bool lifting_fits(const IntMatrix& a, const IntMatrix& b) {
  size_t nbits = 1;
  while ((Index(1) << nbits) <= a.rows()) ++nbits;
  return max_bits(a) + nbits + 62 <= 125 && max_bits(b) <= 60;
}

// Symmetric residue of x modulo m (m > 0).
Integer symmetric(const Integer& x, const Integer& m) {
  Integer r = mod_floor(x, m);
  if (2 * r > m) r -= m;
  return r;
}

// Rational reconstruction of x mod m with |num|, den <= bound.
bool reconstruct(Integer& num, Integer& den, const Integer& x, const Integer& m, const Integer& bound) {
  Integer r0 = m, r1 = mod_floor(x, m), t0 = 0, t1 = 1, q, tmp;
  while (r1 > bound) {
    q = r0 / r1;
    tmp = r0 - q * r1;
    r0 = r1;
    r1 = tmp;
    tmp = t0 - q * t1;
    t0 = t1;
    t1 = tmp;
  }
  if (t1 == 0 || cmpabs(t1, bound) > 0) return false;
  num = r1;
  den = t1;
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Integer g;
  mpz_gcd(g.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return g == 1;
}

bool verify_solution(const IntMatrix& a, const IntMatrix& b, const IntMatrix& x, const Integer& den) {
  const Index n = a.rows(), k = b.cols();
  Integer acc;
  for (Index i = 0; i < n; ++i)
    for (Index c = 0; c < k; ++c) {
      acc = 0;
      for (Index j = 0; j < n; ++j)
        if (a(i, j) != 0 && x(j, c) != 0) mpz_addmul(acc.get_mpz_t(), a(i, j).get_mpz_t(), x(j, c).get_mpz_t());
      mpz_submul(acc.get_mpz_t(), den.get_mpz_t(), b(i, c).get_mpz_t());
      if (acc != 0) return false;
    }
  return true;
}

RationalSolution normalize(IntMatrix x, Integer den) {
  Integer g = content(x);
  mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), den.get_mpz_t());
  if (g == 0) g = den;
  if (g > 1) {
    for (Index i = 0; i < x.rows(); ++i)
      for (Index j = 0; j < x.cols(); ++j) mpz_divexact(x(i, j).get_mpz_t(), x(i, j).get_mpz_t(), g.get_mpz_t());
    den /= g;
  }
  if (den < 0) {
    den = -den;
    x = -x;
  }
  return {std::move(x), std::move(den)};
}

RationalSolution solve_dixon(const IntMatrix& a, const IntMatrix& b) {
  using modp::u64;
  const Index n = a.rows(), k = b.cols();
  Matrix<std::int64_t> ai(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) ai(i, j) = a(i, j).get_si();
  u64 p = 0;
  modp::ModMatrix c;
  for (u64 cand : modp::primes(8)) {
    c = modp::reduce(a, cand);
    if (modp::invert(c, cand)) {
      p = cand;
      break;
    }
  }
  if (p == 0) {
    if (!is_nonsingular(a)) throw Error(ErrorKind::SingularOperator, "solve: matrix is singular");
    return solve_bareiss(a, b);
  }
  const __int128 P = static_cast<__int128>(p);
  Matrix<__int128> res(n, k);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < k; ++j) res(i, j) = b(i, j).get_si();
  IntMatrix acc = IntMatrix::Zero(n, k);
  Integer modulus = 1;
  Index steps = 0, next_try = 4;
  Matrix<u64> xk(n, k);
  Matrix<u64> rm(n, k);
  for (;;) {
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < k; ++j) {
        __int128 r = res(i, j) % P;
        if (r < 0) r += P;
        rm(i, j) = static_cast<u64>(r);
      }
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < k; ++j) {
        unsigned __int128 s = 0;
        for (Index t = 0; t < n; ++t) {
          s += static_cast<unsigned __int128>(c(i, t)) * rm(t, j);
          if (s >> 124) s %= p;
        }
        xk(i, j) = static_cast<u64>(s % p);
      }
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < k; ++j) {
        __int128 s = res(i, j);
        for (Index t = 0; t < n; ++t)
          if (ai(i, t)) s -= static_cast<__int128>(ai(i, t)) * static_cast<__int128>(xk(t, j));
        res(i, j) = s / P;
      }
    Integer xv;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < k; ++j) {
        if (!xk(i, j)) continue;
        mpz_set_ui(xv.get_mpz_t(), xk(i, j));
        mpz_addmul(acc(i, j).get_mpz_t(), xv.get_mpz_t(), modulus.get_mpz_t());
      }
    modulus *= p;
    ++steps;
    bool done = true;
    for (Index i = 0; i < n && done; ++i)
      for (Index j = 0; j < k; ++j)
        if (res(i, j) != 0) {
          done = false;
          break;
        }
    if (done) return normalize(acc, Integer(1));
    if (steps < next_try) continue;
    next_try = steps + std::max<Index>(2, steps / 4);
    Integer bound;
    mpz_sqrt(bound.get_mpz_t(), Integer(modulus / 2).get_mpz_t());
    Integer den = 1, num, d, y;
    IntMatrix x(n, k);
    bool ok = true;
    for (Index i = 0; i < n && ok; ++i)
      for (Index j = 0; j < k; ++j) {
        y = mod_floor(acc(i, j) * den, modulus);
        Integer ys = symmetric(y, modulus);
        if (cmpabs(ys, bound) <= 0) {
          x(i, j) = ys;
          continue;
        }
        if (!reconstruct(num, d, y, modulus, bound)) {
          ok = false;
          break;
        }
        den *= d;
        if (den > bound) {
          ok = false;
          break;
        }
        x(i, j) = num;
        // earlier entries were computed with the old denominator
        for (Index ii = 0; ii <= i; ++ii)
          for (Index jj = 0; jj < k; ++jj) {
            if (ii == i && jj >= j) break;
            x(ii, jj) *= d;
          }
      }
    if (!ok) continue;
    if (verify_solution(a, b, x, den)) return normalize(x, den);
  }
}

}  // namespace

Integer determinant(const IntMatrix& a) {
  const Index n = a.rows();
  if (a.cols() != n) throw Error(ErrorKind::DimensionMismatch, "determinant of a non-square matrix");
  if (n == 0) return 1;
  const double bits = hadamard_log2(a) + 2;
  Integer result = 0, modulus = 1;
  size_t used = 0;
  double have = 0;
  while (have < bits) {
    const auto& ps = modp::primes(used + 1);
    modp::u64 p = ps[used++];
    modp::u64 d = modp::det(modp::reduce(a, p), p);
    // CRT: result += modulus * ((d - result) * modulus^{-1} mod p)
    modp::u64 r = modp::reduce(result, p);
    modp::u64 mi = modp::inv(modp::reduce(modulus, p), p);
    modp::u64 t = modp::mul(modp::sub(d, r, p), mi, p);
    Integer tt;
    mpz_set_ui(tt.get_mpz_t(), t);
    result += modulus * tt;
    modulus *= p;
    have += std::log2(static_cast<double>(p));
  }
  return symmetric(result, modulus);
}

Index rank(const IntMatrix& a) {
  const Index full = std::min(a.rows(), a.cols());
  Index best = 0;
  for (size_t i = 0; i < 3; ++i) {
    modp::u64 p = modp::primes(3)[i];
    best = std::max(best, modp::rank(modp::reduce(a, p), p));
    if (best == full) return best;
  }
  std::vector<Index> piv;
  hnf_basis(a, &piv);
  return static_cast<Index>(piv.size());
}

namespace {

// Row and column indices of a maximal nonsingular minor mod p.
void rank_profile(modp::ModMatrix a, modp::u64 p, std::vector<Index>& rows, std::vector<Index>& cols) {
  using namespace modp;
  const Index m = a.rows(), n = a.cols();
  std::vector<Index> perm(static_cast<size_t>(m));
  for (Index i = 0; i < m; ++i) perm[i] = i;
  rows.clear();
  cols.clear();
  Index r = 0;
  for (Index j = 0; j < n && r < m; ++j) {
    Index piv = -1;
    for (Index i = r; i < m; ++i)
      if (a(i, j)) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != r) {
      a.row(piv).swap(a.row(r));
      std::swap(perm[piv], perm[r]);
    }
    u64 iv = inv(a(r, j), p);
    for (Index i = r + 1; i < m; ++i) {
      if (!a(i, j)) continue;
      u64 f = mul(a(i, j), iv, p);
      for (Index k = j; k < n; ++k)
        if (a(r, k)) a(i, k) = sub(a(i, k), mul(f, a(r, k), p), p);
    }
    rows.push_back(perm[r]);
    cols.push_back(j);
    ++r;
  }
}

}  // namespace

bool is_nonsingular(const IntMatrix& a) {
  if (a.rows() != a.cols()) return false;
  const Index n = a.rows();
  for (size_t t = 0; t < 3; ++t) {
    modp::u64 p = modp::primes(3)[t];
    std::vector<Index> rows, cols;
    rank_profile(modp::reduce(a, p), p, rows, cols);
    const Index r = static_cast<Index>(rows.size());
    if (r == n) return true;
    // A kernel vector with one free coordinate set to 1 certifies singularity.
    std::vector<char> is_pivot(static_cast<size_t>(n), 0);
    for (Index c : cols) is_pivot[c] = 1;
    Index f = 0;
    while (is_pivot[f]) ++f;
    IntMatrix m(r, r), rhs(r, 1);
    for (Index i = 0; i < r; ++i) {
      for (Index j = 0; j < r; ++j) m(i, j) = a(rows[i], cols[j]);
      rhs(i, 0) = -a(rows[i], f);
    }
    RationalSolution y = solve(m, rhs);
    IntMatrix x = IntMatrix::Zero(n, 1);
    for (Index j = 0; j < r; ++j) x(cols[j], 0) = y.numer(j, 0);
    x(f, 0) = y.denom;
    if (is_zero(multiply(a, x))) return false;
  }
  return determinant(a) != 0;
}

RationalSolution solve_bareiss(const IntMatrix& a, const IntMatrix& b) {
  const Index n = a.rows(), k = b.cols();
  if (a.cols() != n || b.rows() != n) throw Error(ErrorKind::DimensionMismatch, "solve: shape mismatch");
  IntMatrix m(n, n + k);
  m.leftCols(n) = a;
  m.rightCols(k) = b;
  Integer prev = 1;
  for (Index j = 0; j < n; ++j) {
    Index piv = -1;
    for (Index i = j; i < n; ++i)
      if (m(i, j) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) throw Error(ErrorKind::SingularOperator, "solve: matrix is singular");
    if (piv != j) m.row(piv).swap(m.row(j));
    for (Index i = j + 1; i < n; ++i) {
      for (Index c = j + 1; c < n + k; ++c) {
        Integer v = m(j, j) * m(i, c) - m(i, j) * m(j, c);
        mpz_divexact(m(i, c).get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
      }
      m(i, j) = 0;
    }
    prev = m(j, j);
  }
  Integer det = m(n - 1, n - 1);
  IntMatrix x(n, k);
  for (Index c = 0; c < k; ++c)
    for (Index i = n - 1; i >= 0; --i) {
      Integer s = det * m(i, n + c);
      for (Index j = i + 1; j < n; ++j) s -= m(i, j) * x(j, c);
      mpz_divexact(x(i, c).get_mpz_t(), s.get_mpz_t(), m(i, i).get_mpz_t());
    }
  return normalize(std::move(x), det);
}

RationalSolution solve(const IntMatrix& a, const IntMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != a.rows())
    throw Error(ErrorKind::DimensionMismatch, "solve: shape mismatch");
  if (a.rows() == 0) return {IntMatrix(0, b.cols()), Integer(1)};
  if (a.rows() > 8 && lifting_fits(a, b)) return solve_dixon(a, b);
  return solve_bareiss(a, b);
}

RatMatrix inverse(const RatMatrix& a) {
  auto [ai, den] = clear_denominators(a);
  RationalSolution s = solve(ai, identity_matrix(a.rows()));
  // a = ai/den, so a^{-1} = den * ai^{-1}
  RatMatrix out(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) {
      out(i, j) = Rational(s.numer(i, j) * den, s.denom);
      out(i, j).canonicalize();
    }
  return out;
}

IntMatrix integer_kernel(const IntMatrix& m) {
  HnfResult h = hnf(IntMatrix(m.transpose()));
  const Index r = static_cast<Index>(h.pivots.size());
  IntMatrix k = h.U.bottomRows(m.cols() - r);
  if (k.rows() == 0) return IntMatrix(0, m.cols());
  return hnf_basis(k);
}

RatMatrix rational_kernel(const RatMatrix& m) {
  IntMatrix mi(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    Integer den = 1;
    for (Index j = 0; j < m.cols(); ++j) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), m(i, j).get_den_mpz_t());
    for (Index j = 0; j < m.cols(); ++j) mi(i, j) = den / Integer(m(i, j).get_den()) * Integer(m(i, j).get_num());
  }
  return to_rational(integer_kernel(mi));
}

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorKind::DimensionMismatch, "multiply: shape mismatch");
  size_t kbits = 1;
  while ((Index(1) << kbits) <= a.cols()) ++kbits;
  IntMatrix out = IntMatrix::Zero(a.rows(), b.cols());
  if (max_bits(a) + max_bits(b) + kbits <= 62) {
    Matrix<std::int64_t> bi(b.rows(), b.cols());
    for (Index i = 0; i < b.rows(); ++i)
      for (Index j = 0; j < b.cols(); ++j) bi(i, j) = b(i, j).get_si();
    std::vector<std::int64_t> acc(static_cast<size_t>(b.cols()));
    for (Index i = 0; i < a.rows(); ++i) {
      std::fill(acc.begin(), acc.end(), 0);
      for (Index k = 0; k < a.cols(); ++k) {
        if (a(i, k) == 0) continue;
        const std::int64_t c = a(i, k).get_si();
        const std::int64_t* row = bi.data() + k * b.cols();
        for (Index j = 0; j < b.cols(); ++j) acc[j] += c * row[j];
      }
      for (Index j = 0; j < b.cols(); ++j)
        if (acc[j]) out(i, j) = static_cast<long>(acc[j]);
    }
    return out;
  }
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = 0; k < a.cols(); ++k)
      if (a(i, k) != 0) row_addmul(out.row(i), a(i, k), b.row(k));
  return out;
}

}  // namespace mtors
