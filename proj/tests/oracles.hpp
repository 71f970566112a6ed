#pragma once

// Brute-force reference implementations for small instances.  Nothing here
// calls the normal-form code under test.

#include "mtors/lattice.hpp"
#include "mtors/normal_form.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using mtors::Index;
using mtors::IntMatrix;
using mtors::IntRow;
using mtors::Integer;

inline Integer gcd(const Integer& a, const Integer& b) {
  Integer g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline Integer fdiv(const Integer& a, const Integer& b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

// Textbook HNF by repeated smallest-entry reduction.
inline IntMatrix naive_hnf(IntMatrix a) {
  Index r = 0;
  for (Index c = 0; c < a.cols() && r < a.rows(); ++c) {
    for (;;) {
      Index best = -1;
      for (Index i = r; i < a.rows(); ++i)
        if (a(i, c) != 0 && (best < 0 || abs(a(i, c)) < abs(a(best, c)))) best = i;
      if (best < 0) break;
      a.row(r).swap(a.row(best));
      bool done = true;
      for (Index i = r + 1; i < a.rows(); ++i) {
        if (a(i, c) == 0) continue;
        Integer q = fdiv(a(i, c), a(r, c));
        for (Index j = 0; j < a.cols(); ++j) a(i, j) -= q * a(r, j);
        if (a(i, c) != 0) done = false;
      }
      if (done) break;
    }
    if (r < a.rows() && a(r, c) != 0) {
      if (a(r, c) < 0)
        for (Index j = 0; j < a.cols(); ++j) a(r, j) = -a(r, j);
      for (Index i = 0; i < r; ++i) {
        Integer q = fdiv(a(i, c), a(r, c));
        for (Index j = 0; j < a.cols(); ++j) a(i, j) -= q * a(r, j);
      }
      ++r;
    }
  }
  return a.topRows(r);
}

inline Integer cofactor_det(const IntMatrix& m) {
  const Index n = m.rows();
  if (n == 0) return 1;
  if (n == 1) return m(0, 0);
  Integer s = 0;
  for (Index j = 0; j < n; ++j) {
    if (m(0, j) == 0) continue;
    IntMatrix sub(n - 1, n - 1);
    for (Index i = 1; i < n; ++i)
      for (Index k = 0, c = 0; k < n; ++k)
        if (k != j) sub(i - 1, c++) = m(i, k);
    Integer t = m(0, j) * cofactor_det(sub);
    s += (j % 2 == 0) ? t : Integer(-t);
  }
  return s;
}

inline void combinations(Index n, Index k, const std::function<void(const std::vector<Index>&)>& f) {
  std::vector<Index> c(static_cast<size_t>(k));
  std::function<void(Index, Index)> rec = [&](Index start, Index depth) {
    if (depth == k) {
      f(c);
      return;
    }
    for (Index i = start; i < n; ++i) {
      c[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
}

// Nonzero Smith diagonal via gcds of k x k minors.
inline std::vector<Integer> determinantal_divisors(const IntMatrix& m) {
  std::vector<Integer> out;
  Integer prev = 1;
  for (Index k = 1; k <= std::min(m.rows(), m.cols()); ++k) {
    Integer g = 0;
    combinations(m.rows(), k, [&](const std::vector<Index>& rs) {
      combinations(m.cols(), k, [&](const std::vector<Index>& cs) {
        IntMatrix sub(k, k);
        for (Index i = 0; i < k; ++i)
          for (Index j = 0; j < k; ++j) sub(i, j) = m(rs[i], cs[j]);
        g = gcd(g, cofactor_det(sub));
      });
    });
    if (g == 0) break;
    out.push_back(g / prev);
    prev = g;
  }
  return out;
}

// Reduce an integer row modulo the row span of a full-rank square HNF.
inline IntRow reduce(IntRow x, const IntMatrix& w) {
  for (Index i = 0; i < w.rows(); ++i) {
    Integer q = fdiv(x(i), w(i, i));
    for (Index j = i; j < w.cols(); ++j) x(j) -= q * w(i, j);
  }
  return x;
}

inline bool in_rowspan(const IntRow& x, const IntMatrix& h) {
  IntRow y = x;
  for (Index i = 0; i < h.rows(); ++i) {
    Index p = 0;
    while (h(i, p) == 0) ++p;
    if (y(p) % h(i, p) != 0) return false;
    Integer q = y(p) / h(i, p);
    for (Index j = 0; j < y.size(); ++j) y(j) -= q * h(i, j);
  }
  for (Index j = 0; j < y.size(); ++j)
    if (y(j) != 0) return false;
  return true;
}

// Invariant chain of a finite abelian group given by its elements and the
// map x -> k*x, via counts of ell^k-torsion.
struct Group {
  std::vector<IntRow> elems;
  std::function<IntRow(const IntRow&, long)> mul;
  IntRow zero;
};

inline std::vector<Integer> group_chain(const Group& g) {
  const long order = static_cast<long>(g.elems.size());
  std::map<long, std::vector<long>> parts;
  long n = order;
  for (long ell = 2; ell <= n; ++ell) {
    if (n % ell) continue;
    while (n % ell == 0) n /= ell;
    std::vector<long> counts{1};
    long pw = ell;
    for (;;) {
      long c = 0;
      for (auto& x : g.elems)
        if (g.mul(x, pw) == g.zero) ++c;
      if (c == counts.back()) break;
      counts.push_back(c);
      pw *= ell;
    }
    // number of cyclic factors with exponent >= k is log(counts[k]/counts[k-1])
    std::vector<long> ge;
    for (size_t k = 1; k < counts.size(); ++k) {
      long r = counts[k] / counts[k - 1], e = 0;
      while (r > 1) {
        r /= ell;
        ++e;
      }
      ge.push_back(e);
    }
    std::vector<long> exps(ge.empty() ? 0 : static_cast<size_t>(ge[0]), 0);
    for (long k = 0; k < static_cast<long>(ge.size()); ++k)
      for (long i = 0; i < ge[k]; ++i) exps[i] = k + 1;
    for (long& e : exps) {
      long v = 1;
      for (long i = 0; i < e; ++i) v *= ell;
      e = v;
    }
    parts[ell] = exps;
  }
  size_t len = 0;
  for (auto& [ell, v] : parts) len = std::max(len, v.size());
  std::vector<Integer> chain(len, 1);
  for (auto& [ell, v] : parts)
    for (size_t i = 0; i < v.size(); ++i) chain[i] *= v[i];
  std::reverse(chain.begin(), chain.end());
  return chain;
}

// Elements of L/H with L = rowspan(l), H = rowspan(h) integral and H of
// full rank: representatives of Z^n/H lying in L.
inline Group quotient(const IntMatrix& l, const IntMatrix& h) {
  const Index n = h.cols();
  IntMatrix w = naive_hnf(h), lh = naive_hnf(l);
  Group g;
  g.zero = IntRow::Zero(n);
  IntRow x = IntRow::Zero(n);
  std::function<void(Index)> rec = [&](Index i) {
    if (i == n) {
      if (in_rowspan(x, lh)) g.elems.push_back(x);
      return;
    }
    for (Integer v = 0; v < w(i, i); ++v) {
      x(i) = v;
      rec(i + 1);
    }
    x(i) = 0;
  };
  rec(0);
  g.mul = [w](const IntRow& y, long k) { return reduce(IntRow(y * Integer(k)), w); };
  return g;
}

// Elements x of L/H with phi x == x mod H (phi acting on columns).
inline Group fixed(const Group& g, const IntMatrix& phi, const IntMatrix& h) {
  IntMatrix w = naive_hnf(h);
  Group out;
  out.zero = g.zero;
  out.mul = g.mul;
  for (auto& x : g.elems) {
    IntRow y = IntRow(x * phi.transpose()) - x;
    if (reduce(y, w) == g.zero) out.elems.push_back(x);
  }
  return out;
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  long uniform(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(gen); }
  IntMatrix matrix(Index r, Index c, long bound) {
    IntMatrix m(r, c);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < c; ++j) m(i, j) = uniform(-bound, bound);
    return m;
  }
};

inline bool is_hnf(const IntMatrix& h) {
  Index last = -1;
  for (Index i = 0; i < h.rows(); ++i) {
    Index p = 0;
    while (p < h.cols() && h(i, p) == 0) ++p;
    if (p == h.cols() || p <= last || h(i, p) <= 0) return false;
    for (Index k = 0; k < i; ++k)
      if (h(k, p) < 0 || h(k, p) >= h(i, p)) return false;
    last = p;
  }
  return true;
}

// Rowspan of `rows` closed under x -> x phi^T, plus m Z^n.
inline IntMatrix stable_hull(IntMatrix rows, const IntMatrix& phi, long m) {
  const Index n = phi.rows();
  IntMatrix cur = naive_hnf(IntMatrix(IntMatrix::Identity(n, n) * Integer(m)));
  for (int it = 0; it < 64; ++it) {
    IntMatrix st(cur.rows() + rows.rows(), n);
    st << cur, rows;
    IntMatrix next = naive_hnf(st);
    if (next == cur) return cur;
    cur = next;
    rows = cur * phi.transpose();
  }
  return cur;
}

struct SuiteResult {
  int cases = 0;
  int failures = 0;
  std::vector<std::string> messages;
  void fail(const std::string& m) {
    ++failures;
    if (messages.size() < 20) messages.push_back(m);
  }
};

// Random HNF / SNF / invariant_factors / fixed_subgroup comparisons.
inline SuiteResult run_suite(std::uint64_t seed, int instances) {
  using namespace mtors;
  SuiteResult res;
  Rng rng(seed);
  for (int t = 0; t < instances; ++t) {
    const int kind = t % 4;
    const std::string tag = "case " + std::to_string(t) + ": ";
    ++res.cases;
    if (kind == 0) {
      IntMatrix m = rng.matrix(rng.uniform(1, 6), rng.uniform(1, 6), 50);
      if (rng.uniform(0, 3) == 0 && m.rows() > 1) m.row(m.rows() - 1) = m.row(0) * Integer(rng.uniform(-3, 3));
      HnfResult r = hnf(m);
      IntMatrix ref = naive_hnf(m);
      if (r.H != ref) res.fail(tag + "hnf differs from reference");
      else if (!is_hnf(r.H)) res.fail(tag + "hnf not in normal form");
      IntMatrix um = r.U * m;
      if (um.topRows(r.H.rows()) != r.H || !is_zero(IntMatrix(um.bottomRows(m.rows() - r.H.rows()))))
        res.fail(tag + "U*M != H");
      if (abs(cofactor_det(r.U)) != 1) res.fail(tag + "U not unimodular");
      if (hnf_basis(r.H) != r.H) res.fail(tag + "hnf not idempotent");
    } else if (kind == 1) {
      IntMatrix m = rng.matrix(rng.uniform(1, 6), rng.uniform(1, 6), 50);
      SnfResult s = snf(m);
      std::vector<Integer> ref = determinantal_divisors(m), got;
      for (Index i = 0; i < std::min(s.D.rows(), s.D.cols()); ++i)
        if (s.D(i, i) != 0) got.push_back(s.D(i, i));
      if (got != ref) res.fail(tag + "snf diagonal differs from determinantal divisors");
      if (s.U * m * s.V != s.D) res.fail(tag + "D != U*M*V");
      if (abs(cofactor_det(s.U)) != 1 || abs(cofactor_det(s.V)) != 1) res.fail(tag + "snf transform not unimodular");
    } else if (kind == 2) {
      // L = rowspan(A), H = rowspan(B*A), |Z^n/H| <= 1000
      const Index n = rng.uniform(1, 4);
      IntMatrix a, b;
      Integer ia, ib;
      do {
        a = rng.matrix(n, n, 3);
        b = rng.matrix(n, n, 6);
        ia = abs(cofactor_det(a));
        ib = abs(cofactor_det(b));
      } while (ia == 0 || ib == 0 || ia * ib > 1000);
      IntMatrix h = b * a;
      Integer den = rng.uniform(1, 3);
      FinAbelianGroup g(Lattice::from_rows(a, den), Lattice::from_rows(h, den));
      auto ref = group_chain(quotient(a, h));
      if (invariant_factors(g) != ref) res.fail(tag + "invariant factors differ from enumeration");
      if (g.order() != ib) res.fail(tag + "order != index");
    } else {
      const Index n = rng.uniform(1, 3);
      IntMatrix phi = rng.matrix(n, n, 3);
      const long m = rng.uniform(2, 10);
      IntMatrix h = stable_hull(rng.matrix(rng.uniform(0, 2), n, 10), phi, m);
      // L = Z^n is phi-stable; pick H phi-stable of small index
      FinAbelianGroup g(Lattice::standard(n), Lattice::from_rows(h));
      FinAbelianGroup f = fixed_subgroup(g, to_rational(phi));
      auto ref = group_chain(fixed(quotient(IntMatrix::Identity(n, n), h), phi, h));
      if (invariant_factors(f) != ref) res.fail(tag + "fixed subgroup differs from enumeration");
    }
  }
  return res;
}

}  // namespace oracle
