#include "mtors/normal_form.hpp"

#include <algorithm>
#include <cstdint>
#include <utility>

namespace mtors {

namespace {

template <bool WithU>
void hnf_impl(IntMatrix& a, IntMatrix* u, std::vector<Index>& pivots) {
  const Index m = a.rows(), n = a.cols();
  Index row = 0;
  Integer q;
  for (Index j = 0; j < n && row < m; ++j) {
    bool found = false;
    for (;;) {
      Index best = -1;
      for (Index i = row; i < m; ++i) {
        if (a(i, j) == 0) continue;
        if (best < 0 || cmpabs(a(i, j), a(best, j)) < 0) best = i;
      }
      if (best < 0) break;
      found = true;
      if (best != row) {
        a.row(best).swap(a.row(row));
        if constexpr (WithU) u->row(best).swap(u->row(row));
      }
      bool clear = true;
      for (Index i = row + 1; i < m; ++i) {
        if (a(i, j) == 0) continue;
        q = floor_div(a(i, j), a(row, j));
        row_submul(a.row(i), q, a.row(row));
        if constexpr (WithU) row_submul(u->row(i), q, u->row(row));
        if (a(i, j) != 0) clear = false;
      }
      if (clear) break;
    }
    if (!found) continue;
    if (a(row, j) < 0) {
      a.row(row) = -a.row(row);
      if constexpr (WithU) u->row(row) = -u->row(row);
    }
    for (Index i = 0; i < row; ++i) {
      if (a(i, j) >= 0 && a(i, j) < a(row, j)) continue;
      q = floor_div(a(i, j), a(row, j));
      row_submul(a.row(i), q, a.row(row));
      if constexpr (WithU) row_submul(u->row(i), q, u->row(row));
    }
    pivots.push_back(j);
    ++row;
  }
}

void reduce_mod(Integer& x, const Integer& m) { mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t()); }

bool all_zero_from(const std::vector<Integer>& r, Index j) {
  for (Index k = j; k < static_cast<Index>(r.size()); ++k)
    if (r[k] != 0) return false;
  return true;
}

}  // namespace

HnfResult hnf(const IntMatrix& m) {
  HnfResult res;
  IntMatrix a = m;
  IntMatrix u = identity_matrix(m.rows());
  hnf_impl<true>(a, &u, res.pivots);
  const Index rank = static_cast<Index>(res.pivots.size());
  res.H = a.topRows(rank);
  res.U = std::move(u);
  return res;
}

IntMatrix hnf_basis(const IntMatrix& m, std::vector<Index>* pivots) {
  IntMatrix a = m;
  std::vector<Index> piv;
  hnf_impl<false>(a, nullptr, piv);
  IntMatrix h = a.topRows(static_cast<Index>(piv.size()));
  if (pivots) *pivots = std::move(piv);
  return h;
}

namespace {

IntMatrix hnf_mod_big(const IntMatrix& gens, const Integer& modulus);

// hnf_mod with all residues in machine words.  Mul is (a, b) -> a * b mod R
// for 0 <= a, b < R.
template <typename Mul>
IntMatrix hnf_mod_word(const IntMatrix& gens, const std::int64_t R, Mul mul) {
  using i64 = std::int64_t;
  const Index n = gens.cols();
  auto red = [R](i64 x) { x %= R; return x < 0 ? x + R : x; };
  auto add = [R](i64 a, i64 b) { i64 s = a + b; return s >= R ? s - R : s; };
  auto sub = [R](i64 a, i64 b) { i64 s = a - b; return s < 0 ? s + R : s; };
  auto egcd = [](i64 a, i64 b, i64& s, i64& t) {
    i64 s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (b != 0) {
      i64 q = a / b, r = a - q * b;
      a = b;
      b = r;
      i64 x = s0 - q * s1;
      s0 = s1;
      s1 = x;
      x = t0 - q * t1;
      t0 = t1;
      t1 = x;
    }
    s = s0;
    t = t0;
    return a;
  };
  std::vector<std::vector<i64>> rows;
  for (Index i = 0; i < gens.rows(); ++i) {
    std::vector<i64> r(static_cast<size_t>(n));
    bool nz = false;
    for (Index k = 0; k < n; ++k) {
      const Integer& x = gens(i, k);
      r[k] = x.fits_slong_p() ? red(x.get_si()) : static_cast<i64>(mpz_fdiv_ui(x.get_mpz_t(), static_cast<unsigned long>(R)));
      if (r[k]) nz = true;
    }
    if (nz) rows.push_back(std::move(r));
  }
  std::vector<std::vector<i64>> w(static_cast<size_t>(n), std::vector<i64>(static_cast<size_t>(n), 0));
  std::vector<char> touched;
  for (Index j = 0; j < n; ++j) {
    long piv = -1;
    touched.assign(rows.size(), 0);
    for (size_t i = 0; i < rows.size(); ++i) {
      auto& r = rows[i];
      if (r[j] == 0) continue;
      touched[i] = 1;
      if (piv < 0) {
        piv = static_cast<long>(i);
        continue;
      }
      auto& P = rows[static_cast<size_t>(piv)];
      i64 s, t;
      const i64 g = egcd(P[j], r[j], s, t);
      const i64 a = P[j] / g, b = r[j] / g;
      s = red(s);
      t = red(t);
      for (Index k = j; k < n; ++k) {
        const i64 pk = P[k], rk = r[k];
        if (pk == 0 && rk == 0) continue;
        P[k] = add(mul(s, pk), mul(t, rk));
        r[k] = sub(mul(a, rk), mul(b, pk));
      }
    }
    auto& W = w[static_cast<size_t>(j)];
    if (piv < 0) {
      W[j] = R;
      continue;
    }
    auto& P = rows[static_cast<size_t>(piv)];
    i64 u, v;
    const i64 d = egcd(P[j], R, u, v);
    u = red(u);
    W[j] = d;
    for (Index k = j + 1; k < n; ++k) W[k] = mul(u, P[k]);
    const i64 a = P[j] / d;
    P[j] = 0;
    for (Index k = j + 1; k < n; ++k)
      if (W[k]) P[k] = sub(P[k], mul(a, W[k]));
    if (d != 1) {
      const i64 b = R / d;
      std::vector<i64> extra(static_cast<size_t>(n), 0);
      bool nz = false;
      for (Index k = j + 1; k < n; ++k) {
        extra[k] = mul(b, W[k]);
        if (extra[k]) nz = true;
      }
      if (nz) {
        rows.push_back(std::move(extra));
        touched.push_back(0);
      }
    }
    for (size_t i = rows.size(); i-- > 0;) {
      if (!touched[i]) continue;
      bool zero = true;
      for (Index k = j + 1; k < n && zero; ++k) zero = rows[i][k] == 0;
      if (zero) {
        std::swap(rows[i], rows.back());
        rows.pop_back();
      }
    }
  }
  // Rows may be shifted by R e_k without leaving the lattice, so every entry
  // stays in [0, R) while reducing above the pivots.
  for (Index j = 0; j < n; ++j) {
    const auto& Wj = w[static_cast<size_t>(j)];
    for (Index i = 0; i < j; ++i) {
      auto& Wi = w[static_cast<size_t>(i)];
      if (Wi[j] < Wj[j]) continue;
      const i64 q = Wi[j] / Wj[j];
      Wi[j] -= q * Wj[j];
      for (Index k = j + 1; k < n; ++k)
        if (Wj[k]) Wi[k] = sub(Wi[k], mul(q, Wj[k]));
    }
  }
  IntMatrix out = IntMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index k = i; k < n; ++k)
      if (w[i][k]) out(i, k) = static_cast<long>(w[i][k]);
  return out;
}

}  // namespace

IntMatrix hnf_mod(const IntMatrix& gens, const Integer& modulus) {
  if (modulus <= 0) throw Error(ErrorKind::DimensionMismatch, "hnf_mod needs a positive modulus");
  if (modulus < (Integer(1) << 31)) {
    const auto r = static_cast<std::uint64_t>(modulus.get_ui());
    return hnf_mod_word(gens, static_cast<std::int64_t>(r),
                        [r](std::int64_t a, std::int64_t b) { return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b) % r); });
  }
  if (modulus < (Integer(1) << 62)) {
    const auto r = static_cast<unsigned __int128>(modulus.get_ui());
    return hnf_mod_word(gens, static_cast<std::int64_t>(modulus.get_ui()), [r](std::int64_t a, std::int64_t b) {
      return static_cast<std::int64_t>(static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b) % r);
    });
  }
  return hnf_mod_big(gens, modulus);
}

namespace {

IntMatrix hnf_mod_big(const IntMatrix& gens, const Integer& modulus) {
  const Index n = gens.cols();
  const Integer& R = modulus;
  IntMatrix w = IntMatrix::Zero(n, n);
  std::vector<std::vector<Integer>> rows;
  rows.reserve(static_cast<size_t>(gens.rows()));
  for (Index i = 0; i < gens.rows(); ++i) {
    std::vector<Integer> r(static_cast<size_t>(n));
    bool nz = false;
    for (Index k = 0; k < n; ++k) {
      r[k] = gens(i, k);
      reduce_mod(r[k], R);
      if (r[k] != 0) nz = true;
    }
    if (nz) rows.push_back(std::move(r));
  }
  Integer g, s, t, a, b, tmp, d, u, v;
  std::vector<char> touched;
  for (Index j = 0; j < n; ++j) {
    long piv = -1;
    touched.assign(rows.size(), 0);
    for (size_t i = 0; i < rows.size(); ++i) {
      auto& r = rows[i];
      if (r[j] == 0) continue;
      touched[i] = 1;
      if (piv < 0) {
        piv = static_cast<long>(i);
        continue;
      }
      auto& P = rows[static_cast<size_t>(piv)];
      xgcd(g, s, t, P[j], r[j]);
      mpz_divexact(a.get_mpz_t(), P[j].get_mpz_t(), g.get_mpz_t());
      mpz_divexact(b.get_mpz_t(), r[j].get_mpz_t(), g.get_mpz_t());
      for (Index k = j; k < n; ++k) {
        if (P[k] == 0 && r[k] == 0) continue;
        mpz_mul(tmp.get_mpz_t(), s.get_mpz_t(), P[k].get_mpz_t());
        mpz_addmul(tmp.get_mpz_t(), t.get_mpz_t(), r[k].get_mpz_t());
        mpz_mul(r[k].get_mpz_t(), a.get_mpz_t(), r[k].get_mpz_t());
        mpz_submul(r[k].get_mpz_t(), b.get_mpz_t(), P[k].get_mpz_t());
        reduce_mod(r[k], R);
        reduce_mod(tmp, R);
        mpz_swap(P[k].get_mpz_t(), tmp.get_mpz_t());
      }
    }
    if (piv < 0) {
      w(j, j) = R;
      continue;
    }
    auto& P = rows[static_cast<size_t>(piv)];
    xgcd(d, u, v, P[j], R);
    w(j, j) = d;
    for (Index k = j + 1; k < n; ++k) {
      mpz_mul(w(j, k).get_mpz_t(), u.get_mpz_t(), P[k].get_mpz_t());
      reduce_mod(w(j, k), R);
    }
    // Replace P by P - (P_j/d) W_j and add (R/d) W_j; both vanish at column j.
    mpz_divexact(a.get_mpz_t(), P[j].get_mpz_t(), d.get_mpz_t());
    P[j] = 0;
    for (Index k = j + 1; k < n; ++k) {
      mpz_submul(P[k].get_mpz_t(), a.get_mpz_t(), w(j, k).get_mpz_t());
      reduce_mod(P[k], R);
    }
    if (d != 1) {
      mpz_divexact(b.get_mpz_t(), R.get_mpz_t(), d.get_mpz_t());
      std::vector<Integer> extra(static_cast<size_t>(n));
      bool nz = false;
      for (Index k = j + 1; k < n; ++k) {
        mpz_mul(extra[k].get_mpz_t(), b.get_mpz_t(), w(j, k).get_mpz_t());
        reduce_mod(extra[k], R);
        if (extra[k] != 0) nz = true;
      }
      if (nz) {
        rows.push_back(std::move(extra));
        touched.push_back(0);
      }
    }
    for (size_t i = rows.size(); i-- > 0;) {
      if (!touched[i]) continue;
      if (all_zero_from(rows[i], j + 1)) {
        std::swap(rows[i], rows.back());
        rows.pop_back();
      }
    }
  }
  Integer q;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      if (w(i, j) >= 0 && w(i, j) < w(j, j)) continue;
      q = floor_div(w(i, j), w(j, j));
      for (Index k = j; k < n; ++k)
        if (w(j, k) != 0) mpz_submul(w(i, k).get_mpz_t(), q.get_mpz_t(), w(j, k).get_mpz_t());
    }
  }
  return w;
}

}  // namespace

IntMatrix solutions_mod(const IntMatrix& z, const Integer& m) {
  const Index k = z.rows(), s = z.cols();
  IntMatrix gens = IntMatrix::Zero(k, s + k);
  gens.leftCols(s) = z;
  for (Index i = 0; i < k; ++i) gens(i, s + i) = 1;
  IntMatrix w = hnf_mod(gens, m);
  return w.bottomRightCorner(k, k);
}

SnfResult snf(const IntMatrix& m) {
  const Index rows = m.rows(), cols = m.cols();
  IntMatrix a = m;
  IntMatrix u = identity_matrix(rows);
  IntMatrix v = identity_matrix(cols);
  Integer q;
  const Index lim = std::min(rows, cols);
  for (Index t = 0; t < lim; ++t) {
    for (;;) {
      Index bi = -1, bj = -1;
      for (Index i = t; i < rows; ++i)
        for (Index j = t; j < cols; ++j)
          if (a(i, j) != 0 && (bi < 0 || cmpabs(a(i, j), a(bi, bj)) < 0)) {
            bi = i;
            bj = j;
          }
      if (bi < 0) break;
      if (bi != t) {
        a.row(bi).swap(a.row(t));
        u.row(bi).swap(u.row(t));
      }
      if (bj != t) {
        a.col(bj).swap(a.col(t));
        v.col(bj).swap(v.col(t));
      }
      bool dirty = false;
      for (Index i = t + 1; i < rows; ++i) {
        if (a(i, t) == 0) continue;
        q = floor_div(a(i, t), a(t, t));
        row_submul(a.row(i), q, a.row(t));
        row_submul(u.row(i), q, u.row(t));
        if (a(i, t) != 0) dirty = true;
      }
      for (Index j = t + 1; j < cols; ++j) {
        if (a(t, j) == 0) continue;
        q = floor_div(a(t, j), a(t, t));
        for (Index i = 0; i < rows; ++i)
          if (a(i, t) != 0) mpz_submul(a(i, j).get_mpz_t(), q.get_mpz_t(), a(i, t).get_mpz_t());
        for (Index i = 0; i < cols; ++i)
          if (v(i, t) != 0) mpz_submul(v(i, j).get_mpz_t(), q.get_mpz_t(), v(i, t).get_mpz_t());
        if (a(t, j) != 0) dirty = true;
      }
      if (dirty) continue;
      // Divisibility: fold an offending row into row t and retry.
      Index bad = -1;
      for (Index i = t + 1; i < rows && bad < 0; ++i)
        for (Index j = t + 1; j < cols; ++j)
          if (a(i, j) != 0 && !mpz_divisible_p(a(i, j).get_mpz_t(), a(t, t).get_mpz_t())) {
            bad = i;
            break;
          }
      if (bad < 0) break;
      row_addmul(a.row(t), Integer(1), a.row(bad));
      row_addmul(u.row(t), Integer(1), u.row(bad));
    }
    if (a(t, t) < 0) {
      a.row(t) = -a.row(t);
      u.row(t) = -u.row(t);
    }
  }
  return {std::move(a), std::move(u), std::move(v)};
}

std::vector<Integer> elementary_divisors(const IntMatrix& m) {
  SnfResult s = snf(m);
  std::vector<Integer> out;
  for (Index i = 0; i < std::min(m.rows(), m.cols()); ++i)
    if (s.D(i, i) != 0) out.push_back(s.D(i, i));
  return out;
}

std::vector<Integer> normalize_chain(std::vector<Integer> diag) {
  std::vector<Integer> a;
  for (auto& x : diag) {
    Integer y = abs(x);
    if (y != 1) a.push_back(y);
  }
  Integer g, l;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = i + 1; j < a.size(); ++j) {
      mpz_gcd(g.get_mpz_t(), a[i].get_mpz_t(), a[j].get_mpz_t());
      mpz_lcm(l.get_mpz_t(), a[i].get_mpz_t(), a[j].get_mpz_t());
      a[i] = g;
      a[j] = l;
    }
  std::vector<Integer> out;
  for (auto& x : a)
    if (x != 1) out.push_back(x);
  return out;
}

std::vector<Integer> cokernel_invariants(const IntMatrix& m, const Integer& det_multiple) {
  const Index k = m.rows();
  if (m.cols() != k) throw Error(ErrorKind::DimensionMismatch, "cokernel_invariants needs a square matrix");
  const Integer& D = det_multiple;
  IntMatrix a = m;
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) reduce_mod(a(i, j), D);
  Integer g, s, t, x, y, tmp;
  for (Index c = 0; c < k; ++c) {
    for (;;) {
      bool changed = false;
      // column c: gather the gcd into row c
      for (Index i = c + 1; i < k; ++i) {
        if (a(i, c) == 0) continue;
        if (a(c, c) == 0) {
          a.row(i).swap(a.row(c));
          continue;
        }
        if (mpz_divisible_p(a(i, c).get_mpz_t(), a(c, c).get_mpz_t())) {
          mpz_divexact(y.get_mpz_t(), a(i, c).get_mpz_t(), a(c, c).get_mpz_t());
          for (Index j = c; j < k; ++j) {
            mpz_submul(a(i, j).get_mpz_t(), y.get_mpz_t(), a(c, j).get_mpz_t());
            reduce_mod(a(i, j), D);
          }
          continue;
        }
        xgcd(g, s, t, a(c, c), a(i, c));
        mpz_divexact(x.get_mpz_t(), a(c, c).get_mpz_t(), g.get_mpz_t());
        mpz_divexact(y.get_mpz_t(), a(i, c).get_mpz_t(), g.get_mpz_t());
        for (Index j = c; j < k; ++j) {
          tmp = s * a(c, j) + t * a(i, j);
          a(i, j) = x * a(i, j) - y * a(c, j);
          reduce_mod(a(i, j), D);
          reduce_mod(tmp, D);
          mpz_swap(a(c, j).get_mpz_t(), tmp.get_mpz_t());
        }
      }
      // row c: gather the gcd into column c
      for (Index j = c + 1; j < k; ++j) {
        if (a(c, j) == 0) continue;
        if (a(c, c) == 0) {
          a.col(j).swap(a.col(c));
          changed = true;
          continue;
        }
        if (mpz_divisible_p(a(c, j).get_mpz_t(), a(c, c).get_mpz_t())) {
          mpz_divexact(y.get_mpz_t(), a(c, j).get_mpz_t(), a(c, c).get_mpz_t());
          for (Index i = c; i < k; ++i) {
            mpz_submul(a(i, j).get_mpz_t(), y.get_mpz_t(), a(i, c).get_mpz_t());
            reduce_mod(a(i, j), D);
          }
          continue;
        }
        xgcd(g, s, t, a(c, c), a(c, j));
        mpz_divexact(x.get_mpz_t(), a(c, c).get_mpz_t(), g.get_mpz_t());
        mpz_divexact(y.get_mpz_t(), a(c, j).get_mpz_t(), g.get_mpz_t());
        for (Index i = c; i < k; ++i) {
          tmp = s * a(i, c) + t * a(i, j);
          a(i, j) = x * a(i, j) - y * a(i, c);
          reduce_mod(a(i, j), D);
          reduce_mod(tmp, D);
          mpz_swap(a(i, c).get_mpz_t(), tmp.get_mpz_t());
        }
        changed = true;
      }
      bool col_clear = true;
      for (Index i = c + 1; i < k; ++i)
        if (a(i, c) != 0) col_clear = false;
      if (col_clear || !changed) break;
    }
  }
  std::vector<Integer> diag;
  for (Index i = 0; i < k; ++i) {
    Integer d;
    mpz_gcd(d.get_mpz_t(), a(i, i).get_mpz_t(), D.get_mpz_t());
    diag.push_back(d);
  }
  return normalize_chain(std::move(diag));
}

std::vector<Integer> hnf_cokernel_invariants(const IntMatrix& w) {
  std::vector<Index> s;
  Integer det = 1;
  for (Index j = 0; j < w.rows(); ++j)
    if (w(j, j) != 1) {
      s.push_back(j);
      det *= w(j, j);
    }
  if (s.empty()) return {};
  const Index k = static_cast<Index>(s.size());
  IntMatrix sub(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) sub(i, j) = w(s[i], s[j]);
  return cokernel_invariants(sub, det);
}

}  // namespace mtors
