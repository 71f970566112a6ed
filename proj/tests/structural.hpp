#pragma once

// Structural identities of the symbol space, the operators and the
// pipeline.  Each check returns a list of failures; empty means it held.

#include "mtors/cusps.hpp"
#include "mtors/hecke.hpp"
#include "mtors/manin.hpp"
#include "mtors/modular.hpp"
#include "mtors/torsion.hpp"

#include <numeric>
#include <string>
#include <vector>

namespace structural {

using namespace mtors;

using Failures = std::vector<std::string>;

inline void expect(Failures& f, bool ok, const std::string& what) {
  if (!ok) f.push_back(what);
}

inline std::string at(long n) { return " at N = " + std::to_string(n); }

inline Failures counts(long p) {
  Failures f;
  const long g = genus_x1(p);
  SymbolSpace s = SymbolSpace::build(p);
  expect(f, static_cast<long>(enumerate_manin_symbols(p).size()) == (p * p - 1) / 2, "symbol count" + at(p));
  expect(f, static_cast<long>(s.cusps().size()) == p - 1, "cusp count" + at(p));
  expect(f, s.rank() == 2 * g + p - 2, "symbol space rank" + at(p));
  expect(f, s.cuspidal().rank() == 2 * g, "cuspidal rank" + at(p));
  return f;
}

// Two- and three-term relations hold in the computed coordinates.
inline Failures relations(long n) {
  Failures f;
  SymbolSpace s = SymbolSpace::build(n);
  for (Index i = 0; i < static_cast<Index>(s.symbols().size()); ++i) {
    const ManinSymbol x = s.symbols()[i];
    ManinSymbol xs = act(x, kS, n), xt = act(x, kT, n), xtt = act(xt, kT, n);
    IntRow a = s.dense_coords(i);
    IntRow b = s.dense_coords(s.symbol_index(xs.u, xs.v));
    IntRow c = s.dense_coords(s.symbol_index(xt.u, xt.v));
    IntRow d = s.dense_coords(s.symbol_index(xtt.u, xtt.v));
    if (!is_zero(IntMatrix(a + b))) {
      f.push_back("x + xS != 0" + at(n));
      break;
    }
    if (!is_zero(IntMatrix(a + c + d))) {
      f.push_back("x + xT + xT^2 != 0" + at(n));
      break;
    }
  }
  return f;
}

// T_n straight from the Heilbronn family of determinant n.
inline IntMatrix direct_hecke(const SymbolSpace& s, long n) {
  const long N = s.level();
  const auto hs = heilbronn_matrices(n);
  auto mod = [N](long a) { return ((a % N) + N) % N; };
  return symbol_operator(s, [&](const ManinSymbol& x, std::vector<ManinSymbol>& out) {
    for (auto& g : hs) out.push_back({mod(x.u * g.a + x.v * g.c), mod(x.u * g.b + x.v * g.d)});
  });
}

inline Failures operator_identities(long n) {
  Failures f;
  SymbolSpace s = SymbolSpace::build(n);
  const IntMatrix id = identity_matrix(s.rank());
  std::vector<std::pair<std::string, IntMatrix>> ops;
  for (long q : {2L, 3L, 5L, 7L})
    if (n % q) ops.emplace_back("T" + std::to_string(q), hecke_matrix(s, q).matrix());
  for (long d : {2L, 3L})
    if (std::gcd(d, n) == 1) ops.emplace_back("<" + std::to_string(d) + ">", diamond_matrix(s, d).matrix());
  const IntMatrix star = star_matrix(s).matrix();
  ops.emplace_back("iota", star);
  for (size_t i = 0; i < ops.size(); ++i)
    for (size_t j = i + 1; j < ops.size(); ++j)
      expect(f, multiply(ops[i].second, ops[j].second) == multiply(ops[j].second, ops[i].second),
             ops[i].first + " and " + ops[j].first + " do not commute" + at(n));
  expect(f, multiply(star, star) == id, "iota^2 != 1" + at(n));
  expect(f, diamond_matrix(s, n - 1).matrix() == id, "<-1> != 1" + at(n));
  expect(f, hecke_composite(s, 1).matrix() == id, "T1 != 1" + at(n));
  if (n % 3) {
    IntMatrix t3 = hecke_matrix(s, 3).matrix(), d3 = diamond_matrix(s, 3).matrix();
    expect(f, direct_hecke(s, 9) == IntMatrix(multiply(t3, t3) - d3 * Integer(3)), "T9 != T3^2 - 3<3>" + at(n));
    if (n % 2)
      expect(f, direct_hecke(s, 6) == multiply(hecke_matrix(s, 2).matrix(), t3), "T6 != T2 T3" + at(n));
  }
  return f;
}

// Action of T_q on cusp classes of prime level p:
// a/c -> sum_j (a + jc)/(qc) + <q>(qa/c), with <q>: (a, c) -> (a/q, qc).
inline std::vector<std::vector<Index>> hecke_on_cusps(const SymbolSpace& s, long q) {
  const long p = s.level();
  const long qinv = mod_inverse(q, p);
  std::vector<std::vector<Index>> out;
  for (const CuspKey& k : s.cusps()) {
    Cusp x = cusp_representative(k, p);
    std::vector<Index> img;
    for (long j = 0; j < q; ++j) img.push_back(s.cusp_index(Cusp(x.num + j * x.den, q * x.den)));
    Cusp y(q * x.num, x.den);
    img.push_back(s.cusp_index(Integer(qinv) * y.num, Integer(q) * y.den));
    out.push_back(img);
  }
  return out;
}

inline Failures boundary_equivariance(long p) {
  Failures f;
  SymbolSpace s = SymbolSpace::build(p);
  const IntMatrix& b = s.boundary_matrix();
  for (long q : {2L, 3L, 5L}) {
    if (p % q == 0) continue;
    auto tb = hecke_on_cusps(s, q);
    IntMatrix tbm = IntMatrix::Zero(b.rows(), b.rows());
    for (Index i = 0; i < b.rows(); ++i)
      for (Index j : tb[i]) tbm(j, i) += 1;
    expect(f, multiply(b, hecke_matrix(s, q).matrix()) == multiply(tbm, b), "delta T" + std::to_string(q) + " != T^B delta" + at(p));
  }
  return f;
}

// pi as an endomorphism of the symbol space: embed V back through the basis of H.
inline RatMatrix projector(TorsionModel& m, long q) {
  auto [num, den] = projection_matrix(m, q);
  RatMatrix pi = to_rational(num) / Rational(den);
  return to_rational(m.h().basis()).transpose() * pi / Rational(m.h().denom());
}

inline Failures projection(long p) {
  Failures f;
  TorsionModel m = TorsionModel::build(p);
  auto [num, den] = projection_matrix(m, 2);
  RatMatrix pi = to_rational(num) / Rational(den);
  RatMatrix on_h = pi * to_rational(m.h().basis()).transpose() / Rational(m.h().denom());
  expect(f, on_h == to_rational(identity_matrix(m.dim_v())), "pi is not the identity on H" + at(p));
  RatMatrix full = projector(m, 2);
  expect(f, full * full == full, "pi is not idempotent" + at(p));
  expect(f, full == projector(m, 3), "pi depends on q" + at(p));
  for (const std::string name : {"T3", "diamond:2", "star"}) {
    const OperatorMatrix& op = m.op(name);
    expect(f, pi * to_rational(op.matrix()) == to_rational(op.cuspidal_matrix()) * pi, "pi is not equivariant for " + name + at(p));
  }
  return f;
}

inline Failures annihilation(long p) {
  Failures f;
  TheoremReport r = verify(p);
  expect(f, r.annihilation, "eta_q or iota*-1 does not kill C^Q" + at(p));
  expect(f, r.cq_in_cgal, "C^Q not inside C^Gal" + at(p));
  return f;
}

inline const std::vector<long>& structural_primes() {
  static const std::vector<long> ps{11, 13, 17, 19, 23};
  return ps;
}

// The whole suite; `log` receives one line per family.
template <typename Log>
Failures run_all(Log&& log) {
  Failures all;
  auto add = [&](const std::string& family, const Failures& f) {
    log(family + (f.empty() ? ": ok" : ": " + std::to_string(f.size()) + " failures"));
    all.insert(all.end(), f.begin(), f.end());
  };
  for (long p : structural_primes()) {
    add("counts p=" + std::to_string(p), counts(p));
    add("relations p=" + std::to_string(p), relations(p));
    add("annihilation p=" + std::to_string(p), annihilation(p));
  }
  for (long n : {11L, 13L, 17L}) add("operators N=" + std::to_string(n), operator_identities(n));
  for (long p : {11L, 13L}) {
    add("boundary p=" + std::to_string(p), boundary_equivariance(p));
    add("projection p=" + std::to_string(p), projection(p));
  }
  return all;
}

}  // namespace structural
