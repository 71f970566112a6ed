#include "doctest.h"
#include "structural.hpp"

#include "mtors/hecke.hpp"
#include "mtors/modular.hpp"

#include <set>
#include <tuple>

using namespace mtors;

namespace {

using Quad = std::tuple<long, long, long, long>;

std::multiset<Quad> brute_heilbronn(long q) {
  std::multiset<Quad> out;
  for (long a = 1; a <= q; ++a)
    for (long d = 1; d <= q; ++d)
      for (long b = 0; b < a; ++b)
        for (long c = 0; c < d; ++c)
          if (a * d - b * c == q) out.insert({a, b, c, d});
  return out;
}

// a_q of y^2 + y = x^3 - x^2 by counting points mod q.
long elliptic_ap(long q) {
  long affine = 0;
  for (long x = 0; x < q; ++x)
    for (long y = 0; y < q; ++y)
      if (((y * y + y - x * x * x + x * x) % q + q) % q == 0) ++affine;
  return q - affine;
}

Integer trace(const IntMatrix& m) {
  Integer t = 0;
  for (Index i = 0; i < m.rows(); ++i) t += m(i, i);
  return t;
}

}  // namespace

TEST_CASE("Heilbronn matrices") {
  for (long q : {1L, 2L, 3L, 5L, 7L, 9L, 11L, 12L}) {
    CAPTURE(q);
    std::multiset<Quad> got;
    for (auto& g : heilbronn_matrices(q)) {
      CHECK(g.a * g.d - g.b * g.c == q);
      got.insert({g.a, g.b, g.c, g.d});
    }
    CHECK(got == brute_heilbronn(q));
  }
}

TEST_CASE("operator identities") {
  for (long n : {11L, 13L, 17L}) {
    CAPTURE(n);
    auto f = structural::operator_identities(n);
    CHECK(f.empty());
    for (auto& s : f) MESSAGE(s);
  }
}

TEST_CASE("boundary map is Hecke equivariant") {
  for (long p : {11L, 13L}) {
    auto f = structural::boundary_equivariance(p);
    CHECK(f.empty());
    for (auto& s : f) MESSAGE(s);
  }
}

TEST_CASE("level 11 cuspidal Hecke data") {
  SymbolSpace s = SymbolSpace::build(11);
  REQUIRE(s.cuspidal().rank() == 2);
  for (long q : {2L, 3L, 5L, 7L}) {
    CAPTURE(q);
    CHECK(trace(hecke_matrix(s, q).cuspidal_matrix()) == 2 * elliptic_ap(q));
  }
  CHECK(elliptic_ap(2) == -2);
  CHECK(elliptic_ap(3) == -1);
  IntMatrix t3 = hecke_matrix(s, 3).cuspidal_matrix();
  // charpoly x^2 - tr x + det = (x + 1)^2
  CHECK(trace(t3) == -2);
  CHECK(determinant(t3) == 1);
  CHECK(eta_matrix(s, 3).cuspidal_matrix() == IntMatrix(identity_matrix(2) * Integer(-5)));
  CHECK(diamond_matrix(s, 2).cuspidal_matrix() == identity_matrix(2));
}

TEST_CASE("diamond operators form a group") {
  for (long p : {11L, 13L, 17L}) {
    CAPTURE(p);
    SymbolSpace s = SymbolSpace::build(p);
    CHECK(diamond_matrix(s, 1).matrix() == identity_matrix(s.rank()));
    for (long d : {2L, 3L})
      for (long e : {3L, 5L})
        CHECK(multiply(diamond_matrix(s, d).matrix(), diamond_matrix(s, e).matrix()) == diamond_matrix(s, d * e % p).matrix());
    const long g = choose_galois_generator(p);
    IntMatrix dg = diamond_matrix(s, g).matrix(), power = identity_matrix(s.rank());
    for (long k = 1; k <= (p - 1) / 2; ++k) {
      power = multiply(power, dg);
      CHECK((power == identity_matrix(s.rank())) == (k == (p - 1) / 2));
    }
    CHECK_THROWS_AS(diamond_matrix(s, p), Error);
  }
}

TEST_CASE("eta commutes with iota") {
  for (long p : {11L, 13L, 17L}) {
    SymbolSpace s = SymbolSpace::build(p);
    IntMatrix star = star_matrix(s).matrix();
    for (long q : {3L, 5L}) {
      IntMatrix eta = eta_matrix(s, q).matrix();
      CHECK(multiply(eta, star) == multiply(star, eta));
    }
  }
}

TEST_CASE("composite Hecke operators") {
  SymbolSpace s = SymbolSpace::build(11);
  IntMatrix t3 = hecke_matrix(s, 3).matrix();
  CHECK(structural::direct_hecke(s, 9) != multiply(t3, t3));
  CHECK(hecke_composite(s, 9).matrix() == structural::direct_hecke(s, 9));
  CHECK(hecke_composite(s, 6).matrix() == structural::direct_hecke(s, 6));
  CHECK(hecke_composite(s, 3).matrix() == t3);
}

TEST_CASE("named operators") {
  SymbolSpace s = SymbolSpace::build(11);
  CHECK(named_operator(s, "T3").matrix() == hecke_matrix(s, 3).matrix());
  CHECK(named_operator(s, "diamond:2").matrix() == diamond_matrix(s, 2).matrix());
  CHECK(named_operator(s, "star").matrix() == star_matrix(s).matrix());
  CHECK(named_operator(s, "eta:3").matrix() == eta_matrix(s, 3).matrix());
  CHECK(named_operator(s, "T1").matrix() == identity_matrix(s.rank()));
  for (const char* bad : {"foo", "T", "Tx", "diamond:", "eta:", "star2", ""}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(named_operator(s, bad), Error);
  }
  CHECK_THROWS_AS(named_operator(s, "diamond:11"), Error);
  CHECK_THROWS_AS(named_operator(s, "T11"), Error);
}

TEST_CASE("cuspidal restriction") {
  SymbolSpace s = SymbolSpace::build(13);
  for (const char* name : {"T2", "T3", "diamond:2", "star", "eta:3"}) {
    OperatorMatrix op = named_operator(s, name);
    CHECK(restrict_to_cuspidal(s, op.matrix()) == op.cuspidal_matrix());
  }
  Index k = 0;
  while (is_zero(IntMatrix(s.boundary_matrix().col(k)))) ++k;
  IntMatrix bad = IntMatrix::Zero(s.rank(), s.rank());
  for (Index j = 0; j < s.rank(); ++j) bad(k, j) = 1;
  CHECK_THROWS_AS(OperatorMatrix(s, "bad", bad), Error);
}
