#include "doctest.h"
#include "oracles.hpp"
#include "structural.hpp"

#include "mtors/cusps.hpp"
#include "mtors/modular.hpp"
#include "mtors/report.hpp"
#include "mtors/torsion.hpp"

#include <deque>
#include <map>
#include <set>

using namespace mtors;

namespace {

using Vec = std::vector<long>;

Vec add(const Vec& a, const Vec& b, long m) {
  Vec out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = ((a[i] + b[i]) % m + m) % m;
  return out;
}

Vec apply(const IntMatrix& a, const Vec& x, long m) {
  Vec out(static_cast<size_t>(a.rows()), 0);
  for (Index i = 0; i < a.rows(); ++i) {
    long s = 0;
    for (Index j = 0; j < a.cols(); ++j) s = (s + a(i, j).get_si() % m * x[j]) % m;
    out[i] = (s + m) % m;
  }
  return out;
}

bool zero(const Vec& x) {
  for (long v : x)
    if (v) return false;
  return true;
}

Chain chain_of(const std::set<Vec>& elems, long m) {
  oracle::Group g;
  const Index n = static_cast<Index>(elems.begin()->size());
  for (auto& x : elems) {
    IntRow r(n);
    for (Index i = 0; i < n; ++i) r(i) = x[i];
    g.elems.push_back(r);
  }
  g.zero = IntRow::Zero(n);
  g.mul = [m](const IntRow& x, long k) {
    IntRow y(x.size());
    for (Index i = 0; i < x.size(); ++i) y(i) = ((x(i) * k) % m + m) % m;
    return y;
  };
  return oracle::group_chain(g);
}

// The cuspidal group by brute force: V coordinates of the projected paths from
// the first cusp class, as elements of (1/m) Z^n / Z^n.
struct BruteCuspidal {
  long m = 0;
  std::vector<Vec> gens;  // gens[i] = class of c_i - c_0
  std::set<Vec> c, c_gal, c_q;
};

BruteCuspidal brute_cuspidal(long p) {
  TorsionModel model = TorsionModel::build(p);
  const SymbolSpace& s = model.space();
  auto [num, den] = projection_matrix(model, period_projection(model).q);
  REQUIRE(den.fits_slong_p());
  BruteCuspidal out;
  out.m = den.get_si();
  const Index k = static_cast<Index>(s.cusps().size());
  for (Index i = 0; i < k; ++i) {
    IntRow path = s.path_coords(Cusp::infinity(), cusp_representative(s.cusps()[i], p));
    IntMatrix v = multiply(num, IntMatrix(path.transpose()));
    Vec g(static_cast<size_t>(v.rows()));
    for (Index j = 0; j < v.rows(); ++j) g[j] = Integer((v(j, 0) % den + den) % den).get_si();
    out.gens.push_back(g);
  }
  const auto perm = galois_cusp_action(p, choose_galois_generator(p));
  const auto classes = cusp_classes(p);
  // closure of C, carrying the Galois image along
  std::map<Vec, Vec> sigma;
  const Vec z(out.gens.front().size(), 0);
  sigma[z] = z;
  std::deque<Vec> todo{z};
  bool consistent = true;
  while (!todo.empty()) {
    Vec x = todo.front();
    todo.pop_front();
    for (Index i = 1; i < k; ++i) {
      Vec y = add(x, out.gens[i], out.m), sy = add(sigma[x], out.gens[perm[i]], out.m);
      auto [it, fresh] = sigma.emplace(y, sy);
      if (fresh) todo.push_back(y);
      else if (it->second != sy) consistent = false;
    }
  }
  CHECK(consistent);
  for (auto& [x, sx] : sigma) {
    out.c.insert(x);
    if (x == sx) out.c_gal.insert(x);
  }
  out.c_q.insert(z);
  todo = {z};
  while (!todo.empty()) {
    Vec x = todo.front();
    todo.pop_front();
    for (Index i = 1; i < k; ++i) {
      if (!is_rational(classes[i])) continue;
      Vec y = add(x, out.gens[i], out.m);
      if (out.c_q.insert(y).second) todo.push_back(y);
    }
  }
  return out;
}

// {x in (1/e) Z^n / Z^n : eta_q x = 0, iota x = x} by enumeration.
std::set<Vec> brute_mprime(TorsionModel& model, long q, long e) {
  const IntMatrix eta = model.op_v("eta:" + std::to_string(q));
  const IntMatrix iota = model.op_v("star");
  const Index n = model.dim_v();
  std::set<Vec> out;
  Vec x(static_cast<size_t>(n), 0);
  for (;;) {
    Vec ix = apply(iota, x, e);
    if (zero(apply(eta, x, e)) && ix == x) out.insert(x);
    Index i = 0;
    while (i < n && ++x[i] == e) x[i++] = 0;
    if (i == n) break;
  }
  return out;
}

long largest_elementary_divisor(const IntMatrix& a) {
  return Integer(abs(oracle::determinantal_divisors(a).back())).get_si();
}

}  // namespace

TEST_CASE("torsion model") {
  CHECK(TorsionModel::build(11).dim_v() == 2);
  CHECK(TorsionModel::build(13).dim_v() == 4);
  CHECK(TorsionModel::build(29).dim_v() == 44);
  CHECK(TorsionModel::build(5).dim_v() == 0);
  for (long bad : {1L, 2L, 3L, 4L, 9L, 15L}) CHECK_THROWS_AS(TorsionModel::build(bad), Error);
  TorsionModel m = TorsionModel::build(11);
  CHECK(choose_eta_primes(m) == std::vector<long>{3});
  CHECK(choose_eta_primes(m, 3) == std::vector<long>{3, 5, 7});
  CHECK_FALSE(eta_valid(m, 2));
  CHECK_FALSE(eta_valid(m, 11));
  CHECK_FALSE(eta_valid(m, 9));
  CHECK(m.eta_det(3) == 25);
}

TEST_CASE("eta_q is nonsingular for q >= 7") {
  // |a_q| <= 2 sqrt(q) < q - 1 <= |chi(q) + q| on the cusp forms.
  for (long p : {11L, 13L, 17L, 19L, 23L, 29L, 31L, 37L, 41L, 43L, 47L}) {
    TorsionModel m = TorsionModel::build(p);
    for (long q : {7L, 11L, 13L})
      if (q != p) {
        CAPTURE(p);
        CAPTURE(q);
        CHECK(eta_valid(m, q));
      }
  }
  TorsionModel m43 = TorsionModel::build(43);
  CHECK(eta_valid(m43, 3));
  CHECK(eta_valid(m43, 5));
}

TEST_CASE("level 11 anchor") {
  TheoremReport r = verify(11);
  CHECK(r.status == "verified");
  CHECK(r.qs == std::vector<long>{3});
  CHECK(r.d == 2);
  CHECK(r.m_prime == Chain{5});
  CHECK(r.c_gal == Chain{5});
  CHECK(r.c_q == Chain{5});
  CHECK(r.torsion == Chain{5});
  CHECK(r.mprime_in_c);
  CHECK(r.cq_in_cgal);
  CHECK(r.cq_eq_cgal);
  CHECK(r.annihilation);

  TorsionModel m = TorsionModel::build(11);
  std::set<Vec> mp = brute_mprime(m, 3, 25);
  CHECK(mp.size() == 5);
  CHECK(chain_of(mp, 25) == Chain{5});
}

TEST_CASE("brute-force cuspidal subgroups") {
  for (long p : {11L, 13L}) {
    CAPTURE(p);
    BruteCuspidal b = brute_cuspidal(p);
    TheoremReport r = verify(p);
    CHECK(chain_of(b.c, b.m) == r.c);
    CHECK(chain_of(b.c_gal, b.m) == r.c_gal);
    CHECK(chain_of(b.c_q, b.m) == r.c_q);
    for (auto& x : b.c_q) CHECK(b.c_gal.count(x) == 1);

    // eta_q and iota - 1 kill the rational cuspidal subgroup
    TorsionModel model = TorsionModel::build(p);
    IntMatrix iota = model.op_v("star");
    for (long q : {3L, 5L}) {
      IntMatrix eta = model.op_v("eta:" + std::to_string(q));
      for (auto& x : b.c_q) {
        CHECK(zero(apply(eta, x, b.m)));
        CHECK(apply(iota, x, b.m) == x);
      }
    }

    // M' by enumeration, and M' inside C
    const long e = largest_elementary_divisor(model.op_v("eta:3"));
    std::set<Vec> mp = brute_mprime(model, 3, e);
    const Chain want = torsion_upper_bound(model, {3}).invariants;
    CHECK(format_chain(chain_of(mp, e)) == format_chain(want));
    for (auto& y : mp) {
      bool inside = true;
      Vec scaled(y.size());
      for (size_t i = 0; i < y.size(); ++i) {
        if (y[i] * b.m % e) inside = false;
        scaled[i] = y[i] * b.m / e % b.m;
      }
      CHECK((inside && b.c.count(scaled) == 1));
    }
  }
}

TEST_CASE("torsion chains for p <= 31") {
  const std::vector<std::pair<long, std::string>> expected{
      {5, "trivial"},
      {7, "trivial"},
      {11, "[5]"},
      {13, "[19]"},
      {17, "[2^3*73]"},
      {19, "[3^2*487]"},
      {23, "[11*37181]"},
      {29, "[2^2 | 2^2 | 2^2*3*7*43*17837]"},
      {31, "[2*5 | 2*5*7*11*2302381]"},
  };
  for (auto& [p, chain] : expected) {
    CAPTURE(p);
    TheoremReport r = verify(p);
    CHECK(r.passed());
    CHECK(r.torsion == parse_chain(chain));
    CHECK(r.mprime_in_c);
    CHECK(r.cq_in_cgal);
    CHECK(r.annihilation);
  }
}

TEST_CASE("projection") {
  for (long p : {11L, 13L, 17L}) {
    auto f = structural::projection(p);
    CHECK(f.empty());
    for (auto& s : f) MESSAGE(s);
  }
  // a rational Eisenstein eigenvector of T2 is killed by pi
  TorsionModel m = TorsionModel::build(11);
  RatMatrix pi = structural::projector(m, period_projection(m).q);
  RatMatrix t2 = to_rational(m.op("T2").matrix());
  RatMatrix ker = rational_kernel(RatMatrix(t2 - RatMatrix::Identity(t2.rows(), t2.cols()) * Rational(3)));
  REQUIRE(ker.rows() > 0);
  for (Index j = 0; j < ker.rows(); ++j) {
    RatVector v = ker.row(j).transpose();
    CHECK((pi * v).isZero());
    auto [num, den] = clear_denominators(RatMatrix(v.transpose()));
    CHECK_FALSE(is_zero(IntMatrix(m.space().boundary(IntRow(num.row(0))))));
  }
}

TEST_CASE("subgroup chain inclusions") {
  for (long p : {11L, 13L, 17L, 19L, 23L}) {
    CAPTURE(p);
    TorsionModel m = TorsionModel::build(p);
    PeriodProjection proj = period_projection(m);
    CuspidalGroup c = cuspidal_group(proj);
    const long d = choose_galois_generator(p);
    FinAbelianGroup gal = galois_invariant_subgroup(p, c, d);
    FinAbelianGroup rat = rational_cusp_subgroup(p, c);
    Lattice l_gal = v_lattice(proj, gal.ambient()), l_q = v_lattice(proj, rat.ambient());
    const Lattice z = Lattice::standard(m.dim_v());
    CHECK(contains(l_q, z));
    CHECK(contains(l_gal, l_q));
    CHECK(contains(c.l_c, l_gal));
    UpperBound ub = torsion_upper_bound(m, choose_eta_primes(m, 2));
    CHECK(contains(c.l_c, ub.lattice()) == bound_in_cuspidal(ub, proj));
    CHECK(FinAbelianGroup(ub.lattice(), z).invariants() == ub.invariants);
    // d = 1 fixes everything
    CHECK(fixed_subgroup(c.group, to_rational(galois_divisor_matrix(p, 1))).invariants() == c.group.invariants());
  }
}

TEST_CASE("verify options") {
  TheoremReport r = verify(11, VerifyOptions{{3}, 2});
  CHECK(r.status == "verified");
  r = verify(11, VerifyOptions{{11}, 0});
  CHECK(r.status == "inconclusive");
  CHECK_FALSE(r.notes.empty());
  r = verify(13, VerifyOptions{{}, 4});
  CHECK(r.status == "inconclusive");
  r = verify(19, VerifyOptions{{3}, 0});
  CHECK_FALSE(r.mprime_in_c);
  CHECK(r.status == "inconclusive");
  r = verify(19, VerifyOptions{{3, 5}, 0});
  CHECK(r.status == "verified");
  CHECK(r.torsion == parse_chain("[3^2*487]"));
  r = verify(5);
  CHECK(r.status == "verified");
  CHECK(r.torsion.empty());
  CHECK_THROWS_AS(verify(9), Error);
}
