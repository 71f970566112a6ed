#include "mtors/torsion.hpp"

#include "mtors/cusps.hpp"
#include "mtors/factor.hpp"
#include "mtors/matrix_io.hpp"
#include "mtors/modular.hpp"
#include "mtors/normal_form.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <sstream>

namespace mtors {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool divisible(const IntMatrix& m, const Integer& e) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (mpz_divisible_p(m(i, j).get_mpz_t(), e.get_mpz_t()) == 0) return false;
  return true;
}

IntMatrix identity_minus(const IntMatrix& m) {
  IntMatrix out = m;
  for (Index i = 0; i < out.rows(); ++i) out(i, i) -= 1;
  return out;
}

IntMatrix stack(const std::vector<const IntMatrix*>& blocks) {
  Index rows = 0;
  for (auto* b : blocks) rows += b->rows();
  IntMatrix out(rows, blocks.front()->cols());
  Index r = 0;
  for (auto* b : blocks) {
    out.middleRows(r, b->rows()) = *b;
    r += b->rows();
  }
  return out;
}

// gcd of `bound` and determinants of random integral combinations of the
// rows of gens: still a multiple of [Z^n : rowspan(gens)].
Integer index_multiple(const IntMatrix& gens, Integer bound, std::uint64_t seed) {
  const Index n = gens.cols();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coeff(-1, 1);
  int stable = 0;
  for (int trial = 0; trial < 6 && stable < 1 && bound > 1; ++trial) {
    IntMatrix x(n, gens.rows());
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < gens.rows(); ++j) x(i, j) = coeff(rng);
    Integer g = gcd(bound, determinant(multiply(x, gens)));
    stable = g == bound ? stable + 1 : 0;
    bound = g;
  }
  return bound;
}

// Largest divisor of x built from primes dividing m.
Integer smooth_part(Integer x, const Integer& m) {
  Integer out = 1, g;
  while ((g = gcd(x, m)) > 1) {
    x /= g;
    out *= g;
  }
  return out;
}

// Pairwise coprime factors of m, one per prime power where factoring
// succeeds.
std::vector<Integer> coprime_parts(const Integer& m) {
  std::vector<Integer> parts;
  for (auto& [p, e] : factor(m)) {
    Integer pe;
    mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e);
    parts.push_back(pe);
  }
  for (bool merged = true; merged;) {
    merged = false;
    for (size_t i = 0; i < parts.size() && !merged; ++i)
      for (size_t j = i + 1; j < parts.size() && !merged; ++j)
        if (gcd(parts[i], parts[j]) != 1) {
          parts[i] *= parts[j];
          parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(j));
          merged = true;
        }
  }
  return parts;
}

// Invariants of a direct sum of groups of coprime orders.
Chain merge_chains(const std::vector<Chain>& chains) {
  size_t len = 0;
  for (auto& c : chains) len = std::max(len, c.size());
  Chain out(len, Integer(1));
  for (auto& c : chains)
    for (size_t i = 0; i < c.size(); ++i) out[len - c.size() + i] *= c[i];
  return out;
}

bool retryable(ErrorKind k) {
  switch (k) {
    case ErrorKind::SingularOperator:
    case ErrorKind::NoValidEta:
    case ErrorKind::ProjectionFailed:
    case ErrorKind::NotGenerator:
    case ErrorKind::NotStable:
    case ErrorKind::NotSublattice:
    case ErrorKind::InfiniteOrder:
      return true;
    default:
      return false;
  }
}

}  // namespace

std::string cache_prefix(long p) { return "gamma1_" + std::to_string(p); }

TorsionModel TorsionModel::build(long p, ArtifactCache* cache) {
  check_prime_level(p);
  TorsionModel m;
  m.p_ = p;
  m.cache_ = cache;
  const std::string key = cache_prefix(p) + "/space";
  std::optional<std::string> text;
  if (cache) text = cache->get(key);
  if (text) {
    std::istringstream in(*text);
    m.space_ = std::make_shared<const SymbolSpace>(SymbolSpace::deserialize(in));
    if (m.space_->level() != p) throw Error(ErrorKind::CacheCorrupt, key + " holds another level");
  } else {
    m.space_ = std::make_shared<const SymbolSpace>(SymbolSpace::build(p));
    if (cache) {
      std::ostringstream out;
      m.space_->serialize(out);
      cache->put(key, out.str());
    }
  }
  if (m.dim_v() != 2 * genus_x1(p))
    throw Error(ErrorKind::DimensionMismatch, "cuspidal rank " + std::to_string(m.dim_v()) + " does not match the genus of X1(" +
                                                  std::to_string(p) + ")");
  return m;
}

const OperatorMatrix& TorsionModel::op(const std::string& name) {
  if (auto it = ops_.find(name); it != ops_.end()) return it->second;
  const std::string key = cache_prefix(p_) + "/op_" + name;
  std::optional<std::string> text;
  if (cache_) text = cache_->get(key);
  OperatorMatrix m;
  if (text) {
    auto mt = matrix_from_string(*text);
    if (mt.denom != 1) throw Error(ErrorKind::CacheCorrupt, key + " is not integral");
    m = OperatorMatrix(*space_, name, std::move(mt.matrix));
  } else {
    m = named_operator(*space_, name);
    if (cache_) cache_->put(key, matrix_to_string(m.matrix()));
  }
  return ops_.emplace(name, std::move(m)).first->second;
}

IntRow TorsionModel::v_coords(const IntRow& x) const {
  const auto& piv = h().pivots();
  IntRow out(static_cast<Index>(piv.size()));
  for (size_t j = 0; j < piv.size(); ++j) out(static_cast<Index>(j)) = x(piv[j]);
  return out;
}

IntMatrix TorsionModel::v_rows(const IntMatrix& m) const {
  const auto& piv = h().pivots();
  IntMatrix out(static_cast<Index>(piv.size()), m.cols());
  for (size_t j = 0; j < piv.size(); ++j) out.row(static_cast<Index>(j)) = m.row(piv[j]);
  return out;
}

IntMatrix eta_v(TorsionModel& model, long q) {
  IntMatrix m = model.op_v("T" + std::to_string(q)) - model.op_v("diamond:" + std::to_string(q));
  for (Index i = 0; i < m.rows(); ++i) m(i, i) -= q;
  return m;
}

const Integer& TorsionModel::eta_det(long q) {
  if (auto it = eta_dets_.find(q); it != eta_dets_.end()) return it->second;
  const std::string key = cache_prefix(p_) + "/eta_det_" + std::to_string(q);
  Integer d;
  std::optional<std::string> text;
  if (cache_) text = cache_->get(key);
  if (text) {
    if (d.set_str(*text, 10) != 0) throw Error(ErrorKind::CacheCorrupt, key + " is not an integer");
  } else {
    d = determinant(eta_v(*this, q));
    if (cache_) cache_->put(key, d.get_str());
  }
  return eta_dets_.emplace(q, d).first->second;
}

std::optional<Integer> TorsionModel::index_bound(const std::vector<long>& qs) const {
  if (auto it = bounds_.find(qs); it != bounds_.end()) return it->second;
  return std::nullopt;
}

bool eta_valid(TorsionModel& model, long q) {
  if (q < 3 || !is_prime(q) || q == model.p()) return false;
  return is_nonsingular(eta_v(model, q));
}

std::vector<long> choose_eta_primes(TorsionModel& model, size_t count, long bound) {
  std::vector<long> out;
  for (long q = 3; q < bound && out.size() < count; q += 2)
    if (eta_valid(model, q)) out.push_back(q);
  if (out.empty()) throw Error(ErrorKind::NoValidEta, "no valid q below " + std::to_string(bound) + " at p = " + std::to_string(model.p()));
  return out;
}

namespace {

struct Annihilator {
  IntMatrix full, v;
};

// eta_q (T_q - 1 - q<q>), on the symbol space and on V.
Annihilator boundary_annihilator(TorsionModel& model, long q) {
  const std::string qs = std::to_string(q);
  const IntMatrix& t = model.op("T" + qs).matrix();
  const IntMatrix& dm = model.op("diamond:" + qs).matrix();
  IntMatrix eta = t - dm, etap = t - dm * Integer(q);
  for (Index i = 0; i < eta.rows(); ++i) {
    eta(i, i) -= q;
    etap(i, i) -= 1;
  }
  IntMatrix eta_vm = eta_v(model, q);
  IntMatrix etap_v = model.op_v("T" + qs) - model.op_v("diamond:" + qs) * Integer(q);
  for (Index i = 0; i < etap_v.rows(); ++i) etap_v(i, i) -= 1;
  if (!is_zero(multiply(multiply(model.space().boundary_matrix(), eta), etap)))
    throw Error(ErrorKind::ProjectionFailed, "operator for q = " + qs + " does not kill the boundary");
  return {multiply(eta, etap), multiply(eta_vm, etap_v)};
}

}  // namespace

PeriodProjection period_projection(TorsionModel& model, long bound) {
  const long p = model.p();
  const Index k = p - 2;
  const Index r = model.space().rank();
  IntMatrix paths(r, k);
  for (Index i = 1; i <= k; ++i) paths.col(i - 1) = model.space().path_to(i).transpose();
  for (long q = 2; q < bound; ++q) {
    if (!is_prime(q) || q == p) continue;
    Annihilator a = boundary_annihilator(model, q);
    IntMatrix rhs = model.v_rows(multiply(a.full, paths));
    try {
      RationalSolution s = solve(a.v, rhs);
      return {q, std::move(s.numer), std::move(s.denom)};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularOperator) throw;
    }
  }
  throw Error(ErrorKind::ProjectionFailed, "no q below " + std::to_string(bound) + " separates the cuspidal part at p = " + std::to_string(p));
}

std::pair<IntMatrix, Integer> projection_matrix(TorsionModel& model, long q) {
  Annihilator a = boundary_annihilator(model, q);
  RationalSolution s = solve(a.v, model.v_rows(a.full));
  return {std::move(s.numer), std::move(s.denom)};
}

CuspidalGroup cuspidal_group(const PeriodProjection& proj) {
  const Index k = proj.x_num.cols();
  IntMatrix xt = proj.x_num.transpose();
  IntMatrix rel = solutions_mod(xt, proj.e);
  return {FinAbelianGroup(Lattice::standard(k), Lattice::from_hnf(std::move(rel), 1)), Lattice::with_modulus(xt, proj.e, proj.e)};
}

IntMatrix galois_divisor_matrix(long p, long d) {
  auto perm = galois_cusp_action(p, d);
  const Index k = p - 2;
  IntMatrix s = IntMatrix::Zero(k, k);
  for (Index i = 1; i <= k; ++i) s(perm[i] - 1, i - 1) = 1;
  return s;
}

FinAbelianGroup galois_invariant_subgroup(long p, const CuspidalGroup& c, long d) {
  if (!generates_mod_sign(d, p))
    throw Error(ErrorKind::NotGenerator, std::to_string(d) + " does not generate (Z/" + std::to_string(p) + ")^x/{+-1}");
  return fixed_subgroup(c.group, to_rational(galois_divisor_matrix(p, d)));
}

FinAbelianGroup rational_cusp_subgroup(long p, const CuspidalGroup& c) {
  const Index k = p - 2, h = (p - 1) / 2;
  RatMatrix gens = RatMatrix::Zero(h - 1, k);
  for (Index i = 0; i < h - 1; ++i) gens(i, i) = 1;
  return subgroup_generated(gens, c.group.sub());
}

Lattice v_lattice(const PeriodProjection& proj, const Lattice& divisors) {
  if (divisors.denom() != 1) throw Error(ErrorKind::NotSublattice, "divisor lattice is not integral");
  return Lattice::with_modulus(multiply(divisors.basis(), proj.x_num.transpose()), proj.e, proj.e);
}

UpperBound torsion_upper_bound(TorsionModel& model, const std::vector<long>& qs) {
  if (qs.empty()) throw Error(ErrorKind::NoValidEta, "no q given");
  const Index n = model.dim_v();
  std::vector<IntMatrix> etas;
  for (long q : qs) {
    if (q < 3 || !is_prime(q) || q == model.p())
      throw Error(ErrorKind::SingularOperator, "q = " + std::to_string(q) + " is not an odd prime different from p");
    etas.push_back(eta_v(model, q));
  }
  Integer modulus;
  size_t known = 0;
  for (size_t k = qs.size(); k > 0 && known == 0; --k)
    if (auto b = model.index_bound({qs.begin(), qs.begin() + static_cast<std::ptrdiff_t>(k)})) {
      modulus = *b;
      known = k;
    }
  for (size_t i = known; i < qs.size(); ++i) {
    const Integer& d = model.eta_det(qs[i]);
    if (d == 0) throw Error(ErrorKind::SingularOperator, "eta_" + std::to_string(qs[i]) + " is singular on V");
    modulus = i == 0 ? Integer(abs(d)) : Integer(gcd(modulus, d));
  }
  IntMatrix iota = identity_minus(model.op_v("star"));
  std::vector<const IntMatrix*> blocks{&etas.front(), &iota};
  for (size_t i = 1; i < etas.size(); ++i) blocks.push_back(&etas[i]);
  IntMatrix gens = stack(blocks);
  if (known == 0) modulus = index_multiple(gens, modulus, static_cast<std::uint64_t>(model.p()));
  model.set_index_bound(qs, modulus);
  UpperBound ub{{}, {}, n};
  std::vector<Chain> chains;
  for (const Integer& m : coprime_parts(modulus)) {
    IntMatrix w = hnf_mod(gens, m);
    Chain c = hnf_cokernel_invariants(w);
    if (c.empty()) continue;
    chains.push_back(c);
    ub.parts.push_back({m, dual(Lattice::from_hnf(std::move(w), 1))});
  }
  ub.invariants = merge_chains(chains);
  return ub;
}

Lattice UpperBound::lattice() const {
  Lattice l = Lattice::standard(dim);
  for (auto& part : parts) l = sum(l, part.l_m);
  return l;
}

bool bound_in_cuspidal(const UpperBound& ub, const PeriodProjection& proj) {
  const IntMatrix xt = proj.x_num.transpose();
  for (auto& part : ub.parts) {
    const Integer a = smooth_part(proj.e, part.modulus);
    if (a == 1) return false;
    Lattice local = Lattice::with_modulus(xt, a, a);
    const Lattice& l = part.l_m;
    for (Index i = 0; i < l.rank(); ++i) {
      if (l.basis()(i, l.pivots()[i]) == l.denom()) continue;
      if (!local.contains(IntRow(l.basis().row(i)), l.denom())) return false;
    }
  }
  return true;
}

TheoremReport verify(long p, const VerifyOptions& options, ArtifactCache* cache) {
  check_prime_level(p);
  const auto start = Clock::now();
  TheoremReport rep;
  rep.p = p;
  rep.d = options.d ? options.d : choose_galois_generator(p);
  auto stage = [&](const std::string& name, Clock::time_point t0) { rep.timings.emplace_back(name, seconds_since(t0)); };

  auto t0 = Clock::now();
  TorsionModel model = TorsionModel::build(p, cache);
  stage("model", t0);

  if (model.dim_v() == 0) {
    if (!generates_mod_sign(rep.d, p))
      throw Error(ErrorKind::NotGenerator, std::to_string(rep.d) + " does not generate (Z/" + std::to_string(p) + ")^x/{+-1}");
    rep.qs = options.qs;
    rep.mprime_in_c = rep.cq_in_cgal = rep.cq_eq_cgal = rep.diamond_agrees = rep.annihilation = true;
    rep.status = "verified";
    rep.notes.push_back("genus 0");
    stage("total", start);
    return rep;
  }

  try {
    t0 = Clock::now();
    PeriodProjection proj = period_projection(model, options.q_bound);
    rep.projection_q = proj.q;
    stage("projection", t0);

    t0 = Clock::now();
    CuspidalGroup c = cuspidal_group(proj);
    rep.c = c.group.invariants();
    stage("cuspidal", t0);

    t0 = Clock::now();
    FinAbelianGroup cgal = galois_invariant_subgroup(p, c, rep.d);
    rep.c_gal = cgal.invariants();
    FinAbelianGroup cq = rational_cusp_subgroup(p, c);
    rep.c_q = cq.invariants();
    rep.cq_in_cgal = contains(cgal.ambient(), cq.ambient());
    rep.cq_eq_cgal = cgal.ambient() == cq.ambient();
    stage("galois", t0);

    t0 = Clock::now();
    std::optional<UpperBound> ub;
    if (!options.qs.empty()) {
      rep.qs = options.qs;
      ub = torsion_upper_bound(model, rep.qs);
      rep.mprime_in_c = bound_in_cuspidal(*ub, proj);
    } else {
      for (long q = 3; q < options.q_bound; q += 2) {
        if (!is_prime(q) || q == p) continue;
        if (!eta_valid(model, q)) {
          rep.notes.push_back("eta_" + std::to_string(q) + " singular on V");
          continue;
        }
        rep.qs.push_back(q);
        ub = torsion_upper_bound(model, rep.qs);
        rep.mprime_in_c = bound_in_cuspidal(*ub, proj);
        if (rep.mprime_in_c) break;
      }
      if (!ub) throw Error(ErrorKind::NoValidEta, "no valid q below " + std::to_string(options.q_bound));
    }
    rep.m_prime = ub->invariants;
    stage("upper_bound", t0);

    t0 = Clock::now();
    const Index h = (p - 1) / 2;
    IntMatrix rational = proj.x_num.leftCols(h - 1);
    bool ann = divisible(multiply(identity_minus(model.op_v("star")), rational), proj.e);
    for (long q : rep.qs) ann = ann && divisible(multiply(eta_v(model, q), rational), proj.e);
    rep.annihilation = ann;
    FinAbelianGroup dfix = fixed_subgroup(FinAbelianGroup(c.l_c, Lattice::standard(model.dim_v())),
                                          to_rational(model.op_v("diamond:" + std::to_string(rep.d))));
    rep.diamond_agrees = dfix.ambient() == v_lattice(proj, cgal.ambient());
    stage("checks", t0);

    if (rep.mprime_in_c && rep.cq_in_cgal && rep.annihilation) {
      rep.status = "verified";
      rep.torsion = rep.c_gal;
    } else {
      rep.status = "inconclusive";
    }
    if (!rep.cq_eq_cgal) rep.notes.push_back("C^Q differs from C^Gal");
  } catch (const Error& e) {
    if (!retryable(e.kind())) throw;
    rep.status = "inconclusive";
    rep.notes.push_back(e.what());
  }
  stage("total", start);
  return rep;
}

}  // namespace mtors
