#pragma once

#include "mtors/cache.hpp"
#include "mtors/core.hpp"
#include "mtors/hecke.hpp"
#include "mtors/lattice.hpp"
#include "mtors/manin.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mtors {

using Chain = std::vector<Integer>;

// V = H tensor Q in the coordinates of the cuspidal basis.  M(p) = V/H is
// then Q^n / Z^n.
class TorsionModel {
 public:
  static TorsionModel build(long p, ArtifactCache* cache = nullptr);

  long p() const { return p_; }
  const SymbolSpace& space() const { return *space_; }
  const Lattice& h() const { return space_->cuspidal(); }
  Index dim_v() const { return space_->cuspidal().rank(); }
  ArtifactCache* cache() const { return cache_; }

  // Memoized; read from and written to the cache as gamma1_<p>/op_<name>.
  const OperatorMatrix& op(const std::string& name);
  const IntMatrix& op_v(const std::string& name) { return op(name).cuspidal_matrix(); }

  // det(eta_v(q)); memoized and cached as gamma1_<p>/eta_det_<q>.
  const Integer& eta_det(long q);
  // Multiple of the exponent of M' for a q list, from an earlier bound.
  std::optional<Integer> index_bound(const std::vector<long>& qs) const;
  void set_index_bound(const std::vector<long>& qs, const Integer& bound) { bounds_[qs] = bound; }

  // Coordinates in the cuspidal basis of a vector of H.
  IntRow v_coords(const IntRow& x) const;
  // V coordinates of each column of a matrix whose columns lie in H.
  IntMatrix v_rows(const IntMatrix& m) const;

 private:
  long p_ = 0;
  std::shared_ptr<const SymbolSpace> space_;
  ArtifactCache* cache_ = nullptr;
  std::map<std::string, OperatorMatrix> ops_;
  std::map<long, Integer> eta_dets_;
  std::map<std::vector<long>, Integer> bounds_;
};

std::string cache_prefix(long p);

// eta_q = T_q - <q> - q on V, as a matrix acting on columns.
IntMatrix eta_v(TorsionModel& model, long q);
// Odd prime q != p with eta_q nonsingular on V.
bool eta_valid(TorsionModel& model, long q);
// Valid q below `bound`, in increasing order, at most `count` of them.
std::vector<long> choose_eta_primes(TorsionModel& model, size_t count = 1, long bound = 50);

// Column i - 1 of x_num / e is the image in V of a path from the first cusp
// class to class i, i = 1 .. p - 2.
struct PeriodProjection {
  long q = 0;
  IntMatrix x_num;
  Integer e = 1;
};

// pi = (A|V)^-1 A with A = eta_q (T_q - 1 - q<q>), which kills the boundary
// part.  Tries q from 2 upward.  Throws ProjectionFailed.
PeriodProjection period_projection(TorsionModel& model, long bound = 50);
// pi on all of the symbol space: n x rank, with denominator.
std::pair<IntMatrix, Integer> projection_matrix(TorsionModel& model, long q);

struct CuspidalGroup {
  FinAbelianGroup group;  // Z^(p-2) / R, generators D_i = c_i - c_0
  Lattice l_c;            // in V coordinates
};

CuspidalGroup cuspidal_group(const PeriodProjection& proj);
// S_d on the divisor basis, acting on columns.
IntMatrix galois_divisor_matrix(long p, long d);
// Throws NotGenerator.
FinAbelianGroup galois_invariant_subgroup(long p, const CuspidalGroup& c, long d);
FinAbelianGroup rational_cusp_subgroup(long p, const CuspidalGroup& c);
// Lattice of V coordinates of a subgroup of Z^(p-2) / R.
Lattice v_lattice(const PeriodProjection& proj, const Lattice& divisors);

// One primary part of M'.
struct LocalBound {
  Integer modulus;  // a prime power, or a cofactor that resisted factoring
  Lattice l_m;      // l_m / Z^n is the part of M' killed by a power of modulus
};

struct UpperBound {
  Chain invariants;
  std::vector<LocalBound> parts;
  Index dim = 0;
  // {x : eta_q x in Z^n for all q, (iota - 1) x in Z^n}
  Lattice lattice() const;
};

// Throws SingularOperator when the first q is singular on V.
UpperBound torsion_upper_bound(TorsionModel& model, const std::vector<long>& qs);
// M' inside C, one primary part at a time.
bool bound_in_cuspidal(const UpperBound& ub, const PeriodProjection& proj);

struct VerifyOptions {
  std::vector<long> qs;  // empty: automatic
  long d = 0;            // 0: automatic
  long q_bound = 50;
};

struct TheoremReport {
  long p = 0;
  std::vector<long> qs;
  long d = 0;
  long projection_q = 0;
  Chain m_prime, c, c_gal, c_q, torsion;
  bool mprime_in_c = false;
  bool cq_in_cgal = false;
  bool cq_eq_cgal = false;
  bool diamond_agrees = false;
  bool annihilation = false;
  std::string status;  // "verified", "inconclusive" or "error"
  std::vector<std::string> notes;
  std::vector<std::pair<std::string, double>> timings;

  bool passed() const { return status == "verified"; }
  bool operator==(const TheoremReport&) const = default;
};

TheoremReport verify(long p, const VerifyOptions& options = {}, ArtifactCache* cache = nullptr);

}  // namespace mtors
