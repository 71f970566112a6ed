#include "mtors/core.hpp"

#include <numeric>

namespace mtors {

const char* error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingularOperator: return "SingularOperator";
    case ErrorKind::NotSublattice: return "NotSublattice";
    case ErrorKind::NotStable: return "NotStable";
    case ErrorKind::InfiniteOrder: return "InfiniteOrder";
    case ErrorKind::BadSymbol: return "BadSymbol";
    case ErrorKind::BadLevel: return "BadLevel";
    case ErrorKind::BadUnit: return "BadUnit";
    case ErrorKind::NoValidEta: return "NoValidEta";
    case ErrorKind::ProjectionFailed: return "ProjectionFailed";
    case ErrorKind::NotGenerator: return "NotGenerator";
    case ErrorKind::CacheCorrupt: return "CacheCorrupt";
    case ErrorKind::Parse: return "Parse";
  }
  return "Error";
}

void xgcd(Integer& g, Integer& s, Integer& t, const Integer& a, const Integer& b) {
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
}

Integer floor_div(const Integer& a, const Integer& b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

Integer mod_floor(const Integer& a, const Integer& m) {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  if (r < 0) r += abs(m);
  return r;
}

IntMatrix identity_matrix(Index n) {
  IntMatrix m = IntMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RatMatrix to_rational(const IntMatrix& m) {
  RatMatrix out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

std::pair<IntMatrix, Integer> clear_denominators(const RatMatrix& m) {
  Integer den = 1;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), m(i, j).get_den_mpz_t());
  IntMatrix out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) {
      Integer q = den / Integer(m(i, j).get_den());
      out(i, j) = q * Integer(m(i, j).get_num());
    }
  return {out, den};
}

bool is_zero(const IntMatrix& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0) return false;
  return true;
}

Integer content(const IntMatrix& m) {
  Integer g = 0;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), m(i, j).get_mpz_t());
  return g;
}

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

long mod_inverse(long a, long m) {
  long g = std::gcd(((a % m) + m) % m, m);
  if (g != 1) return 0;
  Integer r;
  Integer aa(((a % m) + m) % m), mm(m);
  mpz_invert(r.get_mpz_t(), aa.get_mpz_t(), mm.get_mpz_t());
  return r.get_si();
}

std::string to_string(const Integer& x) { return x.get_str(); }

}  // namespace mtors
