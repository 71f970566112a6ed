#pragma once

#include <gmpxx.h>
#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace Eigen {

template <>
struct NumTraits<mpz_class> : GenericNumTraits<mpz_class> {
  using Real = mpz_class;
  using NonInteger = mpq_class;
  using Nested = mpz_class;
  using Literal = mpz_class;
  enum {
    IsComplex = 0,
    IsInteger = 1,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 32,
    MulCost = 64
  };
  static inline int digits10() { return 0; }
};

template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
  using Real = mpq_class;
  using NonInteger = mpq_class;
  using Nested = mpq_class;
  using Literal = mpq_class;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 16,
    AddCost = 128,
    MulCost = 128
  };
  static inline int digits10() { return 0; }
};

}  // namespace Eigen

namespace mtors {

using Index = Eigen::Index;
using Integer = mpz_class;
using Rational = mpq_class;

// Row-major: lattices are row spans, and row operations dominate.
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using IntMatrix = Matrix<Integer>;
using RatMatrix = Matrix<Rational>;
using IntVector = Vector<Integer>;
using IntRow = RowVector<Integer>;
using RatVector = Vector<Rational>;

enum class ErrorKind {
  DimensionMismatch,
  SingularOperator,
  NotSublattice,
  NotStable,
  InfiniteOrder,
  BadSymbol,
  BadLevel,
  BadUnit,
  NoValidEta,
  ProjectionFailed,
  NotGenerator,
  CacheCorrupt,
  Parse
};

const char* error_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline int cmpabs(const Integer& a, const Integer& b) { return mpz_cmpabs(a.get_mpz_t(), b.get_mpz_t()); }

// In-place  a -= c * b  over a row range, skipping zeros of b.
template <typename DstRow, typename SrcRow>
inline void row_submul(DstRow&& a, const Integer& c, const SrcRow& b) {
  if (c == 0) return;
  for (Index k = 0; k < b.size(); ++k)
    if (b(k) != 0) mpz_submul(a(k).get_mpz_t(), c.get_mpz_t(), b(k).get_mpz_t());
}

template <typename DstRow, typename SrcRow>
inline void row_addmul(DstRow&& a, const Integer& c, const SrcRow& b) {
  if (c == 0) return;
  for (Index k = 0; k < b.size(); ++k)
    if (b(k) != 0) mpz_addmul(a(k).get_mpz_t(), c.get_mpz_t(), b(k).get_mpz_t());
}

// g = gcd(a, b) >= 0 with s*a + t*b = g.
void xgcd(Integer& g, Integer& s, Integer& t, const Integer& a, const Integer& b);

Integer floor_div(const Integer& a, const Integer& b);
Integer mod_floor(const Integer& a, const Integer& m);

IntMatrix identity_matrix(Index n);
RatMatrix to_rational(const IntMatrix& m);

// Clears denominators: returns (integer matrix, positive common denominator).
std::pair<IntMatrix, Integer> clear_denominators(const RatMatrix& m);

bool is_zero(const IntMatrix& m);
Integer content(const IntMatrix& m);

bool is_prime(long n);
long mod_inverse(long a, long m);

std::string to_string(const Integer& x);

}  // namespace mtors
