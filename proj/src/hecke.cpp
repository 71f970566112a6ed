#include "mtors/hecke.hpp"

#include "mtors/modular.hpp"

#include <numeric>

namespace mtors {

namespace {

long mod(long a, long n) {
  long r = a % n;
  return r < 0 ? r + n : r;
}

}  // namespace

std::vector<Mat2> heilbronn_matrices(long q) {
  if (q < 1) throw Error(ErrorKind::DimensionMismatch, "Heilbronn family needs q >= 1");
  std::vector<Mat2> out;
  for (long a = 1; a <= q; ++a)
    for (long d = 1; d <= q; ++d)
      for (long b = 0; b < a; ++b) {
        // c = (ad - q) / b with 0 <= c < d
        long ad = a * d;
        if (b == 0) {
          if (ad == q)
            for (long c = 0; c < d; ++c) out.push_back({a, 0, c, d});
          continue;
        }
        long num = ad - q;
        if (num < 0 || num % b) continue;
        long c = num / b;
        if (c < d) out.push_back({a, b, c, d});
      }
  return out;
}

IntMatrix symbol_operator(const SymbolSpace& space,
                          const std::function<void(const ManinSymbol&, std::vector<ManinSymbol>&)>& images) {
  const long N = space.level();
  const Index r = space.rank();
  IntMatrix m = IntMatrix::Zero(r, r);
  std::vector<ManinSymbol> buf;
  std::vector<long> col(static_cast<size_t>(r));
  for (Index j = 0; j < r; ++j) {
    std::fill(col.begin(), col.end(), 0);
    for (auto& [s, coef] : space.generator(j)) {
      buf.clear();
      images(space.symbols()[s], buf);
      for (auto& x : buf) {
        if (std::gcd(std::gcd(x.u, x.v), N) != 1) continue;
        for (auto& [k, c] : space.coords(space.symbol_index(x.u, x.v))) col[k] += coef * c;
      }
    }
    for (Index k = 0; k < r; ++k)
      if (col[k]) m(k, j) = col[k];
  }
  return m;
}

IntMatrix restrict_to_cuspidal(const SymbolSpace& space, const IntMatrix& m) {
  const Lattice& h = space.cuspidal();
  const Index n = h.rank();
  IntMatrix out(n, n);
  for (Index j = 0; j < n; ++j) {
    IntRow img = IntRow::Zero(m.rows());
    for (Index k = 0; k < h.dim(); ++k)
      if (h.basis()(j, k) != 0)
        for (Index i = 0; i < m.rows(); ++i)
          if (m(i, k) != 0) mpz_addmul(img(i).get_mpz_t(), m(i, k).get_mpz_t(), h.basis()(j, k).get_mpz_t());
    auto c = h.coordinates(img, h.denom());
    if (!c) throw Error(ErrorKind::NotStable, "operator does not preserve the cuspidal lattice");
    out.col(j) = c->transpose();
  }
  return out;
}

OperatorMatrix::OperatorMatrix(const SymbolSpace& space, std::string name, IntMatrix m)
    : level_(space.level()), name_(std::move(name)), matrix_(std::move(m)) {
  if (matrix_.rows() != space.rank() || matrix_.cols() != space.rank())
    throw Error(ErrorKind::DimensionMismatch, "operator " + name_ + " has the wrong shape");
  try {
    restricted_ = restrict_to_cuspidal(space, matrix_);
  } catch (const Error& e) {
    throw Error(ErrorKind::NotStable, name_ + " does not preserve the cuspidal lattice");
  }
}

OperatorMatrix hecke_matrix(const SymbolSpace& space, long q) {
  if (!is_prime(q)) throw Error(ErrorKind::DimensionMismatch, "T_q needs q prime, got " + std::to_string(q));
  if (space.level() % q == 0) throw Error(ErrorKind::DimensionMismatch, "T_q with q dividing the level is not supported");
  const long N = space.level();
  const auto hs = heilbronn_matrices(q);
  IntMatrix m = symbol_operator(space, [&](const ManinSymbol& x, std::vector<ManinSymbol>& out) {
    for (auto& g : hs) out.push_back({mod(x.u * g.a + x.v * g.c, N), mod(x.u * g.b + x.v * g.d, N)});
  });
  return OperatorMatrix(space, "T" + std::to_string(q), std::move(m));
}

OperatorMatrix diamond_matrix(const SymbolSpace& space, long d) {
  const long N = space.level();
  if (std::gcd(mod(d, N), N) != 1) throw Error(ErrorKind::BadUnit, std::to_string(d) + " is not a unit mod " + std::to_string(N));
  IntMatrix m = symbol_operator(space, [&](const ManinSymbol& x, std::vector<ManinSymbol>& out) {
    out.push_back({mod(d * x.u, N), mod(d * x.v, N)});
  });
  return OperatorMatrix(space, "diamond:" + std::to_string(d), std::move(m));
}

OperatorMatrix star_matrix(const SymbolSpace& space) {
  const long N = space.level();
  IntMatrix m = symbol_operator(space, [&](const ManinSymbol& x, std::vector<ManinSymbol>& out) {
    out.push_back({mod(-x.u, N), x.v});
  });
  return OperatorMatrix(space, "star", std::move(m));
}

OperatorMatrix eta_matrix(const SymbolSpace& space, long q) {
  IntMatrix m = hecke_matrix(space, q).matrix() - diamond_matrix(space, q).matrix();
  for (Index i = 0; i < m.rows(); ++i) m(i, i) -= q;
  return OperatorMatrix(space, "eta:" + std::to_string(q), std::move(m));
}

OperatorMatrix hecke_composite(const SymbolSpace& space, long n) {
  if (n < 1) throw Error(ErrorKind::DimensionMismatch, "T_n needs n >= 1");
  if (std::gcd(n, space.level()) != 1) throw Error(ErrorKind::DimensionMismatch, "T_n needs gcd(n, N) = 1");
  const Index r = space.rank();
  IntMatrix total = identity_matrix(r);
  long rest = n;
  for (long q = 2; q <= rest; ++q) {
    if (rest % q) continue;
    int e = 0;
    while (rest % q == 0) {
      rest /= q;
      ++e;
    }
    IntMatrix tq = hecke_matrix(space, q).matrix();
    IntMatrix dq = diamond_matrix(space, q).matrix();
    IntMatrix prev = identity_matrix(r), cur = tq;
    for (int k = 2; k <= e; ++k) {
      IntMatrix next = multiply(cur, tq) - multiply(dq, prev) * Integer(q);
      prev = std::move(cur);
      cur = std::move(next);
    }
    total = multiply(total, cur);
  }
  return OperatorMatrix(space, "T" + std::to_string(n), std::move(total));
}

OperatorMatrix named_operator(const SymbolSpace& space, const std::string& name) {
  auto number = [&](const std::string& s) {
    if (s.empty() || s.size() > 9 || s.find_first_not_of("0123456789") != std::string::npos)
      throw Error(ErrorKind::Parse, "unknown operator '" + name + "'");
    return std::stol(s);
  };
  if (name == "star") return star_matrix(space);
  if (name.rfind("diamond:", 0) == 0) return diamond_matrix(space, number(name.substr(8)));
  if (name.rfind("eta:", 0) == 0) {
    long q = number(name.substr(4));
    if (!is_prime(q)) throw Error(ErrorKind::Parse, "eta needs a prime, got " + std::to_string(q));
    return eta_matrix(space, q);
  }
  if (name.size() > 1 && name[0] == 'T') {
    long n = number(name.substr(1));
    if (n < 1) throw Error(ErrorKind::Parse, "unknown operator '" + name + "'");
    return hecke_composite(space, n);
  }
  throw Error(ErrorKind::Parse, "unknown operator '" + name + "'");
}

}  // namespace mtors
