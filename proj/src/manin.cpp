#include "mtors/manin.hpp"

#include "mtors/matrix_io.hpp"
#include "mtors/modular.hpp"
#include "mtors/normal_form.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <string>

namespace mtors {

namespace {

long mod(long a, long n) {
  long r = a % n;
  return r < 0 ? r + n : r;
}

long checked_add(long a, long b) {
  long r;
  if (__builtin_add_overflow(a, b, &r)) throw Error(ErrorKind::DimensionMismatch, "symbol coordinate overflow");
  return r;
}

long checked_mul(long a, long b) {
  long r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorKind::DimensionMismatch, "symbol coordinate overflow");
  return r;
}

// s*a + t*b = gcd(a, b) >= 0
long ext_gcd(long a, long b, long& s, long& t) {
  long s0 = 1, s1 = 0, t0 = 0, t1 = 1;
  while (b != 0) {
    long q = a / b;
    long r = a - q * b;
    a = b;
    b = r;
    long ns = s0 - q * s1, nt = t0 - q * t1;
    s0 = s1;
    s1 = ns;
    t0 = t1;
    t1 = nt;
  }
  if (a < 0) {
    a = -a;
    s0 = -s0;
    t0 = -t0;
  }
  s = s0;
  t = t0;
  return a;
}

void accumulate(std::map<Index, long>& acc, const SparseVec& v, long coef) {
  for (auto& [k, x] : v) {
    long& slot = acc[k];
    slot = checked_add(slot, checked_mul(coef, x));
  }
}

SparseVec to_sparse(const std::map<Index, long>& acc) {
  SparseVec out;
  for (auto& [k, x] : acc)
    if (x != 0) out.emplace_back(k, x);
  return out;
}

long mod_ui(const Integer& x, long n) { return static_cast<long>(mpz_fdiv_ui(x.get_mpz_t(), static_cast<unsigned long>(n))); }

}  // namespace

long genus_x1(long p) { return p < 7 ? 0 : (p - 5) * (p - 7) / 24; }

ManinSymbol canonical_symbol(long u, long v, long N) {
  ManinSymbol a{mod(u, N), mod(v, N)};
  ManinSymbol b{mod(-a.u, N), mod(-a.v, N)};
  return std::min(a, b);
}

std::vector<ManinSymbol> enumerate_manin_symbols(long N) {
  if (N < 1) throw Error(ErrorKind::BadLevel, "level must be positive");
  std::vector<ManinSymbol> out;
  for (long u = 0; u < N; ++u)
    for (long v = 0; v < N; ++v) {
      if (std::gcd(std::gcd(u, v), N) != 1) continue;
      ManinSymbol c = canonical_symbol(u, v, N);
      if (c.u == u && c.v == v) out.push_back(c);
    }
  return out;
}

ManinSymbol act(const ManinSymbol& x, const Mat2& g, long N) {
  return canonical_symbol(mod(x.u * g.a + x.v * g.c, N), mod(x.u * g.b + x.v * g.d, N), N);
}

Mat2 lift_to_sl2(long u, long v, long N) {
  if (N < 1) throw Error(ErrorKind::BadLevel, "level must be positive");
  u = mod(u, N);
  v = mod(v, N);
  if (std::gcd(std::gcd(u, v), N) != 1)
    throw Error(ErrorKind::BadSymbol, "(" + std::to_string(u) + "," + std::to_string(v) + ") is not a symbol mod " +
                                          std::to_string(N));
  long c = u, d = v;
  if (c == 0 && mod(v, N) == mod(1, N)) {
    d = 1;
  } else {
    if (c == 0) c = N;
    while (std::gcd(c, d) != 1) d += N;
  }
  long s, t;
  ext_gcd(c, d, s, t);
  return Mat2{t, -s, c, d};
}

Cusp::Cusp(Integer a, Integer c) : num(std::move(a)), den(std::move(c)) {
  if (num == 0 && den == 0) throw Error(ErrorKind::BadSymbol, "0/0 is not a cusp");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  if (den == 0) {
    num = 1;
    return;
  }
  Integer g;
  mpz_gcd(g.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  num /= g;
  den /= g;
}

CuspKey cusp_key(const Integer& a, const Integer& c, long N) {
  const long cm = mod_ui(c, N);
  const long g = std::gcd(cm, N);
  const long am = mod_ui(a, g);
  CuspKey k1{cm, am}, k2{mod(-cm, N), mod(-am, g)};
  return std::min(k1, k2);
}

std::vector<CuspKey> cusp_keys(long N) {
  std::vector<CuspKey> out;
  for (long c = 0; c < N; ++c) {
    const long g = std::gcd(c, N);
    for (long a = 0; a < g; ++a) {
      if (std::gcd(a, g) != 1) continue;
      out.push_back(cusp_key(a, c, N));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Cusp cusp_representative(const CuspKey& k, long N) {
  const long c = k.c == 0 ? N : k.c;
  const long g = std::gcd(k.c, N);
  long a = k.a;
  while (std::gcd(a, c) != 1) a += g;
  return Cusp(a, c);
}

SymbolSpace SymbolSpace::build(long N) {
  SymbolSpace sp;
  sp.level_ = N;
  sp.symbols_ = enumerate_manin_symbols(N);
  sp.index_symbols();
  const Index ns = static_cast<Index>(sp.symbols_.size());
  auto idx = [&](const ManinSymbol& s) { return sp.index_[s.u * N + s.v]; };

  // Two-term relation: edges are S-orbits of size 2; S-fixed symbols vanish.
  std::vector<std::pair<Index, long>> edge_of(ns, {-1, 0});
  std::vector<Index> edges;
  for (Index i = 0; i < ns; ++i) {
    if (edge_of[i].first >= 0 || edge_of[i].second != 0) continue;
    Index j = idx(act(sp.symbols_[i], kS, N));
    if (j == i) {
      edge_of[i] = {-1, 1};
      continue;
    }
    const Index e = static_cast<Index>(edges.size());
    edges.push_back(i);
    edge_of[i] = {e, 1};
    edge_of[j] = {e, -1};
  }
  const Index E = static_cast<Index>(edges.size());

  // Three-term relation, one per T-orbit.  A T-fixed symbol gives 3x = 0,
  // which becomes x = 0 in the torsion-free quotient.
  std::vector<Index> tri_of(ns, -1);
  std::vector<std::map<Index, long>> rels;
  std::vector<std::map<Index, long>> rels_exact;
  for (Index i = 0; i < ns; ++i) {
    if (tri_of[i] >= 0) continue;
    Index b = idx(act(sp.symbols_[i], kT, N));
    Index c = idx(act(sp.symbols_[b], kT, N));
    const Index t = static_cast<Index>(rels.size());
    std::map<Index, long> rel, exact;
    for (Index k : {i, b, c}) {
      tri_of[k] = t;
      if (edge_of[k].first >= 0) exact[edge_of[k].first] += edge_of[k].second;
    }
    if (b == i) {
      if (edge_of[i].first >= 0) rel[edge_of[i].first] = edge_of[i].second;
    } else {
      rel = exact;
    }
    std::erase_if(rel, [](const auto& kv) { return kv.second == 0; });
    std::erase_if(exact, [](const auto& kv) { return kv.second == 0; });
    rels.push_back(std::move(rel));
    rels_exact.push_back(std::move(exact));
  }
  const Index nt = static_cast<Index>(rels.size());

  bool ok = N > 3;
  std::vector<SparseVec> edge_expr(E);
  if (ok) {
    // Spanning forest of the triangle graph; each tree edge is solved from the
    // relation of the triangle it leads into.
    std::vector<std::vector<std::pair<Index, Index>>> adj(nt);
    for (Index e = 0; e < E; ++e) {
      Index t1 = tri_of[edges[e]], t2 = tri_of[idx(act(sp.symbols_[edges[e]], kS, N))];
      if (t1 == t2) continue;
      auto f1 = rels[t1].find(e), f2 = rels[t2].find(e);
      if (f1 == rels[t1].end() || f2 == rels[t2].end()) continue;
      if (std::abs(f1->second) != 1 || std::abs(f2->second) != 1) continue;
      adj[t1].emplace_back(e, t2);
      adj[t2].emplace_back(e, t1);
    }
    std::vector<Index> parent_edge(nt, -1), order;
    std::vector<char> seen(nt, 0);
    for (Index root = 0; root < nt; ++root) {
      if (seen[root]) continue;
      seen[root] = 1;
      std::deque<Index> q{root};
      while (!q.empty()) {
        Index t = q.front();
        q.pop_front();
        order.push_back(t);
        for (auto& [e, t2] : adj[t])
          if (!seen[t2]) {
            seen[t2] = 1;
            parent_edge[t2] = e;
            q.push_back(t2);
          }
      }
    }
    std::vector<char> is_tree(E, 0);
    for (Index t = 0; t < nt; ++t)
      if (parent_edge[t] >= 0) is_tree[parent_edge[t]] = 1;
    std::vector<Index> free;
    for (Index e = 0; e < E; ++e)
      if (!is_tree[e]) {
        edge_expr[e] = {{static_cast<Index>(free.size()), 1}};
        free.push_back(e);
      }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const Index pe = parent_edge[*it];
      if (pe < 0) continue;
      const auto& rel = rels[*it];
      const long c = rel.at(pe);
      std::map<Index, long> acc;
      for (auto& [e2, c2] : rel)
        if (e2 != pe) accumulate(acc, edge_expr[e2], -c * c2);
      edge_expr[pe] = to_sparse(acc);
    }
    sp.rank_ = static_cast<Index>(free.size());
    for (Index e : free) sp.generators_.push_back({{edges[e], 1}});
  }

  auto fill_coords = [&]() {
    sp.coords_.assign(ns, {});
    for (Index i = 0; i < ns; ++i) {
      auto [e, sg] = edge_of[i];
      if (e < 0) continue;
      for (auto& [k, x] : edge_expr[e]) sp.coords_[i].emplace_back(k, sg * x);
    }
  };
  auto relations_hold = [&]() {
    for (Index i = 0; i < ns; ++i) {
      std::map<Index, long> acc;
      accumulate(acc, sp.coords_[i], 1);
      accumulate(acc, sp.coords_[idx(act(sp.symbols_[i], kS, N))], 1);
      if (!to_sparse(acc).empty()) return false;
      acc.clear();
      Index b = idx(act(sp.symbols_[i], kT, N));
      Index c = idx(act(sp.symbols_[b], kT, N));
      for (Index k : {i, b, c}) accumulate(acc, sp.coords_[k], 1);
      if (!to_sparse(acc).empty()) return false;
    }
    return true;
  };

  if (ok) {
    fill_coords();
    ok = relations_hold();
  }
  if (!ok) {
    // Dense fallback: torsion-free part of Z^E / relations via SNF.
    sp.dense_quotient_ = true;
    IntMatrix r = IntMatrix::Zero(nt, E);
    for (Index t = 0; t < nt; ++t)
      for (auto& [e, c] : rels_exact[t]) r(t, e) = c;
    SnfResult s = snf(r);
    Index rk = 0;
    while (rk < std::min(nt, E) && s.D(rk, rk) != 0) ++rk;
    sp.rank_ = E - rk;
    for (Index e = 0; e < E; ++e) {
      edge_expr[e].clear();
      for (Index j = rk; j < E; ++j)
        if (s.V(e, j) != 0) edge_expr[e].emplace_back(j - rk, s.V(e, j).get_si());
    }
    auto [vinv, den] = clear_denominators(inverse(to_rational(s.V)));
    sp.generators_.clear();
    for (Index j = rk; j < E; ++j) {
      SparseVec g;
      for (Index e = 0; e < E; ++e)
        if (vinv(j, e) != 0) g.emplace_back(edges[e], vinv(j, e).get_si());
      sp.generators_.push_back(std::move(g));
    }
    fill_coords();
    if (!relations_hold()) throw Error(ErrorKind::DimensionMismatch, "relation quotient failed verification");
  }

  sp.add_cusps();
  sp.compute_boundary();
  sp.compute_cuspidal();
  return sp;
}

void SymbolSpace::index_symbols() {
  const long N = level_;
  index_.assign(static_cast<size_t>(N * N), -1);
  for (Index i = 0; i < static_cast<Index>(symbols_.size()); ++i) {
    const auto& s = symbols_[i];
    index_[s.u * N + s.v] = i;
    index_[mod(-s.u, N) * N + mod(-s.v, N)] = i;
  }
}

Index SymbolSpace::symbol_index(long u, long v) const {
  const long N = level_;
  Index i = index_[mod(u, N) * N + mod(v, N)];
  if (i < 0) throw Error(ErrorKind::BadSymbol, "(" + std::to_string(u) + "," + std::to_string(v) + ") is not a symbol");
  return i;
}

IntRow SymbolSpace::dense_coords(Index symbol) const {
  IntRow out = IntRow::Zero(rank_);
  for (auto& [k, x] : coords_[symbol]) out(k) += x;
  return out;
}

void SymbolSpace::add_cusps() {
  cusps_ = cusp_keys(level_);
  cusp_reps_.clear();
  for (auto& k : cusps_) cusp_reps_.push_back(cusp_representative(k, level_));
}

Index SymbolSpace::cusp_index(const Integer& a, const Integer& c) const {
  CuspKey k = cusp_key(a, c, level_);
  auto it = std::lower_bound(cusps_.begin(), cusps_.end(), k);
  return static_cast<Index>(it - cusps_.begin());
}

void SymbolSpace::compute_boundary() {
  boundary_ = IntMatrix::Zero(static_cast<Index>(cusps_.size()), rank_);
  for (Index j = 0; j < rank_; ++j)
    for (auto& [s, coef] : generators_[j]) {
      Mat2 g = lift_to_sl2(symbols_[s].u, symbols_[s].v, level_);
      boundary_(cusp_index(g.a, g.c), j) += coef;
      boundary_(cusp_index(g.b, g.d), j) -= coef;
    }
}

IntRow SymbolSpace::boundary(const IntRow& x) const { return IntRow((boundary_ * x.transpose()).transpose()); }

void SymbolSpace::compute_cuspidal() {
  const Index nc = boundary_.rows();
  std::vector<std::pair<Index, Index>> ends(rank_, {-1, -1});
  bool graph = true;
  for (Index j = 0; j < rank_ && graph; ++j) {
    Index plus = -1, minus = -1, other = 0;
    for (Index c = 0; c < nc; ++c) {
      if (boundary_(c, j) == 1 && plus < 0) plus = c;
      else if (boundary_(c, j) == -1 && minus < 0) minus = c;
      else if (boundary_(c, j) != 0) ++other;
    }
    if (other || (plus < 0) != (minus < 0)) graph = false;
    ends[j] = {plus, minus};
  }
  if (!graph) {
    cuspidal_ = Lattice::from_rows(integer_kernel(boundary_));
    return;
  }
  // Reverse Kruskal: every non-tree edge j closes a cycle through tree edges
  // with larger index, so the fundamental cycles form an HNF with unit pivots.
  std::vector<Index> uf(nc);
  std::iota(uf.begin(), uf.end(), 0);
  auto find = [&](Index x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  std::vector<char> tree(rank_, 0);
  std::vector<std::vector<Index>> adj(nc);
  for (Index j = rank_ - 1; j >= 0; --j) {
    auto [a, b] = ends[j];
    if (a < 0) continue;
    Index ra = find(a), rb = find(b);
    if (ra == rb) continue;
    uf[ra] = rb;
    tree[j] = 1;
    adj[a].push_back(j);
    adj[b].push_back(j);
  }
  std::vector<Index> parent(nc, -1), depth(nc, 0);
  std::vector<char> seen(nc, 0);
  if (nc) {
    seen[0] = 1;
    std::deque<Index> q{0};
    while (!q.empty()) {
      Index c = q.front();
      q.pop_front();
      for (Index j : adj[c]) {
        Index o = ends[j].first == c ? ends[j].second : ends[j].first;
        if (seen[o]) continue;
        seen[o] = 1;
        parent[o] = j;
        depth[o] = depth[c] + 1;
        q.push_back(o);
      }
    }
  }
  for (Index c = 0; c < nc; ++c)
    if (!seen[c]) throw Error(ErrorKind::DimensionMismatch, "cusp graph is disconnected");
  std::vector<Index> rows_of;
  for (Index j = 0; j < rank_; ++j)
    if (!tree[j]) rows_of.push_back(j);
  IntMatrix h = IntMatrix::Zero(static_cast<Index>(rows_of.size()), rank_);
  for (Index i = 0; i < h.rows(); ++i) {
    const Index j = rows_of[i];
    h(i, j) = 1;
    if (ends[j].first < 0) continue;
    // add the tree path from ends.first to ends.second
    Index x = ends[j].first, y = ends[j].second;
    auto step = [&](Index& at, int sign) {
      Index e = parent[at];
      Index up = ends[e].first == at ? ends[e].second : ends[e].first;
      // boundary of e is [ends.first] - [ends.second]
      h(i, e) += (ends[e].first == up ? 1 : -1) * sign;
      at = up;
    };
    while (x != y) {
      if (depth[x] >= depth[y]) step(x, 1);
      else step(y, -1);
    }
  }
  cuspidal_ = Lattice::from_hnf(std::move(h), 1);
}

IntRow SymbolSpace::path_from_infinity(const Cusp& x) const {
  IntRow out = IntRow::Zero(rank_);
  if (x.den == 0) return out;
  const long N = level_;
  // Convergents p_k/q_k with p_{-1}/q_{-1} = 1/0 and p_{-2}/q_{-2} = 0/1.
  Integer pm2 = 0, qm2 = 1, pm1 = 1, qm1 = 0;
  Integer a = x.num, b = x.den;
  for (long k = 0;; ++k) {
    Integer t = floor_div(a, b);
    Integer pk = t * pm1 + pm2, qk = t * qm1 + qm2;
    long qa = mod_ui(qk, N), qb = mod_ui(qm1, N);
    if (k % 2 == 0) qa = mod(-qa, N);
    for (auto& [j, c] : coords_[symbol_index(qa, qb)]) out(j) += c;
    Integer r = a - t * b;
    pm2 = pm1;
    qm2 = qm1;
    pm1 = pk;
    qm1 = qk;
    if (r == 0) break;
    a = b;
    b = r;
  }
  return out;
}

IntRow SymbolSpace::path_coords(const Cusp& alpha, const Cusp& beta) const {
  return path_from_infinity(beta) - path_from_infinity(alpha);
}

IntRow SymbolSpace::path_to(Index cusp) const { return path_coords(cusp_reps_[0], cusp_reps_[cusp]); }

void SymbolSpace::serialize(std::ostream& out) const {
  out << "symbol-space 1\n" << level_ << ' ' << rank_ << ' ' << (dense_quotient_ ? 1 : 0) << '\n';
  IntMatrix syms(static_cast<Index>(symbols_.size()), 2);
  for (Index i = 0; i < syms.rows(); ++i) {
    syms(i, 0) = symbols_[i].u;
    syms(i, 1) = symbols_[i].v;
  }
  write_matrix(out, syms);
  auto triples = [](const std::vector<SparseVec>& vs) {
    Index n = 0;
    for (auto& v : vs) n += static_cast<Index>(v.size());
    IntMatrix m(n, 3);
    Index r = 0;
    for (Index i = 0; i < static_cast<Index>(vs.size()); ++i)
      for (auto& [k, x] : vs[i]) {
        m(r, 0) = i;
        m(r, 1) = k;
        m(r, 2) = x;
        ++r;
      }
    return m;
  };
  write_matrix(out, triples(coords_));
  write_matrix(out, triples(generators_));
  write_matrix(out, boundary_);
  write_matrix(out, cuspidal_.basis(), cuspidal_.denom());
}

SymbolSpace SymbolSpace::deserialize(std::istream& in) {
  std::string magic;
  int version = 0, dense = 0;
  SymbolSpace sp;
  if (!(in >> magic >> version) || magic != "symbol-space" || version != 1)
    throw Error(ErrorKind::CacheCorrupt, "not a symbol space");
  if (!(in >> sp.level_ >> sp.rank_ >> dense) || sp.level_ < 1 || sp.rank_ < 0)
    throw Error(ErrorKind::CacheCorrupt, "bad symbol space header");
  sp.dense_quotient_ = dense != 0;
  try {
    IntMatrix syms = read_matrix(in).matrix;
    IntMatrix coords = read_matrix(in).matrix;
    IntMatrix gens = read_matrix(in).matrix;
    sp.boundary_ = read_matrix(in).matrix;
    MatrixText h = read_matrix(in);
    for (Index i = 0; i < syms.rows(); ++i) sp.symbols_.push_back({syms(i, 0).get_si(), syms(i, 1).get_si()});
    if (sp.symbols_ != enumerate_manin_symbols(sp.level_)) throw Error(ErrorKind::CacheCorrupt, "symbol list differs");
    sp.index_symbols();
    const Index ns = static_cast<Index>(sp.symbols_.size());
    sp.coords_.assign(ns, {});
    sp.generators_.assign(sp.rank_, {});
    for (Index r = 0; r < coords.rows(); ++r) {
      Index i = coords(r, 0).get_si(), k = coords(r, 1).get_si();
      if (i < 0 || i >= ns || k < 0 || k >= sp.rank_) throw Error(ErrorKind::CacheCorrupt, "coordinate out of range");
      sp.coords_[i].emplace_back(k, coords(r, 2).get_si());
    }
    for (Index r = 0; r < gens.rows(); ++r) {
      Index j = gens(r, 0).get_si(), s = gens(r, 1).get_si();
      if (j < 0 || j >= sp.rank_ || s < 0 || s >= ns) throw Error(ErrorKind::CacheCorrupt, "generator out of range");
      sp.generators_[j].emplace_back(s, gens(r, 2).get_si());
    }
    sp.add_cusps();
    IntMatrix stored = sp.boundary_;
    sp.compute_boundary();
    if (stored != sp.boundary_) throw Error(ErrorKind::CacheCorrupt, "boundary matrix does not match symbols");
    sp.cuspidal_ = Lattice::from_hnf(std::move(h.matrix), h.denom);
    if (sp.cuspidal_.dim() != sp.rank_) throw Error(ErrorKind::CacheCorrupt, "cuspidal lattice has wrong dimension");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::CacheCorrupt) throw;
    throw Error(ErrorKind::CacheCorrupt, e.what());
  }
  return sp;
}

}  // namespace mtors
