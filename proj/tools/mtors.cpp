#include "mtors/cache.hpp"
#include "mtors/matrix_io.hpp"
#include "mtors/report.hpp"
#include "mtors/torsion.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <condition_variable>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

using namespace mtors;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitUsage = 64;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string cache_dir;
  bool no_cache = false;
  bool factor = false;
  bool deterministic = false;
  unsigned jobs = 1;
};

long parse_long(const std::string& s, const std::string& what) {
  if (s.empty() || s.size() > 12 || s.find_first_not_of("0123456789") != std::string::npos)
    throw UsageError(what + " must be a positive integer, got '" + s + "'");
  return std::stol(s);
}

long parse_prime(const std::string& s) {
  long p = parse_long(s, "p");
  if (p < 5 || !is_prime(p)) throw UsageError(s + " is not a prime >= 5");
  return p;
}

VerifyOptions parse_options(const std::string& q, const std::string& d, long p) {
  VerifyOptions o;
  if (q != "auto") {
    std::stringstream in(q);
    std::string item;
    while (std::getline(in, item, ',')) o.qs.push_back(parse_long(item, "q"));
    if (o.qs.empty()) throw UsageError("empty --q list");
  }
  if (d != "auto") {
    o.d = parse_long(d, "d");
    if (o.d % p == 0) throw UsageError("d must be a unit mod p");
  }
  return o;
}

std::unique_ptr<FileCache> open_cache(const Globals& g) {
  if (g.no_cache) return nullptr;
  return std::make_unique<FileCache>(FileCache::resolve_root(g.cache_dir));
}

void log_report(const TheoremReport& r, bool hit) {
  std::cerr << "[mtors] p=" << r.p << (hit ? " (cached)" : "");
  for (auto& [k, v] : r.timings) std::cerr << ' ' << k << '=' << v << 's';
  std::cerr << '\n';
}

int status_code(const TheoremReport& r) { return r.passed() ? kExitOk : kExitInconclusive; }

int cmd_verify(const Globals& g, const std::string& p_text, const std::string& q, const std::string& d, const std::string& json_path) {
  long p = parse_prime(p_text);
  VerifyOptions o = parse_options(q, d, p);
  auto cache = open_cache(g);
  bool hit = false;
  TheoremReport r = verify_cached(p, o, cache.get(), &hit);
  log_report(r, hit);
  std::cout << render_report(r, g.factor);
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    out << report_to_json(r).dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + json_path);
  }
  return status_code(r);
}

int cmd_table(const Globals& g, long from, long to, const std::string& format) {
  TableFormat f;
  try {
    f = parse_table_format(format);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  std::vector<long> primes;
  for (long p = std::max(from, 5L); p <= to; ++p)
    if (is_prime(p)) primes.push_back(p);
  auto cache = open_cache(g);

  std::vector<std::optional<TheoremReport>> results(primes.size());
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i; (i = next++) < primes.size();) {
      TheoremReport r;
      bool hit = false;
      try {
        r = verify_cached(primes[i], {}, cache.get(), &hit);
        log_report(r, hit);
      } catch (const std::exception& e) {
        r.p = primes[i];
        r.status = "error";
        r.notes.push_back(e.what());
        std::cerr << "[mtors] p=" << primes[i] << " failed: " << e.what() << '\n';
      }
      std::lock_guard<std::mutex> lock(mu);
      results[i] = std::move(r);
      cv.notify_all();
    }
  };
  const unsigned jobs = g.deterministic ? 1 : std::max(1u, g.jobs);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<size_t>(jobs, primes.size()); ++t) pool.emplace_back(worker);

  int code = kExitOk;
  std::cout << table_header(f) << std::flush;
  for (size_t i = 0; i < primes.size(); ++i) {
    std::unique_lock<std::mutex> lock(mu);
    cv.wait(lock, [&] { return results[i].has_value(); });
    const TheoremReport& r = *results[i];
    std::cout << table_row(f, r, g.factor, i == 0) << std::flush;
    if (r.status == "error") code = kExitError;
    else if (!r.passed() && code == kExitOk) code = kExitInconclusive;
  }
  for (auto& t : pool) t.join();
  std::cout << table_footer(f);
  return code;
}

int cmd_op(const Globals& g, const std::string& p_text, const std::string& name, const std::string& out_path, bool cuspidal) {
  long p = parse_prime(p_text);
  auto cache = open_cache(g);
  TorsionModel model = TorsionModel::build(p, cache.get());
  const OperatorMatrix* op = nullptr;
  try {
    op = &model.op(name);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse || e.kind() == ErrorKind::DimensionMismatch || e.kind() == ErrorKind::BadUnit)
      throw UsageError(e.what());
    throw;
  }
  const IntMatrix& m = cuspidal ? op->cuspidal_matrix() : op->matrix();
  if (out_path.empty()) {
    write_matrix(std::cout, m);
  } else {
    std::ofstream out(out_path);
    write_matrix(out, m);
    if (!out) throw std::runtime_error("cannot write " + out_path);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rational torsion of J1(p) from modular symbols"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--cache", g.cache_dir, "cache directory (default $MTORS_CACHE, else ./.mtors-cache)");
  app.add_flag("--no-cache", g.no_cache, "do not read or write the cache");
  app.add_flag("--factor", g.factor, "print invariants in factored form");
  app.add_flag("--deterministic", g.deterministic, "single-threaded run");
  app.add_option("--jobs", g.jobs, "primes processed concurrently by table")->check(CLI::PositiveNumber);

  std::string p_text, q = "auto", d = "auto", json_path, format = "md", name, out_path;
  long from = 0, to = 0;
  bool cuspidal = false;

  auto* verify_cmd = app.add_subcommand("verify", "run the torsion pipeline for one prime");
  verify_cmd->add_option("p", p_text, "prime level")->required();
  verify_cmd->add_option("--q", q, "auto, or a comma separated list of primes");
  verify_cmd->add_option("--d", d, "auto, or the Galois generator");
  verify_cmd->add_option("--json", json_path, "write the report as JSON");

  auto* table_cmd = app.add_subcommand("table", "reproduce the torsion table over a range of primes");
  table_cmd->add_option("--from", from, "first p")->required();
  table_cmd->add_option("--to", to, "last p")->required();
  table_cmd->add_option("--format", format, "md, csv or json");

  auto* op_cmd = app.add_subcommand("op", "write an operator matrix");
  op_cmd->add_option("p", p_text, "prime level")->required();
  op_cmd->add_option("--name", name, "T<n>, diamond:<d>, star or eta:<q>")->required();
  op_cmd->add_option("--out", out_path, "output file (default stdout)");
  op_cmd->add_flag("--cuspidal", cuspidal, "restrict to the integral cuspidal lattice");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*verify_cmd) return cmd_verify(g, p_text, q, d, json_path);
    if (*table_cmd) return cmd_table(g, from, to, format);
    if (*op_cmd) return cmd_op(g, p_text, name, out_path, cuspidal);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}
