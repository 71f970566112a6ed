#include "mtors/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace mtors {

namespace {

std::string decimal(const Integer& x) { return x.get_str(); }

Json chain_json(const Chain& c) {
  Json a = Json::array();
  for (auto& x : c) a.push_back(decimal(x));
  return a;
}

Chain chain_from_json(const Json& j) {
  Chain c;
  for (auto& x : j) c.emplace_back(x.get<std::string>());
  return c;
}

std::string seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", s);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string row_torsion(const TheoremReport& r, bool f) {
  if (r.status == "verified") return format_chain(r.torsion, f);
  if (r.status == "inconclusive") return "INCONCLUSIVE";
  return "ERROR" + (r.notes.empty() ? std::string() : ": " + r.notes.back());
}

}  // namespace

std::string factored(const Integer& n) {
  if (n == 1) return "1";
  std::string s;
  for (auto& [p, e] : factor(n)) {
    if (!s.empty()) s += '*';
    s += decimal(p);
    if (e > 1) s += "^" + std::to_string(e);
  }
  return s;
}

std::string format_chain(const Chain& c, bool factor_entries) {
  if (c.empty()) return "trivial";
  std::string s = "[";
  for (size_t i = 0; i < c.size(); ++i) {
    if (i) s += " | ";
    s += factor_entries ? factored(c[i]) : decimal(c[i]);
  }
  return s + "]";
}

Chain parse_chain(const std::string& s) {
  auto fail = [&]() -> Chain { throw Error(ErrorKind::Parse, "bad invariant chain '" + s + "'"); };
  std::string t;
  for (char ch : s)
    if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
  if (t == "trivial") return {};
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') return fail();
  Chain out;
  std::stringstream entries(t.substr(1, t.size() - 2));
  std::string entry;
  const std::string body = t.substr(1, t.size() - 2);
  if (body.empty() || body.back() == '|') return fail();
  while (std::getline(entries, entry, '|')) {
    if (entry.empty()) return fail();
    Integer value = 1;
    std::stringstream factors(entry);
    std::string f;
    if (entry.back() == '*') return fail();
    while (std::getline(factors, f, '*')) {
      auto caret = f.find('^');
      std::string base = f.substr(0, caret);
      unsigned long e = 1;
      if (base.empty() || base.find_first_not_of("0123456789") != std::string::npos) return fail();
      if (caret != std::string::npos) {
        std::string ex = f.substr(caret + 1);
        if (ex.empty() || ex.size() > 4 || ex.find_first_not_of("0123456789") != std::string::npos) return fail();
        e = std::stoul(ex);
      }
      Integer b(base), pw;
      mpz_pow_ui(pw.get_mpz_t(), b.get_mpz_t(), e);
      value *= pw;
    }
    out.push_back(value);
  }
  return out;
}

Json report_to_json(const TheoremReport& r) {
  Json j;
  j["p"] = r.p;
  j["qs"] = r.qs;
  j["d"] = r.d;
  j["M_prime"] = chain_json(r.m_prime);
  j["C"] = chain_json(r.c);
  j["C_gal"] = chain_json(r.c_gal);
  j["C_Q"] = chain_json(r.c_q);
  j["torsion"] = chain_json(r.torsion);
  j["checks"] = {{"Mprime_in_C", r.mprime_in_c},
                 {"CQ_eq_CGal", r.cq_eq_cgal},
                 {"diamond_agrees", r.diamond_agrees},
                 {"CQ_in_CGal", r.cq_in_cgal},
                 {"annihilation", r.annihilation}};
  j["status"] = r.status;
  j["projection_q"] = r.projection_q;
  j["notes"] = r.notes;
  Json t = Json::object();
  for (auto& [k, v] : r.timings) t[k] = v;
  j["timings_s"] = t;
  return j;
}

TheoremReport report_from_json(const Json& j) {
  try {
    TheoremReport r;
    r.p = j.at("p").get<long>();
    r.qs = j.at("qs").get<std::vector<long>>();
    r.d = j.at("d").get<long>();
    r.m_prime = chain_from_json(j.at("M_prime"));
    r.c = chain_from_json(j.at("C"));
    r.c_gal = chain_from_json(j.at("C_gal"));
    r.c_q = chain_from_json(j.at("C_Q"));
    r.torsion = chain_from_json(j.at("torsion"));
    const Json& c = j.at("checks");
    r.mprime_in_c = c.at("Mprime_in_C").get<bool>();
    r.cq_eq_cgal = c.at("CQ_eq_CGal").get<bool>();
    r.diamond_agrees = c.at("diamond_agrees").get<bool>();
    r.cq_in_cgal = c.value("CQ_in_CGal", false);
    r.annihilation = c.value("annihilation", false);
    r.status = j.value("status", std::string());
    r.projection_q = j.value("projection_q", 0L);
    r.notes = j.value("notes", std::vector<std::string>{});
    for (auto& [k, v] : j.at("timings_s").items()) r.timings.emplace_back(k, v.get<double>());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("report: ") + e.what());
  }
}

std::string render_report(const TheoremReport& r, bool f) {
  std::ostringstream out;
  auto yes = [](bool b) { return b ? "yes" : "no"; };
  out << "p = " << r.p << '\n';
  out << "q used:";
  if (r.qs.empty()) out << " none";
  for (long q : r.qs) out << " T" << q;
  out << '\n';
  out << "Galois action: <" << r.d << ">\n";
  out << "M'      " << format_chain(r.m_prime, f) << '\n';
  out << "C       " << format_chain(r.c, f) << '\n';
  out << "C^Gal   " << format_chain(r.c_gal, f) << '\n';
  out << "C^Q     " << format_chain(r.c_q, f) << '\n';
  out << "M' in C: " << yes(r.mprime_in_c) << '\n';
  out << "C^Q in C^Gal: " << yes(r.cq_in_cgal) << '\n';
  out << "C^Q = C^Gal: " << yes(r.cq_eq_cgal) << '\n';
  out << "eta_q and iota*-1 kill C^Q: " << yes(r.annihilation) << '\n';
  out << "diamond kernel agrees: " << yes(r.diamond_agrees) << '\n';
  for (auto& n : r.notes) out << "note: " << n << '\n';
  out << "J1(" << r.p << ")(Q)_tors = " << (r.passed() ? format_chain(r.torsion, f) : "unknown") << '\n';
  out << (r.passed() ? "VERIFIED" : "INCONCLUSIVE") << '\n';
  return out.str();
}

TableFormat parse_table_format(const std::string& s) {
  if (s == "md") return TableFormat::Markdown;
  if (s == "csv") return TableFormat::Csv;
  if (s == "json") return TableFormat::Json;
  throw Error(ErrorKind::Parse, "unknown table format '" + s + "'");
}

std::string table_header(TableFormat f) {
  switch (f) {
    case TableFormat::Markdown:
      return "| p | J1(p)(Q)_tors | T_q | <d> | time (s) |\n|---|---|---|---|---|\n";
    case TableFormat::Csv:
      return "p,torsion,q,d,time_s\n";
    case TableFormat::Json:
      return "[\n";
  }
  return {};
}

std::string table_row(TableFormat f, const TheoremReport& r, bool factor_entries, bool first) {
  const std::string q = r.qs.empty() ? "-" : std::to_string(r.qs.front());
  const std::string tors = row_torsion(r, factor_entries);
  switch (f) {
    case TableFormat::Markdown:
      return "| " + std::to_string(r.p) + " | " + tors + " | " + (r.qs.empty() ? "-" : "T" + q) + " | <" + std::to_string(r.d) +
             "> | " + seconds(total_seconds(r)) + " |\n";
    case TableFormat::Csv:
      return std::to_string(r.p) + "," + csv_field(tors) + "," + q + "," + std::to_string(r.d) + "," + seconds(total_seconds(r)) + "\n";
    case TableFormat::Json:
      return std::string(first ? "" : ",\n") + report_to_json(r).dump();
  }
  return {};
}

std::string table_footer(TableFormat f) { return f == TableFormat::Json ? "\n]\n" : ""; }

double total_seconds(const TheoremReport& r) {
  for (auto& [k, v] : r.timings)
    if (k == "total") return v;
  return 0;
}

TheoremReport verify_cached(long p, const VerifyOptions& options, ArtifactCache* cache, bool* hit) {
  const bool storable = cache != nullptr;
  std::string key = cache_prefix(p) + "/report";
  if (!options.qs.empty() || options.d != 0 || options.q_bound != 50) {
    key += "_q";
    if (options.qs.empty()) key += "auto" + std::to_string(options.q_bound);
    for (size_t i = 0; i < options.qs.size(); ++i) key += (i ? "-" : "") + std::to_string(options.qs[i]);
    key += "_d" + std::to_string(options.d);
  }
  key += ".json";
  if (hit) *hit = false;
  if (storable) {
    if (auto text = cache->get(key)) {
      Json j;
      try {
        j = Json::parse(*text);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::CacheCorrupt, key + ": " + e.what());
      }
      TheoremReport r = report_from_json(j);
      if (r.p != p) throw Error(ErrorKind::CacheCorrupt, key + " holds another prime");
      if (hit) *hit = true;
      return r;
    }
  }
  TheoremReport r = verify(p, options, cache);
  if (storable) cache->put(key, report_to_json(r).dump(2) + "\n");
  return r;
}

}  // namespace mtors
