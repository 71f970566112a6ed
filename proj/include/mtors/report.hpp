#pragma once

#include "mtors/factor.hpp"
#include "mtors/torsion.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace mtors {

using Json = nlohmann::ordered_json;

// "2^2*3*7"
std::string factored(const Integer& n);
// "[d1 | d2 | ...]" or "trivial"
std::string format_chain(const Chain& c, bool factor_entries = false);
// Inverse of format_chain for both plain and factored entries.  Throws Parse.
Chain parse_chain(const std::string& s);

Json report_to_json(const TheoremReport& r);
TheoremReport report_from_json(const Json& j);

// Human-readable report, one field per line.
std::string render_report(const TheoremReport& r, bool factor_entries = false);

enum class TableFormat { Markdown, Csv, Json };

TableFormat parse_table_format(const std::string& s);
std::string table_header(TableFormat f);
// A failed prime has an empty `status` and the message in notes.
std::string table_row(TableFormat f, const TheoremReport& r, bool factor_entries = false, bool first = true);
std::string table_footer(TableFormat f);

double total_seconds(const TheoremReport& r);

// verify() backed by gamma1_<p>/report.json, or report_q<qs>_d<d>.json for
// explicit options.  A warm cache returns the stored report unchanged.
TheoremReport verify_cached(long p, const VerifyOptions& options, ArtifactCache* cache, bool* hit = nullptr);

}  // namespace mtors
