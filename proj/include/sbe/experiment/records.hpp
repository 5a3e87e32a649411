#pragma once

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sbe/error.hpp"

namespace sbe {

/// One time sample of the run diagnostics.
struct DiagnosticsRecord {
  double time = 0.0;
  double mass = 0.0;
  double H = 0.0;
  double E = 0.0;
  double D = 0.0;
  double dist_total = 0.0;  // ||f - f_inf||
  double dist_local = 0.0;  // ||f - Pi f||
  double dist_hydro = 0.0;  // ||Pi f - f_inf||
  double pairing = 0.0;     // int grad phi . j dx
  double ratio_c1 = 0.0;    // D / dist_local^2
  double ratio_c6 = 0.0;    // E / dist_total^2
  double kappa_min = 0.0;
  double kappa_max = 0.0;
};

inline constexpr std::array<std::string_view, 13> kCsvColumns{
    "t",          "mass",       "H",       "E",        "D",        "dist_total", "dist_local",
    "dist_hydro", "pairing",    "ratio_c1", "ratio_c6", "kappa_min", "kappa_max"};

namespace detail {

inline std::array<double, 13> to_array(const DiagnosticsRecord& r) {
  return {r.time,       r.mass,    r.H,        r.E,        r.D,         r.dist_total, r.dist_local,
          r.dist_hydro, r.pairing, r.ratio_c1, r.ratio_c6, r.kappa_min, r.kappa_max};
}

inline DiagnosticsRecord from_array(const std::array<double, 13>& a) {
  return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8], a[9], a[10], a[11], a[12]};
}

}  // namespace detail

inline std::string csv_header() {
  std::string h;
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
    if (i) h += ',';
    h += kCsvColumns[i];
  }
  return h;
}

/// One row, 17 significant digits per field so that values round-trip exactly.
inline std::string csv_row(const DiagnosticsRecord& r) {
  std::string out;
  char buf[40];
  const auto a = detail::to_array(r);
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", a[i]);
    if (i) out += ',';
    out += buf;
  }
  return out;
}

inline void write_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records) {
  out << csv_header() << '\n';
  for (const auto& r : records) out << csv_row(r) << '\n';
}

inline void write_csv(const std::vector<DiagnosticsRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  write_csv(out, records);
}

struct CsvLoad {
  std::vector<DiagnosticsRecord> records;
  /// Number of incomplete trailing lines that were dropped.
  std::size_t warnings = 0;
};

/// Parses a diagnostics CSV. The header must match the schema exactly. A final
/// line without a terminating newline is treated as truncated and dropped
/// (counted in `warnings`); malformed interior lines are errors.
inline CsvLoad read_csv(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CsvLoad out;
  std::size_t pos = 0;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const bool complete = nl != std::string::npos;
    std::string line = text.substr(pos, complete ? nl - pos : std::string::npos);
    pos = complete ? nl + 1 : text.size();
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    if (!header_seen) {
      if (line != csv_header()) throw FormatError("csv: header does not match the diagnostics schema");
      header_seen = true;
      continue;
    }
    if (line.empty() && complete) continue;

    std::array<double, 13> vals{};
    std::size_t field = 0;
    bool ok = true;
    std::size_t start = 0;
    while (ok) {
      const std::size_t comma = line.find(',', start);
      const std::string tok = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (field >= vals.size() || tok.empty()) {
        ok = false;
        break;
      }
      char* end = nullptr;
      vals[field] = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size()) ok = false;
      ++field;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    ok = ok && field == vals.size();

    if (!complete) {
      ++out.warnings;  // truncated tail: drop regardless of content
      break;
    }
    if (!ok) throw FormatError("csv: malformed record on line " + std::to_string(lineno));
    out.records.push_back(detail::from_array(vals));
  }
  if (!header_seen) throw FormatError("csv: empty file");
  return out;
}

inline CsvLoad load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return read_csv(in);
}

}  // namespace sbe
