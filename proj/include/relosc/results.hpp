#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "relosc/level_solver.hpp"
#include "relosc/scalar.hpp"

namespace relosc {

inline constexpr int kSchemaVersion = 1;

/// Column-typed table; every value is kept as text except integer columns,
/// which JSON emits as numbers.
struct Table {
  std::vector<std::string> columns;
  std::vector<bool> integer_column;
  std::vector<std::vector<std::string>> rows;

  void add_column(std::string name, bool is_integer = false) {
    columns.push_back(std::move(name));
    integer_column.push_back(is_integer);
  }
  size_t column(std::string_view name) const {
    for (size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw std::out_of_range("no column " + std::string(name));
  }
};

inline std::string csv_field(std::string_view v) {
  if (v.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(v);
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

/// RFC 4180: CRLF line breaks, quoted fields where needed.
inline void write_csv(std::ostream& os, const Table& t) {
  for (size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
  os << "\r\n";
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
    os << "\r\n";
  }
}

inline nlohmann::ordered_json to_json(const Table& t) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj;
    obj["schema_version"] = kSchemaVersion;
    for (size_t i = 0; i < t.columns.size(); ++i) {
      const auto& v = row[i];
      if (t.integer_column[i] && !v.empty()) {
        obj[t.columns[i]] = std::stol(v);
      } else if (v.empty()) {
        obj[t.columns[i]] = nullptr;
      } else {
        obj[t.columns[i]] = v;
      }
    }
    arr.push_back(std::move(obj));
  }
  return arr;
}

inline void write_json(std::ostream& os, const Table& t) { os << to_json(t).dump(2) << "\n"; }

enum class OutputFormat { csv, json };

inline void write_table(std::ostream& os, const Table& t, OutputFormat f) {
  if (f == OutputFormat::csv) {
    write_csv(os, t);
  } else {
    write_json(os, t);
  }
}

inline std::string format_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", s);
  return buf;
}

/// One solved (or failed) level.
struct ResultRow {
  std::string omega;
  int n = 0;
  std::string frame;
  std::string variant;
  std::string branch;
  std::string E;
  std::string Im_E;
  std::string lambda;
  std::string residual;
  int basis_blocks = 0;
  int digits = 0;
  std::string sigma;
  std::string y_or_theta;
  std::string wall_time_s;
  std::string error;
};

inline Table level_table(std::vector<ResultRow> rows) {
  auto frame_rank = [](const std::string& f) { return f == "real" ? 0 : f == "translated" ? 1 : 2; };
  std::stable_sort(rows.begin(), rows.end(), [&](const ResultRow& a, const ResultRow& b) {
    const double oa = std::stod(a.omega);
    const double ob = std::stod(b.omega);
    return std::tuple(oa, a.n, frame_rank(a.frame)) < std::tuple(ob, b.n, frame_rank(b.frame));
  });
  Table t;
  for (const char* c : {"omega", "n", "frame", "variant", "branch", "E", "Im_E", "lambda", "residual", "basis_blocks",
                        "digits", "sigma", "y_or_theta", "wall_time_s", "error"}) {
    const std::string name(c);
    t.add_column(name, name == "n" || name == "basis_blocks" || name == "digits");
  }
  for (const auto& r : rows) {
    t.rows.push_back({r.omega, std::to_string(r.n), r.frame, r.variant, r.branch, r.E, r.Im_E, r.lambda, r.residual,
                      std::to_string(r.basis_blocks), std::to_string(r.digits), r.sigma, r.y_or_theta,
                      r.wall_time_s, r.error});
  }
  return t;
}

template <class Real>
ResultRow make_row(const LevelResult<Real>& r, int digits, std::string omega_text) {
  ResultRow row;
  row.omega = std::move(omega_text);
  row.n = r.n;
  row.frame = frame_name(r.frame);
  row.variant = variant_name(r.variant);
  row.branch = branch_name(r.branch);
  row.E = to_decimal_string(r.energy.real(), digits);
  row.Im_E = to_decimal_string(r.energy.imag(), digits, true);
  row.lambda = to_decimal_string(r.lambda, digits);
  row.residual = r.trace.empty() ? "" : to_decimal_string(r.trace.back().residual, 6, true);
  row.basis_blocks = r.basis_blocks;
  row.digits = digits;
  row.sigma = to_decimal_string(r.sigma, 6);
  row.y_or_theta = to_decimal_string(r.y_or_theta, 6);
  return row;
}

}  // namespace relosc
