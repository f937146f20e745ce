#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "isofun/core.hpp"
#include "isofun/matrix.hpp"
#include "isofun/verify.hpp"

namespace isofun {

/// Matrix wire format: JSON array of rows, each row an array of finite
/// numbers; square-ness checked on load.
inline SquareMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("matrix JSON must be a non-empty array of rows");
  const int n = static_cast<int>(j.size());
  std::vector<double> entries;
  entries.reserve(static_cast<std::size_t>(n) * n);
  for (const auto& row : j) {
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw ParseError("matrix JSON must be square (every row of length " + std::to_string(n) + ")");
    for (const auto& v : row) {
      if (!v.is_number()) throw ParseError("matrix entries must be numbers");
      const double x = v.get<double>();
      if (!std::isfinite(x)) throw ParseError("matrix entries must be finite");
      entries.push_back(x);
    }
  }
  return SquareMatrix(n, std::move(entries));
}

inline nlohmann::json matrix_to_json(const SquareMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.dim(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline SquareMatrix load_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("bad JSON in '" + path.string() + "': " + e.what());
  }
  return matrix_from_json(j);
}

/// Fixed 17-significant-digit formatting used in all report output, so
/// identical runs serialize byte-identically.
inline std::string format_sig17(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// A suite outcome tagged with the function it ran against.
struct FunctionReport {
  std::string function;
  PropertyReport report;
};

namespace detail {

inline void append_json_string(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", static_cast<unsigned>(static_cast<unsigned char>(c)));
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

inline void append_matrix(std::string& out, const SquareMatrix& m) {
  out += '[';
  for (int i = 0; i < m.dim(); ++i) {
    if (i) out += ',';
    out += '[';
    for (int j = 0; j < m.dim(); ++j) {
      if (j) out += ',';
      out += format_sig17(m(i, j));
    }
    out += ']';
  }
  out += ']';
}

inline void append_counterexample(std::string& out, const Counterexample& ce) {
  out += '{';
  out += "\"function\":";
  append_json_string(out, ce.function);
  out += ",\"matrices\":{";
  for (std::size_t k = 0; k < ce.matrices.size(); ++k) {
    if (k) out += ',';
    append_json_string(out, ce.matrices[k].first);
    out += ':';
    append_matrix(out, ce.matrices[k].second);
  }
  out += "},\"values\":{";
  for (std::size_t k = 0; k < ce.values.size(); ++k) {
    if (k) out += ',';
    append_json_string(out, ce.values[k].first);
    out += ':';
    out += format_sig17(ce.values[k].second);
  }
  out += "}}";
}

}  // namespace detail

/// Hand-rolled serializer: fixed member order and 17-digit numbers keep the
/// output reproducible across runs.
inline std::string reports_to_json(std::span<const FunctionReport> rows) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& [function, r] = rows[i];
    out += "  {\"function\":";
    detail::append_json_string(out, function);
    out += ",\"property\":";
    detail::append_json_string(out, r.property);
    out += ",\"pass\":";
    out += r.pass ? "true" : "false";
    out += ",\"samples_run\":" + std::to_string(r.samples_run);
    out += ",\"worst_violation\":" + format_sig17(r.worst_violation);
    if (r.counterexample) {
      out += ",\"counterexample\":";
      detail::append_counterexample(out, *r.counterexample);
    }
    out += i + 1 < rows.size() ? "},\n" : "}\n";
  }
  out += "]\n";
  return out;
}

inline std::string reports_to_csv(std::span<const FunctionReport> rows) {
  std::string out = "function,property,pass,worst_violation,samples_run\n";
  for (const auto& [function, r] : rows) {
    out += function + ',' + r.property + ',';
    out += r.pass ? "true" : "false";
    out += ',' + format_sig17(r.worst_violation) + ',' + std::to_string(r.samples_run) + '\n';
  }
  return out;
}

/// Parse a verify-style JSON report array back into rows (for merging).
inline std::vector<FunctionReport> reports_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad report JSON: ") + e.what());
  }
  if (!j.is_array()) throw ParseError("report JSON must be an array");
  std::vector<FunctionReport> rows;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("property") || !item.contains("pass") ||
        !item.contains("samples_run") || !item.contains("worst_violation"))
      throw ParseError("report entries need property, pass, samples_run, worst_violation");
    FunctionReport row;
    row.function = item.value("function", std::string("unknown"));
    row.report.property = item.at("property").get<std::string>();
    row.report.pass = item.at("pass").get<bool>();
    row.report.samples_run = item.at("samples_run").get<int>();
    row.report.worst_violation =
        item.at("worst_violation").is_null() ? std::nan("") : item.at("worst_violation").get<double>();
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file '" + path.string() + "'");
  out << text;
}

}  // namespace isofun
