#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "ggmsel/core.hpp"

namespace ggmsel::io {

/// Reals are written with 12 significant digits so reruns diff cleanly.
inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string format_optional(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string();
}

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                            : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

inline std::optional<double> parse_real(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

/// Reads observations from comma-separated text: one row per observation,
/// optional header of variable names (detected when any first-row field is
/// not a number), '.' decimal separator. Blank lines are skipped.
inline DataMatrix read_data_csv(std::istream& in, const std::string& source = "<input>") {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (names.empty() && rows.empty()) {
      bool numeric = true;
      for (const auto& f : fields) numeric = numeric && parse_real(f).has_value();
      if (!numeric) {
        names = std::move(fields);
        width = names.size();
        continue;
      }
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width)
      fail(ErrorKind::parse, source + ": row " + std::to_string(line_no) + ": expected " +
                                 std::to_string(width) + " fields, found " + std::to_string(fields.size()));
    std::vector<double> row;
    row.reserve(width);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto v = parse_real(fields[c]);
      if (!v)
        fail(ErrorKind::parse, source + ": row " + std::to_string(line_no) + ", column " +
                                   std::to_string(c + 1) + ": cannot parse '" + fields[c] + "'");
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorKind::invalid_data, source + ": no observations");
  Matrix values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c)
      values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return DataMatrix(std::move(values), std::move(names));
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::io, "cannot open '" + path.string() + "' for reading");
  return in;
}

inline DataMatrix read_data_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_data_csv(in, path.string());
}

/// Writes `contents` to a sibling temporary file and renames it over `path`,
/// so the target is either untouched or complete.
inline void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorKind::io, "cannot open '" + tmp.string() + "' for writing");
    out << contents;
    out.flush();
    if (!out.good()) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      fail(ErrorKind::io, "write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorKind::io, "cannot move output into place at '" + path.string() + "'");
  }
}

inline std::string data_csv(const DataMatrix& data) {
  std::ostringstream out;
  const auto& names = data.variable_names();
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << '\n';
  for (Eigen::Index r = 0; r < data.n(); ++r) {
    for (Eigen::Index c = 0; c < data.d(); ++c) out << (c ? "," : "") << format_real(data.values()(r, c));
    out << '\n';
  }
  return out.str();
}

/// Square matrix with a header row of variable names.
inline std::string matrix_csv(const SymmetricMatrix& m, const std::vector<std::string>& names) {
  std::ostringstream out;
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << '\n';
  for (Eigen::Index i = 0; i < m.dim(); ++i) {
    for (Eigen::Index j = 0; j < m.dim(); ++j) out << (j ? "," : "") << format_real(m(i, j));
    out << '\n';
  }
  return out.str();
}

/// node_i,node_j,precision_value; the value column is empty without K.
inline std::string edges_csv(const EdgeSet& edges, const std::vector<std::string>& names,
                             const SymmetricMatrix* precision = nullptr) {
  std::ostringstream out;
  out << "node_i,node_j,precision_value\n";
  for (const auto& e : edges) {
    out << names[static_cast<std::size_t>(e.i)] << ',' << names[static_cast<std::size_t>(e.j)] << ',';
    if (precision != nullptr) out << format_real((*precision)(e.i, e.j));
    out << '\n';
  }
  return out.str();
}

/// Reads undirected interactions given as node-name pairs in the first two
/// columns, resolved against `names`. Unknown names raise an unmatched-node
/// error listing every offender; reversed and duplicate rows collapse. A
/// leading `node_i,...` header row is skipped.
inline EdgeSet read_edge_list(std::istream& in, const std::vector<std::string>& names,
                              const std::string& source = "<input>") {
  std::map<std::string, int, std::less<>> index;
  for (std::size_t i = 0; i < names.size(); ++i) index.emplace(names[i], static_cast<int>(i));

  std::vector<Edge> edges;
  std::set<std::string> unmatched;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < 2)
      fail(ErrorKind::parse, source + ": row " + std::to_string(line_no) + ": expected two node names");
    const auto a = index.find(fields[0]);
    const auto b = index.find(fields[1]);
    if (first && (a == index.end() || b == index.end()) && fields[0] == "node_i") {
      first = false;
      continue;
    }
    first = false;
    if (a == index.end()) unmatched.insert(fields[0]);
    if (b == index.end()) unmatched.insert(fields[1]);
    if (a == index.end() || b == index.end()) continue;
    if (a->second == b->second) continue;
    edges.push_back({a->second, b->second});
  }
  if (!unmatched.empty()) {
    std::string list;
    for (const auto& u : unmatched) list += (list.empty() ? "" : ", ") + u;
    fail(ErrorKind::unmatched_node, source + ": unknown node names: " + list);
  }
  return EdgeSet(static_cast<int>(names.size()), std::move(edges));
}

inline EdgeSet read_edge_list(const std::filesystem::path& path, const std::vector<std::string>& names) {
  auto in = open_input(path);
  return read_edge_list(in, names, path.string());
}

}  // namespace ggmsel::io
