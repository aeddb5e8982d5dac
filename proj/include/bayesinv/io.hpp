/*
 * Copyright 2026 The bayesinv Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BAYESINV_IO_HPP
#define BAYESINV_IO_HPP

/** @file
 * Plain CSV tables: one header row, comma separated, numbers written with 17
 * significant digits so that values round-trip exactly.
 */

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bayesinv/errors.hpp"

namespace bayesinv::io {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t k = 0; k < header.size(); ++k)
      if (header[k] == name) return k;
    throw IoError("csv: missing column '" + name + "'");
  }

  std::vector<double> values(const std::string& name) const {
    const std::size_t k = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[k]);
    return out;
  }
};

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

inline std::string to_csv(const Table& t) {
  std::ostringstream os;
  for (std::size_t k = 0; k < t.header.size(); ++k) os << (k ? "," : "") << t.header[k];
  os << '\n';
  for (const auto& r : t.rows) {
    if (r.size() != t.header.size()) throw ShapeError("csv: row width does not match header");
    for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << format_number(r[k]);
    os << '\n';
  }
  return os.str();
}

/// Table from equal-length columns.
inline Table columns_table(std::vector<std::string> header, const std::vector<Eigen::VectorXd>& columns) {
  detail::require_shape(header.size() == columns.size(), "columns_table: header/column count mismatch");
  Table t{std::move(header), {}};
  const Eigen::Index n = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns) detail::require_shape(c.size() == n, "columns_table: columns differ in length");
  t.rows.assign(static_cast<std::size_t>(n), std::vector<double>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k)
    for (Eigen::Index i = 0; i < n; ++i) t.rows[static_cast<std::size_t>(i)][k] = columns[k](i);
  return t;
}

/// Dense matrix with columns c0..c{n-1}.
inline Table matrix_table(const Eigen::MatrixXd& m) {
  Table t;
  for (Eigen::Index j = 0; j < m.cols(); ++j) t.header.push_back("c" + std::to_string(j));
  t.rows.assign(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      t.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
  return t;
}

inline double parse_number(const std::string& cell, std::size_t line) {
  std::string s;
  for (char ch : cell)
    if (ch != ' ' && ch != '\t' && ch != '\r') s.push_back(ch);
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError("csv: line " + std::to_string(line) + ": cannot parse '" + cell + "' as a number");
  }
}

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline Table parse_csv(std::istream& in) {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (t.header.empty()) {
      for (auto& c : cells) {
        std::string s;
        for (char ch : c)
          if (ch != ' ' && ch != '\t') s.push_back(ch);
        t.header.push_back(s);
      }
      continue;
    }
    if (cells.size() != t.header.size())
      throw IoError("csv: line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                    " fields, header has " + std::to_string(t.header.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_number(c, lineno));
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw IoError("csv: empty input (no header row)");
  return t;
}

inline Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file '" + path + "'");
  return parse_csv(in);
}

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace bayesinv::io

#endif  // BAYESINV_IO_HPP
