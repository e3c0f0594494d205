#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lpcop {

//! Rectangular numeric table parsed from a headered CSV file. Ordinal
//! categorical columns are coded to 0..k-1 by a declared category order;
//! nothing is ever jittered.
struct Dataset {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  std::size_t rows = 0;

  std::size_t column_index(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
      throw std::invalid_argument("missing column: " + name);
    }
    return static_cast<std::size_t>(it - names.begin());
  }

  const std::vector<double>& column(const std::string& name) const {
    return columns[column_index(name)];
  }
};

//! Declared order of categories for one column, e.g. blue < light < dark.
using CategoryOrders = std::map<std::string, std::vector<std::string>>;

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    const auto a = s.find_first_not_of(" \t");
    const auto b = s.find_last_not_of(" \t");
    s = a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  }
  return out;
}

inline bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && !s.empty();
}

}  // namespace detail

//! Reads a headered CSV. Columns listed in `orders` are mapped to their
//! category codes; every other cell must parse as a finite number, and a
//! failure names the offending row and column.
inline Dataset ingest(const std::string& path,
                      const CategoryOrders& orders = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty file: " + path);
  }
  Dataset ds;
  ds.names = detail::split_csv_line(line);
  ds.columns.assign(ds.names.size(), {});

  std::vector<const std::vector<std::string>*> order_of(ds.names.size(),
                                                        nullptr);
  for (std::size_t c = 0; c < ds.names.size(); ++c) {
    const auto it = orders.find(ds.names[c]);
    if (it != orders.end()) order_of[c] = &it->second;
  }

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != ds.names.size()) {
      throw std::runtime_error("row " + std::to_string(lineno) + " has " +
                               std::to_string(cells.size()) + " cells, header has " +
                               std::to_string(ds.names.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double value = 0.0;
      if (order_of[c] != nullptr) {
        const auto& cats = *order_of[c];
        const auto it = std::find(cats.begin(), cats.end(), cells[c]);
        if (it == cats.end()) {
          throw std::runtime_error("row " + std::to_string(lineno) +
                                   ", column '" + ds.names[c] +
                                   "': undeclared category '" + cells[c] + "'");
        }
        value = static_cast<double>(it - cats.begin());
      } else if (!detail::parse_double(cells[c], value) ||
                 !std::isfinite(value)) {
        throw std::runtime_error("row " + std::to_string(lineno) +
                                 ", column '" + ds.names[c] +
                                 "': cannot parse '" + cells[c] + "'");
      }
      ds.columns[c].push_back(value);
    }
    ++ds.rows;
  }
  return ds;
}

}  // namespace lpcop
