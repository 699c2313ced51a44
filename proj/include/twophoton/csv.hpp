#pragma once

// Grid CSV files: `x,re,im` for one photon, `x1,x2,re,im` (row-major, x1
// outer) for two. Numbers use 17 significant digits; lines starting with
// `#` are comments.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"

namespace twophoton {

struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void put_row(std::ostream& os, std::initializer_list<double> v) {
  char buf[40];
  bool first = true;
  for (double d : v) {
    std::snprintf(buf, sizeof buf, "%.17g", d);
    if (!first) os << ',';
    os << buf;
    first = false;
  }
  os << '\n';
}

/// Data rows of a CSV with the given header; comment lines are collected.
inline std::vector<std::vector<double>> read_rows(std::istream& is, const std::string& header, std::size_t cols,
                                                  std::vector<std::string>* comments) {
  std::string line;
  bool seen_header = false;
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (comments) comments->push_back(line.substr(line.find_first_not_of("# ") == std::string::npos
                                                        ? line.size()
                                                        : line.find_first_not_of("# ")));
      continue;
    }
    if (!seen_header) {
      std::string compact;
      for (char ch : line)
        if (ch != ' ') compact += ch;
      if (compact != header) throw CsvError("expected header '" + header + "', got '" + line + "'");
      seen_header = true;
      continue;
    }
    std::vector<double> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double d = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw CsvError("line " + std::to_string(lineno) + ": not a number: '" + cell + "'");
      r.push_back(d);
    }
    if (r.size() != cols) throw CsvError("line " + std::to_string(lineno) + ": expected " + std::to_string(cols) + " columns");
    rows.push_back(std::move(r));
  }
  if (!seen_header) throw CsvError("missing header '" + header + "'");
  return rows;
}

}  // namespace detail

inline void write_csv(std::ostream& os, const Wavefunction1& psi, const std::string& comment = {}) {
  if (!comment.empty()) os << "# " << comment << '\n';
  os << "x,re,im\n";
  const auto& g = psi.grid();
  for (std::size_t i = 0; i < g.size(); ++i) detail::put_row(os, {g[i], psi[i].real(), psi[i].imag()});
}

inline void write_csv(std::ostream& os, const Wavefunction2& psi, const std::string& comment = {}) {
  if (!comment.empty()) os << "# " << comment << '\n';
  os << "x1,x2,re,im\n";
  const auto& g = psi.grid();
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) {
      const cplx v = psi(i, j);
      detail::put_row(os, {g[i], g[j], v.real(), v.imag()});
    }
}

inline Wavefunction1 read_csv1(std::istream& is, std::vector<std::string>* comments = nullptr) {
  auto rows = detail::read_rows(is, "x,re,im", 3, comments);
  if (rows.size() < 2) throw CsvError("need at least two rows");
  std::vector<double> x(rows.size());
  std::vector<cplx> a(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    x[i] = rows[i][0];
    a[i] = {rows[i][1], rows[i][2]};
  }
  try {
    return Wavefunction1::sampled(Grid1D::from_points(x), std::move(a));
  } catch (const std::invalid_argument& e) {
    throw CsvError(e.what());
  }
}

/// Reads a square two-photon grid. `policy` controls how an asymmetric file
/// is treated.
inline Wavefunction2 read_csv2(std::istream& is, std::vector<std::string>* comments = nullptr,
                               SymmetryPolicy policy = SymmetryPolicy::require_exact) {
  auto rows = detail::read_rows(is, "x1,x2,re,im", 4, comments);
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(rows.size()))));
  if (n < 2 || n * n != rows.size()) throw CsvError("two-photon file is not a square grid");
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = rows[j][1];
  std::vector<cplx> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto& r = rows[i * n + j];
      if (r[0] != x[i] || r[1] != x[j]) throw CsvError("two-photon file is not row-major over one grid");
      a[i * n + j] = {r[2], r[3]};
    }
  try {
    return Wavefunction2::from_samples(Grid1D::from_points(x), std::move(a), policy);
  } catch (const std::invalid_argument& e) {
    throw CsvError(e.what());
  }
}

}  // namespace twophoton
