/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "xbar/lut_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "xbar/errors.hpp"

namespace xbar {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_row(const std::string &line, std::size_t line_no,
                              std::size_t expected) {
  std::vector<double> out;
  out.reserve(expected);
  const char *p = line.data();
  const char *end = line.data() + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) {
      ++p;
    }
    if (p >= end) {
      break;
    }
    double v = 0.0;
    const auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc()) {
      std::ostringstream os;
      os << "line " << line_no << ": malformed number at column " << (out.size() + 1);
      throw ParseError(os.str());
    }
    out.push_back(v);
    p = next;
  }
  if (expected != 0 && out.size() != expected) {
    std::ostringstream os;
    os << "line " << line_no << ": expected " << expected << " values, found " << out.size();
    throw ParseError(os.str());
  }
  return out;
}

} // namespace

void save_tables(const std::vector<LookupTable> &tables, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  for (const auto &t : tables) {
    t.validate();
    out << "LUT v1 " << direction_name(t.direction) << ' ' << t.n_g() << ' ' << t.n_q() << '\n';
    for (std::size_t i = 0; i < t.n_g(); ++i) {
      out << (i ? " " : "") << fmt17(t.g_grid[i]);
    }
    out << '\n';
    for (std::size_t j = 0; j < t.n_q(); ++j) {
      out << (j ? " " : "") << fmt17(t.q_grid[j]);
    }
    out << '\n';
    for (std::size_t i = 0; i < t.n_g(); ++i) {
      for (std::size_t j = 0; j < t.n_q(); ++j) {
        out << (j ? " " : "") << fmt17(t.delta_g(i, j));
      }
      out << '\n';
    }
  }
  if (!out.good()) {
    throw IoError("write failure on '" + path.string() + "'");
  }
}

std::vector<LookupTable> load_tables(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  std::vector<LookupTable> tables;
  std::string line;
  std::size_t line_no = 0;

  auto next_line = [&](bool required) -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      // skip blank separator lines between tables
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        return true;
      }
    }
    if (required) {
      std::ostringstream os;
      os << "line " << line_no + 1 << ": unexpected end of file";
      throw ParseError(os.str());
    }
    return false;
  };

  while (next_line(false)) {
    std::istringstream hdr(line);
    std::string magic, version, dir;
    std::size_t n_g = 0, n_q = 0;
    hdr >> magic >> version >> dir >> n_g >> n_q;
    if (magic != "LUT" || version != "v1" || hdr.fail()) {
      std::ostringstream os;
      os << "line " << line_no << ": expected header 'LUT v1 <direction> <n_g> <n_q>'";
      throw ParseError(os.str());
    }
    LookupTable t;
    t.direction = parse_direction(dir);
    if (n_g < 2 || n_q < 2) {
      std::ostringstream os;
      os << "line " << line_no << ": table dimensions " << n_g << "x" << n_q << " too small";
      throw ParseError(os.str());
    }
    next_line(true);
    t.g_grid = parse_row(line, line_no, n_g);
    next_line(true);
    t.q_grid = parse_row(line, line_no, n_q);
    t.delta_g = Matrix(n_g, n_q);
    for (std::size_t i = 0; i < n_g; ++i) {
      next_line(true);
      const auto row = parse_row(line, line_no, n_q);
      for (std::size_t j = 0; j < n_q; ++j) {
        t.delta_g(i, j) = row[j];
      }
    }
    t.validate();
    tables.push_back(std::move(t));
  }
  return tables;
}

} // namespace xbar
