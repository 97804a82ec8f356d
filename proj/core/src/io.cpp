#include "lpra/io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lpra {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw InvalidInput(path + ": " + why);
}

}  // namespace

void write_matrix_market(const Matrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  out << "%%MatrixMarket matrix array real general\n";
  out << a.rows() << " " << a.cols() << "\n";
  // Array format is column-major.
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      out << format_double(a(i, j)) << "\n";
    }
  }
  if (!out) fail(path, "write failed");
}

Matrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");
  std::string header;
  if (!std::getline(in, header)) fail(path, "empty file");
  if (header.rfind("%%MatrixMarket", 0) != 0) fail(path, "missing MatrixMarket banner");
  if (header.find("array") == std::string::npos || header.find("real") == std::string::npos) {
    fail(path, "only 'array real' Matrix Market files are supported");
  }
  std::string line;
  Index rows = -1, cols = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    if (!(ss >> rows >> cols)) fail(path, "bad size line");
    break;
  }
  if (rows < 0 || cols < 0) fail(path, "missing size line");
  Matrix a(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      double v;
      if (!(in >> v)) fail(path, "truncated data section");
      a(i, j) = v;
    }
  }
  require_finite(a, path.c_str());
  return a;
}

void write_csv(const Matrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (j) out << ",";
      out << format_double(a(i, j));
    }
    out << "\n";
  }
  if (!out) fail(path, "write failed");
}

Matrix read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                     : comma - pos);
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        fail(path, "bad numeric cell '" + cell + "'");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(path, "ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return Matrix(0, 0);
  Matrix a(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  require_finite(a, path.c_str());
  return a;
}

namespace {

bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

}  // namespace

Matrix read_matrix_auto(const std::string& path) {
  if (ends_with(path, ".csv")) return read_csv(path);
  return read_matrix_market(path);
}

void write_matrix_auto(const Matrix& a, const std::string& path) {
  if (ends_with(path, ".csv")) {
    write_csv(a, path);
  } else {
    write_matrix_market(a, path);
  }
}

}  // namespace lpra
