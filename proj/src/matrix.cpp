#include "sklab/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace sklab {

Matrix make_matrix(int rows, int cols, double fill) {
  Matrix m;
  m.rows = rows;
  m.cols = cols;
  m.a.assign(static_cast<std::size_t>(rows) * cols, fill);
  return m;
}

void validate_matrix(const Matrix& m) {
  if (m.rows < 1 || m.cols < 1)
    throw std::invalid_argument("matrix must have at least one row and column");
  if (m.a.size() != static_cast<std::size_t>(m.rows) * m.cols)
    throw std::invalid_argument("matrix storage size does not match dimensions");
  bool any_positive = false;
  for (double v : m.a) {
    if (!std::isfinite(v) || v < 0)
      throw std::invalid_argument("matrix entries must be finite and nonnegative");
    if (v > 0) any_positive = true;
  }
  if (!any_positive)
    throw std::invalid_argument("matrix must have at least one positive entry");
}

std::vector<double> row_sums(const Matrix& m) {
  std::vector<double> r(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < m.cols; ++j) s += m.at(i, j);
    r[i] = s;
  }
  return r;
}

std::vector<double> col_sums(const Matrix& m) {
  std::vector<double> c(m.cols, 0.0);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) c[j] += m.at(i, j);
  return c;
}

DeviationReport deviation(const Matrix& m) {
  if (!m.square()) throw std::invalid_argument("deviation requires a square matrix");
  const std::vector<double> r = row_sums(m);
  const std::vector<double> c = col_sums(m);
  DeviationReport d;
  d.max_row = d.min_row = r[0];
  d.max_col = d.min_col = c[0];
  double l2r = 0, l2c = 0;
  for (double v : r) {
    d.l1_row += std::fabs(v - 1.0);
    l2r += (v - 1.0) * (v - 1.0);
    d.max_row = std::max(d.max_row, v);
    d.min_row = std::min(d.min_row, v);
  }
  for (double v : c) {
    d.l1_col += std::fabs(v - 1.0);
    l2c += (v - 1.0) * (v - 1.0);
    d.max_col = std::max(d.max_col, v);
    d.min_col = std::min(d.min_col, v);
  }
  d.l2_row = std::sqrt(l2r);
  d.l2_col = std::sqrt(l2c);
  d.max_deviation =
      std::max(std::max(std::fabs(d.max_row - 1.0), std::fabs(1.0 - d.min_row)),
               std::max(std::fabs(d.max_col - 1.0), std::fabs(1.0 - d.min_col)));
  return d;
}

StandardSide standardized_side(const Matrix& m) {
  const std::vector<double> r = row_sums(m);
  const std::vector<double> c = col_sums(m);
  const auto near_one = [](const std::vector<double>& v) {
    for (double s : v)
      if (std::fabs(s - 1.0) > kStandardizedTol) return false;
    return true;
  };
  const bool rows_ok = near_one(r);
  const bool cols_ok = near_one(c);
  if (rows_ok && cols_ok) return StandardSide::Both;
  if (rows_ok) return StandardSide::Rows;
  if (cols_ok) return StandardSide::Cols;
  return StandardSide::Neither;
}

double alpha_accuracy(const Matrix& m) {
  if (!m.square())
    throw std::invalid_argument("alpha_accuracy requires a square matrix");
  const StandardSide side = standardized_side(m);
  if (side == StandardSide::Neither)
    throw std::invalid_argument(
        "alpha_accuracy requires a standardized matrix (one side of sums all 1)");
  // Measure the side that is free; for a doubly stochastic matrix either
  // choice gives ~0.
  const std::vector<double> s =
      (side == StandardSide::Cols) ? row_sums(m) : col_sums(m);
  double acc = 0.0;
  for (double v : s) acc += std::fabs(v - 1.0);
  return 2.0 * acc / m.rows;
}

Matrix read_matrix(std::istream& in) {
  int rows = 0, cols = 0;
  if (!(in >> rows >> cols))
    throw std::invalid_argument("matrix header must be two integers: rows cols");
  if (rows < 1 || cols < 1 || rows > 100000 || cols > 100000)
    throw std::invalid_argument("matrix dimensions out of range");
  Matrix m = make_matrix(rows, cols);
  for (std::size_t idx = 0; idx < m.a.size(); ++idx) {
    if (!(in >> m.a[idx]))
      throw std::invalid_argument("matrix body ended early or is not numeric");
  }
  validate_matrix(m);
  return m;
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open matrix file: " + path);
  return read_matrix(f);
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows << ' ' << m.cols << '\n';
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) {
      if (j) out << ' ';
      out << format_real(m.at(i, j));
    }
    out << '\n';
  }
}

void write_matrix_file(const std::string& path, const Matrix& m) {
  std::ofstream f(path);
  if (!f) throw std::invalid_argument("cannot open output file: " + path);
  write_matrix(f, m);
  if (!f) throw std::invalid_argument("write failed: " + path);
}

std::string format_real(double v) {
  char buf[40];
  // Try increasing precision until the text round-trips exactly.
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace sklab
