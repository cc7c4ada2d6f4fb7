// Dense nonnegative matrices, row/column aggregates, and the accuracy
// measures used by the scaling code (l1/l2 deviations, maximum deviation,
// and the alpha accuracy of a standardized matrix).
#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace sklab {

struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;  // row-major

  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double at(int i, int j) const {
    return a[static_cast<std::size_t>(i) * cols + j];
  }
  bool square() const { return rows == cols; }
};

Matrix make_matrix(int rows, int cols, double fill = 0.0);

// Throws std::invalid_argument unless rows,cols >= 1, every entry is finite
// and >= 0, and at least one entry is > 0.
void validate_matrix(const Matrix& m);

std::vector<double> row_sums(const Matrix& m);
std::vector<double> col_sums(const Matrix& m);

struct DeviationReport {
  double l1_row = 0, l1_col = 0;
  double l2_row = 0, l2_col = 0;
  double max_row = 0, min_row = 0;
  double max_col = 0, min_col = 0;
  double max_deviation = 0;
};

// Square matrices only.
DeviationReport deviation(const Matrix& m);

// A side counts as standardized when every sum on it is within this of 1.
inline constexpr double kStandardizedTol = 1e-9;

enum class StandardSide { Rows, Cols, Both, Neither };

StandardSide standardized_side(const Matrix& m);

// (2/n) * sum |s_j - 1| over the non-standardized side's sums. Requires a
// square, standardized matrix; throws std::invalid_argument otherwise.
double alpha_accuracy(const Matrix& m);

// Text interchange format: first line "n m", then n lines of m decimals.
Matrix read_matrix(std::istream& in);
Matrix read_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const Matrix& m);
void write_matrix_file(const std::string& path, const Matrix& m);

// Shortest decimal form that round-trips a double (up to 17 significant
// digits); used for matrix files and CSV output.
std::string format_real(double v);

}  // namespace sklab
