#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace signn::num {

/// Dense real-valued matrix, row-major, 64-bit entries.  This is the carrier
/// for every real-valued quantity in the library (features, weights, voltages,
/// spike patterns).
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // rows * cols entries, row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  static Matrix zeros(std::size_t r, std::size_t c) { return Matrix(r, c, 0.0); }
  static Matrix ones(std::size_t r, std::size_t c) { return Matrix(r, c, 1.0); }
  static Matrix full(std::size_t r, std::size_t c, double v) { return Matrix(r, c, v); }
  static Matrix identity(std::size_t n);
  static Matrix scalar(double v) { return Matrix(1, 1, v); }
  /// Build from nested initializer lists; rows must have equal length.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rs);

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double* row_ptr(std::size_t r) { return data.data() + r * cols; }
  const double* row_ptr(std::size_t r) const { return data.data() + r * cols; }

  std::size_t size() const { return rows * cols; }
  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
  bool all_finite() const;
  std::string shape_str() const;  // "3x4", used in error messages
};

// Value-level kernels.  The tape wraps these; tests also use them directly.

/// c = a * b, standard product.  Throws DimensionError naming both shapes.
Matrix matmul(const Matrix& a, const Matrix& b);
/// c = a * b^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);
/// c = a^T * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// out += a^T * b (accumulating form used by backward passes)
void add_matmul_tn(Matrix& out, const Matrix& a, const Matrix& b);
/// out += a * b^T
void add_matmul_nt(Matrix& out, const Matrix& a, const Matrix& b);

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);

/// Numerically stable logistic function, elementwise.
double sigmoid_scalar(double x);
Matrix sigmoid(const Matrix& x);

void require_same_shape(const Matrix& a, const Matrix& b, const char* op);

}  // namespace signn::num
