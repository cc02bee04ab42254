#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "infocommit/field.hpp"

namespace infocommit {

// Dense row-major matrix over F_q.
class Matrix {
 public:
  Matrix(Field field, std::size_t rows, std::size_t cols);
  Matrix(Field field, std::size_t rows, std::size_t cols, std::vector<Fe> data);

  static Matrix identity(const Field& field, std::size_t n);
  static Matrix random(const Field& field, std::size_t rows, std::size_t cols, Rng& rng);
  // Convenience for tests and fixtures: values are reduced into the field.
  static Matrix from_rows(const Field& field, const std::vector<std::vector<std::uint64_t>>& rows);

  const Field& field() const { return field_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Fe& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  Fe at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const Fe> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<Fe> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  const std::vector<Fe>& data() const { return data_; }

  bool is_zero() const;
  friend bool operator==(const Matrix& a, const Matrix& b);

 private:
  Field field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Fe> data_;
};

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix matmul(const Matrix& a, const Matrix& b);
std::vector<Fe> matvec(const Matrix& m, std::span<const Fe> v);   // m * v^T
std::vector<Fe> vecmat(std::span<const Fe> v, const Matrix& m);   // v * m
Fe dot(const Field& field, std::span<const Fe> a, std::span<const Fe> b);
Matrix transpose(const Matrix& m);
Matrix vconcat(const Matrix& top, const Matrix& bottom);
Matrix kron(const Matrix& a, const Matrix& b);

// Rank by Gaussian elimination; the pivot in each column is the first
// nonzero entry at or below the current row.
std::size_t rank(Matrix m);

// Coefficients a_0..a_{d-1} of f(x) = sum a_i x^i.
struct Polynomial {
  Field field;
  std::vector<Fe> coeffs;

  std::size_t degree_bound() const { return coeffs.size(); }
  static Polynomial random(const Field& field, std::size_t d, Rng& rng);
};

// Row-major reshape: entry (i, j) = a_{s*i + j}. Throws DimensionMismatch
// unless len(coeffs) = s^2.
Matrix to_matrix(const Polynomial& p, std::size_t s);
Polynomial from_matrix(const Matrix& m);

Fe horner_eval(const Polynomial& p, Fe x);

enum class PowerDirection { low, high };

// low:  [1, x, ..., x^{s-1}]
// high: [1, x^s, ..., x^{s(s-1)}]
struct PowerRow {
  PowerDirection direction;
  std::vector<Fe> entries;
};

PowerRow power_row(const Field& field, Fe x, std::size_t s, PowerDirection direction);

// f(x) = high(x) * A * low(x)^T for square A.
Fe bilinear_eval(const Matrix& a, Fe x);

enum class StructureKind { low_vandermonde, high_vandermonde };

// c x s matrix whose row i is the power row of points[i].
struct StructuredMatrix {
  StructureKind kind;
  std::vector<Fe> points;
  Matrix matrix;
};

// Throws DomainError on duplicate points.
StructuredMatrix structured_matrix(const Field& field, std::span<const Fe> points, std::size_t s,
                                   StructureKind kind);

}  // namespace infocommit
