#include "infocommit/polymat.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "infocommit/errors.hpp"

namespace infocommit {

namespace {

void require_same_field(const Matrix& a, const Matrix& b) {
  if (!(a.field() == b.field())) throw FieldMismatch();
}

std::string dims(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

}  // namespace

Matrix::Matrix(Field field, std::size_t rows, std::size_t cols)
    : field_(std::move(field)), rows_(rows), cols_(cols), data_(rows * cols, Fe{0}) {}

Matrix::Matrix(Field field, std::size_t rows, std::size_t cols, std::vector<Fe> data)
    : field_(std::move(field)), rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) throw DimensionMismatch("matrix data does not match its dimensions");
  for (Fe e : data_) field_.element(e.v);
}

Matrix Matrix::identity(const Field& field, std::size_t n) {
  Matrix m(field, n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = field.one();
  return m;
}

Matrix Matrix::random(const Field& field, std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(field, rows, cols);
  for (auto& e : m.data_) e = field.sample(rng);
  return m;
}

Matrix Matrix::from_rows(const Field& field, const std::vector<std::vector<std::uint64_t>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  Matrix m(field, rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw DimensionMismatch("ragged rows");
    for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = Fe{rows[i][j] % field.order()};
  }
  return m;
}

bool Matrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](Fe e) { return e.v == 0; });
}

bool operator==(const Matrix& a, const Matrix& b) {
  return a.field_ == b.field_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

Matrix add(const Matrix& a, const Matrix& b) {
  require_same_field(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("add: " + dims(a) + " vs " + dims(b));
  }
  Matrix r(a.field(), a.rows(), a.cols());
  const Field& f = a.field();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) r.at(i, j) = f.add(a.at(i, j), b.at(i, j));
  }
  return r;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  require_same_field(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("sub: " + dims(a) + " vs " + dims(b));
  }
  Matrix r(a.field(), a.rows(), a.cols());
  const Field& f = a.field();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) r.at(i, j) = f.sub(a.at(i, j), b.at(i, j));
  }
  return r;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  require_same_field(a, b);
  if (a.cols() != b.rows()) throw DimensionMismatch("matmul: " + dims(a) + " * " + dims(b));
  const Field& f = a.field();
  Matrix r(f, a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Fe aik = a.at(i, k);
      if (aik.v == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) r.at(i, j) = f.mul_add(aik, b.at(k, j), r.at(i, j));
    }
  }
  return r;
}

Fe dot(const Field& field, std::span<const Fe> a, std::span<const Fe> b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("dot: lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  Fe acc = field.zero();
  for (std::size_t i = 0; i < a.size(); ++i) acc = field.mul_add(a[i], b[i], acc);
  return acc;
}

std::vector<Fe> matvec(const Matrix& m, std::span<const Fe> v) {
  if (m.cols() != v.size()) {
    throw DimensionMismatch("matvec: " + dims(m) + " * vector of length " + std::to_string(v.size()));
  }
  std::vector<Fe> r(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) r[i] = dot(m.field(), m.row(i), v);
  return r;
}

std::vector<Fe> vecmat(std::span<const Fe> v, const Matrix& m) {
  if (m.rows() != v.size()) {
    throw DimensionMismatch("vecmat: vector of length " + std::to_string(v.size()) + " * " + dims(m));
  }
  const Field& f = m.field();
  std::vector<Fe> r(m.cols(), f.zero());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const Fe vi = v[i];
    auto row = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) r[j] = f.mul_add(vi, row[j], r[j]);
  }
  return r;
}

Matrix transpose(const Matrix& m) {
  Matrix r(m.field(), m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) r.at(j, i) = m.at(i, j);
  }
  return r;
}

Matrix vconcat(const Matrix& top, const Matrix& bottom) {
  require_same_field(top, bottom);
  if (top.cols() != bottom.cols()) throw DimensionMismatch("vconcat: " + dims(top) + " over " + dims(bottom));
  std::vector<Fe> data = top.data();
  data.insert(data.end(), bottom.data().begin(), bottom.data().end());
  return Matrix(top.field(), top.rows() + bottom.rows(), top.cols(), std::move(data));
}

Matrix kron(const Matrix& a, const Matrix& b) {
  require_same_field(a, b);
  const Field& f = a.field();
  Matrix r(f, a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Fe aij = a.at(i, j);
      for (std::size_t k = 0; k < b.rows(); ++k) {
        for (std::size_t l = 0; l < b.cols(); ++l) {
          r.at(i * b.rows() + k, j * b.cols() + l) = f.mul(aij, b.at(k, l));
        }
      }
    }
  }
  return r;
}

std::size_t rank(Matrix m) {
  const Field& f = m.field();
  std::size_t pivot_row = 0;
  for (std::size_t col = 0; col < m.cols() && pivot_row < m.rows(); ++col) {
    std::size_t sel = pivot_row;
    while (sel < m.rows() && m.at(sel, col).v == 0) ++sel;
    if (sel == m.rows()) continue;
    if (sel != pivot_row) {
      auto a = m.row(sel);
      auto b = m.row(pivot_row);
      std::swap_ranges(a.begin(), a.end(), b.begin());
    }
    const Fe inv = f.inv(m.at(pivot_row, col));
    auto prow = m.row(pivot_row);
    for (std::size_t j = col; j < m.cols(); ++j) prow[j] = f.mul(prow[j], inv);
    for (std::size_t i = pivot_row + 1; i < m.rows(); ++i) {
      const Fe factor = m.at(i, col);
      if (factor.v == 0) continue;
      auto row = m.row(i);
      const Fe neg = f.neg(factor);
      for (std::size_t j = col; j < m.cols(); ++j) row[j] = f.mul_add(neg, prow[j], row[j]);
    }
    ++pivot_row;
  }
  return pivot_row;
}

Polynomial Polynomial::random(const Field& field, std::size_t d, Rng& rng) {
  Polynomial p{field, std::vector<Fe>(d)};
  for (auto& c : p.coeffs) c = field.sample(rng);
  return p;
}

Matrix to_matrix(const Polynomial& p, std::size_t s) {
  if (p.coeffs.size() != s * s) {
    throw DimensionMismatch("polynomial with " + std::to_string(p.coeffs.size()) +
                            " coefficients cannot be reshaped to " + std::to_string(s) + "x" + std::to_string(s));
  }
  return Matrix(p.field, s, s, p.coeffs);
}

Polynomial from_matrix(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("coefficient matrix must be square, got " + dims(m));
  return Polynomial{m.field(), m.data()};
}

Fe horner_eval(const Polynomial& p, Fe x) {
  const Field& f = p.field;
  Fe acc = f.zero();
  for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) acc = f.mul_add(acc, x, *it);
  return acc;
}

PowerRow power_row(const Field& field, Fe x, std::size_t s, PowerDirection direction) {
  if (s < 1) throw DomainError("power row length must be at least 1");
  const Fe step = direction == PowerDirection::low ? x : field.pow(x, s);
  PowerRow row{direction, std::vector<Fe>(s)};
  row.entries[0] = field.one();
  for (std::size_t k = 1; k < s; ++k) row.entries[k] = field.mul(row.entries[k - 1], step);
  return row;
}

Fe bilinear_eval(const Matrix& a, Fe x) {
  if (a.rows() != a.cols()) throw DimensionMismatch("bilinear_eval needs a square matrix, got " + dims(a));
  const std::size_t s = a.rows();
  const auto low = power_row(a.field(), x, s, PowerDirection::low);
  const auto high = power_row(a.field(), x, s, PowerDirection::high);
  return dot(a.field(), high.entries, matvec(a, low.entries));
}

StructuredMatrix structured_matrix(const Field& field, std::span<const Fe> points, std::size_t s,
                                   StructureKind kind) {
  std::set<Fe> seen;
  for (Fe p : points) {
    field.element(p.v);
    if (!seen.insert(p).second) {
      throw DomainError("structured matrix generators must be pairwise distinct (duplicate " +
                        std::to_string(p.v) + ")");
    }
  }
  const auto dir = kind == StructureKind::low_vandermonde ? PowerDirection::low : PowerDirection::high;
  Matrix m(field, points.size(), s);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto row = power_row(field, points[i], s, dir);
    std::copy(row.entries.begin(), row.entries.end(), m.row(i).begin());
  }
  return {kind, std::vector<Fe>(points.begin(), points.end()), std::move(m)};
}

}  // namespace infocommit
