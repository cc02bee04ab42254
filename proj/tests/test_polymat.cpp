#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "infocommit/errors.hpp"
#include "infocommit/polymat.hpp"

using namespace infocommit;

namespace {

Polynomial poly(const Field& f, std::vector<std::uint64_t> cs) {
  Polynomial p{f, {}};
  for (auto c : cs) p.coeffs.push_back(f.element(c));
  return p;
}

std::vector<std::uint64_t> values(std::span<const Fe> v) {
  std::vector<std::uint64_t> out;
  for (Fe e : v) out.push_back(e.v);
  return out;
}

}  // namespace

TEST_CASE("row-major reshape") {
  const Field f = Field::prime(11);
  const auto p = poly(f, {1, 2, 3, 4});
  const Matrix a = to_matrix(p, 2);
  CHECK(a == Matrix::from_rows(f, {{1, 2}, {3, 4}}));
  CHECK(from_matrix(a).coeffs == p.coeffs);
  const auto p9 = poly(f, {0, 1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(to_matrix(p9, 3).at(2, 1).v == 7);
  CHECK_THROWS_AS(to_matrix(p9, 2), DimensionMismatch);
  CHECK_THROWS_AS(from_matrix(Matrix(f, 2, 3)), DimensionMismatch);
}

TEST_CASE("horner evaluation") {
  const Field f = Field::prime(11);
  CHECK(horner_eval(poly(f, {1, 2, 3, 4}), Fe{2}) == Fe{(1 + 2 * 2 + 3 * 4 + 4 * 8) % 11});
  CHECK(horner_eval(poly(f, {9, 2, 3, 4}), Fe{0}) == Fe{9});
  CHECK(horner_eval(poly(f, {0, 0, 0, 0}), Fe{6}) == Fe{0});
}

TEST_CASE("power rows") {
  const Field f = Field::prime(11);
  CHECK(values(power_row(f, Fe{2}, 3, PowerDirection::low).entries) == std::vector<std::uint64_t>{1, 2, 4});
  CHECK(values(power_row(f, Fe{7}, 3, PowerDirection::high).entries) == std::vector<std::uint64_t>{1, 2, 4});
  CHECK(values(power_row(f, Fe{0}, 4, PowerDirection::low).entries) == std::vector<std::uint64_t>{1, 0, 0, 0});
  CHECK(values(power_row(f, Fe{0}, 4, PowerDirection::high).entries) == std::vector<std::uint64_t>{1, 0, 0, 0});
  CHECK_THROWS_AS(power_row(f, Fe{1}, 0, PowerDirection::low), DomainError);
}

TEST_CASE("bilinear evaluation") {
  const Field f = Field::prime(11);
  const auto p = poly(f, {1, 2, 3, 4});
  CHECK(bilinear_eval(to_matrix(p, 2), Fe{2}) == Fe{5});
  for (std::uint64_t x = 0; x < 11; ++x) CHECK(bilinear_eval(Matrix(f, 3, 3), Fe{x}) == Fe{0});
  const Matrix a = Matrix::from_rows(f, {{6, 1, 2}, {3, 4, 5}, {7, 8, 9}});
  CHECK(bilinear_eval(a, Fe{0}) == Fe{6});
  CHECK_THROWS_AS(bilinear_eval(Matrix(f, 2, 3), Fe{1}), DimensionMismatch);
}

TEST_CASE("structured matrices") {
  const Field f = Field::prime(11);
  const std::vector<Fe> pts{Fe{7}, Fe{8}};
  const auto m = structured_matrix(f, pts, 3, StructureKind::high_vandermonde);
  CHECK(m.matrix == Matrix::from_rows(f, {{1, 2, 4}, {1, 6, 3}}));
  const std::vector<Fe> xs{Fe{1}, Fe{2}, Fe{3}};
  const auto x = structured_matrix(f, xs, 3, StructureKind::low_vandermonde);
  CHECK(x.matrix == Matrix::from_rows(f, {{1, 1, 1}, {1, 2, 4}, {1, 3, 9}}));
  const std::vector<Fe> zero{Fe{0}};
  CHECK(structured_matrix(f, zero, 3, StructureKind::low_vandermonde).matrix == Matrix::from_rows(f, {{1, 0, 0}}));
  const std::vector<Fe> dup{Fe{3}, Fe{3}};
  CHECK_THROWS_AS(structured_matrix(f, dup, 3, StructureKind::low_vandermonde), DomainError);
}

TEST_CASE("matrix operations") {
  const Field f = Field::prime(11);
  const Matrix a = Matrix::from_rows(f, {{1, 2}, {3, 4}});
  const Matrix b = Matrix::from_rows(f, {{5, 6}, {7, 8}});
  CHECK(matmul(a, b) == Matrix::from_rows(f, {{19, 22}, {43, 50}}));
  CHECK(transpose(a) == Matrix::from_rows(f, {{1, 3}, {2, 4}}));
  const std::vector<Fe> v{Fe{1}, Fe{1}};
  CHECK(values(matvec(a, v)) == std::vector<std::uint64_t>{3, 7});
  CHECK(values(vecmat(v, a)) == std::vector<std::uint64_t>{4, 6});
  CHECK(vconcat(a, b).rows() == 4);
  CHECK(kron(Matrix::identity(f, 2), a) ==
        Matrix::from_rows(f, {{1, 2, 0, 0}, {3, 4, 0, 0}, {0, 0, 1, 2}, {0, 0, 3, 4}}));
  CHECK_THROWS_AS(matmul(a, Matrix(f, 3, 1)), DimensionMismatch);
  CHECK_THROWS_AS(vconcat(a, Matrix(f, 1, 3)), DimensionMismatch);
  CHECK_THROWS_AS(matvec(a, std::vector<Fe>{Fe{1}}), DimensionMismatch);
  CHECK_THROWS_AS(add(a, Matrix(Field::prime(13), 2, 2)), FieldMismatch);
}

TEST_CASE("rank examples") {
  const Field f = Field::prime(11);
  for (std::size_t s = 1; s <= 6; ++s) CHECK(rank(Matrix::identity(f, s)) == s);
  CHECK(rank(Matrix(f, 3, 4)) == 0);
  const Matrix m = Matrix::from_rows(f, {{1, 2, 3}, {2, 4, 6}});
  CHECK(rank(m) == 1);
  CHECK(rank(vconcat(m, m)) == rank(m));
  // Vandermonde: c + m distinct points, c + m <= s; the determinant of the
  // leading square block is prod(x_j - x_i) != 0, so the rank must be full.
  const std::vector<Fe> pts{Fe{0}, Fe{2}, Fe{5}, Fe{9}};
  CHECK(rank(structured_matrix(f, pts, 6, StructureKind::low_vandermonde).matrix) == 4);
  // high kind needs x -> x^s injective: gcd(3, 10) = 1 but gcd(4, 10) = 2 (2^4 = 9^4)
  const std::vector<Fe> three{Fe{0}, Fe{2}, Fe{5}};
  CHECK(rank(structured_matrix(f, three, 3, StructureKind::high_vandermonde).matrix) == 3);
  const std::vector<Fe> clash{Fe{2}, Fe{9}};
  CHECK(rank(structured_matrix(f, clash, 4, StructureKind::high_vandermonde).matrix) == 1);
}

TEST_CASE("property: bilinear form agrees with Horner") {
  Rng rng(99);
  for (const Field& f : {Field::prime(11), Field::prime(1000003), Field::gf4()}) {
    for (int trial = 0; trial < 10000; ++trial) {
      const std::size_t s = 1 + trial % 4;
      const auto p = Polynomial::random(f, s * s, rng);
      const Fe x = f.sample(rng);
      CHECK(bilinear_eval(to_matrix(p, s), x) == horner_eval(p, x));
    }
  }
}

TEST_CASE("property: Vandermonde rank is full for distinct points") {
  Rng rng(3);
  const Field f = Field::prime(101);  // gcd(s, 100) = 1 for s in {3, 7, 9}
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t s = std::vector<std::size_t>{3, 7, 9}[trial % 3];
    const std::size_t k = 1 + rng.uniform(s);
    std::vector<std::uint64_t> all(101);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<Fe> pts;
    for (std::size_t i = 0; i < k; ++i) pts.push_back(Fe{all[i]});
    CHECK(rank(structured_matrix(f, pts, s, StructureKind::low_vandermonde).matrix) == k);
    CHECK(rank(structured_matrix(f, pts, s, StructureKind::high_vandermonde).matrix) == k);
  }
}

TEST_CASE("property: rank invariant under row permutation and scaling") {
  Rng rng(4);
  const Field f = Field::prime(11);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t rows = 1 + rng.uniform(6), cols = 1 + rng.uniform(6);
    Matrix m = Matrix::random(f, rows, cols, rng);
    // force some dependence
    if (rows > 1) {
      for (std::size_t j = 0; j < cols; ++j) m.at(rows - 1, j) = f.mul(Fe{3}, m.at(0, j));
    }
    const std::size_t r = rank(m);
    std::vector<std::size_t> perm(rows);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix p(f, rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      const Fe scale = f.sample_nonzero(rng);
      for (std::size_t j = 0; j < cols; ++j) p.at(i, j) = f.mul(scale, m.at(perm[i], j));
    }
    CHECK(rank(p) == r);
  }
}
