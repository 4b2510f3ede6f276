#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pdx/jacobi.hpp"
#include "pdx/operators.hpp"
#include "pdx/rng.hpp"
#include "support/oracles.hpp"

using namespace pdx;

namespace {

RealVector random_vector(Rng& rng, std::size_t d) { return rng.normal_vector(d); }

double dense_op_norm(const DenseMatrix& m) {
  const SymmetricEigen eig = dense_symmetric_eig(m);
  double best = 0.0;
  for (double v : eig.values) best = std::max(best, std::abs(v));
  return best;
}

}  // namespace

TEST_CASE("permute_right shifts circularly") {
  CHECK(permute_right(RealVector{1, 2, 3, 4}) == RealVector{4, 1, 2, 3});
  CHECK(permute_right(RealVector{5}) == RealVector{5});
  Rng rng(3);
  const RealVector x = random_vector(rng, 6);
  RealVector y = x;
  for (int i = 0; i < 6; ++i) y = permute_right(y);
  CHECK(y == x);
  CHECK(permute_right(x, 6) == x);
  CHECK(permute_right(x, 2) == permute_right(permute_right(x)));
  CHECK(norm(permute_right(x)) == doctest::Approx(norm(x)).epsilon(1e-15));
  CHECK_THROWS_AS(permute_right(RealVector{}), DimensionError);
}

TEST_CASE("circular_conv") {
  Rng rng(5);
  const RealVector b = random_vector(rng, 5);
  CHECK(circular_conv(RealVector{1, 0}, b) == b);
  CHECK(circular_conv(RealVector{0, 1}, RealVector{1, 2, 3}) == RealVector{3, 1, 2});
  const RealVector c{0.7, -1.3};
  const oracle::Vec want = oracle::conv(c.values(), b.values());
  const RealVector got = circular_conv(c, b);
  for (std::size_t i = 0; i < 5; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));
  const RealVector full = random_vector(rng, 5);
  CHECK_NOTHROW(circular_conv(full, b));
  CHECK_THROWS_AS(circular_conv(random_vector(rng, 6), b), DomainError);
}

TEST_CASE("conv operator matvec against dense oracle") {
  Rng rng(11);
  for (std::size_t d = 2; d <= 12; ++d) {
    for (std::size_t k = 2; k <= d; ++k) {
      const RealVector a = random_vector(rng, d);
      const ConvOperator op(a, k);
      const oracle::Mat m = oracle::conv_matrix(a.values(), k);
      const DenseMatrix dense = op.materialize();
      for (std::size_t r = 0; r < d + k; ++r) {
        for (std::size_t c = 0; c < d + k; ++c) REQUIRE(dense(r, c) == m[r][c]);
      }
      CHECK(dense.asymmetry() == 0.0);
      for (int trial = 0; trial < 5; ++trial) {
        const RealVector x = random_vector(rng, d + k);
        const RealVector got = op.apply(x);
        const oracle::Vec want = oracle::matvec(m, x.values());
        CHECK(oracle::rel_error(got.values(), want) < 1e-14);
      }
    }
  }
}

TEST_CASE("conv operator zero cases and errors") {
  const ConvOperator zero(RealVector::zeros(4), 2);
  CHECK(norm(zero.apply(RealVector::ones(6))) == 0.0);
  Rng rng(1);
  const ConvOperator op(random_vector(rng, 4), 2);
  CHECK(norm(op.apply(RealVector::zeros(6))) == 0.0);
  CHECK(op.quadratic_form(RealVector::zeros(6)) == 0.0);
  CHECK_THROWS_AS(op.apply(RealVector::zeros(5)), DimensionError);
  CHECK_THROWS_AS(ConvOperator(RealVector::ones(3), 4), DomainError);
  CHECK_THROWS(ConvOperator(RealVector::ones(3), 1));
  CHECK_NOTHROW(ConvOperator(RealVector::ones(3), 3));
  CHECK_THROWS_AS(ConvOperator(RealVector::ones(400), 200).materialize(), DomainError);
  CHECK_NOTHROW(ConvOperator(RealVector::ones(400), 200).materialize(600));
}

TEST_CASE("materialize d=3 k=2 a=e1") {
  const DenseMatrix m = ConvOperator(RealVector::unit(3, 0), 2).materialize();
  // Column 0 carries a = e1 in the bottom block, column 1 carries Pa = e2.
  const double col0[5] = {0, 0, 1, 0, 0};
  const double col1[5] = {0, 0, 0, 1, 0};
  for (std::size_t r = 0; r < 5; ++r) {
    CHECK(m(r, 0) == col0[r]);
    CHECK(m(r, 1) == col1[r]);
  }
}

TEST_CASE("quadratic form equals the conv model") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 3 + rng.below(8);
    const std::size_t k = 2 + rng.below(d - 1);
    const RealVector b = random_vector(rng, d);
    const int y = rng.uniform() < 0.5 ? -1 : 1;
    const RealVector w = random_vector(rng, d + k);
    const oracle::Vec c(w.begin(), w.begin() + static_cast<long>(k));
    const oracle::Vec v(w.begin() + static_cast<long>(k), w.end());
    const oracle::Vec cb = oracle::conv(c, b.values());
    double model = 0.0;
    for (std::size_t i = 0; i < d; ++i) model += cb[i] * v[i];
    const ConvOperator op(static_cast<double>(y) * b, k);
    CHECK(op.quadratic_form(w) == doctest::Approx(y * model).epsilon(1e-12));
    CHECK(0.5 * dot(w, op.apply(w)) == doctest::Approx(y * model).epsilon(1e-12));
  }
}

TEST_CASE("eigenvector quadratic form is half the eigenvalue") {
  const ConvOperator op(RealVector::ones(5), 2);
  std::vector<double> raw{std::sqrt(5.0), std::sqrt(5.0)};
  for (int i = 0; i < 5; ++i) raw.push_back(std::sqrt(2.0));
  const RealVector v = normalized(RealVector(raw));
  CHECK(op.quadratic_form(v) == doctest::Approx(std::sqrt(10.0) / 2).epsilon(1e-14));
}

TEST_CASE("symmetry of all operator kinds") {
  Rng rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + rng.below(10);
    const std::size_t k = 2 + rng.below(d - 1);
    const std::size_t f = 1 + rng.below(4);
    const RealVector a = random_vector(rng, d);
    const ConvOperator conv(a, k);
    const TwoLayerOperator two(a, f);
    const std::vector<StructuredOperator> ops{conv, two};
    for (const StructuredOperator& op : ops) {
      const std::size_t n = dim(op);
      const RealVector x = random_vector(rng, n);
      const RealVector y = random_vector(rng, n);
      const double scale = norm(x) * norm(y) * dense_op_norm(materialize_dense(op));
      CHECK(std::abs(dot(x, apply(op, y)) - dot(apply(op, x), y)) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("conv rank at most 2k") {
  Rng rng(44);
  for (std::size_t d = 3; d <= 12; ++d) {
    for (std::size_t k = 2; k <= std::min<std::size_t>(d, 4); ++k) {
      const SymmetricEigen eig = dense_symmetric_eig(ConvOperator(random_vector(rng, d), k).materialize());
      std::size_t rank = 0;
      for (double v : eig.values) rank += std::abs(v) > 1e-10 ? 1 : 0;
      CHECK(rank <= 2 * k);
    }
  }
}

TEST_CASE("two-layer operator against direct model") {
  Rng rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 2 + rng.below(8);
    const std::size_t f = 1 + rng.below(4);
    const RealVector a = random_vector(rng, d);
    const TwoLayerOperator op(a, f);
    const RealVector w = random_vector(rng, f * d + f);
    const double want = oracle::two_layer_model(w.values(), a.values(), f);
    CHECK(op.quadratic_form(w) == doctest::Approx(want).epsilon(1e-12));
    CHECK(0.5 * dot(w, op.apply(w)) == doctest::Approx(want).epsilon(1e-12));
    const DenseMatrix m = op.materialize();
    CHECK(oracle::rel_error(op.apply(w).values(), m.apply(w).values()) < 1e-14);
  }
  CHECK_THROWS_AS(TwoLayerOperator(RealVector::ones(3), 2).apply(RealVector::ones(7)), DimensionError);
}

TEST_CASE("multilinear map value and gradient") {
  Rng rng(66);
  SUBCASE("depth 1 matches the two-layer operator") {
    const RealVector a = random_vector(rng, 5);
    const MultiLinearMap map({3, 5}, a);
    const TwoLayerOperator op(a, 3);
    const RealVector w = random_vector(rng, map.dim());
    CHECK(map.value(w) == doctest::Approx(op.quadratic_form(w)).epsilon(1e-13));
    CHECK(oracle::rel_error(map.grad(w).values(), op.apply(w).values()) < 1e-13);
  }
  SUBCASE("depth 2 against the direct chain and finite differences") {
    const std::vector<std::size_t> dims{2, 3, 4};
    for (int trial = 0; trial < 20; ++trial) {
      const RealVector a = random_vector(rng, 4);
      const MultiLinearMap map(dims, a);
      CHECK(map.dim() == 2 * 3 + 3 * 4 + 2);
      const RealVector w = random_vector(rng, map.dim());
      CHECK(map.value(w) == doctest::Approx(oracle::deep_model(w.values(), a.values(), dims)).epsilon(1e-12));
      const oracle::Vec fd = oracle::central_gradient(
          [&](const oracle::Vec& x) { return oracle::deep_model(x, a.values(), dims); }, w.values());
      CHECK(oracle::rel_error(map.grad(w).values(), fd) < 1e-6);
      // Diagonal of the symmetric form recovers (l+1) * value.
      CHECK(map.form({w, w, w}) == doctest::Approx(3.0 * map.value(w)).epsilon(1e-12));
    }
  }
  SUBCASE("form is symmetric in its arguments") {
    const MultiLinearMap map({2, 2, 3}, random_vector(rng, 3));
    const RealVector x = random_vector(rng, map.dim());
    const RealVector y = random_vector(rng, map.dim());
    const RealVector z = random_vector(rng, map.dim());
    const double base = map.form({x, y, z});
    CHECK(map.form({y, z, x}) == doctest::Approx(base).epsilon(1e-12));
    CHECK(map.form({z, x, y}) == doctest::Approx(base).epsilon(1e-12));
    CHECK(map.form({y, x, z}) == doctest::Approx(base).epsilon(1e-12));
  }
  SUBCASE("zero blocks and zero iterate") {
    const MultiLinearMap map({2, 3, 4}, random_vector(rng, 4));
    RealVector w = random_vector(rng, map.dim());
    for (std::size_t i = map.block_offset(1); i < map.block_offset(2); ++i) w[i] = 0.0;
    CHECK(map.value(w) == 0.0);
    CHECK(norm(map.grad(RealVector::zeros(map.dim()))) == 0.0);
    CHECK_THROWS_AS(map.value(RealVector::zeros(map.dim() + 1)), DimensionError);
  }
}
