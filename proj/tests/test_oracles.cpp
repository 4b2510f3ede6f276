#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pdx/jacobi.hpp"
#include "pdx/oracles.hpp"
#include "pdx/rng.hpp"
#include "pdx/spectral.hpp"

using namespace pdx;

namespace {

Dataset random_dataset(Rng& rng, std::size_t d, std::size_t n) {
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < n; ++i) samples.push_back({rng.normal_vector(d), rng.uniform() < 0.5 ? -1 : 1});
  return Dataset("random", std::move(samples));
}

}  // namespace

TEST_CASE("theorem parameters") {
  const std::size_t d = 100;
  const double mu = 0.05, rho = 0.1;
  const TwoSampleSpectrum spec = two_sample_spectrum(d, mu);
  RealVector theta0 = spec.v_mu_plus;
  axpy(1.0, spec.v1_plus, theta0);
  const TheoremParams p = theorem_params(d, mu, rho, theta0);

  CHECK(p.corr == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.gamma == doctest::Approx(1.0 / (4.0 * std::sqrt(100.0))));
  CHECK(p.T == std::ceil(p.T));
  CHECK(p.T >= p.B_const * std::sqrt(100.0) / mu);
  CHECK(p.T < p.B_const * std::sqrt(100.0) / mu + 1.0);
  // sigma * 4096 T sqrt(max(d, log(T / rho))) = |corr|
  const double lhs = p.sigma * 4096.0 * p.T * std::sqrt(std::max(100.0, std::log(p.T / rho)));
  CHECK(lhs == doctest::Approx(std::abs(p.corr)).epsilon(1e-12));
  CHECK(p.A_const > 0.0);
  CHECK(p.B_const > p.A_const);

  SUBCASE("T grows like sqrt(d) up to logs") {
    const auto at = [&](std::size_t dd) {
      return theorem_params(dd, mu, rho, two_sample_spectrum(dd, mu).v_mu_plus).T;
    };
    const double ratio = at(400) / at(100);
    CHECK(ratio >= 1.9);
    CHECK(ratio <= 2.6);
  }
  SUBCASE("hypothesis violations are named") {
    CHECK_THROWS_WITH_AS(theorem_params(d, 0.2, rho, theta0), doctest::Contains("mu <= 1/10"), DomainError);
    CHECK_THROWS_WITH_AS(theorem_params(d, mu, 1.0, theta0), doctest::Contains("rho"), DomainError);
    CHECK_THROWS_WITH_AS(theorem_params(d, mu, rho, spec.v1_plus), doctest::Contains("v_mu_+"), DomainError);
    CHECK_THROWS_AS(theorem_params(d, mu, rho, RealVector::ones(d)), DimensionError);
  }
}

TEST_CASE("linear reduction: GD over gamma tracks the batch perceptron") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const Dataset data = random_dataset(rng, 6, 4);
    const ReductionReport r = reduction_check_linear(data, {1.0, 1e2, 1e4, 1e6}, 20);
    REQUIRE(r.direction_gaps.size() == 4);
    CHECK(gaps_monotone({r.direction_gaps[1], r.direction_gaps[2], r.direction_gaps[3]}));
    CHECK(r.direction_gaps[3] <= 1e-4 * r.reference_norms[3]);
    CHECK(r.sign_agreement[3] == 1.0);

    // First step: sigmoid(0) = 1/2 makes w_1 / gamma = z_1 for any gamma.
    const ReductionReport one = reduction_check_linear(data, {0.37, 3.0}, 1);
    CHECK(one.direction_gaps[0] <= 1e-15 * one.reference_norms[0]);
    CHECK(one.direction_gaps[1] <= 1e-15 * one.reference_norms[1]);
  }
}

TEST_CASE("quadratic reduction: GD from large norms follows the quadratic perceptron") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(100 + seed);
    const Dataset data = random_dataset(rng, 8, 4);
    const double gamma = 0.5 * recommend_step_size(data);
    const ReductionReport r = reduction_check_quadratic(data, rng.unit_sphere(10), gamma, {1e2, 1e4, 1e6}, 50);
    CHECK(gaps_monotone(r.direction_gaps));
    CHECK(r.direction_gaps[2] <= 1e-6);
    CHECK(r.sign_agreement[2] == 1.0);
  }
  Rng rng(3);
  const Dataset data = random_dataset(rng, 8, 4);
  CHECK_THROWS_AS(reduction_check_quadratic(data, rng.unit_sphere(10), 10.0, {1e2}, 5), DomainError);
}

TEST_CASE("gaps_monotone treats roundoff as flat") {
  CHECK(gaps_monotone({1e-2, 1e-4, 1e-8}));
  CHECK(gaps_monotone({1e-2, 1e-14, 3e-14}));
  CHECK_FALSE(gaps_monotone({1e-4, 1e-2}));
}

TEST_CASE("lower-bound replay") {
  const LowerBoundTrace tr = lower_bound_replay(10, 0.1, RealVector::zeros(10), 1000);
  REQUIRE(tr.simulated.size() >= 2);
  CHECK(tr.simulated[0][0] == doctest::Approx(-0.025).epsilon(1e-15));
  for (std::size_t j = 1; j < 10; ++j) CHECK(tr.simulated[0][j] == 0.0);
  for (std::size_t j = 0; j < 10; ++j) {
    CHECK(tr.simulated[1][j] == doctest::Approx(tr.simulated[0][j] + 0.5).epsilon(1e-15));
  }
  CHECK(tr.max_deviation <= 1e-12);
  CHECK(tr.bound == 100);
  CHECK(tr.first_separation_step >= tr.bound);

  Rng rng(4);
  const LowerBoundTrace perturbed = lower_bound_replay(20, 0.2, 1e-3 * rng.unit_sphere(20), 1000);
  CHECK(perturbed.max_scaled_deviation <= 1e-12);
  CHECK(perturbed.first_separation_step >= perturbed.bound);

  CHECK_THROWS_AS(lower_bound_replay(10, 0.6, RealVector::zeros(10), 10), DomainError);
  CHECK_THROWS_AS(lower_bound_replay(10, 0.1, RealVector::ones(10), 10), DomainError);
}

TEST_CASE("Jacobi oracle reconstructs its input") {
  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 4 + rng.below(20);
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) m(i, j) = m(j, i) = rng.normal();
    }
    const SymmetricEigen eig = dense_symmetric_eig(m);
    double err = 0.0, ref = 0.0, orth = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double rec = 0.0, gram = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
          rec += eig.vectors(i, c) * eig.values[c] * eig.vectors(j, c);
          gram += eig.vectors(c, i) * eig.vectors(c, j);
        }
        err += std::pow(rec - m(i, j), 2);
        ref += m(i, j) * m(i, j);
        orth = std::max(orth, std::abs(gram - (i == j ? 1.0 : 0.0)));
      }
    }
    CHECK(std::sqrt(err) <= 1e-9 * std::sqrt(ref));
    CHECK(orth <= 1e-9);
  }
}

TEST_CASE("exact null-space start") {
  const Dataset data = make_two_sample(12, 0.25);
  std::vector<ConvOperator> ops;
  for (std::size_t i = 0; i < data.size(); ++i) ops.emplace_back(data.signed_feature(i), 2);
  const RealVector a = exact_null_space_start(ops, 0);
  const RealVector b = exact_null_space_start(ops, 0);
  CHECK(a == b);
  CHECK_FALSE(a == exact_null_space_start(ops, 1));
  for (const ConvOperator& op : ops) {
    for (double x : op.apply(a)) CHECK(x == 0.0);
  }
  // Orthogonal to every nonzero eigenvector of the Jacobi oracle.
  for (const ConvOperator& op : ops) {
    const SymmetricEigen eig = dense_symmetric_eig(op.materialize());
    for (std::size_t c = 0; c < eig.values.size(); ++c) {
      if (std::abs(eig.values[c]) > 1e-8) CHECK(std::abs(dot(eig.vectors.column(c), a)) <= 1e-12);
    }
  }

  const std::vector<ConvOperator> irrational{ConvOperator(RealVector{std::sqrt(2.0), 1.0, 0.0, 0.0}, 2)};
  CHECK_THROWS_AS(exact_null_space_start(irrational, 0), DomainError);
}
