#include "pdx/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "pdx/jacobi.hpp"
#include "pdx/models.hpp"
#include "pdx/perceptrons.hpp"
#include "pdx/rng.hpp"
#include "pdx/spectral.hpp"

namespace pdx {

TheoremParams theorem_params(std::size_t d, double mu, double rho, const RealVector& theta0) {
  if (d < 3) throw DomainError("theorem_params: d >= 3 required");
  if (!(mu > 0.0)) throw DomainError("theorem_params: mu > 0 required");
  if (mu > 0.1) throw DomainError("theorem_params: hypothesis mu <= 1/10 violated");
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("theorem_params: hypothesis 0 < rho < 1 violated");
  require_same_size(d + 2, theta0.size(), "theorem_params: theta0");

  const TwoSampleSpectrum spectrum = two_sample_spectrum(d, mu);
  const double corr = dot(theta0, spectrum.v_mu_plus);
  if (!(std::abs(corr) >= 1e-300)) {
    throw DomainError("theorem_params: hypothesis <theta0, v_mu_+> != 0 violated");
  }
  const double sqrt_d = std::sqrt(static_cast<double>(d));
  const double theta_sq = dot(theta0, theta0);
  const double corr_sq = corr * corr;

  TheoremParams p;
  p.d = d;
  p.mu = mu;
  p.rho = rho;
  p.theta0 = theta0;
  p.corr = corr;
  p.A_const = std::ldexp(1.0, 27) * std::log(std::ldexp(1.0, 62) * theta_sq / (rho * rho * rho * corr_sq)) *
              std::log(std::ldexp(1.0, 15) * sqrt_d * theta_sq / (mu * corr_sq));
  p.B_const = p.A_const * std::log(sqrt_d / mu * p.A_const);
  p.T = std::ceil(p.B_const * sqrt_d / mu);
  p.gamma = 1.0 / (4.0 * sqrt_d);
  p.sigma = std::abs(corr) /
            (4096.0 * p.T * std::sqrt(std::max(static_cast<double>(d), std::log(p.T / rho))));
  return p;
}

namespace {

double direction_gap(const RealVector& w, const RealVector& theta) {
  const double nw = norm(w);
  const double nt = norm(theta);
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double diff = w[i] / nw - theta[i] / nt;
    s += diff * diff;
  }
  return std::sqrt(s);
}

}  // namespace

ReductionReport reduction_check_quadratic(const Dataset& data, const RealVector& theta0, double gamma,
                                          const std::vector<double>& norms, long horizon,
                                          std::size_t kernel_size) {
  if (horizon < 1) throw DomainError("reduction_check_quadratic: horizon must be >= 1");
  require_same_size(data.dim() + kernel_size, theta0.size(), "reduction_check_quadratic: theta0");
  const RealVector direction = normalized(theta0);

  std::vector<ConvOperator> ops;
  double worst = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    ops.emplace_back(data.signed_feature(i), kernel_size);
    const double q = ops.back().quadratic_form(direction);
    if (!(std::abs(q) > 1e-12)) {
      throw DomainError("reduction_check_quadratic: theta0^T A_i theta0 = 0 for sample " + std::to_string(i));
    }
    worst = std::max(worst, norm_bounds(ops.back()).estimate);
  }
  if (!(gamma < 1.0 / worst)) {
    throw DomainError("reduction_check_quadratic: gamma must be < 1 / max_i ||A_i||");
  }

  // The perceptron trajectory does not depend on the GD scale.
  std::vector<RealVector> thetas{direction};
  {
    IterateState state(direction);
    for (long t = 0; t < horizon; ++t) {
      quad_perceptron_step(state, ops, gamma, NoiseSpec{});
      thetas.push_back(state.theta);
    }
  }

  ReductionReport report;
  const ModelSpec spec = ModelSpec::conv(data.dim(), kernel_size);
  for (double scale : norms) {
    if (!(scale > 0.0)) throw DomainError("reduction_check_quadratic: norms must be > 0");
    ModelParams w(spec, scale * direction);
    double gap = 0.0;
    std::size_t agree = 0;
    std::size_t total = 0;
    for (long t = 0; t <= horizon; ++t) {
      const RealVector& theta = thetas[static_cast<std::size_t>(t)];
      gap = std::max(gap, direction_gap(w.w, theta));
      for (const ConvOperator& op : ops) {
        agree += std::signbit(op.quadratic_form(w.w)) == std::signbit(op.quadratic_form(theta)) ? 1 : 0;
        ++total;
      }
      if (t < horizon) w = gd_step_conv(w, data, gamma, t);
    }
    report.scales.push_back(scale);
    report.direction_gaps.push_back(gap);
    report.sign_agreement.push_back(static_cast<double>(agree) / static_cast<double>(total));
    report.reference_norms.push_back(1.0);
  }
  return report;
}

ReductionReport reduction_check_linear(const Dataset& data, const std::vector<double>& gammas, long horizon) {
  if (horizon < 1) throw DomainError("reduction_check_linear: horizon must be >= 1");
  const std::vector<RealVector> a = data.signed_features();

  std::vector<RealVector> zs;  // z_1 .. z_horizon
  {
    IterateState state(batch_perceptron_init(data, RealVector::zeros(data.dim())));
    zs.push_back(state.theta);
    for (long t = 1; t < horizon; ++t) {
      batch_perceptron_step(state, a, 1.0);
      zs.push_back(state.theta);
    }
  }
  double z_max = 0.0;
  for (const RealVector& z : zs) z_max = std::max(z_max, norm(z));

  ReductionReport report;
  const ModelSpec spec = ModelSpec::linear(data.dim());
  for (double gamma : gammas) {
    ModelParams w(spec, RealVector::zeros(data.dim()));
    double gap = 0.0;
    std::size_t agree = 0;
    std::size_t total = 0;
    for (long t = 1; t <= horizon; ++t) {
      w = gd_step_linear(w, data, gamma, t - 1);
      const RealVector& z = zs[static_cast<std::size_t>(t - 1)];
      double s = 0.0;
      for (std::size_t j = 0; j < z.size(); ++j) {
        const double diff = w.w[j] / gamma - z[j];
        s += diff * diff;
      }
      gap = std::max(gap, std::sqrt(s));
      for (const RealVector& ai : a) {
        agree += std::signbit(dot(ai, w.w)) == std::signbit(dot(ai, z)) ? 1 : 0;
        ++total;
      }
    }
    report.scales.push_back(gamma);
    report.direction_gaps.push_back(gap);
    report.sign_agreement.push_back(static_cast<double>(agree) / static_cast<double>(total));
    report.reference_norms.push_back(z_max);
  }
  return report;
}

bool gaps_monotone(const std::vector<double>& gaps, double floor) {
  for (std::size_t i = 1; i < gaps.size(); ++i) {
    if (gaps[i] > gaps[i - 1] && gaps[i] > floor) return false;
  }
  return true;
}

LowerBoundTrace lower_bound_replay(std::size_t d, double mu, const RealVector& z0, long max_k,
                                   std::size_t store_limit) {
  if (!(mu > 0.0 && mu <= 0.5)) throw DomainError("lower_bound_replay: hypothesis 0 < mu <= 1/2 violated");
  if (max_k < 1) throw DomainError("lower_bound_replay: max_k must be >= 1");
  const Dataset data = make_two_sample(d, mu);
  require_same_size(d, z0.size(), "lower_bound_replay: z0");
  const std::vector<RealVector> a = data.signed_features();
  const double eps = mu / (8.0 * std::max(norm(a[0]), norm(a[1])));
  if (norm(z0) > eps) {
    throw DomainError("lower_bound_replay: hypothesis ||z0|| <= mu / (8 max ||a_i||) violated");
  }

  LowerBoundTrace out;
  out.d = d;
  out.mu = mu;
  out.z0 = z0;
  out.bound = 2 * static_cast<long>(std::ceil(static_cast<double>(d) / (2.0 * mu)));

  const auto closed_form = [&](long t) {
    RealVector z = z0;
    if (t % 2 == 0) {
      const double k = static_cast<double>(t / 2);
      for (double& x : z) x += 0.5;
      z[0] -= (0.25 + (k - 1.0) / 2.0) * mu;
    } else {
      const double k = static_cast<double>((t - 1) / 2);
      z[0] -= (0.25 + k / 2.0) * mu;
    }
    return z;
  };

  IterateState state(batch_perceptron_init(data, z0));
  const long max_t = 2 * max_k + 1;
  for (long t = 1; t <= max_t; ++t) {
    const RealVector& sim = state.theta;
    const RealVector ana = closed_form(t);
    for (std::size_t j = 0; j < d; ++j) {
      const double dev = std::abs(sim[j] - ana[j]);
      out.max_deviation = std::max(out.max_deviation, dev);
      out.max_scaled_deviation = std::max(out.max_scaled_deviation, dev / std::max(1.0, std::abs(ana[j])));
    }
    if (out.simulated.size() < store_limit) {
      out.simulated.push_back(sim);
      out.analytic.push_back(ana);
    }
    const StepOutcome step = batch_perceptron_step(state, a, 1.0);
    if (step.kind == StepKind::kStop) {
      out.first_separation_step = t;
      break;
    }
  }
  return out;
}

RealVector null_space_start(const std::vector<ConvOperator>& operators, std::uint64_t seed) {
  if (operators.empty()) throw DimensionError("null_space_start: no operators");
  const std::size_t dim = operators.front().dim();
  std::size_t rank_budget = 0;
  for (const ConvOperator& op : operators) {
    if (op.dim() != dim) throw DimensionError("null_space_start: operators differ in dimension");
    rank_budget += 2 * op.kernel_size();
  }
  if (rank_budget >= dim) {
    throw DomainError("null_space_start: need 2 k n < d + k (n < (d + 2) / 4 for k = 2)");
  }

  // Orthonormal basis of the sum of ranges; its complement is the
  // intersection of the kernels.
  std::vector<RealVector> basis;
  for (const ConvOperator& op : operators) {
    const SymmetricEigen eig = dense_symmetric_eig(op.materialize());
    const double scale = std::max(std::abs(eig.values[0]), std::abs(eig.values[eig.values.size() - 1]));
    for (std::size_t c = 0; c < eig.values.size(); ++c) {
      if (std::abs(eig.values[c]) <= 1e-10 * scale) continue;
      RealVector v = eig.vectors.column(c);
      for (int pass = 0; pass < 2; ++pass) {
        for (const RealVector& b : basis) axpy(-dot(b, v), b, v);
      }
      const double nv = norm(v);
      if (nv > 1e-8) basis.push_back((1.0 / nv) * std::move(v));
    }
  }

  Rng rng(seed);
  RealVector theta = rng.normal_vector(dim);
  for (int pass = 0; pass < 2; ++pass) {
    for (const RealVector& b : basis) axpy(-dot(b, theta), b, theta);
  }
  const double nt = norm(theta);
  if (!(nt > 1e-8)) throw NumericError("null_space_start: kernel intersection is numerically trivial");
  theta *= 1.0 / nt;
  for (std::size_t i = 0; i < operators.size(); ++i) {
    if (norm(operators[i].apply(theta)) > 1e-10) {
      throw NumericError("null_space_start: residual above 1e-10 for operator " + std::to_string(i));
    }
  }
  return theta;
}

namespace {

// Checked int64 rational, always reduced with a positive denominator.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw NumericError("exact_null_space_start: integer overflow");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw NumericError("exact_null_space_start: integer overflow");
  return r;
}

Fraction reduce(std::int64_t num, std::int64_t den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  return g > 1 ? Fraction{num / g, den / g} : Fraction{num, den};
}

Fraction sub(Fraction a, Fraction b) {
  const std::int64_t g = std::gcd(a.den, b.den);
  const std::int64_t den = checked_mul(a.den / g, b.den);
  return reduce(checked_add(checked_mul(a.num, b.den / g), -checked_mul(b.num, a.den / g)), den);
}

Fraction mul(Fraction a, Fraction b) {
  const std::int64_t g1 = std::gcd(a.num, b.den);
  const std::int64_t g2 = std::gcd(b.num, a.den);
  return reduce(checked_mul(a.num / (g1 ? g1 : 1), b.num / (g2 ? g2 : 1)),
                checked_mul(a.den / (g2 ? g2 : 1), b.den / (g1 ? g1 : 1)));
}

Fraction div(Fraction a, Fraction b) { return mul(a, Fraction{b.den, b.num}); }

// Smallest m <= 16 with x * 2^m integral for every entry.
int dyadic_exponent(const std::vector<ConvOperator>& operators) {
  for (int m = 0; m <= 16; ++m) {
    bool ok = true;
    for (const ConvOperator& op : operators) {
      for (double x : op.feature()) {
        const double scaled = std::ldexp(x, m);
        if (!(std::abs(x) < 0x1.0p15) || scaled != std::nearbyint(scaled)) ok = false;
      }
    }
    if (ok) return m;
  }
  throw DomainError("exact_null_space_start: features must be multiples of 2^-16 below 2^15");
}

}  // namespace

RealVector exact_null_space_start(const std::vector<ConvOperator>& operators, std::uint64_t seed) {
  if (operators.empty()) throw DimensionError("exact_null_space_start: no operators");
  const std::size_t dim = operators.front().dim();
  for (const ConvOperator& op : operators) {
    if (op.dim() != dim) throw DimensionError("exact_null_space_start: operators differ in dimension");
  }
  const int m = dyadic_exponent(operators);

  std::vector<std::vector<Fraction>> rows;
  for (const ConvOperator& op : operators) {
    const DenseMatrix a = op.materialize();
    for (std::size_t r = 0; r < dim; ++r) {
      std::vector<Fraction> row(dim);
      for (std::size_t c = 0; c < dim; ++c) {
        row[c].num = static_cast<std::int64_t>(std::ldexp(a(r, c), m));
      }
      rows.push_back(std::move(row));
    }
  }

  // Reduced row echelon form.
  std::vector<std::size_t> pivot_cols;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < dim && rank < rows.size(); ++c) {
    std::size_t p = rank;
    while (p < rows.size() && rows[p][c].num == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[rank], rows[p]);
    const Fraction lead = rows[rank][c];
    for (Fraction& x : rows[rank]) x = div(x, lead);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][c].num == 0) continue;
      const Fraction f = rows[r][c];
      for (std::size_t j = 0; j < dim; ++j) rows[r][j] = sub(rows[r][j], mul(f, rows[rank][j]));
    }
    pivot_cols.push_back(c);
    ++rank;
  }
  if (rank == dim) throw NumericError("exact_null_space_start: kernel intersection is trivial");

  // One integer kernel vector per free column.
  std::vector<bool> is_pivot(dim, false);
  for (std::size_t c : pivot_cols) is_pivot[c] = true;
  std::vector<std::vector<std::int64_t>> basis;
  for (std::size_t f = 0; f < dim; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Fraction> x(dim);
    x[f] = Fraction{1, 1};
    for (std::size_t r = 0; r < rank; ++r) x[pivot_cols[r]] = Fraction{-rows[r][f].num, rows[r][f].den};
    std::int64_t l = 1;
    for (const Fraction& v : x) l = checked_mul(l / std::gcd(l, v.den), v.den);
    std::vector<std::int64_t> xi(dim);
    for (std::size_t j = 0; j < dim; ++j) xi[j] = checked_mul(x[j].num, l / x[j].den);
    basis.push_back(std::move(xi));
  }

  Rng rng(seed);
  std::vector<std::int64_t> combo(dim, 0);
  bool nonzero = false;
  while (!nonzero) {
    std::fill(combo.begin(), combo.end(), 0);
    for (const std::vector<std::int64_t>& b : basis) {
      const std::int64_t r = static_cast<std::int64_t>(rng.below(7)) - 3;
      for (std::size_t j = 0; j < dim; ++j) combo[j] = checked_add(combo[j], checked_mul(r, b[j]));
    }
    for (std::int64_t v : combo) nonzero = nonzero || v != 0;
  }
  for (std::int64_t v : combo) {
    if (std::abs(v) >= (std::int64_t{1} << 30)) throw NumericError("exact_null_space_start: kernel vector too large");
  }

  RealVector theta(dim);
  for (std::size_t j = 0; j < dim; ++j) theta[j] = static_cast<double>(combo[j]);
  int e = 0;
  std::frexp(norm(theta), &e);
  for (double& x : theta) x = std::ldexp(x, -e);
  for (std::size_t i = 0; i < operators.size(); ++i) {
    for (double x : operators[i].apply(theta)) {
      if (x != 0.0) throw NumericError("exact_null_space_start: A_i theta not exactly zero for operator " + std::to_string(i));
    }
  }
  return theta;
}

}  // namespace pdx
