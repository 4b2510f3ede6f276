#include "pdx/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "pdx/jacobi.hpp"
#include "pdx/oracles.hpp"
#include "pdx/rng.hpp"
#include "pdx/spectral.hpp"

namespace pdx {

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& f) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          f(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (std::thread& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DimensionError("loglog_slope: need >= 2 paired points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw DomainError("loglog_slope: values must be > 0");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw DomainError("loglog_slope: x values are all equal");
  return sxy / sxx;
}

namespace {

std::string pow2_label(double g) {
  int e = 0;
  const double m = std::frexp(g, &e);
  if (m == 0.5) return "2^" + std::to_string(e - 1);
  return format_double(g);
}

StopRule sweep_rule(long max_iters) {
  StopRule rule;
  rule.max_iters = max_iters;
  rule.record_trace = false;
  return rule;
}

// Separated iteration count, or -1 on overflow / budget exhaustion / stall.
long iterations_or_fail(IterateState state, const StepFunction& step, long max_iters) {
  try {
    const RunResult r = run_until(std::move(state), step, sweep_rule(max_iters), {});
    return r.state.stop_reason == StopReason::kSeparated ? r.state.t : -1;
  } catch (const NumericError&) {
    return -1;
  }
}

LossReport report_from(const std::vector<double>& dots) {
  LossReport r;
  r.margins = dots;
  std::size_t positive = 0;
  for (double m : dots) {
    r.loss += logistic(m);
    positive += m > 0.0 ? 1 : 0;
  }
  const double n = static_cast<double>(std::max<std::size_t>(dots.size(), 1));
  r.loss /= n;
  r.accuracy = static_cast<double>(positive) / n;
  r.separated = positive == dots.size() && !dots.empty();
  return r;
}

ModelSpec model_spec(const RunConfig& c, std::size_t d) {
  if (c.model == "linear") return ModelSpec::linear(d);
  if (c.model == "conv") return ModelSpec::conv(d, c.k);
  if (c.model == "two-layer") return ModelSpec::two_layer(d, c.f);
  if (c.layer_dims.empty() || c.layer_dims.back() != d) {
    throw DomainError("layer_dims must end with the feature dimension " + std::to_string(d));
  }
  return ModelSpec::multi_layer(c.layer_dims);
}

}  // namespace

SingleRun run_config(const RunConfig& c, const LogFn& log) {
  const Dataset data = config_dataset(c);
  const double gamma = resolve_step_size(c, data);
  const std::size_t d = data.dim();
  Rng start_rng = Rng::stream(c.seed, 0);
  const auto start = [&](std::size_t dim) { return c.init_norm * start_rng.unit_sphere(dim); };

  StopRule rule;
  rule.max_iters = c.max_iters;
  rule.trace_stride = c.trace_stride;
  rule.dense_trace_until = c.trace_stride > 1 ? 0 : rule.dense_trace_until;
  const RunMeta meta{"seed" + std::to_string(c.seed), to_string(c.algorithm), gamma};
  const NoiseSpec noise{c.sigma, c.seed};

  std::function<std::vector<double>(const RealVector&)> observe;
  StepFunction step;
  RealVector theta0;

  // Shared between the step and observation closures below.
  const std::vector<RealVector> a = data.signed_features();
  std::vector<ConvOperator> ops;
  std::vector<MultiLinearMap> maps;
  std::optional<TwoSampleSpectrum> spectrum;
  std::optional<ModelSpec> spec;

  switch (c.algorithm) {
    case Algorithm::kBatch:
      theta0 = batch_perceptron_init(data, RealVector::zeros(d));
      step = [&](IterateState& s) { return batch_perceptron_step(s, a, gamma); };
      observe = [&](const RealVector& z) {
        std::vector<double> dots;
        for (const RealVector& ai : a) dots.push_back(dot(ai, z));
        return dots;
      };
      break;
    case Algorithm::kQuad:
      for (const RealVector& ai : a) ops.emplace_back(ai, c.k);
      if (log && step_size_exceeds_limit(ops, gamma)) log("warning: gamma >= 1 / max_i ||A_i||");
      theta0 = start(d + c.k);
      step = [&](IterateState& s) { return quad_perceptron_step(s, ops, gamma, noise); };
      observe = [&](const RealVector& th) {
        std::vector<double> dots;
        for (const ConvOperator& op : ops) dots.push_back(0.5 * op.quadratic_form(th));
        return dots;
      };
      break;
    case Algorithm::kTwoSample:
      if (c.dataset != "two-sample" || c.k != 2) throw DomainError("two-sample algorithm needs dataset = two-sample, k = 2");
      spectrum = two_sample_spectrum(d, c.mu);
      theta0 = start(d + 2);
      step = [&](IterateState& s) { return two_sample_step(s, *spectrum, gamma, noise); };
      observe = [&](const RealVector& th) {
        return std::vector<double>{0.5 * spectrum->a1_op.quadratic_form(th), 0.5 * spectrum->a2_op.quadratic_form(th)};
      };
      break;
    case Algorithm::kGeneralized: {
      if (c.layer_dims.empty() || c.layer_dims.back() != d) {
        throw DomainError("layer_dims must end with the feature dimension " + std::to_string(d));
      }
      for (const RealVector& ai : a) maps.emplace_back(c.layer_dims, ai);
      theta0 = start(maps.front().dim());
      step = [&](IterateState& s) { return generalized_perceptron_step(s, maps, gamma); };
      observe = [&](const RealVector& th) {
        std::vector<double> dots;
        for (const MultiLinearMap& m : maps) dots.push_back(m.value(th));
        return dots;
      };
      break;
    }
    case Algorithm::kGd:
      spec = model_spec(c, d);
      theta0 = start(spec->packed_size());
      observe = [&](const RealVector& w) { return logistic_loss(ModelParams(*spec, w), data).margins; };
      step = [&](IterateState& s) {
        const ModelParams p(*spec, s.theta);
        StepOutcome o;
        o.dot_products = logistic_loss(p, data).margins;
        for (std::size_t i = 0; i < o.dot_products.size(); ++i) {
          if (o.dot_products[i] <= 0.0) o.violated.push_back(i);
        }
        if (o.violated.empty()) return o;
        o.kind = StepKind::kGd;
        s.theta = gd_step(p, data, gamma, s.t).w;
        ++s.t;
        return o;
      };
      break;
  }

  RunResult result = run_until(IterateState(std::move(theta0), c.seed), step, rule, meta);
  LossReport report = report_from(observe(result.state.theta));
  return SingleRun{std::move(result), std::move(report), gamma};
}

std::vector<SweepRow> run_scaling(const ScalingSpec& spec, const LogFn& log) {
  if (spec.dims.empty() || spec.algos.empty()) throw DomainError("scaling: empty dims or algos");
  if (spec.seeds < 1) throw DomainError("scaling: seeds must be >= 1");
  if (spec.log2_lo > spec.log2_hi) throw DomainError("scaling: grid LO must be <= HI");
  for (const std::string& algo : spec.algos) {
    if (algo != "batch" && algo != "quad") throw DomainError("scaling: unknown algorithm '" + algo + "'");
  }

  struct PerDim {
    Dataset data;
    std::vector<RealVector> a;
    TwoSampleSpectrum spectrum;
  };
  std::vector<PerDim> per_dim;
  for (std::size_t d : spec.dims) {
    Dataset data = make_two_sample(d, spec.mu);
    std::vector<RealVector> a = data.signed_features();
    per_dim.push_back(PerDim{std::move(data), std::move(a), two_sample_spectrum(d, spec.mu)});
  }

  struct Cell {
    std::size_t dim_index;
    std::string algo;
    double gamma;
  };
  std::vector<Cell> cells;
  for (std::size_t di = 0; di < spec.dims.size(); ++di) {
    for (const std::string& algo : spec.algos) {
      for (int e = spec.log2_lo; e <= spec.log2_hi; ++e) cells.push_back({di, algo, std::ldexp(1.0, e)});
    }
  }

  std::vector<std::vector<SweepRow>> results(cells.size());
  std::mutex log_mutex;
  parallel_for(cells.size(), spec.jobs, [&](std::size_t ci) {
    const Cell& cell = cells[ci];
    const std::size_t d = spec.dims[cell.dim_index];
    const PerDim& pd = per_dim[cell.dim_index];
    long separated = 0;
    double total = 0.0;
    for (int seed = 0; seed < spec.seeds; ++seed) {
      Rng rng = Rng::stream(spec.master_seed, static_cast<std::uint64_t>(seed) * 1000 + d);
      long it = -1;
      if (cell.algo == "batch") {
        it = iterations_or_fail(
            IterateState(rng.unit_sphere(d)),
            [&](IterateState& s) { return batch_perceptron_step(s, pd.a, cell.gamma); }, spec.max_iters);
      } else {
        it = iterations_or_fail(
            IterateState(rng.unit_sphere(d + 2)),
            [&](IterateState& s) { return two_sample_step(s, pd.spectrum, cell.gamma, NoiseSpec{}); },
            spec.max_iters);
      }
      SweepRow row{d, spec.mu, cell.algo, static_cast<std::uint64_t>(seed), cell.gamma, it < 0 ? spec.max_iters : it,
                   it >= 0};
      separated += row.separated ? 1 : 0;
      total += static_cast<double>(row.iterations);
      results[ci].push_back(row);
    }
    if (log) {
      std::ostringstream msg;
      msg << "d=" << d << " algo=" << cell.algo << " gamma=" << pow2_label(cell.gamma)
          << " mean=" << total / spec.seeds << " separated=" << separated << "/" << spec.seeds;
      const std::lock_guard<std::mutex> lock(log_mutex);
      log(msg.str());
    }
  });

  std::vector<SweepRow> rows;
  for (const auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  std::sort(rows.begin(), rows.end(), [](const SweepRow& x, const SweepRow& y) {
    return std::tie(x.d, x.mu, x.algo, x.step_size, x.seed) < std::tie(y.d, y.mu, y.algo, y.step_size, y.seed);
  });
  return rows;
}

ScalingSummary summarize_scaling(const std::vector<SweepRow>& rows) {
  // (algo, d) -> step -> iterations over seeds
  std::map<std::pair<std::string, std::size_t>, std::map<double, std::vector<const SweepRow*>>> groups;
  for (const SweepRow& r : rows) groups[{r.algo, r.d}][r.step_size].push_back(&r);

  ScalingSummary out;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> fit;
  for (const auto& [key, by_step] : groups) {
    CellSummary best;
    best.algo = key.first;
    best.d = key.second;
    bool first = true;
    for (const auto& [step, cell] : by_step) {
      double mean = 0.0;
      for (const SweepRow* r : cell) mean += static_cast<double>(r->iterations);
      mean /= static_cast<double>(cell.size());
      if (first || mean < best.mean) {
        first = false;
        std::vector<long> its;
        bool all = true;
        for (const SweepRow* r : cell) {
          its.push_back(r->iterations);
          all = all && r->separated;
        }
        std::sort(its.begin(), its.end());
        const std::size_t m = its.size();
        best.best_step = step;
        best.mean = mean;
        best.median = m % 2 ? static_cast<double>(its[m / 2]) : 0.5 * static_cast<double>(its[m / 2 - 1] + its[m / 2]);
        best.min = its.front();
        best.all_separated = all;
      }
    }
    out.cells.push_back(best);
    fit[best.algo].first.push_back(static_cast<double>(best.d));
    fit[best.algo].second.push_back(std::max(best.mean, 1.0));
  }
  for (const auto& [algo, xy] : fit) {
    if (xy.first.size() >= 2) out.slopes[algo] = loglog_slope(xy.first, xy.second);
  }
  return out;
}

void print_summary(const ScalingSummary& summary, std::ostream& out) {
  out << "algo        d  best_step      mean    median       min  separated\n";
  for (const CellSummary& c : summary.cells) {
    out << std::left << std::setw(6) << c.algo << std::right << std::setw(7) << c.d << std::setw(11)
        << pow2_label(c.best_step) << std::setw(10) << std::fixed << std::setprecision(1) << c.mean << std::setw(10)
        << c.median << std::setw(10) << c.min << (c.all_separated ? "  yes" : "  NO (flagged)") << '\n';
  }
  out.unsetf(std::ios::floatfield);
  for (const auto& [algo, slope] : summary.slopes) {
    out << "slope " << algo << " = " << std::setprecision(4) << slope << '\n';
  }
}

std::vector<KernelRow> kernel_table(const KernelTableSpec& spec, const LogFn& log) {
  if (spec.ks.empty() || spec.seeds < 1 || spec.log2_lo > spec.log2_hi) throw DomainError("kernel-table: bad spec");
  const Dataset data = make_two_sample(spec.d, spec.mu);
  std::vector<KernelRow> rows;
  for (std::size_t k : spec.ks) {
    std::vector<ConvOperator> ops;
    for (std::size_t i = 0; i < data.size(); ++i) ops.emplace_back(data.signed_feature(i), k);
    KernelRow row{k, spec.d, spec.mu, recommend_step_size(data, k), 0.0, 0.0};
    for (int e = spec.log2_hi; e >= spec.log2_lo && row.best_step == 0.0; --e) {
      const double gamma = std::ldexp(1.0, e);
      std::vector<long> its(static_cast<std::size_t>(spec.seeds));
      parallel_for(its.size(), spec.jobs, [&](std::size_t seed) {
        Rng rng = Rng::stream(spec.master_seed, seed * 1000 + k);
        its[seed] = iterations_or_fail(
            IterateState(rng.unit_sphere(spec.d + k)),
            [&](IterateState& s) { return quad_perceptron_step(s, ops, gamma, NoiseSpec{}); }, spec.budget);
      });
      if (std::all_of(its.begin(), its.end(), [](long it) { return it >= 0; })) {
        row.best_step = gamma;
        for (long it : its) row.mean_iterations += static_cast<double>(it) / spec.seeds;
      }
    }
    if (log) {
      log("k=" + std::to_string(k) + " predicted=" + format_double(row.predicted) +
          " best=" + (row.best_step > 0 ? pow2_label(row.best_step) : std::string("none")));
    }
    rows.push_back(row);
  }
  return rows;
}

void write_kernel_table(const std::vector<KernelRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path.string(), 0, "cannot open for writing");
  out << "k,d,mu,predicted_step,best_step,mean_iterations\n";
  for (const KernelRow& r : rows) {
    out << r.k << ',' << r.d << ',' << format_double(r.mu) << ',' << format_double(r.predicted) << ','
        << format_double(r.best_step) << ',' << format_double(r.mean_iterations) << '\n';
  }
  if (!out) throw FormatError(path.string(), 0, "write failed");
}

long gd_iterations_to_separation(const ModelSpec& spec, const Dataset& data, double gamma, RealVector w0,
                                 long budget) {
  ModelParams w(spec, std::move(w0));
  for (long t = 0;; ++t) {
    if (logistic_loss(w, data).separated) return t;
    if (t >= budget) return -1;
    try {
      w = gd_step(w, data, gamma, t);
    } catch (const NumericError&) {
      return -1;
    }
  }
}

std::vector<RaceRow> model_race(const RaceSpec& spec, const LogFn& log) {
  if (spec.seeds < 1 || spec.log2_lo > spec.log2_hi) throw DomainError("race: bad spec");
  std::vector<RaceRow> rows(static_cast<std::size_t>(spec.seeds));
  std::mutex log_mutex;
  parallel_for(rows.size(), spec.jobs, [&](std::size_t seed) {
    const Dataset data = load_idx_pair(spec.images, spec.labels, spec.class_a, spec.class_b, spec.limit,
                                       Rng::derive_seed(spec.master_seed, {seed}));
    RaceRow& row = rows[seed];
    row.seed = seed;
    for (int m = 0; m < 2; ++m) {
      const ModelSpec model = m == 0 ? ModelSpec::linear(data.dim()) : ModelSpec::conv(data.dim(), spec.k);
      const RealVector w0 = Rng(Rng::derive_seed(spec.master_seed, {seed, static_cast<std::uint64_t>(m) + 1}))
                                .unit_sphere(model.packed_size());
      long best = -1;
      double best_step = 0.0;
      for (int e = spec.log2_lo; e <= spec.log2_hi; ++e) {
        // A run that cannot beat the current best is cut at that count.
        const long cap = best < 0 ? spec.budget : best - 1;
        if (cap < 0) break;
        const long it = gd_iterations_to_separation(model, data, std::ldexp(1.0, e), w0, cap);
        if (it >= 0) {
          best = it;
          best_step = std::ldexp(1.0, e);
        }
      }
      (m == 0 ? row.linear_iterations : row.conv_iterations) = best;
      (m == 0 ? row.linear_step : row.conv_step) = best_step;
    }
    if (log) {
      const std::lock_guard<std::mutex> lock(log_mutex);
      log("seed=" + std::to_string(seed) + " linear=" + std::to_string(row.linear_iterations) + " @" +
          pow2_label(row.linear_step) + " conv=" + std::to_string(row.conv_iterations) + " @" +
          pow2_label(row.conv_step));
    }
  });
  return rows;
}

// ---- verify suites ----------------------------------------------------------

namespace {

void add(std::vector<CheckResult>& out, std::string name, bool ok, std::string detail = {}) {
  out.push_back(CheckResult{std::move(name), ok, std::move(detail)});
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::vector<CheckResult> verify_spectral(std::uint64_t master) {
  std::vector<CheckResult> out;
  Rng rng(Rng::derive_seed(master, {1}));
  double worst_value = 0.0, worst_residual = 0.0;
  for (std::size_t d = 3; d <= 12; ++d) {
    std::vector<RealVector> cases{RealVector::zeros(d), RealVector::ones(d)};
    RealVector alt(d);
    for (std::size_t i = 0; i < d; ++i) alt[i] = i % 2 ? -1.0 : 1.0;
    cases.push_back(alt);
    for (int r = 0; r < 10; ++r) cases.push_back(rng.normal_vector(d));
    for (const RealVector& a : cases) {
      const ConvOperator op(a, 2);
      const EigenSystem sys = eigensystem_k2(a);
      const SymmetricEigen eig = dense_symmetric_eig(op.materialize());
      std::vector<double> dense;
      for (double v : eig.values) {
        if (std::abs(v) > 1e-9) dense.push_back(v);
      }
      std::vector<double> closed;
      for (const EigenPair& p : sys.pairs) {
        closed.push_back(p.value);
        RealVector res = op.apply(p.unit);
        axpy(-p.value, p.unit, res);
        worst_residual = std::max(worst_residual, norm(res) / std::max(norm(a), 1e-300));
      }
      std::sort(dense.begin(), dense.end());
      std::sort(closed.begin(), closed.end());
      if (dense.size() != closed.size()) {
        worst_value = INFINITY;
        continue;
      }
      for (std::size_t i = 0; i < dense.size(); ++i) worst_value = std::max(worst_value, std::abs(dense[i] - closed[i]));
    }
  }
  add(out, "closed-form eigenvalues match Jacobi (d = 3..12)", worst_value <= 1e-9, "max |diff| = " + sci(worst_value));
  add(out, "eigen-residuals <= 1e-9 ||a||", worst_residual <= 1e-9, "max = " + sci(worst_residual));

  double worst_sandwich = 0.0;
  for (int r = 0; r < 50; ++r) {
    const RealVector a = rng.normal_vector(3 + rng.below(20));
    const double est = norm_bounds(ConvOperator(a, 2)).estimate;
    const double na = norm(a);
    worst_sandwich = std::max({worst_sandwich, (na - est) / na, (est - std::sqrt(2.0) * na) / na});
  }
  add(out, "||a|| <= ||A|| <= sqrt(2) ||a||", worst_sandwich <= 1e-12, "worst violation = " + sci(worst_sandwich));

  const TwoSampleSpectrum s = two_sample_spectrum(12, 0.1);
  const RealVector theta = rng.normal_vector(14);
  RealVector next = theta;
  axpy(0.05, s.a1_op.apply(theta), next);
  const double before = dot(s.v_mu_plus, theta);
  const double drift = std::abs(dot(s.v_mu_plus, next) - before) / std::abs(before);
  add(out, "<v_mu+, theta> preserved by I + gamma A_1", drift <= 1e-10, "relative change = " + sci(drift));
  return out;
}

std::vector<CheckResult> verify_reduction(std::uint64_t master) {
  std::vector<CheckResult> out;
  bool lin_ok = true, quad_ok = true;
  double lin_worst = 0.0, quad_worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(Rng::derive_seed(master, {2, seed}));
    std::vector<Sample> samples;
    for (int i = 0; i < 4; ++i) samples.push_back({rng.normal_vector(6), rng.uniform() < 0.5 ? -1 : 1});
    const ReductionReport lin = reduction_check_linear(Dataset("random", samples), {1e2, 1e4, 1e6}, 20);
    const double rel = lin.direction_gaps[2] / lin.reference_norms[2];
    lin_worst = std::max(lin_worst, rel);
    lin_ok = lin_ok && rel <= 1e-4 && gaps_monotone(lin.direction_gaps);

    std::vector<Sample> qs;
    for (int i = 0; i < 4; ++i) qs.push_back({rng.normal_vector(8), rng.uniform() < 0.5 ? -1 : 1});
    const Dataset qd("random", qs);
    const ReductionReport quad =
        reduction_check_quadratic(qd, rng.unit_sphere(10), 0.5 * recommend_step_size(qd), {1e2, 1e4, 1e6}, 50);
    quad_worst = std::max(quad_worst, quad.direction_gaps[2]);
    quad_ok = quad_ok && quad.direction_gaps[2] <= 1e-6 && quad.sign_agreement[2] == 1.0 &&
              gaps_monotone(quad.direction_gaps);
  }
  add(out, "linear GD / gamma -> batch perceptron (10 seeds)", lin_ok, "max gap / max ||z|| = " + sci(lin_worst));
  add(out, "conv GD direction -> quadratic perceptron (10 seeds)", quad_ok, "max gap = " + sci(quad_worst));
  return out;
}

std::vector<CheckResult> verify_lower_bound(std::uint64_t) {
  std::vector<CheckResult> out;
  for (const auto& [d, mu] : std::vector<std::pair<std::size_t, double>>{{10, 0.1}, {100, 0.05}, {100, 0.01}}) {
    const LowerBoundTrace tr = lower_bound_replay(d, mu, RealVector::zeros(d), 1000000, 0);
    const std::string tag = "(d=" + std::to_string(d) + ", mu=" + sci(mu) + ")";
    add(out, "replay matches closed form " + tag, tr.max_scaled_deviation <= 1e-12,
        "scaled " + sci(tr.max_scaled_deviation) + ", absolute " + sci(tr.max_deviation));
    add(out, "no separation before 2 ceil(d / 2mu) " + tag, tr.first_separation_step >= tr.bound,
        "first = " + std::to_string(tr.first_separation_step) + ", bound = " + std::to_string(tr.bound));
  }
  return out;
}

std::vector<CheckResult> verify_termination(std::uint64_t master) {
  std::vector<CheckResult> out;
  const std::size_t d = 16;
  const double mu = 0.05, rho = 0.1;
  const TwoSampleSpectrum spec = two_sample_spectrum(d, mu);
  int separated = 0;
  bool identities = true;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(Rng::derive_seed(master, {53, seed}));
    const RealVector theta0 = rng.unit_sphere(d + 2);
    const TheoremParams p = theorem_params(d, mu, rho, theta0);
    const double lhs = p.sigma * 4096.0 * p.T * std::sqrt(std::max(double(d), std::log(p.T / rho)));
    identities = identities && p.gamma <= 1.0 / (4.0 * std::sqrt(double(d))) * (1 + 1e-15) &&
                 std::abs(lhs - std::abs(p.corr)) <= 1e-12 * std::abs(p.corr) && p.T == std::ceil(p.T);
    const long cap = static_cast<long>(std::min(p.T, 1e6));
    const long it = iterations_or_fail(
        IterateState(theta0, Rng::derive_seed(master, {54, seed})),
        [&](IterateState& s) { return two_sample_step(s, spec, p.gamma, NoiseSpec{p.sigma, 0}); }, cap);
    separated += it >= 0 ? 1 : 0;
  }
  add(out, "parameter identities (gamma, sigma, T)", identities);
  add(out, "separates within min(T, 1e6) on 5 seeds", separated == 5, std::to_string(separated) + "/5");
  return out;
}

std::vector<CheckResult> verify_hessian(std::uint64_t master) {
  std::vector<CheckResult> out;
  const std::size_t d = 16;
  const Dataset data = hessian_example_dataset(d);
  Rng rng(Rng::derive_seed(master, {31}));
  int hess = 0, grad = 0, loss = 0;
  for (int s = 0; s < 100; ++s) {
    const RealVector w = sample_hessian_region(d, rng);
    const HessianProbe p = hessian_probe(ModelParams(ModelSpec::conv(d, 2), w), data);
    const double nw = norm(w);
    hess += p.hessian_norm_lb >= nw * nw / 20.0 - std::sqrt(2.0) ? 1 : 0;
    grad += (p.grad_norm >= std::sqrt(2.0) / 20.0 * nw && p.grad_norm <= std::sqrt(2.0) * nw) ? 1 : 0;
    loss += (p.loss >= 1.0 / 20.0 && p.loss <= 5.0) ? 1 : 0;
  }
  add(out, "||Hessian|| >= ||w||^2/20 - sqrt(2)", hess == 100, std::to_string(hess) + "/100");
  add(out, "sqrt(2)/20 ||w|| <= ||grad|| <= sqrt(2) ||w||", grad == 100, std::to_string(grad) + "/100");
  add(out, "1/20 <= loss <= 5", loss == 100, std::to_string(loss) + "/100");
  return out;
}

}  // namespace

std::vector<std::string> verify_suite_names() {
  return {"spectral", "reduction", "lower-bound", "theorem53", "hessian"};
}

std::vector<CheckResult> run_verify_suite(const std::string& name, std::uint64_t master_seed) {
  if (name == "spectral") return verify_spectral(master_seed);
  if (name == "reduction") return verify_reduction(master_seed);
  if (name == "lower-bound") return verify_lower_bound(master_seed);
  if (name == "theorem53") return verify_termination(master_seed);
  if (name == "hessian") return verify_hessian(master_seed);
  throw DomainError("unknown verify suite '" + name + "'");
}

}  // namespace pdx
