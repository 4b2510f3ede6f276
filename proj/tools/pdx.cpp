#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdx/experiments.hpp"
#include "pdx/oracles.hpp"
#include "pdx/rng.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t master_seed() {
  const char* env = std::getenv("PDX_SEED");
  if (env == nullptr || *env == '\0') return pdx::kDefaultMasterSeed;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used, 0);
    if (used != std::string(env).size() || std::string(env).front() == '-') throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("PDX_SEED is not an unsigned integer: '") + env + "'");
  }
}

std::pair<int, int> parse_grid(const std::string& text) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument(text);
    std::size_t u1 = 0, u2 = 0;
    const std::string lo_s = text.substr(0, colon), hi_s = text.substr(colon + 1);
    const int lo = std::stoi(lo_s, &u1), hi = std::stoi(hi_s, &u2);
    if (u1 != lo_s.size() || u2 != hi_s.size() || lo > hi) throw std::invalid_argument(text);
    return {lo, hi};
  } catch (const std::exception&) {
    throw UsageError("--grid expects LO:HI with integer LO <= HI, got '" + text + "'");
  }
}

void log_line(const std::string& s) { std::cerr << s << '\n'; }

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

int cmd_run(const std::string& config_path, const std::string& trace_override) {
  pdx::RunConfig config = pdx::load_run_config(config_path);
  if (std::getenv("PDX_SEED") != nullptr) config.seed = master_seed();
  const pdx::SingleRun run = pdx::run_config(config, log_line);
  const std::string trace = trace_override.empty() ? config.trace : trace_override;
  pdx::write_trace(run.result.trace, trace);
  const pdx::LossReport& r = run.final_report;
  std::cout << "final t=" << run.result.state.t << " stop=" << pdx::to_string(run.result.state.stop_reason)
            << " loss=" << num(r.loss) << " accuracy=" << num(r.accuracy)
            << " separated=" << (r.separated ? "true" : "false") << " gamma=" << num(run.step_size)
            << " trace=" << trace << '\n';
  return kOk;
}

int cmd_reduce_check(const std::string& kind) {
  const std::uint64_t master = master_seed();
  const std::vector<double> scales{1e2, 1e4, 1e6};
  bool ok = true;
  std::cout << "seed  " << (kind == "linear" ? "gamma" : "||w0||") << "     gap        sign_agreement\n";
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    pdx::Rng rng(pdx::Rng::derive_seed(master, {7, seed}));
    std::vector<pdx::Sample> samples;
    const std::size_t d = kind == "linear" ? 6 : 8;
    for (int i = 0; i < 4; ++i) samples.push_back({rng.normal_vector(d), rng.uniform() < 0.5 ? -1 : 1});
    const pdx::Dataset data("random", samples);
    const pdx::ReductionReport rep =
        kind == "linear"
            ? pdx::reduction_check_linear(data, scales, 20)
            : pdx::reduction_check_quadratic(data, rng.unit_sphere(d + 2), 0.5 * pdx::recommend_step_size(data),
                                             scales, 50);
    for (std::size_t i = 0; i < scales.size(); ++i) {
      const double gap = kind == "linear" ? rep.direction_gaps[i] / rep.reference_norms[i] : rep.direction_gaps[i];
      std::printf("%4llu  %-8.0e  %-9.3e  %.3f\n", static_cast<unsigned long long>(seed), scales[i], gap,
                  rep.sign_agreement[i]);
    }
    const double last = kind == "linear" ? rep.direction_gaps.back() / rep.reference_norms.back()
                                         : rep.direction_gaps.back();
    ok = ok && pdx::gaps_monotone(rep.direction_gaps) && last <= (kind == "linear" ? 1e-4 : 1e-6);
  }
  std::cout << (ok ? "PASS" : "FAIL") << " gaps shrink with scale\n";
  return ok ? kOk : kCheckFailed;
}

int cmd_verify(const std::string& suite) {
  const auto names = pdx::verify_suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw UsageError("unknown suite '" + suite + "' (expected one of: " + list + ")");
  }
  bool ok = true;
  for (const pdx::CheckResult& c : pdx::run_verify_suite(suite, master_seed())) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : "  [" + c.detail + "]")
              << '\n';
    ok = ok && c.passed;
  }
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perceptron dynamics of logistic-loss GD on structured models"};
  app.require_subcommand(1);

  std::string config_path, trace_override;
  auto* run = app.add_subcommand("run", "Execute one configured run and write its trace CSV");
  run->add_option("--config", config_path, "key = value run file")->required();
  run->add_option("--trace", trace_override, "Trace path (overrides the config's trace key)");

  pdx::ScalingSpec scaling;
  std::string scaling_grid = "-10:9", scaling_out = "sweep.csv";
  auto* sc = app.add_subcommand("scaling", "Iterations to separation against d on the two-sample family");
  sc->add_option("--dims", scaling.dims, "Comma-separated dimensions")->delimiter(',');
  sc->add_option("--mu", scaling.mu, "Separation parameter")->check(CLI::PositiveNumber);
  sc->add_option("--grid", scaling_grid, "log2 step-size grid LO:HI");
  sc->add_option("--seeds", scaling.seeds, "Starts per cell")->check(CLI::PositiveNumber);
  sc->add_option("--algos", scaling.algos, "batch,quad")->delimiter(',');
  sc->add_option("--max-iters", scaling.max_iters, "Per-run iteration cap")->check(CLI::PositiveNumber);
  sc->add_option("--out", scaling_out, "Sweep CSV path");
  sc->add_option("--jobs", scaling.jobs, "Worker threads")->check(CLI::PositiveNumber);

  pdx::KernelTableSpec kt;
  std::string kt_grid = "-16:2", kt_out = "kernel_table.csv";
  auto* ker = app.add_subcommand("kernel-table", "Largest separating step size against kernel size");
  ker->add_option("--ks", kt.ks, "Comma-separated kernel sizes")->delimiter(',');
  ker->add_option("--d", kt.d, "Dimension");
  ker->add_option("--mu", kt.mu, "Separation parameter")->check(CLI::PositiveNumber);
  ker->add_option("--grid", kt_grid, "log2 step-size grid LO:HI");
  ker->add_option("--seeds", kt.seeds, "Starts per step size")->check(CLI::PositiveNumber);
  ker->add_option("--budget", kt.budget, "Iterations per run")->check(CLI::PositiveNumber);
  ker->add_option("--out", kt_out, "Table CSV path");
  ker->add_option("--jobs", kt.jobs, "Worker threads")->check(CLI::PositiveNumber);

  pdx::RaceSpec race;
  std::string race_grid = "-10:9";
  auto* rc = app.add_subcommand("race", "Linear vs convolutional GD on two classes of an IDX image set");
  rc->add_option("--images", race.images, "IDX image file")->required();
  rc->add_option("--labels", race.labels, "IDX label file")->required();
  rc->add_option("--class-a", race.class_a, "Class labelled +1");
  rc->add_option("--class-b", race.class_b, "Class labelled -1");
  rc->add_option("--limit", race.limit, "Samples per class")->check(CLI::PositiveNumber);
  rc->add_option("--k", race.k, "Kernel size")->check(CLI::PositiveNumber);
  rc->add_option("--seeds", race.seeds, "Subsamples")->check(CLI::PositiveNumber);
  rc->add_option("--grid", race_grid, "log2 step-size grid LO:HI");
  rc->add_option("--budget", race.budget, "GD iterations per run")->check(CLI::PositiveNumber);
  rc->add_option("--jobs", race.jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string kind;
  auto* red = app.add_subcommand("reduce-check", "Large-scale GD against its perceptron limit");
  red->add_option("--kind", kind, "linear | quadratic")->required()->check(CLI::IsMember({"linear", "quadratic"}));

  std::string suite;
  auto* ver = app.add_subcommand("verify", "Run an oracle battery");
  ver->add_option("suite", suite, "spectral | reduction | lower-bound | theorem53 | hessian")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(config_path, trace_override);
    if (*sc) {
      std::tie(scaling.log2_lo, scaling.log2_hi) = parse_grid(scaling_grid);
      scaling.master_seed = master_seed();
      const auto rows = pdx::run_scaling(scaling, log_line);
      pdx::write_sweep(rows, scaling_out);
      pdx::print_summary(pdx::summarize_scaling(rows), std::cout);
      return kOk;
    }
    if (*ker) {
      std::tie(kt.log2_lo, kt.log2_hi) = parse_grid(kt_grid);
      kt.master_seed = master_seed();
      const auto rows = pdx::kernel_table(kt, log_line);
      pdx::write_kernel_table(rows, kt_out);
      std::cout << "k      predicted     best_step     mean_iterations\n";
      for (const pdx::KernelRow& r : rows) {
        std::printf("%-6zu %-13.4g %-13.4g %.1f\n", r.k, r.predicted, r.best_step, r.mean_iterations);
      }
      return kOk;
    }
    if (*rc) {
      std::tie(race.log2_lo, race.log2_hi) = parse_grid(race_grid);
      race.master_seed = master_seed();
      int conv_wins = 0;
      const auto rows = pdx::model_race(race, log_line);
      std::cout << "seed  linear_iters  linear_step  conv_iters  conv_step\n";
      for (const pdx::RaceRow& r : rows) {
        std::printf("%-5llu %-13ld %-12.4g %-11ld %.4g\n", static_cast<unsigned long long>(r.seed),
                    r.linear_iterations, r.linear_step, r.conv_iterations, r.conv_step);
        const bool conv_ok = r.conv_iterations >= 0;
        conv_wins += conv_ok && (r.linear_iterations < 0 || r.conv_iterations < r.linear_iterations) ? 1 : 0;
      }
      std::cout << "conv strictly faster on " << conv_wins << "/" << rows.size() << " subsamples\n";
      return kOk;
    }
    if (*red) return cmd_reduce_check(kind);
    if (*ver) return cmd_verify(suite);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const pdx::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const pdx::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
  return kUsage;
}
