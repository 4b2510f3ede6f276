#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pdx/io.hpp"
#include "pdx/models.hpp"
#include "pdx/perceptrons.hpp"

namespace pdx {

inline constexpr std::uint64_t kDefaultMasterSeed = 42;

using LogFn = std::function<void(const std::string&)>;

// Runs f(0), ..., f(count - 1) on `jobs` threads. The first exception is
// rethrown after all workers finish.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& f);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// ---- single run -------------------------------------------------------

struct SingleRun {
  RunResult result;
  LossReport final_report;  // at the final iterate, from the run's own observables
  double step_size = 0.0;
};

// Executes the configured algorithm. Starting points are init_norm times a
// uniform draw on the unit sphere from Rng::stream(seed, 0); batch runs
// start from z_1 = (1/2n) sum_i a_i as in the reduction.
SingleRun run_config(const RunConfig& config, const LogFn& log = {});

// ---- two-sample scaling sweep ------------------------------------------

struct ScalingSpec {
  std::vector<std::size_t> dims{10, 100, 400, 600, 800, 1000};
  double mu = 0.01;
  int log2_lo = -10;
  int log2_hi = 9;
  int seeds = 30;
  std::vector<std::string> algos{"batch", "quad"};
  long max_iters = 1000000;
  std::uint64_t master_seed = kDefaultMasterSeed;
  unsigned jobs = 1;
};

// "batch": batch perceptron with phi = gamma from z_0. "quad": two-sample
// scheduler with sigma = 0. The start for (d, seed) is a uniform draw on the
// unit sphere from Rng::stream(master_seed, seed * 1000 + d), shared by all
// step sizes. A run that overflows or reaches max_iters is recorded with
// iterations = max_iters and separated = false. Rows are sorted by
// (d, algo, step_size, seed) regardless of scheduling.
std::vector<SweepRow> run_scaling(const ScalingSpec& spec, const LogFn& log = {});

struct CellSummary {
  std::size_t d = 0;
  std::string algo;
  double best_step = 0.0;  // argmin over the grid of the mean iterations
  double mean = 0.0;
  double median = 0.0;
  long min = 0;
  bool all_separated = false;
};

struct ScalingSummary {
  std::vector<CellSummary> cells;        // sorted by (algo, d)
  std::map<std::string, double> slopes;  // per algo, log-log fit over d
};

ScalingSummary summarize_scaling(const std::vector<SweepRow>& rows);
void print_summary(const ScalingSummary& summary, std::ostream& out);

// ---- step size against kernel size ---------------------------------------

struct KernelTableSpec {
  std::size_t d = 1000;
  double mu = 0.1;
  std::vector<std::size_t> ks{2, 10, 100, 1000};
  int log2_lo = -16;
  int log2_hi = 2;
  int seeds = 3;
  long budget = 1000000;
  std::uint64_t master_seed = kDefaultMasterSeed;
  unsigned jobs = 1;
};

struct KernelRow {
  std::size_t k = 0;
  std::size_t d = 0;
  double mu = 0.0;
  double predicted = 0.0;  // 1 / max_i ||A_i|| (power iteration)
  double best_step = 0.0;  // largest grid gamma where every seed separates, 0 if none
  double mean_iterations = 0.0;
};

// Quadratic perceptron (gamma / n, sigma = 0) on the conv(k) operators of the
// two-sample data, scanning the grid from the largest step down.
std::vector<KernelRow> kernel_table(const KernelTableSpec& spec, const LogFn& log = {});
void write_kernel_table(const std::vector<KernelRow>& rows, const std::filesystem::path& path);

// ---- linear vs convolutional GD on an image subset -----------------------

struct RaceSpec {
  std::filesystem::path images;
  std::filesystem::path labels;
  int class_a = 0;
  int class_b = 1;
  std::size_t limit = 100;  // per class
  std::size_t k = 2;
  int seeds = 6;
  int log2_lo = -10;
  int log2_hi = 9;
  long budget = 2000;
  std::uint64_t master_seed = kDefaultMasterSeed;
  unsigned jobs = 1;
};

struct RaceRow {
  std::uint64_t seed = 0;
  double linear_step = 0.0;  // 0 when no grid step separated within budget
  long linear_iterations = -1;
  double conv_step = 0.0;
  long conv_iterations = -1;
};

// Per seed: subsample with Rng::derive_seed(master, {seed}), start both
// models from a unit-sphere draw, run GD at every grid step and keep the
// fewest iterations to separation.
std::vector<RaceRow> model_race(const RaceSpec& spec, const LogFn& log = {});

// Iterations of GD until every margin is positive, -1 if not within budget
// or on overflow.
long gd_iterations_to_separation(const ModelSpec& spec, const Dataset& data, double gamma, RealVector w0,
                                 long budget);

// ---- oracle batteries ------------------------------------------------------

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// spectral | reduction | lower-bound | theorem53 | hessian
std::vector<std::string> verify_suite_names();
// Throws DomainError for an unknown suite.
std::vector<CheckResult> run_verify_suite(const std::string& name, std::uint64_t master_seed = kDefaultMasterSeed);

}  // namespace pdx
