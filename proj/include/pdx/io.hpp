#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pdx/dataset.hpp"
#include "pdx/error.hpp"
#include "pdx/perceptrons.hpp"

namespace pdx {

// Malformed input file. `line` is 1-based, 0 when not tied to a line.
class FormatError : public Error {
 public:
  FormatError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// 17 significant digits ("%.17g"); parses back to the same double.
std::string format_double(double x);

// Dataset CSV: header `y,b_1,...,b_d`.
void write_csv_dataset(const Dataset& data, const std::filesystem::path& path);
Dataset load_csv_dataset(const std::filesystem::path& path);

// Trace CSV: header `run_id,algo,t,loss,accuracy,iterate_norm,violated_count,
// corr_mu_plus,step_kind,step_size`; corr_mu_plus empty when undefined.
inline constexpr const char* kTraceHeader =
    "run_id,algo,t,loss,accuracy,iterate_norm,violated_count,corr_mu_plus,step_kind,step_size";
void write_trace(const std::vector<TraceRecord>& records, std::ostream& out, bool header = true);
void write_trace(const std::vector<TraceRecord>& records, const std::filesystem::path& path);
std::vector<TraceRecord> load_trace(const std::filesystem::path& path);

struct SweepRow {
  std::size_t d = 0;
  double mu = 0.0;
  std::string algo;
  std::uint64_t seed = 0;
  double step_size = 0.0;
  long iterations = 0;
  bool separated = false;
};

// Sweep CSV: header `d,mu,algo,seed,step_size,iterations,separated`.
inline constexpr const char* kSweepHeader = "d,mu,algo,seed,step_size,iterations,separated";
void write_sweep(const std::vector<SweepRow>& rows, const std::filesystem::path& path);
std::vector<SweepRow> load_sweep(const std::filesystem::path& path);

// Two classes of an IDX image/label pair. class_a maps to +1, class_b to -1;
// pixels are flattened row-major and scaled to [0, 1]. At most `limit`
// samples per class are kept, chosen uniformly with `seed` and listed in
// file order.
Dataset load_idx_pair(const std::filesystem::path& images, const std::filesystem::path& labels, int class_a,
                      int class_b, std::size_t limit, std::uint64_t seed);

enum class Algorithm { kBatch, kQuad, kTwoSample, kGd, kGeneralized };
const char* to_string(Algorithm a);

// One run, read from a flat `key = value` file. Blank lines and lines
// starting with '#' are ignored; unknown keys are errors.
struct RunConfig {
  Algorithm algorithm = Algorithm::kTwoSample;
  std::string model = "conv";  // linear | conv | two-layer | multi-layer (gd only)
  std::size_t d = 10;
  std::size_t k = 2;
  std::size_t f = 2;                    // two-layer width
  std::vector<std::size_t> layer_dims;  // multi-layer (f_1, ..., f_l, d)
  std::size_t n = 2;                    // separable dataset size
  double mu = 0.1;
  std::optional<double> gamma;  // nullopt means "auto"
  double sigma = 0.0;
  std::uint64_t seed = 42;
  long max_iters = 100000;
  long trace_stride = 1;
  // two-sample | separable | csv | idx
  std::string dataset = "two-sample";
  double margin = 0.1;
  std::string dataset_path;  // csv file or idx images
  std::string labels_path;   // idx labels
  int class_a = 0;
  int class_b = 1;
  std::size_t limit = 100;
  double init_norm = 1.0;
  std::string trace = "trace.csv";
};

RunConfig parse_run_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

// The dataset a config describes.
Dataset config_dataset(const RunConfig& config);

// gamma, or 0.5 * recommend_step_size(data, k) when the config says auto.
double resolve_step_size(const RunConfig& config, const Dataset& data);

}  // namespace pdx
