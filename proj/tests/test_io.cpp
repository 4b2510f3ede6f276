#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "pdx/io.hpp"
#include "pdx/rng.hpp"
#include "pdx/spectral.hpp"

using namespace pdx;
namespace fs = std::filesystem;

namespace {

const fs::path kData = PDX_TEST_DATA_DIR;
const fs::path kImages = kData / "mnist-subset-images-idx3-ubyte";
const fs::path kLabels = kData / "mnist-subset-labels-idx1-ubyte";

struct TempDir {
  TempDir() : path(fs::temp_directory_path() / ("pdx-io-" + std::to_string(Rng(std::random_device{}()).next_u64()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& name) const { return path / name; }
  fs::path path;
};

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("synthetic datasets") {
  const Dataset two = make_two_sample(3, 0.5);
  CHECK(two[1].b == RealVector{1.5, 1.0, 1.0});
  CHECK(two.signed_feature(1) == RealVector{-1.5, -1.0, -1.0});
  CHECK(norm(two[0].b) == doctest::Approx(std::sqrt(3.0)));
  CHECK_THROWS_AS(make_two_sample(2, 0.5), DomainError);
  CHECK_THROWS_AS(make_two_sample(5, 0.0), DomainError);

  const SeparableDataset sep = make_separable(7, 30, 0.2, 9);
  for (const Sample& s : sep.data.samples()) CHECK(s.y * dot(s.b, sep.direction) >= 0.2);
  const SeparableDataset again = make_separable(7, 30, 0.2, 9);
  for (std::size_t i = 0; i < 30; ++i) CHECK(again.data[i].b == sep.data[i].b);

  // Batch perceptron from z_1 separates within the classical O(n R^2 / w^2) budget.
  const auto a = sep.data.signed_features();
  double r = 0.0, w = 1e300;
  for (const RealVector& ai : a) {
    r = std::max(r, norm(ai));
    w = std::min(w, dot(ai, sep.direction));
  }
  const long budget = static_cast<long>(std::ceil(30.0 * r * r / (w * w)));
  StopRule rule;
  rule.max_iters = budget;
  rule.record_trace = false;
  const RunResult res = run_until(IterateState(batch_perceptron_init(sep.data, RealVector::zeros(7))),
                                  [&](IterateState& s) { return batch_perceptron_step(s, a, 1.0); }, rule, {});
  CHECK(res.state.stop_reason == StopReason::kSeparated);
}

TEST_CASE("dataset CSV") {
  TempDir dir;
  Rng rng(2);
  std::vector<Sample> samples;
  for (int i = 0; i < 5; ++i) samples.push_back({rng.normal_vector(4), i % 2 ? 1 : -1});
  samples[0].b[0] = 1.0 / 3.0;
  samples[1].b[1] = -0x1.fffffffffffffp-1000;
  const Dataset data("x", samples);
  write_csv_dataset(data, dir / "d.csv");
  CHECK(read_bytes(dir / "d.csv").rfind("y,b_1,b_2,b_3,b_4\n", 0) == 0);
  const Dataset back = load_csv_dataset(dir / "d.csv");
  REQUIRE(back.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(back[i].y == data[i].y);
    CHECK(back[i].b == data[i].b);
  }

  write_text(dir / "bad_label.csv", "y,b_1\n1,0.5\n0,0.25\n");
  CHECK_THROWS_WITH_AS(load_csv_dataset(dir / "bad_label.csv"), doctest::Contains(":3:"), FormatError);
  write_text(dir / "short.csv", "y,b_1,b_2\n1,0.5\n");
  CHECK_THROWS_WITH_AS(load_csv_dataset(dir / "short.csv"), doctest::Contains(":2:"), FormatError);
  write_text(dir / "nan.csv", "y,b_1\n1,abc\n");
  CHECK_THROWS_AS(load_csv_dataset(dir / "nan.csv"), FormatError);
  write_text(dir / "empty.csv", "");
  CHECK_THROWS_WITH_AS(load_csv_dataset(dir / "empty.csv"), doctest::Contains("empty"), FormatError);
  write_text(dir / "header_only.csv", "y,b_1\n");
  CHECK_THROWS_AS(load_csv_dataset(dir / "header_only.csv"), FormatError);
  CHECK_THROWS_AS(load_csv_dataset(dir / "missing.csv"), FormatError);
}

TEST_CASE("trace and sweep CSV round-trip") {
  TempDir dir;
  std::vector<TraceRecord> recs;
  Rng rng(5);
  for (long t = 0; t < 4; ++t) {
    TraceRecord r;
    r.run_id = "r1";
    r.algo = "two-sample";
    r.t = t;
    r.loss = rng.normal();
    r.accuracy = 0.5;
    r.iterate_norm = std::exp(rng.normal());
    r.violated_count = static_cast<std::size_t>(t % 2);
    if (t % 2) r.corr_mu_plus = rng.uniform() * 1e-30;
    r.step_kind = "option1";
    r.step_size = 0.1;
    recs.push_back(r);
  }
  write_trace(recs, dir / "t.csv");
  const std::string text = read_bytes(dir / "t.csv");
  CHECK(text.rfind(std::string(kTraceHeader) + "\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  const auto back = load_trace(dir / "t.csv");
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].t == recs[i].t);
    CHECK(back[i].loss == recs[i].loss);
    CHECK(back[i].iterate_norm == recs[i].iterate_norm);
    CHECK(back[i].corr_mu_plus == recs[i].corr_mu_plus);
    CHECK(back[i].step_kind == recs[i].step_kind);
  }

  const std::vector<SweepRow> rows{{10, 0.01, "batch", 3, 0x1p-10, 1234, true},
                                   {100, 0.01, "quad", 0, 0.3, 1000000, false}};
  write_sweep(rows, dir / "s.csv");
  const auto srows = load_sweep(dir / "s.csv");
  REQUIRE(srows.size() == 2);
  CHECK(srows[0].step_size == 0x1p-10);
  CHECK(srows[1].separated == false);
  CHECK(srows[1].iterations == 1000000);
  CHECK(read_bytes(dir / "s.csv").rfind(std::string(kSweepHeader) + "\n", 0) == 0);
}

TEST_CASE("IDX pair loader") {
  const Dataset data = load_idx_pair(kImages, kLabels, 3, 5, 100, 1);
  CHECK(data.size() == 200);
  CHECK(data.dim() == 784);
  int pos = 0;
  for (const Sample& s : data.samples()) {
    pos += s.y == 1;
    for (double x : s.b) {
      CHECK_MESSAGE((x >= 0.0 && x <= 1.0), "pixel out of range");
    }
  }
  CHECK(pos == 100);
  const Dataset same = load_idx_pair(kImages, kLabels, 3, 5, 100, 1);
  const Dataset other = load_idx_pair(kImages, kLabels, 3, 5, 100, 2);
  bool all_equal = true, any_diff = false;
  for (std::size_t i = 0; i < 200; ++i) {
    all_equal = all_equal && same[i].b == data[i].b;
    any_diff = any_diff || !(other[i].b == data[i].b);
  }
  CHECK(all_equal);
  CHECK(any_diff);

  TempDir dir;
  const std::string img = read_bytes(kImages);
  const std::string lab = read_bytes(kLabels);
  std::string bad = img;
  bad[3] = 0x01;
  write_text(dir / "bad-magic", bad);
  CHECK_THROWS_WITH_AS(load_idx_pair(dir / "bad-magic", kLabels, 3, 5, 10, 0), doctest::Contains("magic"),
                       FormatError);
  write_text(dir / "truncated", img.substr(0, img.size() - 7));
  CHECK_THROWS_WITH_AS(load_idx_pair(dir / "truncated", kLabels, 3, 5, 10, 0), doctest::Contains("truncated"),
                       FormatError);
  std::string fewer = lab;
  fewer[7] = static_cast<char>(fewer[7] - 1);
  write_text(dir / "fewer-labels", fewer.substr(0, fewer.size() - 1));
  CHECK_THROWS_WITH_AS(load_idx_pair(kImages, dir / "fewer-labels", 3, 5, 10, 0), doctest::Contains("count"),
                       FormatError);
  CHECK_THROWS_WITH_AS(load_idx_pair(kImages, kLabels, 3, 42, 10, 0), doctest::Contains("unknown class"),
                       DomainError);
}

TEST_CASE("run configuration") {
  std::istringstream in(
      "# two-sample run\n"
      "algorithm = two-sample\n"
      "d = 16\n"
      "mu = 0.05\n"
      "gamma = auto\n"
      "sigma = 1e-6\n"
      "seed = 7\n"
      "max_iters = 5000\n"
      "trace_stride = 10\n");
  const RunConfig c = parse_run_config(in);
  CHECK(c.algorithm == Algorithm::kTwoSample);
  CHECK(c.d == 16);
  CHECK(c.mu == 0.05);
  CHECK_FALSE(c.gamma.has_value());
  CHECK(c.seed == 7);
  const Dataset data = config_dataset(c);
  CHECK(resolve_step_size(c, data) == doctest::Approx(0.5 * recommend_step_size(data)));

  std::istringstream fixed("gamma = 0.25\n");
  CHECK(resolve_step_size(parse_run_config(fixed), data) == 0.25);

  std::istringstream unknown("d = 4\nlearning_rate = 3\n");
  CHECK_THROWS_WITH_AS(parse_run_config(unknown), doctest::Contains("learning_rate"), FormatError);
  std::istringstream nonfinite("mu = inf\n");
  CHECK_THROWS_AS(parse_run_config(nonfinite), FormatError);
  std::istringstream negative("gamma = -1\n");
  CHECK_THROWS_AS(parse_run_config(negative), FormatError);
  std::istringstream duplicate("d = 4\nd = 5\n");
  CHECK_THROWS_WITH_AS(parse_run_config(duplicate), doctest::Contains("duplicate"), FormatError);
  std::istringstream idx("dataset = idx\ndataset_path = x\n");
  CHECK_THROWS_WITH_AS(parse_run_config(idx), doctest::Contains("labels_path"), FormatError);
}
