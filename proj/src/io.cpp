#include "pdx/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "pdx/rng.hpp"
#include "pdx/spectral.hpp"

namespace pdx {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& path, std::size_t line, const std::string& what) {
  const std::string s = trim(text);
  if (s.empty()) throw FormatError(path, line, what + ": empty number");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) {
    throw FormatError(path, line, what + ": not a number: '" + s + "'");
  }
  return v;
}

long long parse_int(const std::string& text, const std::string& path, std::size_t line, const std::string& what) {
  const std::string s = trim(text);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw FormatError(path, line, what + ": not an integer: '" + s + "'");
  }
  return v;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw FormatError(path.string(), 0, "cannot open for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path.string(), 0, "cannot open for writing");
  return out;
}

void expect_header(std::istream& in, const std::string& header, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path, 0, "empty file");
  if (trim(line) != header) throw FormatError(path, 1, "expected header '" + header + "'");
}

}  // namespace

void write_csv_dataset(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << 'y';
  for (std::size_t j = 1; j <= data.dim(); ++j) out << ",b_" << j;
  out << '\n';
  for (const Sample& s : data.samples()) {
    out << s.y;
    for (double x : s.b) out << ',' << format_double(x);
    out << '\n';
  }
  if (!out) throw FormatError(path.string(), 0, "write failed");
}

Dataset load_csv_dataset(const std::filesystem::path& path) {
  const std::string p = path.string();
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) throw FormatError(p, 0, "empty file");
  const std::vector<std::string> header = split(trim(line));
  if (header.size() < 2 || header[0] != "y") throw FormatError(p, 1, "header must be y,b_1,...,b_d");
  for (std::size_t j = 1; j < header.size(); ++j) {
    if (header[j] != "b_" + std::to_string(j)) throw FormatError(p, 1, "header column " + header[j]);
  }
  const std::size_t d = header.size() - 1;

  std::vector<Sample> samples;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split(trim(line));
    if (fields.size() != d + 1) {
      throw FormatError(p, lineno, "expected " + std::to_string(d + 1) + " fields, got " + std::to_string(fields.size()));
    }
    const long long y = parse_int(fields[0], p, lineno, "label");
    if (y != 1 && y != -1) throw FormatError(p, lineno, "label must be -1 or 1, got " + std::to_string(y));
    RealVector b(d);
    for (std::size_t j = 0; j < d; ++j) b[j] = parse_double(fields[j + 1], p, lineno, "b_" + std::to_string(j + 1));
    samples.push_back(Sample{std::move(b), static_cast<int>(y)});
  }
  if (samples.empty()) throw FormatError(p, 0, "no samples");
  return Dataset(path.filename().string(), std::move(samples));
}

void write_trace(const std::vector<TraceRecord>& records, std::ostream& out, bool header) {
  if (header) out << kTraceHeader << '\n';
  for (const TraceRecord& r : records) {
    out << r.run_id << ',' << r.algo << ',' << r.t << ',' << format_double(r.loss) << ','
        << format_double(r.accuracy) << ',' << format_double(r.iterate_norm) << ',' << r.violated_count << ',';
    if (r.corr_mu_plus) out << format_double(*r.corr_mu_plus);
    out << ',' << r.step_kind << ',' << format_double(r.step_size) << '\n';
  }
}

void write_trace(const std::vector<TraceRecord>& records, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  write_trace(records, out);
  if (!out) throw FormatError(path.string(), 0, "write failed");
}

std::vector<TraceRecord> load_trace(const std::filesystem::path& path) {
  const std::string p = path.string();
  std::ifstream in = open_in(path);
  expect_header(in, kTraceHeader, p);
  std::vector<TraceRecord> out;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> f = split(trim(line));
    if (f.size() != 10) throw FormatError(p, lineno, "expected 10 fields");
    TraceRecord r;
    r.run_id = f[0];
    r.algo = f[1];
    r.t = parse_int(f[2], p, lineno, "t");
    r.loss = parse_double(f[3], p, lineno, "loss");
    r.accuracy = parse_double(f[4], p, lineno, "accuracy");
    r.iterate_norm = parse_double(f[5], p, lineno, "iterate_norm");
    r.violated_count = static_cast<std::size_t>(parse_int(f[6], p, lineno, "violated_count"));
    if (!trim(f[7]).empty()) r.corr_mu_plus = parse_double(f[7], p, lineno, "corr_mu_plus");
    r.step_kind = f[8];
    r.step_size = parse_double(f[9], p, lineno, "step_size");
    out.push_back(std::move(r));
  }
  return out;
}

void write_sweep(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << kSweepHeader << '\n';
  for (const SweepRow& r : rows) {
    out << r.d << ',' << format_double(r.mu) << ',' << r.algo << ',' << r.seed << ',' << format_double(r.step_size)
        << ',' << r.iterations << ',' << (r.separated ? "true" : "false") << '\n';
  }
  if (!out) throw FormatError(path.string(), 0, "write failed");
}

std::vector<SweepRow> load_sweep(const std::filesystem::path& path) {
  const std::string p = path.string();
  std::ifstream in = open_in(path);
  expect_header(in, kSweepHeader, p);
  std::vector<SweepRow> out;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> f = split(trim(line));
    if (f.size() != 7) throw FormatError(p, lineno, "expected 7 fields");
    SweepRow r;
    r.d = static_cast<std::size_t>(parse_int(f[0], p, lineno, "d"));
    r.mu = parse_double(f[1], p, lineno, "mu");
    r.algo = f[2];
    r.seed = static_cast<std::uint64_t>(parse_int(f[3], p, lineno, "seed"));
    r.step_size = parse_double(f[4], p, lineno, "step_size");
    r.iterations = parse_int(f[5], p, lineno, "iterations");
    if (f[6] != "true" && f[6] != "false") throw FormatError(p, lineno, "separated must be true or false");
    r.separated = f[6] == "true";
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  std::ifstream in = open_in(path, true);
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::uint32_t be32(const std::vector<unsigned char>& bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

std::vector<std::size_t> choose(std::vector<std::size_t> pool, std::size_t limit, Rng& rng) {
  if (pool.size() <= limit) return pool;
  // Partial Fisher-Yates; the chosen indices are then restored to file order.
  for (std::size_t i = 0; i < limit; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(limit);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

Dataset load_idx_pair(const std::filesystem::path& images, const std::filesystem::path& labels, int class_a,
                      int class_b, std::size_t limit, std::uint64_t seed) {
  const std::string ip = images.string();
  const std::string lp = labels.string();
  if (class_a == class_b) throw DomainError("load_idx_pair: class_a and class_b must differ");
  if (limit == 0) throw DomainError("load_idx_pair: limit must be >= 1");
  const std::vector<unsigned char> img = read_all(images);
  const std::vector<unsigned char> lab = read_all(labels);
  if (img.size() < 16) throw FormatError(ip, 0, "truncated header");
  if (lab.size() < 8) throw FormatError(lp, 0, "truncated header");
  if (be32(img, 0) != 0x00000803) throw FormatError(ip, 0, "bad magic, expected 0x00000803");
  if (be32(lab, 0) != 0x00000801) throw FormatError(lp, 0, "bad magic, expected 0x00000801");
  const std::size_t count = be32(img, 4);
  const std::size_t rows = be32(img, 8);
  const std::size_t cols = be32(img, 12);
  if (be32(lab, 4) != count) throw FormatError(lp, 0, "label count differs from image count");
  const std::size_t pixels = rows * cols;
  if (img.size() != 16 + count * pixels) throw FormatError(ip, 0, "truncated or oversized image data");
  if (lab.size() != 8 + count) throw FormatError(lp, 0, "truncated or oversized label data");

  std::vector<std::size_t> pool_a, pool_b;
  for (std::size_t i = 0; i < count; ++i) {
    const int c = lab[8 + i];
    if (c == class_a) pool_a.push_back(i);
    if (c == class_b) pool_b.push_back(i);
  }
  if (pool_a.empty()) throw DomainError("load_idx_pair: unknown class " + std::to_string(class_a));
  if (pool_b.empty()) throw DomainError("load_idx_pair: unknown class " + std::to_string(class_b));

  Rng rng(seed);
  std::vector<std::size_t> chosen = choose(std::move(pool_a), limit, rng);
  const std::vector<std::size_t> chosen_b = choose(std::move(pool_b), limit, rng);
  chosen.insert(chosen.end(), chosen_b.begin(), chosen_b.end());
  std::sort(chosen.begin(), chosen.end());

  std::vector<Sample> samples;
  samples.reserve(chosen.size());
  for (std::size_t i : chosen) {
    RealVector b(pixels);
    for (std::size_t j = 0; j < pixels; ++j) b[j] = img[16 + i * pixels + j] / 255.0;
    samples.push_back(Sample{std::move(b), lab[8 + i] == class_a ? 1 : -1});
  }
  return Dataset("idx(" + std::to_string(class_a) + " vs " + std::to_string(class_b) + ")", std::move(samples));
}

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kBatch: return "batch";
    case Algorithm::kQuad: return "quad";
    case Algorithm::kTwoSample: return "two-sample";
    case Algorithm::kGd: return "gd";
    case Algorithm::kGeneralized: return "generalized";
  }
  return "?";
}

RunConfig parse_run_config(std::istream& in, const std::string& source) {
  RunConfig c;
  std::string line;
  std::size_t lineno = 0;
  std::map<std::string, std::size_t> seen;

  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw FormatError(source, lineno, "expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (seen.count(key)) throw FormatError(source, lineno, "duplicate key '" + key + "'");
    seen[key] = lineno;

    const auto number = [&] {
      const double v = parse_double(value, source, lineno, key);
      if (!std::isfinite(v)) throw FormatError(source, lineno, key + ": must be finite");
      return v;
    };
    const auto positive_int = [&] {
      const long long v = parse_int(value, source, lineno, key);
      if (v < 1) throw FormatError(source, lineno, key + ": must be >= 1");
      return static_cast<std::size_t>(v);
    };

    if (key == "algorithm") {
      static const std::map<std::string, Algorithm> names{{"batch", Algorithm::kBatch},
                                                          {"quad", Algorithm::kQuad},
                                                          {"two-sample", Algorithm::kTwoSample},
                                                          {"gd", Algorithm::kGd},
                                                          {"generalized", Algorithm::kGeneralized}};
      const auto it = names.find(value);
      if (it == names.end()) throw FormatError(source, lineno, "algorithm: unknown '" + value + "'");
      c.algorithm = it->second;
    } else if (key == "model") {
      if (value != "linear" && value != "conv" && value != "two-layer" && value != "multi-layer") {
        throw FormatError(source, lineno, "model: unknown '" + value + "'");
      }
      c.model = value;
    } else if (key == "d") {
      c.d = positive_int();
    } else if (key == "k") {
      c.k = positive_int();
    } else if (key == "f") {
      c.f = positive_int();
    } else if (key == "layer_dims") {
      c.layer_dims.clear();
      for (const std::string& part : split(value)) {
        const long long v = parse_int(part, source, lineno, key);
        if (v < 1) throw FormatError(source, lineno, "layer_dims: entries must be >= 1");
        c.layer_dims.push_back(static_cast<std::size_t>(v));
      }
    } else if (key == "n") {
      c.n = positive_int();
    } else if (key == "mu") {
      c.mu = number();
      if (!(c.mu > 0.0)) throw FormatError(source, lineno, "mu: must be > 0");
    } else if (key == "gamma") {
      if (value == "auto") {
        c.gamma.reset();
      } else {
        c.gamma = number();
        if (!(*c.gamma > 0.0)) throw FormatError(source, lineno, "gamma: must be > 0 or auto");
      }
    } else if (key == "sigma") {
      c.sigma = number();
      if (c.sigma < 0.0) throw FormatError(source, lineno, "sigma: must be >= 0");
    } else if (key == "seed") {
      const long long v = parse_int(value, source, lineno, key);
      if (v < 0) throw FormatError(source, lineno, "seed: must be >= 0");
      c.seed = static_cast<std::uint64_t>(v);
    } else if (key == "max_iters") {
      c.max_iters = static_cast<long>(positive_int());
    } else if (key == "trace_stride") {
      c.trace_stride = static_cast<long>(positive_int());
    } else if (key == "dataset") {
      if (value != "two-sample" && value != "separable" && value != "csv" && value != "idx") {
        throw FormatError(source, lineno, "dataset: unknown '" + value + "'");
      }
      c.dataset = value;
    } else if (key == "margin") {
      c.margin = number();
      if (!(c.margin > 0.0)) throw FormatError(source, lineno, "margin: must be > 0");
    } else if (key == "dataset_path") {
      c.dataset_path = value;
    } else if (key == "labels_path") {
      c.labels_path = value;
    } else if (key == "class_a" || key == "class_b") {
      const long long v = parse_int(value, source, lineno, key);
      if (v < 0 || v > 255) throw FormatError(source, lineno, key + ": must be in [0, 255]");
      (key == "class_a" ? c.class_a : c.class_b) = static_cast<int>(v);
    } else if (key == "limit") {
      c.limit = positive_int();
    } else if (key == "init_norm") {
      c.init_norm = number();
      if (!(c.init_norm > 0.0)) throw FormatError(source, lineno, "init_norm: must be > 0");
    } else if (key == "trace") {
      c.trace = value;
    } else {
      throw FormatError(source, lineno, "unknown key '" + key + "'");
    }
  }
  if ((c.dataset == "csv" || c.dataset == "idx") && c.dataset_path.empty()) {
    throw FormatError(source, 0, "dataset_path is required for dataset = " + c.dataset);
  }
  if (c.dataset == "idx" && c.labels_path.empty()) throw FormatError(source, 0, "labels_path is required for idx");
  if (c.model == "multi-layer" && c.layer_dims.size() < 2) {
    throw FormatError(source, 0, "layer_dims needs at least two entries for multi-layer");
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  return parse_run_config(in, path.string());
}

Dataset config_dataset(const RunConfig& c) {
  if (c.dataset == "two-sample") return make_two_sample(c.d, c.mu);
  if (c.dataset == "separable") return make_separable(c.d, c.n, c.margin, c.seed).data;
  if (c.dataset == "csv") return load_csv_dataset(c.dataset_path);
  return load_idx_pair(c.dataset_path, c.labels_path, c.class_a, c.class_b, c.limit, c.seed);
}

double resolve_step_size(const RunConfig& config, const Dataset& data) {
  if (config.gamma) return *config.gamma;
  return 0.5 * recommend_step_size(data, config.k);
}

}  // namespace pdx
