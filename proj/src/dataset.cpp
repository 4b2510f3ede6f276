#include "pdx/dataset.hpp"

#include <algorithm>

#include "pdx/rng.hpp"

namespace pdx {

Dataset::Dataset(std::string name, std::vector<Sample> samples)
    : name_(std::move(name)), samples_(std::move(samples)) {
  if (samples_.empty()) throw DomainError("Dataset '" + name_ + "': no samples");
  dim_ = samples_.front().b.size();
  if (dim_ == 0) throw DimensionError("Dataset '" + name_ + "': empty feature vector");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const Sample& s = samples_[i];
    if (s.b.size() != dim_) {
      throw DimensionError("Dataset '" + name_ + "': sample " + std::to_string(i) +
                           " has dimension " + std::to_string(s.b.size()) + ", expected " +
                           std::to_string(dim_));
    }
    if (s.y != 1 && s.y != -1) {
      throw DomainError("Dataset '" + name_ + "': sample " + std::to_string(i) +
                        " has label " + std::to_string(s.y));
    }
  }
}

RealVector Dataset::signed_feature(std::size_t i) const {
  const Sample& s = samples_.at(i);
  return static_cast<double>(s.y) * s.b;
}

std::vector<RealVector> Dataset::signed_features() const {
  std::vector<RealVector> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(signed_feature(i));
  return out;
}

double Dataset::max_feature_norm() const {
  double r = 0.0;
  for (const Sample& s : samples_) r = std::max(r, norm(s.b));
  return r;
}

Dataset make_two_sample(std::size_t d, double mu) {
  if (d < 3) throw DomainError("make_two_sample: d must be >= 3");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("make_two_sample: mu must be > 0");
  RealVector b1 = RealVector::ones(d);
  RealVector b2 = RealVector::ones(d);
  b2[0] = 1.0 + mu;
  return Dataset("two-sample(d=" + std::to_string(d) + ",mu=" + std::to_string(mu) + ")",
                 {Sample{std::move(b1), 1}, Sample{std::move(b2), -1}});
}

SeparableDataset make_separable(std::size_t d, std::size_t n, double margin, std::uint64_t seed) {
  if (d == 0 || n == 0) throw DimensionError("make_separable: d and n must be positive");
  if (!(margin > 0.0)) throw DomainError("make_separable: margin must be > 0");
  Rng rng(seed);
  RealVector direction = rng.unit_sphere(d);
  std::vector<Sample> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = rng.uniform() < 0.5 ? -1 : 1;
    RealVector b = rng.normal_vector(d);
    const double along = y * dot(b, direction);
    const double target = margin * (1.0 + rng.uniform());
    if (along < target) axpy(y * (target - along), direction, b);
    samples.push_back(Sample{std::move(b), y});
  }
  return {Dataset("separable(d=" + std::to_string(d) + ",n=" + std::to_string(n) + ")",
                  std::move(samples)),
          std::move(direction)};
}

}  // namespace pdx
