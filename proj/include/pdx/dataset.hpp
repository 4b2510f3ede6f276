#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdx/vector.hpp"

namespace pdx {

struct Sample {
  RealVector b;
  int y = 1;  // +1 or -1
};

// Labeled features {(b_i, y_i)}: uniform dimension, labels in {-1, +1},
// at least one sample.
class Dataset {
 public:
  Dataset(std::string name, std::vector<Sample> samples);

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return samples_.size(); }
  const std::vector<Sample>& samples() const noexcept { return samples_; }
  const Sample& operator[](std::size_t i) const { return samples_.at(i); }

  // a_i = y_i b_i
  RealVector signed_feature(std::size_t i) const;
  std::vector<RealVector> signed_features() const;
  double max_feature_norm() const;

 private:
  std::string name_;
  std::vector<Sample> samples_;
  std::size_t dim_ = 0;
};

// b_1 = ones(d), y_1 = +1; b_2 = [1 + mu, 1, ..., 1], y_2 = -1. Requires
// d >= 3 and mu > 0.
Dataset make_two_sample(std::size_t d, double mu);

// Random separable data: unit direction v*, Gaussian features shifted along
// v* so that y_i b_i^T v* >= margin. Labels are fair coin flips.
struct SeparableDataset {
  Dataset data;
  RealVector direction;
};
SeparableDataset make_separable(std::size_t d, std::size_t n, double margin, std::uint64_t seed);

}  // namespace pdx
