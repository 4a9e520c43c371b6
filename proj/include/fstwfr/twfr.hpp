#pragma once

#include <cstddef>
#include <vector>

#include "fstwfr/spectrogram.hpp"

namespace fstwfr {

// Rank-pooling exponent. r = 0 is max pooling, r = 1 average pooling, and
// r > 1 shifts weight toward the quieter frames.
class PoolingExponent {
 public:
  static constexpr double kMin = 0.0;
  static constexpr double kMax = 1.10;

  explicit PoolingExponent(double r);
  double value() const { return r_; }

 private:
  double r_;
};

struct TwfrVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

// Sorts every mel-bin row in descending order over time (stable).
Spectrogram Ranking(const Spectrogram& spec);

// Frame weights r^n / z(r), n = 0..n_frames-1, with 0^0 = 1.
std::vector<double> Weights(PoolingExponent r, std::size_t n_frames);

// Pooled representation of an already ranked spectrogram.
TwfrVector PoolRanked(const Spectrogram& ranked, PoolingExponent r);

TwfrVector Twfr(const Spectrogram& spec, PoolingExponent r);

}  // namespace fstwfr
