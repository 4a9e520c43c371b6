#include "fstwfr/twfr.hpp"

#include <algorithm>
#include <functional>
#include <string>

#include "fstwfr/error.hpp"

namespace fstwfr {
namespace {

// Grid points such as 0 + 110 * 0.01 land a few ulps past 1.10.
constexpr double kRangeSlack = 1e-9;

}  // namespace

PoolingExponent::PoolingExponent(double r) : r_(r) {
  Require(r >= kMin - kRangeSlack && r <= kMax + kRangeSlack,
          "pooling exponent r = " + std::to_string(r) + " outside [0, 1.10]");
  r_ = std::clamp(r, kMin, kMax);
}

Spectrogram Ranking(const Spectrogram& spec) {
  Spectrogram out = spec;
  for (std::size_t m = 0; m < out.mel_bins(); ++m) {
    auto row = out.values.row(m);
    std::stable_sort(row.begin(), row.end(), std::greater<>());
  }
  return out;
}

std::vector<double> Weights(PoolingExponent r, std::size_t n_frames) {
  Require(n_frames >= 1, "weights need at least one frame");
  const double base = r.value();
  std::vector<double> w(n_frames, 0.0);
  if (base == 0.0) {
    w[0] = 1.0;
    return w;
  }
  // For r > 1 the powers run backwards from the last frame in steps of 1/r.
  if (base > 1.0) {
    const double inv = 1.0 / base;
    double p = 1.0;
    for (std::size_t i = n_frames; i-- > 0;) {
      w[i] = p;
      p *= inv;
    }
  } else {
    double p = 1.0;
    for (std::size_t i = 0; i < n_frames; ++i) {
      w[i] = p;
      p *= base;
    }
  }
  double z = 0.0;
  for (double v : w) z += v;
  for (double& v : w) v /= z;
  return w;
}

TwfrVector PoolRanked(const Spectrogram& ranked, PoolingExponent r) {
  const auto w = Weights(r, ranked.frames());
  TwfrVector out;
  out.values.resize(ranked.mel_bins());
  for (std::size_t m = 0; m < ranked.mel_bins(); ++m) {
    const auto row = ranked.values.row(m);
    double acc = 0.0;
    for (std::size_t n = 0; n < row.size(); ++n) acc += row[n] * w[n];
    out.values[m] = acc;
  }
  return out;
}

TwfrVector Twfr(const Spectrogram& spec, PoolingExponent r) {
  return PoolRanked(Ranking(spec), r);
}

}  // namespace fstwfr
