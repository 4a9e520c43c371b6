#include "fstwfr/toy_signals.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>

#include "fstwfr/error.hpp"

namespace fstwfr {
namespace {

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::uint64_t Fnv1a64(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

double MachineToneHz(std::string_view machine_type) {
  std::string lower(machine_type);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return 400.0 + static_cast<double>(Fnv1a64(lower) % 2600);
}

std::vector<double> MakeToySignal(const ToySignalSpec& spec, std::uint64_t seed) {
  Require(spec.sample_rate > 0 && spec.duration_s > 0.0, "toy signal needs a positive length");
  std::mt19937_64 rng(seed);
  const auto n = static_cast<std::size_t>(spec.duration_s * spec.sample_rate);
  const double amp = spec.tone_amp * (1.0 + Uniform(rng, -spec.jitter, spec.jitter));
  const double freq = spec.tone_hz * (1.0 + 0.1 * Uniform(rng, -spec.jitter, spec.jitter));
  const double phase = Uniform(rng, 0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> noise(0.0, spec.noise_amp);

  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / spec.sample_rate;
    x[i] = amp * std::sin(2.0 * std::numbers::pi * freq * t + phase) + noise(rng);
  }
  if (spec.bursts) {
    const auto len = static_cast<std::size_t>(spec.burst_ms * 1e-3 * spec.sample_rate);
    std::normal_distribution<double> burst(0.0, spec.burst_amp);
    // Keep bursts off the clip edges, where the analysis window tapers.
    const double lo = 0.05 * static_cast<double>(n);
    const double hi = 0.95 * static_cast<double>(n) - static_cast<double>(len);
    for (int b = 0; b < spec.n_bursts && lo < hi; ++b) {
      const auto start = static_cast<std::size_t>(Uniform(rng, lo, hi));
      for (std::size_t i = start; i < start + len; ++i) x[i] += burst(rng);
    }
  }
  for (double& v : x) v = std::clamp(v, -1.0, 1.0);
  return x;
}

}  // namespace fstwfr
