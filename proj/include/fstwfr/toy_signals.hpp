#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace fstwfr {

std::uint64_t Fnv1a64(std::string_view text);

// Base tone of a synthetic "machine", derived from its name so that the toy
// dataset and the generator stub agree without sharing state.
double MachineToneHz(std::string_view machine_type);

// Stationary tone plus white noise; anomalies add short broadband bursts.
struct ToySignalSpec {
  int sample_rate = 16000;
  double duration_s = 2.0;
  double tone_hz = 1000.0;
  double tone_amp = 0.3;
  double noise_amp = 0.05;
  double jitter = 0.1;  // relative spread of tone amplitude; a tenth of that for frequency
  bool bursts = false;
  int n_bursts = 1;
  double burst_ms = 30.0;
  double burst_amp = 0.1;
};

std::vector<double> MakeToySignal(const ToySignalSpec& spec, std::uint64_t seed);

}  // namespace fstwfr
