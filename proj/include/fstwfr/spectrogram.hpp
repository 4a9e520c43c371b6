#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <vector>

#include "fstwfr/audio_io.hpp"
#include "fstwfr/matrix.hpp"

namespace fstwfr {

struct SpectrogramConfig {
  std::size_t n_fft = 1024;
  std::size_t hop = 512;
  std::size_t n_mels = 128;
  int sample_rate = 16000;
  double fmin = 0.0;
  double fmax = 8000.0;
  double log_floor = 1e-10;

  void Validate() const;
  friend bool operator==(const SpectrogramConfig&, const SpectrogramConfig&) = default;
};

// Log-mel energies, mel bins by time frames.
struct Spectrogram {
  Matrix values;

  std::size_t mel_bins() const { return values.rows(); }
  std::size_t frames() const { return values.cols(); }
};

// Slaney mel scale: linear below 1 kHz, logarithmic above.
double HzToMel(double hz);
double MelToHz(double mel);

// Area-normalised triangular filterbank, n_mels by (n_fft / 2 + 1).
// Throws if any filter has no support on the FFT grid.
Matrix MelFilterbank(const SpectrogramConfig& cfg);

// Centre frequency of each mel filter in Hz.
std::vector<double> MelCenterFrequencies(const SpectrogramConfig& cfg);

// Number of frames produced for a clip of the given length (no padding).
std::size_t FrameCount(std::size_t n_samples, const SpectrogramConfig& cfg);

// Hann-windowed power STFT -> mel filterbank -> natural log with floor.
// Holds the filterbank and FFT plan; const calls are safe to run concurrently.
class LogMelExtractor {
 public:
  explicit LogMelExtractor(const SpectrogramConfig& cfg);
  ~LogMelExtractor();
  LogMelExtractor(const LogMelExtractor&) = delete;
  LogMelExtractor& operator=(const LogMelExtractor&) = delete;

  Spectrogram operator()(const AudioClip& clip) const;

  const SpectrogramConfig& config() const { return cfg_; }
  const Matrix& filterbank() const { return filterbank_; }

 private:
  struct Plan;
  SpectrogramConfig cfg_;
  Matrix filterbank_;
  std::vector<double> window_;
  std::unique_ptr<Plan> plan_;
};

Spectrogram LogMel(const AudioClip& clip, const SpectrogramConfig& cfg);

// Cache format: "FSTWSPEC" magic, uint64 M, uint64 N, then M*N row-major
// float64 values; everything little-endian.
void SaveSpectrogram(const std::filesystem::path& path, const Spectrogram& spec);
Spectrogram LoadSpectrogram(const std::filesystem::path& path);

}  // namespace fstwfr
