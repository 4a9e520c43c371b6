#include "fstwfr/spectrogram.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>

#include "fstwfr/error.hpp"

namespace fstwfr {
namespace {

constexpr double kLinearHzPerMel = 200.0 / 3.0;
constexpr double kLogRegionHz = 1000.0;
constexpr double kLogRegionMel = kLogRegionHz / kLinearHzPerMel;
const double kLogStep = std::log(6.4) / 27.0;

constexpr char kSpecMagic[8] = {'F', 'S', 'T', 'W', 'S', 'P', 'E', 'C'};

// The FFTW planner is not thread-safe.
std::mutex& PlannerMutex() {
  static std::mutex m;
  return m;
}

void PutU64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(buf, 8);
}

std::uint64_t GetU64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

void SpectrogramConfig::Validate() const {
  Require(hop >= 1, "spectrogram hop must be >= 1");
  Require(n_fft >= hop, "spectrogram n_fft must be >= hop");
  Require(n_mels >= 1, "spectrogram n_mels must be >= 1");
  Require(sample_rate > 0, "spectrogram sample_rate must be positive");
  Require(fmin >= 0.0 && fmin < fmax, "spectrogram requires 0 <= fmin < fmax");
  Require(fmax <= sample_rate / 2.0, "spectrogram fmax must not exceed sample_rate / 2");
  Require(log_floor > 0.0, "spectrogram log_floor must be positive");
}

double HzToMel(double hz) {
  if (hz < kLogRegionHz) return hz / kLinearHzPerMel;
  return kLogRegionMel + std::log(hz / kLogRegionHz) / kLogStep;
}

double MelToHz(double mel) {
  if (mel < kLogRegionMel) return mel * kLinearHzPerMel;
  return kLogRegionHz * std::exp(kLogStep * (mel - kLogRegionMel));
}

namespace {

std::vector<double> MelEdges(const SpectrogramConfig& cfg) {
  const double lo = HzToMel(cfg.fmin);
  const double hi = HzToMel(cfg.fmax);
  const std::size_t n = cfg.n_mels + 2;
  std::vector<double> hz(n);
  for (std::size_t i = 0; i < n; ++i) {
    hz[i] = MelToHz(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return hz;
}

}  // namespace

std::vector<double> MelCenterFrequencies(const SpectrogramConfig& cfg) {
  cfg.Validate();
  const auto edges = MelEdges(cfg);
  return {edges.begin() + 1, edges.end() - 1};
}

Matrix MelFilterbank(const SpectrogramConfig& cfg) {
  cfg.Validate();
  const std::size_t n_bins = cfg.n_fft / 2 + 1;
  const auto edges = MelEdges(cfg);
  Matrix fb(cfg.n_mels, n_bins);
  for (std::size_t m = 0; m < cfg.n_mels; ++m) {
    const double left = edges[m];
    const double center = edges[m + 1];
    const double right = edges[m + 2];
    const double norm = 2.0 / (right - left);
    bool any = false;
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * cfg.sample_rate / static_cast<double>(cfg.n_fft);
      const double rise = (f - left) / (center - left);
      const double fall = (right - f) / (right - center);
      const double w = std::max(0.0, std::min(rise, fall));
      fb(m, k) = w * norm;
      any = any || w > 0.0;
    }
    if (!any) {
      Fail(ErrorKind::kInvalidArgument,
           "mel filter " + std::to_string(m) +
               " has no support on the FFT grid; reduce n_mels or increase n_fft");
    }
  }
  return fb;
}

std::size_t FrameCount(std::size_t n_samples, const SpectrogramConfig& cfg) {
  if (n_samples < cfg.n_fft) return 0;
  return 1 + (n_samples - cfg.n_fft) / cfg.hop;
}

struct LogMelExtractor::Plan {
  fftw_plan plan = nullptr;
  double* in = nullptr;
  fftw_complex* out = nullptr;
};

LogMelExtractor::LogMelExtractor(const SpectrogramConfig& cfg)
    : cfg_(cfg), filterbank_(MelFilterbank(cfg)), plan_(std::make_unique<Plan>()) {
  window_.resize(cfg_.n_fft);
  for (std::size_t i = 0; i < cfg_.n_fft; ++i) {
    window_[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                      static_cast<double>(cfg_.n_fft));
  }
  std::lock_guard lock(PlannerMutex());
  plan_->in = fftw_alloc_real(cfg_.n_fft);
  plan_->out = fftw_alloc_complex(cfg_.n_fft / 2 + 1);
  plan_->plan = fftw_plan_dft_r2c_1d(static_cast<int>(cfg_.n_fft), plan_->in, plan_->out,
                                     FFTW_ESTIMATE);
}

LogMelExtractor::~LogMelExtractor() {
  std::lock_guard lock(PlannerMutex());
  fftw_destroy_plan(plan_->plan);
  fftw_free(plan_->in);
  fftw_free(plan_->out);
}

Spectrogram LogMelExtractor::operator()(const AudioClip& clip) const {
  if (clip.sample_rate != cfg_.sample_rate) {
    Fail(ErrorKind::kMismatch, clip.source_path + ": sample rate " +
                                   std::to_string(clip.sample_rate) + " does not match " +
                                   std::to_string(cfg_.sample_rate));
  }
  const std::size_t n_frames = FrameCount(clip.samples.size(), cfg_);
  if (n_frames == 0) {
    Fail(ErrorKind::kInvalidArgument,
         clip.source_path + ": clip has " + std::to_string(clip.samples.size()) +
             " samples, fewer than one frame of " + std::to_string(cfg_.n_fft));
  }
  const std::size_t n_bins = cfg_.n_fft / 2 + 1;

  // fftw_execute_dft_r2c on caller-owned buffers is thread-safe; the plan's
  // own buffers are never touched here.
  double* in = fftw_alloc_real(cfg_.n_fft);
  fftw_complex* out = fftw_alloc_complex(n_bins);
  std::vector<double> power(n_bins);

  Spectrogram spec{Matrix(cfg_.n_mels, n_frames)};
  const double log_of_floor = std::log(cfg_.log_floor);
  for (std::size_t t = 0; t < n_frames; ++t) {
    const double* frame = clip.samples.data() + t * cfg_.hop;
    for (std::size_t i = 0; i < cfg_.n_fft; ++i) in[i] = frame[i] * window_[i];
    fftw_execute_dft_r2c(plan_->plan, in, out);
    for (std::size_t k = 0; k < n_bins; ++k) power[k] = out[k][0] * out[k][0] + out[k][1] * out[k][1];
    for (std::size_t m = 0; m < cfg_.n_mels; ++m) {
      const auto weights = filterbank_.row(m);
      double e = 0.0;
      for (std::size_t k = 0; k < n_bins; ++k) e += weights[k] * power[k];
      spec.values(m, t) = e > cfg_.log_floor ? std::log(e) : log_of_floor;
    }
  }
  fftw_free(in);
  fftw_free(out);
  return spec;
}

Spectrogram LogMel(const AudioClip& clip, const SpectrogramConfig& cfg) {
  return LogMelExtractor(cfg)(clip);
}

void SaveSpectrogram(const std::filesystem::path& path, const Spectrogram& spec) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, path.string() + ": cannot open for writing");
  out.write(kSpecMagic, sizeof kSpecMagic);
  PutU64(out, spec.mel_bins());
  PutU64(out, spec.frames());
  for (double v : spec.values.data()) PutU64(out, std::bit_cast<std::uint64_t>(v));
  if (!out) Fail(ErrorKind::kIo, path.string() + ": write error");
}

Spectrogram LoadSpectrogram(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, path.string() + ": cannot open file");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kSpecMagic, 8) != 0) {
    Fail(ErrorKind::kFormat, path.string() + ": not a spectrogram cache file");
  }
  const std::uint64_t rows = GetU64(in);
  const std::uint64_t cols = GetU64(in);
  if (!in || rows == 0 || cols == 0 || rows > (1u << 20) || cols > (1u << 28)) {
    Fail(ErrorKind::kFormat, path.string() + ": bad spectrogram header");
  }
  Spectrogram spec{Matrix(rows, cols)};
  for (double& v : spec.values.data()) v = std::bit_cast<double>(GetU64(in));
  if (!in) Fail(ErrorKind::kFormat, path.string() + ": truncated spectrogram data");
  return spec;
}

}  // namespace fstwfr
