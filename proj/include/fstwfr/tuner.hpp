#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fstwfr/audio_io.hpp"
#include "fstwfr/gmm.hpp"
#include "fstwfr/metrics.hpp"
#include "fstwfr/spectrogram.hpp"

namespace fstwfr {

struct TuningConfig {
  double r_min = 0.0;
  double r_max = 1.10;
  double r_step = 0.01;
  ObjectiveMode objective = ObjectiveMode::kHarmonic;
  double p = 0.1;
  GmmFitConfig gmm;

  void Validate() const;
  std::size_t GridSize() const;
  double GridValue(std::size_t i) const;
};

struct TuningPoint {
  double r = 0.0;
  double objective = 0.0;
  double auc = 0.0;
  double pauc = 0.0;
};

struct TuningResult {
  std::string machine_type;
  double r_selected = 0.0;
  std::vector<TuningPoint> trace;  // one entry per grid value, ascending r

  const TuningPoint& Best() const;
};

// Ranked spectrograms are computed once and reused for every grid value.
struct RankedSet {
  std::vector<Spectrogram> ranked;
  std::vector<std::string> ids;
};

RankedSet RankClips(std::span<const AudioClip> clips, const LogMelExtractor& extractor,
                    const std::string& id_prefix);

// At every grid r: pool all clips, fit the GMM on the real normals, score the
// synthetic normals and anomalies and evaluate the objective. The largest
// objective wins; exact ties go to the smallest r.
TuningResult TuneR(const RankedSet& real_normals, const RankedSet& synth_normals,
                   const RankedSet& synth_anomalies, const TuningConfig& cfg,
                   const std::string& machine_type = {});

TuningResult TuneR(std::span<const AudioClip> real_normals,
                   std::span<const AudioClip> synth_normals,
                   std::span<const AudioClip> synth_anomalies, const SpectrogramConfig& spec_cfg,
                   const TuningConfig& cfg, const std::string& machine_type = {});

// One grid point, exposed for inspection and tests.
TuningPoint EvaluateR(const RankedSet& real_normals, const RankedSet& synth_normals,
                      const RankedSet& synth_anomalies, double r, const TuningConfig& cfg);

// CSV with header r,objective,auc,pauc.
void WriteTuningTrace(const std::filesystem::path& path, const TuningResult& result);

}  // namespace fstwfr
