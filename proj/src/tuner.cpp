#include "fstwfr/tuner.hpp"

#include <cmath>

#include "fstwfr/csv.hpp"
#include "fstwfr/error.hpp"
#include "fstwfr/parallel.hpp"
#include "fstwfr/twfr.hpp"

namespace fstwfr {

void TuningConfig::Validate() const {
  Require(r_step > 0.0, "tuning r_step must be positive");
  Require(r_min <= r_max, "tuning r_min must not exceed r_max");
  PoolingExponent{r_min};
  PoolingExponent{r_max};
  Require(p > 0.0 && p <= 1.0, "tuning p must be in (0, 1]");
  gmm.Validate();
}

std::size_t TuningConfig::GridSize() const {
  return static_cast<std::size_t>(std::floor((r_max - r_min) / r_step + 1e-9)) + 1;
}

double TuningConfig::GridValue(std::size_t i) const {
  // Snap to 1e-9 so values such as 0.7 print as typed.
  const double r = std::round((r_min + static_cast<double>(i) * r_step) * 1e9) / 1e9;
  return std::min(r, r_max);
}

const TuningPoint& TuningResult::Best() const {
  Require(!trace.empty(), "empty tuning trace");
  for (const auto& pt : trace) {
    if (pt.r == r_selected) return pt;
  }
  Fail(ErrorKind::kInvalidArgument, "selected r missing from trace");
}

RankedSet RankClips(std::span<const AudioClip> clips, const LogMelExtractor& extractor,
                    const std::string& id_prefix) {
  RankedSet set;
  set.ranked.resize(clips.size());
  set.ids.resize(clips.size());
  ParallelFor(clips.size(), [&](std::size_t i) {
    set.ranked[i] = Ranking(extractor(clips[i]));
    set.ids[i] = clips[i].source_path.empty() ? id_prefix + std::to_string(i)
                                              : clips[i].source_path;
  });
  return set;
}

TuningPoint EvaluateR(const RankedSet& real_normals, const RankedSet& synth_normals,
                      const RankedSet& synth_anomalies, double r, const TuningConfig& cfg) {
  const PoolingExponent exponent(r);
  std::vector<TwfrVector> train;
  train.reserve(real_normals.ranked.size());
  for (const auto& s : real_normals.ranked) train.push_back(PoolRanked(s, exponent));
  const GmmModel model = FitGmm(train, cfg.gmm).model;

  std::vector<ScoredClip> scored;
  scored.reserve(synth_normals.ranked.size() + synth_anomalies.ranked.size());
  for (std::size_t i = 0; i < synth_normals.ranked.size(); ++i) {
    scored.push_back({synth_normals.ids[i], model.Score(PoolRanked(synth_normals.ranked[i], exponent)),
                      Condition::kNormal});
  }
  for (std::size_t i = 0; i < synth_anomalies.ranked.size(); ++i) {
    scored.push_back({synth_anomalies.ids[i],
                      model.Score(PoolRanked(synth_anomalies.ranked[i], exponent)),
                      Condition::kAnomaly});
  }
  const auto report = Evaluate(scored, cfg.objective, cfg.p);
  return {exponent.value(), report.objective, report.auc, report.pauc};
}

TuningResult TuneR(const RankedSet& real_normals, const RankedSet& synth_normals,
                   const RankedSet& synth_anomalies, const TuningConfig& cfg,
                   const std::string& machine_type) {
  cfg.Validate();
  Require(!real_normals.ranked.empty(), "tuning needs real normal clips");
  Require(!synth_normals.ranked.empty(), "tuning needs synthetic normal clips");
  Require(!synth_anomalies.ranked.empty(), "tuning needs synthetic anomaly clips");

  TuningResult result;
  result.machine_type = machine_type;
  result.trace.resize(cfg.GridSize());
  ParallelFor(result.trace.size(), [&](std::size_t i) {
    result.trace[i] = EvaluateR(real_normals, synth_normals, synth_anomalies, cfg.GridValue(i), cfg);
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.trace.size(); ++i) {
    if (result.trace[i].objective > result.trace[best].objective) best = i;
  }
  result.r_selected = result.trace[best].r;
  return result;
}

TuningResult TuneR(std::span<const AudioClip> real_normals,
                   std::span<const AudioClip> synth_normals,
                   std::span<const AudioClip> synth_anomalies, const SpectrogramConfig& spec_cfg,
                   const TuningConfig& cfg, const std::string& machine_type) {
  Require(!real_normals.empty(), "tuning needs real normal clips");
  Require(!synth_normals.empty(), "tuning needs synthetic normal clips");
  Require(!synth_anomalies.empty(), "tuning needs synthetic anomaly clips");
  cfg.Validate();
  const LogMelExtractor extractor(spec_cfg);
  return TuneR(RankClips(real_normals, extractor, "real_normal_"),
               RankClips(synth_normals, extractor, "synth_normal_"),
               RankClips(synth_anomalies, extractor, "synth_anomaly_"), cfg, machine_type);
}

void WriteTuningTrace(const std::filesystem::path& path, const TuningResult& result) {
  CsvWriter out(path, {"r", "objective", "auc", "pauc"});
  for (const auto& pt : result.trace) {
    out.Row({FormatDouble(pt.r), FormatDouble(pt.objective), FormatDouble(pt.auc),
             FormatDouble(pt.pauc)});
  }
}

}  // namespace fstwfr
