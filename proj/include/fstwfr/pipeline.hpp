#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fstwfr/audio_io.hpp"
#include "fstwfr/gmm.hpp"
#include "fstwfr/metrics.hpp"
#include "fstwfr/spectrogram.hpp"
#include "fstwfr/synth_interface.hpp"
#include "fstwfr/tuner.hpp"
#include "json.hpp"

namespace fstwfr {

// Everything a run needs, loadable from one JSON document. Missing keys keep
// their defaults; unknown keys are rejected.
struct RunConfig {
  SpectrogramConfig spectrogram;
  SilenceRemovalConfig silence;
  TuningConfig tuning;  // tuning.gmm is overwritten by `gmm` below
  GmmFitConfig gmm;     // gmm.seed is overwritten by `seed`
  std::string templates_path;  // empty: built-in templates
  std::uint64_t seed = 0;
  std::size_t per_caption_count = 10;
  double missing_tolerance = 0.0;

  void Validate() const;
  GmmFitConfig EffectiveGmm() const;
  TuningConfig EffectiveTuning() const;
  TemplateSet Templates() const;
};

nlohmann::json ToJson(const RunConfig& cfg);
RunConfig RunConfigFromJson(const nlohmann::json& j);
RunConfig LoadRunConfig(const std::filesystem::path& path);

nlohmann::json ToJson(const SpectrogramConfig& cfg);
nlohmann::json ToJson(const SilenceRemovalConfig& cfg);

// Hash of the audio front-end (spectrogram and silence settings). A model
// refuses to score under a different front-end.
std::string FrontEndFingerprint(const SpectrogramConfig& spec, const SilenceRemovalConfig& silence);

// <root>/<machine>/{train,test}/*.wav
class DatasetLayout {
 public:
  explicit DatasetLayout(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::vector<std::string> MachineTypes() const;
  std::filesystem::path MachineDir(const std::string& machine) const;
  // Sorted by file name.
  std::vector<std::filesystem::path> Clips(const std::string& machine,
                                           const std::string& split) const;

 private:
  std::filesystem::path root_;
};

// WAV files directly inside `dir`, sorted by file name.
std::vector<std::filesystem::path> ListWavs(const std::filesystem::path& dir);

struct ModelBundle {
  std::string machine_type;
  double r = 1.0;
  std::string fingerprint;
  SpectrogramConfig spectrogram;
  SilenceRemovalConfig silence;
  GmmModel gmm;
  std::size_t n_train = 0;
};

nlohmann::json ToJson(const ModelBundle& bundle);
ModelBundle ModelBundleFromJson(const nlohmann::json& j);
void SaveModel(const std::filesystem::path& path, const ModelBundle& bundle);
ModelBundle LoadModel(const std::filesystem::path& path);

// Front-end applied to every real clip before pooling.
TwfrVector ExtractTwfr(const AudioClip& clip, const LogMelExtractor& extractor,
                       const SilenceRemovalConfig& silence, double r);

CaptionManifest CmdCaptions(const std::filesystem::path& dataset, const std::string& machine,
                            const std::filesystem::path& out, const RunConfig& cfg,
                            std::ostream* log = nullptr);

std::size_t CmdGenerateStub(const std::filesystem::path& manifest_path,
                            const std::filesystem::path& out_dir, const RunConfig& cfg,
                            double duration_s = 2.0, std::ostream* log = nullptr);

// Writes <model_dir>/<machine>/tuning_trace.csv and tuning.json.
TuningResult CmdTune(const std::filesystem::path& dataset, const std::string& machine,
                     const std::filesystem::path& synth_dir,
                     const std::filesystem::path& manifest_path,
                     const std::filesystem::path& model_dir, const RunConfig& cfg,
                     std::ostream* log = nullptr);

// Fits on the real normal training clips and writes <model_dir>/<machine>/model.json.
// Without an explicit r the value from tuning.json is used.
std::filesystem::path CmdFit(const std::filesystem::path& dataset, const std::string& machine,
                             std::optional<double> r, const std::filesystem::path& model_dir,
                             const RunConfig& cfg, std::ostream* log = nullptr);

struct ClipScore {
  std::string clip_id;
  double score = 0.0;
};

// Writes clip_id,score rows sorted by clip id. When `cfg` is given its
// front-end must match the model's fingerprint.
std::vector<ClipScore> CmdScore(const std::filesystem::path& model_path,
                                const std::filesystem::path& wav_dir,
                                const std::filesystem::path& out_csv,
                                const std::optional<RunConfig>& cfg = std::nullopt,
                                std::ostream* log = nullptr);

struct EvalInput {
  std::string machine;
  std::filesystem::path scores;  // clip_id,score
  std::filesystem::path labels;  // clip_id,label
};

struct EvalSummary {
  std::vector<std::pair<std::string, EvalReport>> per_machine;
  EvalReport aggregate;  // harmonic means across machines
};

// Report CSV: machine,auc,pauc,p,n_pos,n_neg,objective plus an "aggregate" row.
// With a roc_dir, raw ROC points are written to roc_<machine>.csv.
EvalSummary CmdEval(const std::vector<EvalInput>& inputs, double p, ObjectiveMode mode,
                    const std::filesystem::path& out_report,
                    const std::optional<std::filesystem::path>& roc_dir = std::nullopt,
                    std::ostream* log = nullptr);

struct ToyDatasetOptions {
  std::vector<std::string> machines = {"ToyDrone", "ToyNscale", "ToyTank", "Vacuum",
                                       "bandsaw",  "grinder",   "shaker"};
  std::size_t n_train = 50;
  std::size_t n_test_normal = 20;
  std::size_t n_test_anomaly = 20;
  double duration_s = 2.0;
  int sample_rate = 16000;
  std::uint64_t seed = 0;
};

// Stationary tone + noise normals and tone + burst anomalies in the DCASE
// layout, plus <machine>/test_labels.csv.
void MakeToyDataset(const std::filesystem::path& root, const ToyDatasetOptions& options);

}  // namespace fstwfr
