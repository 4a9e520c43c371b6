#include "fstwfr/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fstwfr/csv.hpp"
#include "fstwfr/error.hpp"
#include "fstwfr/parallel.hpp"
#include "fstwfr/toy_signals.hpp"
#include "fstwfr/twfr.hpp"

namespace fstwfr {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kModelFormat = "fstwfr-model";
constexpr int kModelVersion = 1;

void CheckKeys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) Fail(ErrorKind::kFormat, where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    if (!known) Fail(ErrorKind::kFormat, where + ": unknown key \"" + key + "\"");
  }
}

SpectrogramConfig SpectrogramFromJson(const json& j) {
  CheckKeys(j, {"n_fft", "hop", "n_mels", "sample_rate", "fmin", "fmax", "log_floor"},
            "spectrogram");
  SpectrogramConfig c;
  c.n_fft = j.value("n_fft", c.n_fft);
  c.hop = j.value("hop", c.hop);
  c.n_mels = j.value("n_mels", c.n_mels);
  c.sample_rate = j.value("sample_rate", c.sample_rate);
  c.fmin = j.value("fmin", c.fmin);
  c.fmax = j.value("fmax", c.fmax);
  c.log_floor = j.value("log_floor", c.log_floor);
  return c;
}

SilenceRemovalConfig SilenceFromJson(const json& j) {
  CheckKeys(j, {"enabled", "threshold_db", "frame_len", "hop_len", "apply_to_real"}, "silence");
  SilenceRemovalConfig c;
  c.enabled = j.value("enabled", c.enabled);
  c.threshold_db = j.value("threshold_db", c.threshold_db);
  c.frame_len = j.value("frame_len", c.frame_len);
  c.hop_len = j.value("hop_len", c.hop_len);
  c.apply_to_real = j.value("apply_to_real", c.apply_to_real);
  return c;
}

void Log(std::ostream* log, const std::string& line) {
  if (log) *log << line << '\n';
}

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string ClipId(const fs::path& p) { return p.stem().string(); }

// Parses every clip of a split; unparseable names are reported together.
std::vector<ClipMetadata> ParseSplit(const std::vector<fs::path>& clips,
                                     const std::string& machine) {
  std::vector<ClipMetadata> out;
  std::vector<std::string> errors;
  for (const auto& p : clips) {
    try {
      out.push_back(ParseLabel(p.filename().string(), machine));
    } catch (const Error& e) {
      errors.push_back(e.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = std::to_string(errors.size()) + " unparseable file name(s): ";
    for (std::size_t i = 0; i < errors.size() && i < 20; ++i) msg += (i ? "; " : "") + errors[i];
    if (errors.size() > 20) msg += "; ...";
    Fail(ErrorKind::kParse, msg);
  }
  return out;
}

std::vector<AudioClip> LoadRealNormals(const DatasetLayout& layout, const std::string& machine,
                                       const SilenceRemovalConfig& silence, std::ostream* log) {
  const auto clips = layout.Clips(machine, "train");
  if (clips.empty()) {
    Fail(ErrorKind::kNotFound, layout.MachineDir(machine).string() + "/train has no WAV files");
  }
  const auto meta = ParseSplit(clips, machine);
  std::vector<fs::path> normals;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    if (meta[i].condition == Condition::kNormal) normals.push_back(clips[i]);
  }
  if (normals.size() != clips.size()) {
    Log(log, "skipping " + std::to_string(clips.size() - normals.size()) +
                 " non-normal training clip(s)");
  }
  std::vector<AudioClip> out(normals.size());
  ParallelFor(normals.size(), [&](std::size_t i) {
    out[i] = DecodeWav(normals[i]);
    if (silence.enabled && silence.apply_to_real) out[i] = RemoveSilence(out[i], silence);
  });
  return out;
}

void WriteJson(const fs::path& path, const json& j) {
  CreateParentDirs(path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, path.string() + ": cannot open for writing");
  out << j.dump(2) << '\n';
  if (!out) Fail(ErrorKind::kIo, path.string() + ": write error");
}

json ReadJson(const fs::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, path.string() + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    Fail(ErrorKind::kFormat, path.string() + ": " + e.what());
  }
}

std::map<std::string, Condition> ReadLabels(const fs::path& path) {
  const auto table = ReadCsv(path);
  const auto id_col = table.Column("clip_id");
  const auto label_col = table.Column("label");
  std::map<std::string, Condition> labels;
  for (const auto& row : table.rows) {
    try {
      labels[row[id_col]] = ParseCondition(row[label_col]);
    } catch (const Error& e) {
      Fail(ErrorKind::kParse, path.string() + ": " + e.what());
    }
  }
  return labels;
}

}  // namespace

nlohmann::json ToJson(const SpectrogramConfig& c) {
  return {{"n_fft", c.n_fft},   {"hop", c.hop},   {"n_mels", c.n_mels},
          {"sample_rate", c.sample_rate}, {"fmin", c.fmin}, {"fmax", c.fmax},
          {"log_floor", c.log_floor}};
}

nlohmann::json ToJson(const SilenceRemovalConfig& c) {
  return {{"enabled", c.enabled},   {"threshold_db", c.threshold_db},
          {"frame_len", c.frame_len}, {"hop_len", c.hop_len},
          {"apply_to_real", c.apply_to_real}};
}

void RunConfig::Validate() const {
  spectrogram.Validate();
  silence.Validate();
  EffectiveTuning().Validate();
  Require(per_caption_count >= 1, "per_caption_count must be >= 1");
  Require(missing_tolerance >= 0.0 && missing_tolerance <= 1.0,
          "missing_tolerance must be in [0, 1]");
}

GmmFitConfig RunConfig::EffectiveGmm() const {
  GmmFitConfig g = gmm;
  g.seed = seed;
  return g;
}

TuningConfig RunConfig::EffectiveTuning() const {
  TuningConfig t = tuning;
  t.gmm = EffectiveGmm();
  return t;
}

TemplateSet RunConfig::Templates() const {
  return templates_path.empty() ? TemplateSet::Defaults() : TemplateSet::Load(templates_path);
}

nlohmann::json ToJson(const RunConfig& c) {
  json gmm = ToJson(c.gmm);
  gmm.erase("seed");
  return {{"seed", c.seed},
          {"templates_path", c.templates_path},
          {"spectrogram", ToJson(c.spectrogram)},
          {"silence", ToJson(c.silence)},
          {"tuning",
           {{"r_min", c.tuning.r_min},
            {"r_max", c.tuning.r_max},
            {"r_step", c.tuning.r_step},
            {"objective", std::string(ToString(c.tuning.objective))},
            {"p", c.tuning.p}}},
          {"gmm", gmm},
          {"synthesis",
           {{"per_caption_count", c.per_caption_count},
            {"missing_tolerance", c.missing_tolerance}}}};
}

RunConfig RunConfigFromJson(const nlohmann::json& j) {
  try {
    CheckKeys(j, {"seed", "templates_path", "spectrogram", "silence", "tuning", "gmm", "synthesis"},
              "config");
    RunConfig c;
    c.seed = j.value("seed", c.seed);
    c.templates_path = j.value("templates_path", c.templates_path);
    if (j.contains("spectrogram")) c.spectrogram = SpectrogramFromJson(j["spectrogram"]);
    if (j.contains("silence")) c.silence = SilenceFromJson(j["silence"]);
    if (j.contains("tuning")) {
      const auto& t = j["tuning"];
      CheckKeys(t, {"r_min", "r_max", "r_step", "objective", "p"}, "tuning");
      c.tuning.r_min = t.value("r_min", c.tuning.r_min);
      c.tuning.r_max = t.value("r_max", c.tuning.r_max);
      c.tuning.r_step = t.value("r_step", c.tuning.r_step);
      c.tuning.p = t.value("p", c.tuning.p);
      if (t.contains("objective")) c.tuning.objective = ParseObjectiveMode(t["objective"].get<std::string>());
    }
    if (j.contains("gmm")) {
      CheckKeys(j["gmm"], {"n_components", "max_iters", "tol", "variance_floor"}, "gmm");
      c.gmm = GmmFitConfigFromJson(j["gmm"]);
    }
    if (j.contains("synthesis")) {
      const auto& s = j["synthesis"];
      CheckKeys(s, {"per_caption_count", "missing_tolerance"}, "synthesis");
      c.per_caption_count = s.value("per_caption_count", c.per_caption_count);
      c.missing_tolerance = s.value("missing_tolerance", c.missing_tolerance);
    }
    c.Validate();
    return c;
  } catch (const json::exception& e) {
    Fail(ErrorKind::kFormat, std::string("config: ") + e.what());
  }
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  try {
    return RunConfigFromJson(ReadJson(path));
  } catch (const Error& e) {
    Fail(e.kind(), path.string() + ": " + e.what());
  }
}

std::string FrontEndFingerprint(const SpectrogramConfig& spec, const SilenceRemovalConfig& silence) {
  const json j = {{"spectrogram", ToJson(spec)}, {"silence", ToJson(silence)}};
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(Fnv1a64(j.dump())));
  return buf;
}

DatasetLayout::DatasetLayout(std::filesystem::path root) : root_(std::move(root)) {
  if (!fs::is_directory(root_)) {
    Fail(ErrorKind::kNotFound, root_.string() + ": dataset root does not exist");
  }
}

std::vector<std::string> DatasetLayout::MachineTypes() const {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(root_)) {
    if (e.is_directory()) out.push_back(e.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::filesystem::path DatasetLayout::MachineDir(const std::string& machine) const {
  const fs::path dir = root_ / machine;
  if (!fs::is_directory(dir)) {
    std::string known;
    for (const auto& m : MachineTypes()) known += (known.empty() ? "" : ", ") + m;
    Fail(ErrorKind::kNotFound, "unknown machine type \"" + machine + "\" in " + root_.string() +
                                   " (available: " + known + ")");
  }
  return dir;
}

std::vector<std::filesystem::path> DatasetLayout::Clips(const std::string& machine,
                                                        const std::string& split) const {
  const fs::path dir = MachineDir(machine) / split;
  if (!fs::is_directory(dir)) return {};
  return ListWavs(dir);
}

std::vector<std::filesystem::path> ListWavs(const std::filesystem::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && Lower(e.path().extension().string()) == ".wav") {
      out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return out;
}

nlohmann::json ToJson(const ModelBundle& b) {
  return {{"format", kModelFormat},
          {"version", kModelVersion},
          {"machine_type", b.machine_type},
          {"r", b.r},
          {"fingerprint", b.fingerprint},
          {"spectrogram", ToJson(b.spectrogram)},
          {"silence", ToJson(b.silence)},
          {"n_train", b.n_train},
          {"parameter_count", b.gmm.ParameterCount()},
          {"gmm", ToJson(b.gmm)}};
}

ModelBundle ModelBundleFromJson(const nlohmann::json& j) {
  try {
    if (j.value("format", std::string()) != kModelFormat) {
      Fail(ErrorKind::kFormat, "not an fstwfr model document");
    }
    if (j.value("version", 0) != kModelVersion) {
      Fail(ErrorKind::kFormat, "unsupported model version");
    }
    ModelBundle b;
    b.machine_type = j.at("machine_type").get<std::string>();
    b.r = PoolingExponent(j.at("r").get<double>()).value();
    b.fingerprint = j.at("fingerprint").get<std::string>();
    b.spectrogram = SpectrogramFromJson(j.at("spectrogram"));
    b.silence = SilenceFromJson(j.at("silence"));
    b.n_train = j.value("n_train", std::size_t{0});
    b.gmm = GmmModelFromJson(j.at("gmm"));
    if (FrontEndFingerprint(b.spectrogram, b.silence) != b.fingerprint) {
      Fail(ErrorKind::kFormat, "model fingerprint does not match its stored front-end");
    }
    return b;
  } catch (const json::exception& e) {
    Fail(ErrorKind::kFormat, std::string("malformed model: ") + e.what());
  }
}

void SaveModel(const std::filesystem::path& path, const ModelBundle& bundle) {
  WriteJson(path, ToJson(bundle));
}

ModelBundle LoadModel(const std::filesystem::path& path) {
  try {
    return ModelBundleFromJson(ReadJson(path));
  } catch (const Error& e) {
    Fail(e.kind(), path.string() + ": " + e.what());
  }
}

TwfrVector ExtractTwfr(const AudioClip& clip, const LogMelExtractor& extractor,
                       const SilenceRemovalConfig& silence, double r) {
  if (silence.enabled && silence.apply_to_real) {
    return Twfr(extractor(RemoveSilence(clip, silence)), PoolingExponent(r));
  }
  return Twfr(extractor(clip), PoolingExponent(r));
}

CaptionManifest CmdCaptions(const std::filesystem::path& dataset, const std::string& machine,
                            const std::filesystem::path& out, const RunConfig& cfg,
                            std::ostream* log) {
  cfg.Validate();
  const DatasetLayout layout(dataset);
  const auto clips = layout.Clips(machine, "train");
  if (clips.empty()) {
    Fail(ErrorKind::kNotFound, layout.MachineDir(machine).string() + "/train has no WAV files");
  }
  const auto meta = ParseSplit(clips, machine);
  const auto manifest = BuildManifest(meta, cfg.Templates(), cfg.per_caption_count);
  WriteManifest(out, manifest);
  Log(log, machine + ": " + std::to_string(clips.size()) + " training clips, " +
               std::to_string(manifest.entries.size() / 2) + " distinct captions, " +
               std::to_string(manifest.entries.size()) + " manifest entries -> " + out.string());
  return manifest;
}

std::size_t CmdGenerateStub(const std::filesystem::path& manifest_path,
                            const std::filesystem::path& out_dir, const RunConfig& cfg,
                            double duration_s, std::ostream* log) {
  const auto manifest = ReadManifest(manifest_path);
  StubOptions opts;
  opts.seed = cfg.seed;
  opts.duration_s = duration_s;
  opts.sample_rate = cfg.spectrogram.sample_rate;
  const std::size_t n = GenerateStub(manifest, out_dir, opts);
  Log(log, "generate-stub: wrote " + std::to_string(n) + " clips to " + out_dir.string());
  return n;
}

TuningResult CmdTune(const std::filesystem::path& dataset, const std::string& machine,
                     const std::filesystem::path& synth_dir,
                     const std::filesystem::path& manifest_path,
                     const std::filesystem::path& model_dir, const RunConfig& cfg,
                     std::ostream* log) {
  cfg.Validate();
  if (!fs::is_directory(synth_dir)) {
    Fail(ErrorKind::kNotFound,
         synth_dir.string() +
             ": synthetic audio directory not found; export captions with `captions`, "
             "generate audio for them externally (or with `generate-stub`), then rerun `tune`");
  }
  const DatasetLayout layout(dataset);
  const auto real = LoadRealNormals(layout, machine, cfg.silence, log);
  const auto manifest = ReadManifest(manifest_path);
  IngestOptions ingest;
  ingest.silence = cfg.silence;
  ingest.missing_tolerance = cfg.missing_tolerance;
  const auto corpus = IngestSynthetic(synth_dir, manifest, ingest, manifest_path.string());
  for (const auto& w : corpus.warnings) Log(log, "warning: " + w);
  if (corpus.normals.empty() || corpus.anomalies.empty()) {
    Fail(ErrorKind::kInvalidArgument, "synthetic corpus needs both normal and anomaly clips");
  }

  const LogMelExtractor extractor(cfg.spectrogram);
  auto result = TuneR(RankClips(real, extractor, "real_"),
                      RankClips(corpus.normals, extractor, "synth_normal_"),
                      RankClips(corpus.anomalies, extractor, "synth_anomaly_"),
                      cfg.EffectiveTuning(), machine);

  const fs::path dir = model_dir / machine;
  fs::create_directories(dir);
  WriteTuningTrace(dir / "tuning_trace.csv", result);
  const auto& best = result.Best();
  WriteJson(dir / "tuning.json",
            {{"machine_type", machine},
             {"r_selected", result.r_selected},
             {"objective", best.objective},
             {"auc", best.auc},
             {"pauc", best.pauc},
             {"objective_mode", std::string(ToString(cfg.tuning.objective))},
             {"grid_points", result.trace.size()},
             {"n_real_normals", real.size()},
             {"n_synth_normals", corpus.normals.size()},
             {"n_synth_anomalies", corpus.anomalies.size()},
             {"fingerprint", FrontEndFingerprint(cfg.spectrogram, cfg.silence)}});
  Log(log, machine + ": selected r = " + FormatDouble(result.r_selected) +
               " (objective " + FormatDouble(best.objective) + ")");
  return result;
}

std::filesystem::path CmdFit(const std::filesystem::path& dataset, const std::string& machine,
                             std::optional<double> r, const std::filesystem::path& model_dir,
                             const RunConfig& cfg, std::ostream* log) {
  cfg.Validate();
  const fs::path dir = model_dir / machine;
  if (!r) {
    const fs::path tuning = dir / "tuning.json";
    if (!fs::exists(tuning)) {
      Fail(ErrorKind::kNotFound, tuning.string() + " not found; pass --r or run `tune` first");
    }
    r = ReadJson(tuning).at("r_selected").get<double>();
  }
  const PoolingExponent exponent(*r);

  const DatasetLayout layout(dataset);
  const auto real = LoadRealNormals(layout, machine, SilenceRemovalConfig{.enabled = false}, log);
  const LogMelExtractor extractor(cfg.spectrogram);
  std::vector<TwfrVector> train(real.size());
  ParallelFor(real.size(), [&](std::size_t i) {
    train[i] = ExtractTwfr(real[i], extractor, cfg.silence, exponent.value());
  });

  auto fit = FitGmm(train, cfg.EffectiveGmm());
  for (const auto& w : fit.warnings) Log(log, "warning: " + w);

  ModelBundle bundle;
  bundle.machine_type = machine;
  bundle.r = exponent.value();
  bundle.spectrogram = cfg.spectrogram;
  bundle.silence = cfg.silence;
  bundle.fingerprint = FrontEndFingerprint(cfg.spectrogram, cfg.silence);
  bundle.gmm = std::move(fit.model);
  bundle.n_train = train.size();

  fs::create_directories(dir);
  const fs::path path = dir / "model.json";
  SaveModel(path, bundle);
  Log(log, machine + ": fitted GMM (K=" + std::to_string(bundle.gmm.n_components()) +
               ", r=" + FormatDouble(bundle.r) + ", " +
               std::to_string(bundle.gmm.ParameterCount()) + " parameters) -> " + path.string());
  return path;
}

std::vector<ClipScore> CmdScore(const std::filesystem::path& model_path,
                                const std::filesystem::path& wav_dir,
                                const std::filesystem::path& out_csv,
                                const std::optional<RunConfig>& cfg, std::ostream* log) {
  const ModelBundle model = LoadModel(model_path);
  if (cfg) {
    const auto fp = FrontEndFingerprint(cfg->spectrogram, cfg->silence);
    if (fp != model.fingerprint) {
      Fail(ErrorKind::kMismatch, "front-end config fingerprint " + fp +
                                     " does not match the model's " + model.fingerprint +
                                     "; refusing to score");
    }
  }
  if (!fs::is_directory(wav_dir)) {
    Fail(ErrorKind::kNotFound, wav_dir.string() + ": directory does not exist");
  }
  const auto files = ListWavs(wav_dir);
  std::set<std::string> ids;
  for (const auto& f : files) {
    if (!ids.insert(ClipId(f)).second) {
      Fail(ErrorKind::kInvalidArgument, wav_dir.string() + ": duplicate clip id \"" + ClipId(f) + "\"");
    }
  }

  const LogMelExtractor extractor(model.spectrogram);
  std::vector<ClipScore> scores(files.size());
  ParallelFor(files.size(), [&](std::size_t i) {
    const auto clip = DecodeWav(files[i]);
    scores[i] = {ClipId(files[i]),
                 model.gmm.Score(ExtractTwfr(clip, extractor, model.silence, model.r))};
  });
  std::sort(scores.begin(), scores.end(),
            [](const ClipScore& a, const ClipScore& b) { return a.clip_id < b.clip_id; });

  CsvWriter out(out_csv, {"clip_id", "score"});
  for (const auto& s : scores) out.Row({s.clip_id, FormatDouble(s.score)});
  Log(log, "scored " + std::to_string(scores.size()) + " clips -> " + out_csv.string());
  return scores;
}

EvalSummary CmdEval(const std::vector<EvalInput>& inputs, double p, ObjectiveMode mode,
                    const std::filesystem::path& out_report,
                    const std::optional<std::filesystem::path>& roc_dir, std::ostream* log) {
  Require(!inputs.empty(), "eval needs at least one score file");
  EvalSummary summary;
  std::vector<double> aucs;
  std::vector<double> paucs;
  for (const auto& in : inputs) {
    const auto labels = ReadLabels(in.labels);
    const auto table = ReadCsv(in.scores);
    const auto id_col = table.Column("clip_id");
    const auto score_col = table.Column("score");
    std::vector<ScoredClip> scored;
    for (const auto& row : table.rows) {
      const auto it = labels.find(row[id_col]);
      if (it == labels.end()) {
        Fail(ErrorKind::kNotFound, in.labels.string() + ": no label for scored clip \"" +
                                       row[id_col] + "\"");
      }
      scored.push_back({row[id_col], ParseDouble(row[score_col], in.scores.string()), it->second});
    }
    const auto report = Evaluate(scored, mode, p);
    summary.per_machine.emplace_back(in.machine, report);
    aucs.push_back(report.auc);
    paucs.push_back(report.pauc);
    if (roc_dir) {
      fs::create_directories(*roc_dir);
      CsvWriter roc(*roc_dir / ("roc_" + in.machine + ".csv"), {"fpr", "tpr"});
      for (const auto& [fpr, tpr] : RocPoints(scored)) roc.Row({FormatDouble(fpr), FormatDouble(tpr)});
    }
    Log(log, in.machine + ": AUC " + FormatDouble(report.auc) + ", pAUC " + FormatDouble(report.pauc));
  }

  auto& agg = summary.aggregate;
  agg.auc = HarmonicMean(aucs);
  agg.pauc = HarmonicMean(paucs);
  agg.p = p;
  for (const auto& [m, r] : summary.per_machine) {
    agg.n_pos += r.n_pos;
    agg.n_neg += r.n_neg;
  }
  agg.objective = CombineMetrics(agg.auc, agg.pauc, mode);

  CsvWriter out(out_report, {"machine", "auc", "pauc", "p", "n_pos", "n_neg", "objective"});
  auto row = [&](const std::string& name, const EvalReport& r) {
    out.Row({name, FormatDouble(r.auc), FormatDouble(r.pauc), FormatDouble(r.p),
             std::to_string(r.n_pos), std::to_string(r.n_neg), FormatDouble(r.objective)});
  };
  for (const auto& [m, r] : summary.per_machine) row(m, r);
  row("aggregate", agg);
  return summary;
}

void MakeToyDataset(const std::filesystem::path& root, const ToyDatasetOptions& options) {
  const auto templates = TemplateSet::Defaults();
  for (std::size_t mi = 0; mi < options.machines.size(); ++mi) {
    const std::string& machine = options.machines[mi];
    std::vector<std::string> keys;
    for (const auto& k : templates.Find(machine).Placeholders()) {
      if (k != "condition") keys.push_back(k);
    }
    const fs::path dir = root / machine;
    fs::create_directories(dir / "train");
    fs::create_directories(dir / "test");

    ToySignalSpec spec;
    spec.sample_rate = options.sample_rate;
    spec.duration_s = options.duration_s;
    spec.tone_hz = MachineToneHz(machine);
    const std::uint64_t base = Fnv1a64(machine) ^ (options.seed * 0x9E3779B97F4A7C15ull);

    auto write = [&](const std::string& partition, Condition cond, std::size_t index,
                     std::uint64_t seed) {
      ClipMetadata meta;
      meta.section = "00";
      meta.domain_split = "source";
      meta.partition = partition;
      meta.condition = cond;
      char idx[24];
      std::snprintf(idx, sizeof idx, "%04zu", index);
      meta.clip_index = idx;
      for (const auto& k : keys) meta.attributes.emplace_back(k, std::to_string(1 + index % 2));
      spec.bursts = cond == Condition::kAnomaly;
      const auto name = RenderFilename(meta);
      WriteWav(dir / partition / name, MakeToySignal(spec, seed), options.sample_rate);
      return name.substr(0, name.size() - 4);
    };

    for (std::size_t i = 0; i < options.n_train; ++i) {
      write("train", Condition::kNormal, i, base + i);
    }
    CsvWriter labels(dir / "test_labels.csv", {"clip_id", "label"});
    std::size_t index = 0;
    for (std::size_t i = 0; i < options.n_test_normal; ++i, ++index) {
      labels.Row({write("test", Condition::kNormal, index, base + 100000 + index), "normal"});
    }
    for (std::size_t i = 0; i < options.n_test_anomaly; ++i, ++index) {
      labels.Row({write("test", Condition::kAnomaly, index, base + 100000 + index), "anomaly"});
    }
  }
}

}  // namespace fstwfr
