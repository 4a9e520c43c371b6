#include "fstwfr/synth_interface.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fstwfr/csv.hpp"
#include "fstwfr/error.hpp"
#include "fstwfr/parallel.hpp"
#include "fstwfr/toy_signals.hpp"

namespace fstwfr {
namespace {

constexpr std::string_view kManifestHeader =
    "output_stem\tmachine_type\tcondition\trequested_count\tcaption";

std::string StemPrefix(std::string_view machine_type) {
  std::string out;
  for (unsigned char c : machine_type) {
    out += std::isalnum(c) ? static_cast<char>(c) : '-';
  }
  return out;
}

std::string ClipFileName(const ManifestEntry& e, std::size_t k) {
  return e.output_stem + "_" + std::to_string(k) + ".wav";
}

bool IsWav(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".wav";
}

}  // namespace

void CaptionManifest::Validate() const {
  std::set<std::string> stems;
  for (const auto& e : entries) {
    Require(!e.output_stem.empty(), "manifest entry with empty output_stem");
    Require(stems.insert(e.output_stem).second, "duplicate output_stem " + e.output_stem);
    Require(e.requested_count >= 1, e.output_stem + ": requested_count must be >= 1");
    Require(e.caption.find_first_of("\t\n\r") == std::string::npos,
            e.output_stem + ": caption may not contain tabs or newlines");
  }
}

std::size_t CaptionManifest::Requested(Condition condition) const {
  std::size_t n = 0;
  for (const auto& e : entries) {
    if (e.condition == condition) n += e.requested_count;
  }
  return n;
}

CaptionManifest BuildManifest(std::span<const ClipMetadata> metadata,
                              const TemplateSet& templates, std::size_t per_caption_count) {
  Require(!metadata.empty(), "cannot build a caption manifest from empty metadata");
  Require(per_caption_count >= 1, "per-caption count must be >= 1");
  const std::string& machine = metadata.front().machine_type;
  Require(!machine.empty(), "metadata has no machine type");
  const CaptionTemplate& tmpl = templates.Find(machine);

  std::vector<Caption> captions;
  std::set<std::string> seen;
  for (const auto& meta : metadata) {
    if (meta.machine_type != machine) {
      Fail(ErrorKind::kInvalidArgument, "manifest mixes machine types " + machine + " and " +
                                            meta.machine_type);
    }
    if (meta.condition != Condition::kNormal) {
      Fail(ErrorKind::kInvalidArgument,
           "target-machine anomalies are unavailable for training; got an anomaly clip (" +
               RenderFilename(meta) + ")");
    }
    Caption c = RenderCaption(meta, tmpl);
    if (seen.insert(c.text).second) captions.push_back(std::move(c));
  }

  CaptionManifest manifest;
  const std::string prefix = StemPrefix(machine);
  for (std::size_t i = 0; i < captions.size(); ++i) {
    char index[24];
    std::snprintf(index, sizeof index, "%03zu", i);
    const Caption anomaly = ToAnomalyCaption(captions[i]);
    manifest.entries.push_back({prefix + "_normal_" + index, machine, Condition::kNormal,
                                per_caption_count, captions[i].text});
    manifest.entries.push_back({prefix + "_anomaly_" + index, machine, Condition::kAnomaly,
                                per_caption_count, anomaly.text});
  }
  manifest.Validate();
  return manifest;
}

std::string SerializeManifest(const CaptionManifest& manifest) {
  manifest.Validate();
  std::string out(kManifestHeader);
  out += '\n';
  for (const auto& e : manifest.entries) {
    out += e.output_stem + '\t' + e.machine_type + '\t' + std::string(ToString(e.condition)) +
           '\t' + std::to_string(e.requested_count) + '\t' + e.caption + '\n';
  }
  return out;
}

CaptionManifest ParseManifest(std::string_view text, const std::string& source) {
  CaptionManifest manifest;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line == kManifestHeader) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (int i = 0; i < 4; ++i) {
      const auto tab = line.find('\t', start);
      if (tab == std::string::npos) break;
      f.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (f.size() != 4) {
      Fail(ErrorKind::kParse, source + ":" + std::to_string(line_no) + ": expected 5 tab-separated fields");
    }
    f.push_back(line.substr(start));
    ManifestEntry e;
    e.output_stem = f[0];
    e.machine_type = f[1];
    try {
      e.condition = ParseCondition(f[2]);
      e.requested_count = std::stoul(f[3]);
    } catch (const std::exception& ex) {
      Fail(ErrorKind::kParse, source + ":" + std::to_string(line_no) + ": " + ex.what());
    }
    e.caption = f[4];
    manifest.entries.push_back(std::move(e));
  }
  try {
    manifest.Validate();
  } catch (const Error& ex) {
    Fail(ErrorKind::kParse, source + ": " + ex.what());
  }
  return manifest;
}

void WriteManifest(const std::filesystem::path& path, const CaptionManifest& manifest) {
  const std::string text = SerializeManifest(manifest);
  CreateParentDirs(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, path.string() + ": cannot open for writing");
  out << text;
  if (!out) Fail(ErrorKind::kIo, path.string() + ": write error");
}

CaptionManifest ReadManifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, path.string() + ": cannot open manifest");
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseManifest(ss.str(), path.string());
}

SyntheticCorpus IngestSynthetic(const std::filesystem::path& dir, const CaptionManifest& manifest,
                                const IngestOptions& options, const std::string& manifest_ref) {
  manifest.Validate();
  Require(options.missing_tolerance >= 0.0 && options.missing_tolerance <= 1.0,
          "missing_tolerance must be in [0, 1]");
  if (!std::filesystem::is_directory(dir)) {
    Fail(ErrorKind::kNotFound, dir.string() + ": synthetic audio directory does not exist");
  }

  std::set<std::string> present;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && IsWav(entry.path())) {
      present.insert(entry.path().filename().string());
    }
  }

  SyntheticCorpus corpus;
  corpus.manifest_ref = manifest_ref;
  if (!manifest.entries.empty()) corpus.machine_type = manifest.entries.front().machine_type;

  struct Wanted {
    std::string name;
    Condition condition;
  };
  std::vector<Wanted> wanted;
  std::set<std::string> expected;
  std::size_t total = 0;
  for (const auto& e : manifest.entries) {
    for (std::size_t k = 0; k < e.requested_count; ++k) {
      const std::string name = ClipFileName(e, k);
      expected.insert(name);
      ++total;
      if (present.count(name)) {
        wanted.push_back({name, e.condition});
      } else {
        corpus.missing.push_back(name);
      }
    }
  }
  for (const auto& name : present) {
    if (!expected.count(name)) corpus.warnings.push_back("unexpected file " + name + " ignored");
  }
  const double missing_fraction =
      total == 0 ? 0.0 : static_cast<double>(corpus.missing.size()) / static_cast<double>(total);
  if (missing_fraction > options.missing_tolerance) {
    std::string list;
    for (std::size_t i = 0; i < corpus.missing.size() && i < 20; ++i) {
      list += (i ? ", " : "") + corpus.missing[i];
    }
    if (corpus.missing.size() > 20) list += ", ...";
    Fail(ErrorKind::kNotFound, dir.string() + ": " + std::to_string(corpus.missing.size()) +
                                   " of " + std::to_string(total) +
                                   " synthetic files missing: " + list);
  }
  if (!corpus.missing.empty()) {
    corpus.warnings.push_back(std::to_string(corpus.missing.size()) +
                              " synthetic files missing (within tolerance)");
  }

  std::vector<AudioClip> clips(wanted.size());
  ParallelFor(wanted.size(), [&](std::size_t i) {
    AudioClip clip = DecodeWav(dir / wanted[i].name);
    if (options.silence.enabled) clip = RemoveSilence(clip, options.silence);
    clips[i] = std::move(clip);
  });
  for (std::size_t i = 0; i < wanted.size(); ++i) {
    (wanted[i].condition == Condition::kNormal ? corpus.normals : corpus.anomalies)
        .push_back(std::move(clips[i]));
  }
  return corpus;
}

std::size_t GenerateStub(const CaptionManifest& manifest, const std::filesystem::path& out_dir,
                         const StubOptions& options) {
  manifest.Validate();
  std::filesystem::create_directories(out_dir);
  std::size_t written = 0;
  for (const auto& e : manifest.entries) {
    ToySignalSpec spec;
    spec.sample_rate = options.sample_rate;
    spec.duration_s = options.duration_s;
    spec.tone_hz = MachineToneHz(e.machine_type);
    spec.bursts = e.condition == Condition::kAnomaly;
    const std::uint64_t base = Fnv1a64(e.caption) ^ (options.seed * 0x9E3779B97F4A7C15ull);
    for (std::size_t k = 0; k < e.requested_count; ++k) {
      const auto samples = MakeToySignal(spec, base + k);
      WriteWav(out_dir / ClipFileName(e, k), samples, options.sample_rate);
      ++written;
    }
  }
  return written;
}

}  // namespace fstwfr
