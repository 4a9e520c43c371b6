#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fstwfr/audio_io.hpp"
#include "fstwfr/metadata.hpp"

namespace fstwfr {

struct ManifestEntry {
  std::string output_stem;
  std::string machine_type;
  Condition condition = Condition::kNormal;
  std::size_t requested_count = 0;
  std::string caption;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

// Prompts handed to an external text-to-audio generator. The generator is
// expected to write <output_stem>_<k>.wav for k in [0, requested_count).
struct CaptionManifest {
  std::vector<ManifestEntry> entries;

  void Validate() const;
  std::size_t Requested(Condition condition) const;
  friend bool operator==(const CaptionManifest&, const CaptionManifest&) = default;
};

// One normal and one anomaly entry per distinct caption, in order of first
// appearance. All metadata must be normal clips of a single machine type.
CaptionManifest BuildManifest(std::span<const ClipMetadata> metadata,
                              const TemplateSet& templates, std::size_t per_caption_count);

// UTF-8, tab-separated, one entry per line after the header
// output_stem, machine_type, condition, requested_count, caption.
std::string SerializeManifest(const CaptionManifest& manifest);
CaptionManifest ParseManifest(std::string_view text, const std::string& source = "<manifest>");
void WriteManifest(const std::filesystem::path& path, const CaptionManifest& manifest);
CaptionManifest ReadManifest(const std::filesystem::path& path);

struct IngestOptions {
  SilenceRemovalConfig silence;
  // Fraction of requested files that may be missing before ingestion fails.
  double missing_tolerance = 0.0;
};

struct SyntheticCorpus {
  std::string machine_type;
  std::vector<AudioClip> normals;
  std::vector<AudioClip> anomalies;
  std::string manifest_ref;
  std::vector<std::string> missing;   // file names requested but absent
  std::vector<std::string> warnings;  // extra files and other notices
};

SyntheticCorpus IngestSynthetic(const std::filesystem::path& dir, const CaptionManifest& manifest,
                                const IngestOptions& options, const std::string& manifest_ref = {});

struct StubOptions {
  std::uint64_t seed = 0;
  double duration_s = 2.0;
  int sample_rate = 16000;
};

// Offline stand-in for the generator: writes every requested file as a
// deterministic tone-plus-noise clip (seeded by the caption), with transient
// bursts for anomaly captions. Returns the number of files written.
std::size_t GenerateStub(const CaptionManifest& manifest, const std::filesystem::path& out_dir,
                         const StubOptions& options);

}  // namespace fstwfr
