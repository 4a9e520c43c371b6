#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace fstwfr {

struct AudioClip {
  std::vector<double> samples;  // mono, nominally in [-1, 1]
  int sample_rate = 0;
  std::string source_path;
};

// Frame-RMS trimming relative to the loudest frame ("RS" preprocessing).
struct SilenceRemovalConfig {
  bool enabled = true;
  double threshold_db = 30.0;
  std::size_t frame_len = 1024;
  std::size_t hop_len = 512;
  // Real recordings are left untouched unless this is set.
  bool apply_to_real = false;

  void Validate() const;
};

enum class WavEncoding { kPcm16, kFloat32 };

// Decodes a RIFF/WAVE file holding 16-bit PCM or 32-bit IEEE float samples.
// Multichannel input is averaged to mono; 16-bit values are scaled by 1/32768.
AudioClip DecodeWav(const std::filesystem::path& path);
AudioClip DecodeWavBytes(std::span<const std::uint8_t> bytes, const std::string& source);

// 16-bit encoding rounds to nearest and saturates to [-32768, 32767].
std::vector<std::uint8_t> EncodeWavBytes(std::span<const double> samples, int sample_rate,
                                         WavEncoding encoding = WavEncoding::kPcm16);
void WriteWav(const std::filesystem::path& path, std::span<const double> samples,
              int sample_rate, WavEncoding encoding = WavEncoding::kPcm16);

// Drops frames whose RMS level falls more than threshold_db below the loudest
// frame. Frames are (frame_len, hop_len) windows; the final frame absorbs the
// tail. A sample survives when any frame covering it survives. Zero-energy
// frames always count as silent, and if nothing survives the loudest frame is
// kept. The pass repeats until the output stops shrinking, so the result is a
// fixed point of the rule.
AudioClip RemoveSilence(const AudioClip& clip, const SilenceRemovalConfig& cfg);

struct SilenceFrame {
  std::size_t begin = 0;
  std::size_t end = 0;
  double level_db = 0.0;  // -inf for an all-zero frame
};

// Frame layout and per-frame level used by RemoveSilence.
std::vector<SilenceFrame> SilenceFrames(std::span<const double> samples,
                                        const SilenceRemovalConfig& cfg);

}  // namespace fstwfr
