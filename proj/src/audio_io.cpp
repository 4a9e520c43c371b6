#include "fstwfr/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "fstwfr/error.hpp"

namespace fstwfr {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t ReadU16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t ReadU32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void PutU16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void PutTag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

bool TagIs(const std::uint8_t* p, const char* tag) { return std::memcmp(p, tag, 4) == 0; }

struct FormatChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

double MeanSquare(std::span<const double> xs) {
  double acc = 0.0;
  for (double x : xs) acc += x * x;
  return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

std::vector<double> RemoveSilenceOnce(std::span<const double> samples,
                                      const SilenceRemovalConfig& cfg) {
  const auto frames = SilenceFrames(samples, cfg);
  double max_db = -std::numeric_limits<double>::infinity();
  std::size_t loudest = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].level_db > max_db) {
      max_db = frames[i].level_db;
      loudest = i;
    }
  }
  std::vector<char> keep(samples.size(), 0);
  bool any = false;
  if (std::isfinite(max_db)) {
    const double cutoff = max_db - cfg.threshold_db;
    for (const auto& f : frames) {
      if (!std::isfinite(f.level_db) || f.level_db < cutoff) continue;
      std::fill(keep.begin() + static_cast<std::ptrdiff_t>(f.begin),
                keep.begin() + static_cast<std::ptrdiff_t>(f.end), 1);
      any = true;
    }
  }
  if (!any) {
    const auto& f = frames[loudest];
    std::fill(keep.begin() + static_cast<std::ptrdiff_t>(f.begin),
              keep.begin() + static_cast<std::ptrdiff_t>(f.end), 1);
  }
  std::vector<double> out;
  out.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (keep[i]) out.push_back(samples[i]);
  }
  return out;
}

}  // namespace

void SilenceRemovalConfig::Validate() const {
  Require(threshold_db > 0.0, "silence threshold_db must be positive");
  Require(hop_len >= 1, "silence hop_len must be at least 1");
  Require(frame_len >= hop_len, "silence frame_len must be >= hop_len");
}

AudioClip DecodeWavBytes(std::span<const std::uint8_t> bytes, const std::string& source) {
  auto bad = [&](const std::string& what) -> Error {
    return Error(ErrorKind::kFormat, source + ": " + what);
  };
  if (bytes.size() < 12 || !TagIs(bytes.data(), "RIFF") || !TagIs(bytes.data() + 8, "WAVE")) {
    throw bad("not a RIFF/WAVE file");
  }

  FormatChunk fmt;
  bool have_fmt = false;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::size_t size = ReadU32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = std::min(size, bytes.size() - body);
    if (TagIs(chunk, "fmt ")) {
      if (available < 16) throw bad("truncated fmt chunk");
      const std::uint8_t* p = bytes.data() + body;
      fmt.format = ReadU16(p);
      fmt.channels = ReadU16(p + 2);
      fmt.sample_rate = ReadU32(p + 4);
      fmt.block_align = ReadU16(p + 12);
      fmt.bits = ReadU16(p + 14);
      if (fmt.format == kFormatExtensible) {
        if (available < 26) throw bad("truncated extensible fmt chunk");
        fmt.format = ReadU16(p + 24);  // first two bytes of the sub-format GUID
      }
      have_fmt = true;
    } else if (TagIs(chunk, "data")) {
      data = bytes.data() + body;
      data_size = available;
      break;
    }
    pos = body + size + (size & 1);
  }

  if (!have_fmt) throw bad("missing fmt chunk");
  if (data == nullptr) throw bad("missing data chunk");
  if (fmt.channels == 0) throw bad("zero channels");
  if (fmt.sample_rate == 0) throw bad("zero sample rate");

  const bool pcm16 = fmt.format == kFormatPcm && fmt.bits == 16;
  const bool float32 = fmt.format == kFormatFloat && fmt.bits == 32;
  if (!pcm16 && !float32) {
    throw bad("unsupported encoding (format " + std::to_string(fmt.format) + ", " +
              std::to_string(fmt.bits) + " bits); expected 16-bit PCM or 32-bit float");
  }
  const std::size_t sample_bytes = fmt.bits / 8;
  const std::size_t frame_bytes = sample_bytes * fmt.channels;
  const std::size_t n_frames = data_size / frame_bytes;
  if (n_frames == 0) throw bad("zero-length audio");

  AudioClip clip;
  clip.sample_rate = static_cast<int>(fmt.sample_rate);
  clip.source_path = source;
  clip.samples.resize(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    const std::uint8_t* frame = data + i * frame_bytes;
    double acc = 0.0;
    for (std::size_t c = 0; c < fmt.channels; ++c) {
      const std::uint8_t* s = frame + c * sample_bytes;
      if (pcm16) {
        acc += static_cast<double>(static_cast<std::int16_t>(ReadU16(s))) / 32768.0;
      } else {
        const std::uint32_t bits = ReadU32(s);
        float v;
        std::memcpy(&v, &bits, sizeof v);
        if (!std::isfinite(v)) throw bad("non-finite float sample");
        acc += static_cast<double>(v);
      }
    }
    clip.samples[i] = acc / static_cast<double>(fmt.channels);
  }
  return clip;
}

AudioClip DecodeWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, path.string() + ": cannot open file");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) Fail(ErrorKind::kIo, path.string() + ": read error");
  return DecodeWavBytes(bytes, path.string());
}

std::vector<std::uint8_t> EncodeWavBytes(std::span<const double> samples, int sample_rate,
                                         WavEncoding encoding) {
  Require(sample_rate > 0, "sample rate must be positive");
  const std::uint16_t bits = encoding == WavEncoding::kPcm16 ? 16 : 32;
  const std::uint16_t format = encoding == WavEncoding::kPcm16 ? kFormatPcm : kFormatFloat;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * (bits / 8));

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  PutTag(out, "RIFF");
  PutU32(out, 36 + data_bytes);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, format);
  PutU16(out, 1);
  PutU32(out, static_cast<std::uint32_t>(sample_rate));
  PutU32(out, static_cast<std::uint32_t>(sample_rate) * (bits / 8));
  PutU16(out, bits / 8);
  PutU16(out, bits);
  PutTag(out, "data");
  PutU32(out, data_bytes);
  for (double x : samples) {
    if (encoding == WavEncoding::kPcm16) {
      const double scaled = std::clamp(std::nearbyint(x * 32768.0), -32768.0, 32767.0);
      PutU16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
    } else {
      const float v = static_cast<float>(x);
      std::uint32_t bits32;
      std::memcpy(&bits32, &v, sizeof v);
      PutU32(out, bits32);
    }
  }
  return out;
}

void WriteWav(const std::filesystem::path& path, std::span<const double> samples,
              int sample_rate, WavEncoding encoding) {
  const auto bytes = EncodeWavBytes(samples, sample_rate, encoding);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorKind::kIo, path.string() + ": write error");
}

std::vector<SilenceFrame> SilenceFrames(std::span<const double> samples,
                                        const SilenceRemovalConfig& cfg) {
  cfg.Validate();
  std::vector<SilenceFrame> frames;
  const std::size_t n = samples.size();
  if (n == 0) return frames;
  const std::size_t count = n <= cfg.frame_len ? 1 : 1 + (n - cfg.frame_len) / cfg.hop_len;
  frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    SilenceFrame f;
    f.begin = i * cfg.hop_len;
    f.end = i + 1 == count ? n : f.begin + cfg.frame_len;
    const double ms = MeanSquare(samples.subspan(f.begin, f.end - f.begin));
    f.level_db = ms > 0.0 ? 10.0 * std::log10(ms) : -std::numeric_limits<double>::infinity();
    frames.push_back(f);
  }
  return frames;
}

AudioClip RemoveSilence(const AudioClip& clip, const SilenceRemovalConfig& cfg) {
  Require(cfg.enabled, "RemoveSilence called with a disabled config");
  Require(!clip.samples.empty(), clip.source_path + ": cannot remove silence from an empty clip");
  cfg.Validate();
  AudioClip out = clip;
  while (true) {
    auto next = RemoveSilenceOnce(out.samples, cfg);
    if (next.size() == out.samples.size()) break;
    out.samples = std::move(next);
  }
  return out;
}

}  // namespace fstwfr
