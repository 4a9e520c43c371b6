#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fstwfr {

enum class Condition { kNormal, kAnomaly };

std::string_view ToString(Condition c);
Condition ParseCondition(std::string_view token);

// Parsed DCASE-style clip label:
//   section_<sec>_<domain>_<partition>_<condition>_<index>(_<key>_<value>)*.wav
struct ClipMetadata {
  std::string machine_type;  // not encoded in the filename; filled by the caller
  std::string section;
  std::string domain_split;  // source | target
  std::string partition;     // train | test
  Condition condition = Condition::kNormal;
  std::string clip_index;
  std::vector<std::pair<std::string, std::string>> attributes;

  const std::string* Attribute(std::string_view key) const;
  friend bool operator==(const ClipMetadata&, const ClipMetadata&) = default;
};

// Accepts a bare name or a path; a trailing ".wav" (any case) is optional.
// Attribute values may not contain underscores.
ClipMetadata ParseLabel(std::string_view filename, std::string machine_type = {});

// Inverse of ParseLabel, including the ".wav" suffix.
std::string RenderFilename(const ClipMetadata& meta);

struct CaptionTemplate {
  std::string machine_type;
  std::string pattern;  // "{condition}" plus one "{key}" per attribute used

  std::vector<std::string> Placeholders() const;
};

struct Caption {
  std::string text;
  Condition condition = Condition::kNormal;
  std::string machine_type;

  friend bool operator==(const Caption&, const Caption&) = default;
};

// Number of whole-word occurrences of `word` in `text`.
std::size_t CountWord(std::string_view text, std::string_view word);

Caption RenderCaption(const ClipMetadata& meta, const CaptionTemplate& tmpl);

// Swaps the single word "normal" for "anomaly".
Caption ToAnomalyCaption(const Caption& caption);

// Per-machine-type templates, keyed case-insensitively.
class TemplateSet {
 public:
  TemplateSet() = default;

  // One record per line: machine_type <TAB> pattern. Blank lines and lines
  // starting with '#' are skipped.
  static TemplateSet Parse(std::string_view text, const std::string& source = "<templates>");
  static TemplateSet Load(const std::filesystem::path& path);
  static TemplateSet Defaults();

  void Add(CaptionTemplate tmpl);
  const CaptionTemplate& Find(std::string_view machine_type) const;
  bool Contains(std::string_view machine_type) const;
  std::vector<std::string> MachineTypes() const;

 private:
  std::map<std::string, CaptionTemplate> by_key_;
};

// Text of the shipped template file.
std::string_view DefaultTemplateText();

}  // namespace fstwfr
