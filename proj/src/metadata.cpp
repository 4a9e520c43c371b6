#include "fstwfr/metadata.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "fstwfr/error.hpp"

namespace fstwfr {
namespace {

constexpr std::string_view kDefaultTemplates =
    "# machine_type\tpattern\n"
    "ToyCar\tThis is the {condition} sound of a toy car with model {car} and speed {spd}, "
    "recorded by a microphone placed at the position {mic}.\n"
    "ToyTrain\tThis is the {condition} sound of a toy train with model {car} and speed {spd}, "
    "recorded by a microphone placed at the position {mic}.\n"
    "ToyDrone\tThis is the {condition} sound of a toy drone with model {car} and speed {spd}, "
    "recorded by a microphone placed at the position {mic}.\n"
    "ToyNscale\tThis is the {condition} sound of a toy N-scale train with model {car} and "
    "speed {spd}, recorded by a microphone placed at the position {mic}.\n"
    "ToyTank\tThis is the {condition} sound of a toy tank with model {car} and speed {spd}, "
    "recorded by a microphone placed at the position {mic}.\n"
    "Vacuum\tThis is the {condition} sound of a vacuum cleaner recorded with the microphone at "
    "location {loc}.\n"
    "bandsaw\tThis is the {condition} sound of a band saw cutting at velocity {vel}.\n"
    "grinder\tThis is the {condition} sound of a grinding machine with grindstones "
    "{grindstone} and metal plates {plate}.\n"
    "shaker\tThis is the {condition} sound of a shaker running at speed {speed}.\n"
    "bearing\tThis is the {condition} sound of a bearing rotating at velocity {vel}, recorded "
    "at location {loc}.\n"
    "fan\tThis is the {condition} sound of a fan with noise level {m-n}.\n"
    "gearbox\tThis is the {condition} sound of a gearbox driven at voltage {volt} with weight "
    "{wt} and unit {id}.\n"
    "slider\tThis is the {condition} sound of a slider moving at velocity {vel} with "
    "acceleration {ac}.\n"
    "valve\tThis is the {condition} sound of a valve with pattern {pat}, panel {panel}, first "
    "valve pattern {v1pat} and second valve pattern {v2pat}.\n";

std::string Lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool IsWordChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

std::vector<std::string> Split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void ParseFail(std::string_view filename, const std::string& what) {
  Fail(ErrorKind::kParse, std::string(filename) + ": " + what);
}

}  // namespace

std::string_view ToString(Condition c) {
  return c == Condition::kNormal ? "normal" : "anomaly";
}

Condition ParseCondition(std::string_view token) {
  if (token == "normal") return Condition::kNormal;
  if (token == "anomaly") return Condition::kAnomaly;
  Fail(ErrorKind::kParse, "unknown condition \"" + std::string(token) + "\"");
}

const std::string* ClipMetadata::Attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

ClipMetadata ParseLabel(std::string_view filename, std::string machine_type) {
  std::string_view stem = filename;
  if (const auto slash = stem.find_last_of("/\\"); slash != std::string_view::npos) {
    stem.remove_prefix(slash + 1);
  }
  if (stem.size() > 4 && Lower(stem.substr(stem.size() - 4)) == ".wav") {
    stem.remove_suffix(4);
  }
  const auto tokens = Split(stem, '_');
  if (tokens.size() < 6) {
    ParseFail(filename, "expected at least 6 underscore-separated fields, got " +
                            std::to_string(tokens.size()));
  }
  if (tokens[0] != "section") ParseFail(filename, "expected \"section\", got \"" + tokens[0] + "\"");
  for (const auto& t : tokens) {
    if (t.empty()) ParseFail(filename, "empty field");
  }
  if (tokens[2] != "source" && tokens[2] != "target") {
    ParseFail(filename, "unknown domain \"" + tokens[2] + "\"");
  }
  if (tokens[3] != "train" && tokens[3] != "test") {
    ParseFail(filename, "unknown partition \"" + tokens[3] + "\"");
  }
  if (tokens[4] != "normal" && tokens[4] != "anomaly") {
    ParseFail(filename, "unknown condition \"" + tokens[4] + "\"");
  }
  if ((tokens.size() - 6) % 2 != 0) {
    ParseFail(filename, "attribute \"" + tokens.back() + "\" has no value");
  }

  ClipMetadata meta;
  meta.machine_type = std::move(machine_type);
  meta.section = tokens[1];
  meta.domain_split = tokens[2];
  meta.partition = tokens[3];
  meta.condition = ParseCondition(tokens[4]);
  meta.clip_index = tokens[5];
  for (std::size_t i = 6; i < tokens.size(); i += 2) {
    meta.attributes.emplace_back(tokens[i], tokens[i + 1]);
  }
  return meta;
}

std::string RenderFilename(const ClipMetadata& meta) {
  std::string out = "section_" + meta.section + "_" + meta.domain_split + "_" + meta.partition +
                    "_" + std::string(ToString(meta.condition)) + "_" + meta.clip_index;
  for (const auto& [k, v] : meta.attributes) out += "_" + k + "_" + v;
  return out + ".wav";
}

std::vector<std::string> CaptionTemplate::Placeholders() const {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = pattern.find('{', pos)) != std::string::npos) {
    const auto close = pattern.find('}', pos);
    if (close == std::string::npos) {
      Fail(ErrorKind::kParse, machine_type + " template: unterminated placeholder");
    }
    out.push_back(pattern.substr(pos + 1, close - pos - 1));
    pos = close + 1;
  }
  return out;
}

std::size_t CountWord(std::string_view text, std::string_view word) {
  if (word.empty()) return 0;
  std::size_t count = 0;
  std::size_t pos = 0;
  while ((pos = text.find(word, pos)) != std::string_view::npos) {
    const bool left_ok = pos == 0 || !IsWordChar(text[pos - 1]);
    const std::size_t end = pos + word.size();
    const bool right_ok = end == text.size() || !IsWordChar(text[end]);
    if (left_ok && right_ok) ++count;
    pos = end;
  }
  return count;
}

Caption RenderCaption(const ClipMetadata& meta, const CaptionTemplate& tmpl) {
  if (!meta.machine_type.empty() && Lower(meta.machine_type) != Lower(tmpl.machine_type)) {
    Fail(ErrorKind::kMismatch, "template for " + tmpl.machine_type +
                                   " cannot caption a " + meta.machine_type + " clip");
  }
  const std::string condition(ToString(meta.condition));
  std::string text;
  std::size_t pos = 0;
  while (true) {
    const auto open = tmpl.pattern.find('{', pos);
    text.append(tmpl.pattern, pos, open == std::string::npos ? std::string::npos : open - pos);
    if (open == std::string::npos) break;
    const auto close = tmpl.pattern.find('}', open);
    if (close == std::string::npos) {
      Fail(ErrorKind::kParse, tmpl.machine_type + " template: unterminated placeholder");
    }
    const std::string key = tmpl.pattern.substr(open + 1, close - open - 1);
    if (key == "condition") {
      text += condition;
    } else if (const auto* value = meta.Attribute(key)) {
      text += *value;
    } else {
      Fail(ErrorKind::kNotFound, tmpl.machine_type + " template needs attribute \"" + key +
                                     "\" which the label does not carry");
    }
    pos = close + 1;
  }
  if (CountWord(text, condition) != 1) {
    Fail(ErrorKind::kInvalidArgument, "caption must contain \"" + condition +
                                          "\" exactly once: " + text);
  }
  return {text, meta.condition, meta.machine_type.empty() ? tmpl.machine_type : meta.machine_type};
}

Caption ToAnomalyCaption(const Caption& caption) {
  if (caption.condition != Condition::kNormal) {
    Fail(ErrorKind::kInvalidArgument, "only normal captions can be turned into anomaly captions");
  }
  if (CountWord(caption.text, "normal") != 1) {
    Fail(ErrorKind::kInvalidArgument,
         "caption must contain the word \"normal\" exactly once: " + caption.text);
  }
  std::size_t pos = 0;
  while ((pos = caption.text.find("normal", pos)) != std::string::npos) {
    const bool left_ok = pos == 0 || !IsWordChar(caption.text[pos - 1]);
    const std::size_t end = pos + 6;
    const bool right_ok = end == caption.text.size() || !IsWordChar(caption.text[end]);
    if (left_ok && right_ok) break;
    pos = end;
  }
  Caption out = caption;
  out.text.replace(pos, 6, "anomaly");
  out.condition = Condition::kAnomaly;
  return out;
}

TemplateSet TemplateSet::Parse(std::string_view text, const std::string& source) {
  TemplateSet set;
  std::size_t line_no = 0;
  for (const auto& raw : Split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      Fail(ErrorKind::kParse, source + ":" + std::to_string(line_no) +
                                  ": expected machine_type<TAB>pattern");
    }
    CaptionTemplate tmpl{line.substr(0, tab), line.substr(tab + 1)};
    const auto holders = tmpl.Placeholders();
    if (std::count(holders.begin(), holders.end(), "condition") != 1) {
      Fail(ErrorKind::kParse, source + ":" + std::to_string(line_no) +
                                  ": pattern needs exactly one {condition}");
    }
    set.Add(std::move(tmpl));
  }
  return set;
}

TemplateSet TemplateSet::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, path.string() + ": cannot open template file");
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str(), path.string());
}

TemplateSet TemplateSet::Defaults() { return Parse(kDefaultTemplates, "<default templates>"); }

void TemplateSet::Add(CaptionTemplate tmpl) {
  by_key_[Lower(tmpl.machine_type)] = std::move(tmpl);
}

const CaptionTemplate& TemplateSet::Find(std::string_view machine_type) const {
  const auto it = by_key_.find(Lower(machine_type));
  if (it == by_key_.end()) {
    Fail(ErrorKind::kNotFound, "no caption template for machine type \"" +
                                   std::string(machine_type) + "\"");
  }
  return it->second;
}

bool TemplateSet::Contains(std::string_view machine_type) const {
  return by_key_.count(Lower(machine_type)) != 0;
}

std::vector<std::string> TemplateSet::MachineTypes() const {
  std::vector<std::string> out;
  for (const auto& [key, tmpl] : by_key_) out.push_back(tmpl.machine_type);
  return out;
}

std::string_view DefaultTemplateText() { return kDefaultTemplates; }

}  // namespace fstwfr
