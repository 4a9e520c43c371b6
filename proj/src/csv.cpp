#include "fstwfr/csv.hpp"

#include <charconv>
#include <cmath>

#include "fstwfr/error.hpp"

namespace fstwfr {
namespace {

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::size_t CsvTable::Column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  Fail(ErrorKind::kFormat, source + ": missing column \"" + std::string(name) + "\"");
}

bool CsvTable::HasColumn(std::string_view name) const {
  for (const auto& h : header) {
    if (h == name) return true;
  }
  return false;
}

CsvTable ReadCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, path.string() + ": cannot open CSV file");
  CsvTable table;
  table.source = path.string();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = SplitFields(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      Fail(ErrorKind::kFormat, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                   std::to_string(table.header.size()) + " fields, got " +
                                   std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (table.header.empty()) Fail(ErrorKind::kFormat, path.string() + ": missing CSV header");
  return table;
}

void CreateParentDirs(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), width_(header.size()) {
  CreateParentDirs(path);
  out_.open(path, std::ios::trunc);
  if (!out_) Fail(ErrorKind::kIo, path.string() + ": cannot open for writing");
  Row(header);
}

void CsvWriter::Row(const std::vector<std::string>& fields) {
  Require(fields.size() == width_, "CSV row width mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].find_first_of(",\n\r") != std::string::npos) {
      Fail(ErrorKind::kInvalidArgument, path_.string() + ": field \"" + fields[i] +
                                            "\" contains a comma or newline");
    }
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
  if (!out_) Fail(ErrorKind::kIo, path_.string() + ": write error");
}

double ParseDouble(std::string_view text, const std::string& context) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
    Fail(ErrorKind::kParse, context + ": cannot parse number \"" + std::string(text) + "\"");
  }
  return v;
}

}  // namespace fstwfr
