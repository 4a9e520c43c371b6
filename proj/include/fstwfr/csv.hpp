#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace fstwfr {

// Plain comma-separated tables: no quoting, so fields may not contain commas
// or newlines.
struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t Column(std::string_view name) const;
  bool HasColumn(std::string_view name) const;
};

CsvTable ReadCsv(const std::filesystem::path& path);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void Row(const std::vector<std::string>& fields);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t width_;
};

// Creates the directory that will hold `path`, if any.
void CreateParentDirs(const std::filesystem::path& path);

double ParseDouble(std::string_view text, const std::string& context);

}  // namespace fstwfr
