#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace stir {

// Locale-independent numeric formatting ('.' decimal point, %.12g).
std::string fmt_double(double v);

// Incremental CSV assembly; the body is written atomically (temp file +
// rename) so partial outputs never appear under the final name.
class CsvFile {
 public:
  explicit CsvFile(std::vector<std::string> columns);

  void raw_row(const std::vector<std::string>& cells);

  template <typename... Ts>
  void row(const Ts&... cells) {
    raw_row({to_cell(cells)...});
  }

  const std::string& body() const { return body_; }
  void write(const std::filesystem::path& path) const;

 private:
  static std::string to_cell(const std::string& s) { return s; }
  static std::string to_cell(const char* s) { return s; }
  static std::string to_cell(double v) { return fmt_double(v); }
  static std::string to_cell(int v) { return std::to_string(v); }
  static std::string to_cell(long v) { return std::to_string(v); }
  static std::string to_cell(unsigned long v) { return std::to_string(v); }
  static std::string to_cell(long long v) { return std::to_string(v); }
  static std::string to_cell(unsigned long long v) { return std::to_string(v); }

  std::size_t columns_;
  std::string body_;
};

void write_text_atomic(const std::filesystem::path& path, const std::string& body);

}  // namespace stir
