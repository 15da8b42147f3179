#include "stir/csv.hpp"

#include <cstdio>
#include <fstream>

#include "stir/errors.hpp"

namespace stir {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

CsvFile::CsvFile(std::vector<std::string> columns) : columns_(columns.size()) {
  raw_row(columns);
}

void CsvFile::raw_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_)
    throw Error("csv row with " + std::to_string(cells.size()) + " cells, expected " +
                std::to_string(columns_));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) body_ += ',';
    body_ += cells[i];
  }
  body_ += '\n';
}

void CsvFile::write(const std::filesystem::path& path) const {
  write_text_atomic(path, body_);
}

void write_text_atomic(const std::filesystem::path& path, const std::string& body) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string());
    out << body;
    if (!out.flush()) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace stir
