#pragma once

// PGM (P5) and CSV writers. Numbers are printed with std::to_chars so the
// bytes do not depend on locale or stream state.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "collapse/analysis.hpp"

namespace collapse {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal form.
std::string format_number(double value);

/// Gray level of a cell value in [0, 1]: round(255 (1 - v)), so 1 is black.
unsigned char gray_level(double value);

/// Binary PGM with one byte per cell. The earliest row is written last so
/// time runs up the image. Each comment line becomes a `#` header line.
std::string encode_pgm(const FieldRaster& raster, const std::vector<std::string>& comments);

/// Inverse of encode_pgm for tests: cell values are (255 - byte) / 255 and
/// comments are returned without the leading "# ".
FieldRaster decode_pgm(std::string_view bytes, std::vector<std::string>* comments = nullptr);

/// RFC-4180 table preceded by `#` comment lines.
class CsvTable {
 public:
  CsvTable(std::vector<std::string> header, std::vector<std::string> comments = {});

  void add_row(std::vector<std::string> row);
  std::string encode() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::string> comments_;
  std::vector<std::vector<std::string>> rows_;
};

std::string csv_field(std::string_view text);

/// Writes bytes to path, replacing any existing file. Throws OutputError.
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace collapse
