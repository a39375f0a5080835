#include "collapse/raster_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

namespace collapse {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

unsigned char gray_level(double value) {
  const double v = std::clamp(value, 0.0, 1.0);
  return static_cast<unsigned char>(std::lround(255.0 * (1.0 - v)));
}

std::string encode_pgm(const FieldRaster& raster, const std::vector<std::string>& comments) {
  if (raster.rows <= 0 || raster.cols <= 0) throw OutputError("cannot write an empty raster");
  std::string out = "P5\n";
  for (const std::string& c : comments) {
    if (c.find('\n') != std::string::npos) throw OutputError("PGM comment contains a newline");
    out += "# " + c + "\n";
  }
  out += std::to_string(raster.cols) + " " + std::to_string(raster.rows) + "\n255\n";
  for (int r = raster.rows - 1; r >= 0; --r) {
    for (int c = 0; c < raster.cols; ++c) out.push_back(static_cast<char>(gray_level(raster.at(r, c))));
  }
  return out;
}

FieldRaster decode_pgm(std::string_view bytes, std::vector<std::string>* comments) {
  std::size_t pos = 0;
  auto line = [&]() {
    const std::size_t end = bytes.find('\n', pos);
    if (end == std::string_view::npos) throw OutputError("truncated PGM header");
    std::string_view l = bytes.substr(pos, end - pos);
    pos = end + 1;
    return l;
  };
  if (line() != "P5") throw OutputError("not a binary PGM");
  std::string_view l = line();
  while (!l.empty() && l[0] == '#') {
    if (comments) comments->emplace_back(l.substr(l.size() > 1 && l[1] == ' ' ? 2 : 1));
    l = line();
  }
  int cols = 0;
  int rows = 0;
  const auto space = l.find(' ');
  if (space == std::string_view::npos) throw OutputError("bad PGM dimensions");
  std::from_chars(l.data(), l.data() + space, cols);
  std::from_chars(l.data() + space + 1, l.data() + l.size(), rows);
  if (line() != "255") throw OutputError("unsupported PGM depth");
  if (cols <= 0 || rows <= 0 ||
      bytes.size() - pos != static_cast<std::size_t>(cols) * static_cast<std::size_t>(rows)) {
    throw OutputError("PGM pixel data does not match its dimensions");
  }
  FieldRaster raster;
  raster.rows = rows;
  raster.cols = cols;
  raster.cells.resize(static_cast<std::size_t>(rows) * cols);
  for (int r = rows - 1; r >= 0; --r) {
    for (int c = 0; c < cols; ++c) {
      raster.at(r, c) = (255.0 - static_cast<unsigned char>(bytes[pos++])) / 255.0;
    }
  }
  return raster;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

CsvTable::CsvTable(std::vector<std::string> header, std::vector<std::string> comments)
    : header_(std::move(header)), comments_(std::move(comments)) {}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) {
    throw OutputError("CSV row has " + std::to_string(row.size()) + " fields, header has " +
                      std::to_string(header_.size()));
  }
  rows_.push_back(std::move(row));
}

std::string CsvTable::encode() const {
  std::string out;
  for (const std::string& c : comments_) out += "# " + c + "\r\n";
  auto emit = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) out += ',';
      out += csv_field(fields[i]);
    }
    out += "\r\n";
  };
  emit(header_);
  for (const auto& row : rows_) emit(row);
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw OutputError("cannot open " + path.string() + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw OutputError("write failed for " + path.string());
}

}  // namespace collapse
