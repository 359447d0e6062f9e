#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cortexenc::io {

// Little-endian encoder for the binary table formats.
class ByteWriter {
 public:
  void bytes(std::string_view raw);
  void u8(std::uint8_t v);
  void u32(std::uint32_t v);
  void f32(float v);
  void f64(double v);
  // u32 byte length followed by the raw bytes.
  void string(std::string_view s);

  const std::string& buffer() const { return buf_; }

 private:
  std::string buf_;
};

// Bounds-checked little-endian decoder. Every read past the end throws a
// decode error carrying the offending byte offset.
class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  std::string_view bytes(std::size_t n);
  std::uint8_t u8();
  std::uint32_t u32();
  float f32();
  double f64();
  std::string string();

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path);

// Writes to "<path>.tmp" then renames over path.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Splits on '\n', stripping a trailing '\r'. A final empty line is dropped.
std::vector<std::string_view> split_lines(std::string_view text);
std::vector<std::string_view> split_tabs(std::string_view line);

double parse_double(std::string_view field, std::string_view context);
long long parse_int(std::string_view field, std::string_view context);

// Shortest representation that round-trips the double exactly.
std::string format_double(double v);

}  // namespace cortexenc::io
