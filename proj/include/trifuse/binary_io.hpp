#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "trifuse/errors.hpp"

namespace trifuse::detail {

// Little-endian binary writer; values are composed byte by byte so the host
// endianness never leaks into the files.
class ByteWriter {
 public:
  explicit ByteWriter(const std::filesystem::path& path)
      : path_(path.string()), out_(path, std::ios::binary) {
    if (!out_) throw DataError("cannot open " + path_ + " for writing");
  }

  void magic(const char (&tag)[5]) { raw(tag, 4); }

  void u32(std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    raw(b, 4);
  }

  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    u32(static_cast<std::uint32_t>(bits & 0xffffffffu));
    u32(static_cast<std::uint32_t>(bits >> 32));
  }

  void finish() {
    if (!out_.flush()) throw DataError("write failed: " + path_);
  }

 private:
  void raw(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  }

  std::string path_;
  std::ofstream out_;
};

// Little-endian binary reader; failures report the byte offset of the
// truncation or mismatch.
class ByteReader {
 public:
  explicit ByteReader(const std::filesystem::path& path)
      : path_(path.string()), in_(path, std::ios::binary) {
    if (!in_) throw DataError("cannot open " + path_);
  }

  void expect_magic(const char (&tag)[5]) {
    char buf[4];
    raw(buf, 4);
    if (std::memcmp(buf, tag, 4) != 0) {
      throw DataError(path_ + ": bad magic, expected '" + tag + "'");
    }
  }

  std::uint32_t u32() {
    unsigned char b[4];
    raw(b, 4);
    return static_cast<std::uint32_t>(b[0]) |
           (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
  }

  float f32() { return std::bit_cast<float>(u32()); }

  double f64() {
    const auto lo = static_cast<std::uint64_t>(u32());
    const auto hi = static_cast<std::uint64_t>(u32());
    return std::bit_cast<double>(lo | (hi << 32));
  }

  void expect_eof() {
    if (in_.peek() != EOF) {
      throw DataError(path_ + ": trailing bytes after offset " +
                      std::to_string(offset_));
    }
  }

  std::size_t offset() const { return offset_; }
  const std::string& path() const { return path_; }

 private:
  void raw(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw DataError(path_ + ": truncated payload at byte " +
                      std::to_string(offset_ + static_cast<std::size_t>(in_.gcount())));
    }
    offset_ += n;
  }

  std::string path_;
  std::ifstream in_;
  std::size_t offset_ = 0;
};

}  // namespace trifuse::detail
