#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "trifuse/errors.hpp"

namespace trifuse {

/// Per-frame binary ground-truth mask: 0 = normal pixel, 255 = abnormal.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  bool abnormal_at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x] != 0;
  }

  std::size_t abnormal_count() const {
    std::size_t n = 0;
    for (const auto p : pixels) {
      if (p != 0) ++n;
    }
    return n;
  }

  bool operator==(const Mask&) const = default;
};

namespace detail {

// Reads one PGM header token, skipping whitespace and '#' comments.
inline std::string pgm_token(std::istream& in, const std::string& file) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) return token;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  if (token.empty()) throw DataError(file + ": truncated PGM header");
  return token;
}

}  // namespace detail

/// Strict binary PGM (P5) reader; only pixel values 0 and 255 are legal.
inline Mask read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  const std::string file = path.string();
  if (!in) throw DataError("cannot open " + file);
  if (detail::pgm_token(in, file) != "P5") {
    throw DataError(file + ": not a binary PGM (P5) file");
  }
  Mask mask;
  try {
    mask.width = std::stoi(detail::pgm_token(in, file));
    mask.height = std::stoi(detail::pgm_token(in, file));
    const int maxval = std::stoi(detail::pgm_token(in, file));
    if (maxval != 255) throw DataError(file + ": PGM maxval must be 255");
  } catch (const std::invalid_argument&) {
    throw DataError(file + ": malformed PGM header");
  } catch (const std::out_of_range&) {
    throw DataError(file + ": malformed PGM header");
  }
  if (mask.width <= 0 || mask.height <= 0) {
    throw DataError(file + ": non-positive PGM dimensions");
  }
  const std::size_t count =
      static_cast<std::size_t>(mask.width) * static_cast<std::size_t>(mask.height);
  mask.pixels.resize(count);
  in.read(reinterpret_cast<char*>(mask.pixels.data()),
          static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count) {
    throw DataError(file + ": truncated PGM payload at byte " +
                    std::to_string(in.gcount()));
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (mask.pixels[i] != 0 && mask.pixels[i] != 255) {
      throw DataError(file + ": mask pixel " + std::to_string(i) +
                      " is neither 0 nor 255");
    }
  }
  return mask;
}

inline void write_pgm(const Mask& mask, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << "P5\n" << mask.width << ' ' << mask.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(mask.pixels.data()),
            static_cast<std::streamsize>(mask.pixels.size()));
  if (!out.flush()) throw DataError("write failed: " + path.string());
}

}  // namespace trifuse
