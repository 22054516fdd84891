#pragma once

#include <cstdint>

namespace trifuse {

/// Axis-aligned pixel rectangle, origin at the top-left corner.
struct BoundingBox {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool operator==(const BoundingBox&) const = default;
};

inline std::int64_t box_area(const BoundingBox& b) {
  return static_cast<std::int64_t>(b.width) * b.height;
}

/// True when the box is non-empty and lies fully inside a frame of the
/// given dimensions.
inline bool box_in_frame(const BoundingBox& b, int frame_width, int frame_height) {
  return b.width > 0 && b.height > 0 && b.x >= 0 && b.y >= 0 &&
         b.x + b.width <= frame_width && b.y + b.height <= frame_height;
}

}  // namespace trifuse
