#pragma once

#include <cstdint>
#include <vector>

namespace pickdrop {

// Pixel-aligned rectangle, x/y inclusive top-left corner.
struct PixelBox {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool empty() const { return width <= 0 || height <= 0; }
  bool contains(int px, int py) const {
    return px >= x && px < x + width && py >= y && py < y + height;
  }
};

// Binary segmentation mask. On the wire it is run-length encoded over
// row-major pixel order: counts of alternating 0/1 runs, starting with the
// number of leading zeros (which may be 0). The counts must sum to
// width * height.
class PixelMask {
 public:
  PixelMask() = default;
  PixelMask(int width, int height)
      : width_(width), height_(height), data_(size_t(width) * height, 0) {}

  static PixelMask from_rle(int width, int height,
                            const std::vector<std::uint32_t>& counts);
  std::vector<std::uint32_t> to_rle() const;

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  bool at(int x, int y) const { return data_[size_t(y) * width_ + x] != 0; }
  void set(int x, int y, bool value = true) {
    data_[size_t(y) * width_ + x] = value ? 1 : 0;
  }

  // Number of set pixels.
  std::int64_t count() const;

  // Tight bounding box over set pixels; an empty box when no pixel is set.
  PixelBox bounding_box() const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

}  // namespace pickdrop
