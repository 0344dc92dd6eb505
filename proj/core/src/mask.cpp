#include "pickdrop/mask.hpp"

#include <algorithm>

#include "pickdrop/errors.hpp"

namespace pickdrop {

PixelMask PixelMask::from_rle(int width, int height,
                              const std::vector<std::uint32_t>& counts) {
  if (width <= 0 || height <= 0) {
    throw InvalidArgumentError("mask: non-positive dimensions");
  }
  PixelMask mask(width, height);
  const std::uint64_t total = std::uint64_t(width) * height;
  std::uint64_t pos = 0;
  bool value = false;  // runs start with zeros
  for (const std::uint32_t run : counts) {
    if (pos + run > total) {
      throw ParseError("mask: RLE counts exceed width*height");
    }
    if (value) {
      std::fill(mask.data_.begin() + pos, mask.data_.begin() + pos + run, 1);
    }
    pos += run;
    value = !value;
  }
  if (pos != total) {
    throw ParseError("mask: RLE counts do not cover width*height");
  }
  return mask;
}

std::vector<std::uint32_t> PixelMask::to_rle() const {
  std::vector<std::uint32_t> counts;
  bool value = false;
  std::uint32_t run = 0;
  for (const std::uint8_t px : data_) {
    const bool bit = px != 0;
    if (bit == value) {
      ++run;
    } else {
      counts.push_back(run);
      value = bit;
      run = 1;
    }
  }
  counts.push_back(run);
  return counts;
}

std::int64_t PixelMask::count() const {
  return std::count_if(data_.begin(), data_.end(),
                       [](std::uint8_t v) { return v != 0; });
}

PixelBox PixelMask::bounding_box() const {
  int min_x = width_, min_y = height_, max_x = -1, max_y = -1;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (!at(x, y)) continue;
      min_x = std::min(min_x, x);
      min_y = std::min(min_y, y);
      max_x = std::max(max_x, x);
      max_y = std::max(max_y, y);
    }
  }
  if (max_x < 0) return PixelBox{};
  return PixelBox{min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
}

}  // namespace pickdrop
