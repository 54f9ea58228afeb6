#pragma once

#include <cstdint>
#include <vector>

#include "glyphcut/geometry.hpp"

namespace glyphcut {

/// Single-channel 8-bit raster, row-major, 0 = black.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  static GrayImage filled(int w, int h, std::uint8_t value) {
    GrayImage img;
    img.width = w;
    img.height = h;
    img.pixels.assign(static_cast<std::size_t>(w) * h, value);
    return img;
  }

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& at(int x, int y) {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  bool valid() const {
    return width >= 1 && height >= 1 &&
           pixels.size() == static_cast<std::size_t>(width) * height;
  }
  bool operator==(const GrayImage&) const = default;

  GrayImage crop(const Box& b) const;
};

/// Foreground-ink mask; 1 = ink.
struct BinaryImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> mask;

  static BinaryImage filled(int w, int h, bool value) {
    BinaryImage b;
    b.width = w;
    b.height = h;
    b.mask.assign(static_cast<std::size_t>(w) * h, value ? 1 : 0);
    return b;
  }

  bool at(int x, int y) const {
    return mask[static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set(int x, int y, bool v) {
    mask[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
  }
  std::size_t ink_count() const;
  bool operator==(const BinaryImage&) const = default;
};

enum class Polarity { DarkOnLight, LightOnDark };

struct BinarizePolicy {
  enum class Kind { Otsu, Fixed };
  Kind kind = Kind::Otsu;
  int threshold = 128;  // used when kind == Fixed

  static BinarizePolicy otsu() { return BinarizePolicy{}; }
  static BinarizePolicy fixed(int t) {
    return BinarizePolicy{Kind::Fixed, t};
  }
  bool operator==(const BinarizePolicy&) const = default;
};

/// Threshold maximizing between-class variance over the 256-bin histogram.
/// Foreground semantics are p < t; ties break toward the lower threshold,
/// so a constant image yields t = 0 (all background).
int otsu_threshold(const GrayImage& img);

/// LightOnDark iff more than half the pixels have luminance < 128.
Polarity detect_polarity(const GrayImage& img);

/// Inverts LightOnDark images so output is always DarkOnLight. Idempotent.
GrayImage normalize_polarity(const GrayImage& img);

/// Foreground = pixels darker than the threshold after polarity
/// normalization.
BinaryImage binarize(const GrayImage& img, BinarizePolicy policy);

/// Tight bounding box per foreground component, sorted by (y0, x0).
/// connectivity must be 4 or 8.
std::vector<Box> connected_components(const BinaryImage& bin,
                                      int connectivity = 8);

}  // namespace glyphcut
