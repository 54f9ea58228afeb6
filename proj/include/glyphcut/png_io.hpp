#pragma once

#include <string>

#include "glyphcut/image.hpp"

namespace glyphcut {

/// Loads any libpng-readable file as 8-bit grayscale. Color inputs are
/// converted with the Rec. 601 luminance weights, rounded to nearest.
GrayImage load_gray_png(const std::string& path);

/// Writes an 8-bit grayscale PNG. Output bytes are deterministic for
/// identical pixel content.
void save_gray_png(const std::string& path, const GrayImage& img);

}  // namespace glyphcut
