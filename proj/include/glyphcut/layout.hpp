#pragma once

#include <optional>
#include <string>
#include <vector>

#include "glyphcut/image.hpp"

namespace glyphcut {

enum class ReadingDirection { RightToLeft, LeftToRight };

/// Per-book layout parameters. Serializable as JSON (see layout_json.cpp).
struct LayoutSpec {
  ReadingDirection reading_direction = ReadingDirection::RightToLeft;
  double min_ruling_length_frac = 0.6;
  int max_ruling_thickness = 8;
  // Background dropouts up to this many pixels are bridged when measuring a
  // ruling run; degraded scans break long runs with isolated specks.
  int max_ruling_gap = 2;
  double header_band_frac = 0.12;
  int min_slice_width = 40;
  double header_ink_eps = 0.005;
  bool use_adapter_detect = false;

  bool valid() const {
    return min_ruling_length_frac > 0 && min_ruling_length_frac <= 1.0 &&
           header_band_frac > 0 && header_band_frac <= 1.0 &&
           max_ruling_thickness >= 1 && min_slice_width >= 1 &&
           max_ruling_gap >= 0 && header_ink_eps >= 0;
  }
};

/// A cropped vertical strip of a page in reading order.
struct Slice {
  std::string page_id;
  GrayImage image;
  Box box_on_page;
  int order_index = -1;  // unset until order_slices
  std::optional<std::string> label;
  std::optional<long long> category_number;
  bool quarantined = false;
  std::string quarantine_reason;
};

struct Rulings {
  std::vector<Box> vertical;
  std::vector<Box> horizontal;
};

/// Finds straight axis-aligned table rules by run-length scanning. A
/// vertical ruling is a group of adjacent columns whose longest
/// (gap-bridged) foreground run spans at least min_ruling_length_frac of
/// the page height, with total thickness at most max_ruling_thickness.
Rulings detect_rulings(const BinaryImage& bin, const LayoutSpec& spec);

struct CropResult {
  std::vector<Slice> slices;
  // True when no vertical rulings were found and the whole page was
  // returned as a single slice.
  bool whole_page_fallback = false;
};

/// Cuts the page into full-height strips between consecutive vertical
/// rulings. Ruling pixels are excluded from strip interiors; strips
/// narrower than min_slice_width are dropped. order_index is left unset.
CropResult crop_slices(const GrayImage& page, const std::string& page_id,
                       const LayoutSpec& spec,
                       BinarizePolicy policy = BinarizePolicy::otsu());

/// Assigns order_index 0..n-1 by reading direction (descending x0 for
/// right-to-left), stable tie-break by y0.
std::vector<Slice> order_slices(std::vector<Slice> slices,
                                const LayoutSpec& spec);

}  // namespace glyphcut
