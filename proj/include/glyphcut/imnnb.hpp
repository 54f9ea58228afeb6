#pragma once

#include <string>
#include <vector>

#include "glyphcut/image.hpp"
#include "glyphcut/layout.hpp"

namespace glyphcut {

struct ImnnbParams {
  long long min_area = 2000;  // square pixels; boxes with area < this drop
  int tau = 150;              // vertical center-distance merge threshold
  int connectivity = 8;       // 4 or 8
  BinarizePolicy binarization = BinarizePolicy::otsu();

  bool valid() const {
    return min_area >= 0 && tau >= 0 &&
           (connectivity == 4 || connectivity == 8);
  }
};

/// One extracted character patch, cropped from the gray slice.
struct GlyphPatch {
  GrayImage image;
  Box box_in_slice;
  std::string page_id;
  int slice_order_index = -1;
  int position_rank = -1;  // top-to-bottom within the slice
};

/// Stage-by-stage box lists, for debug sidecars and tests.
struct ImnnbDiagnostics {
  std::vector<Box> components;
  std::vector<Box> after_stage1;
  std::vector<Box> after_filter;
  std::vector<Box> after_stage2;
};

/// Repeatedly merges the first overlapping pair (scan order (y0,x0)) into
/// its hull until no two boxes overlap. Output pairs all have IoU 0 and
/// every input box is contained in exactly one output box.
std::vector<Box> merge_stage1(std::vector<Box> boxes);

/// Keeps exactly the boxes with area >= min_area, preserving order.
std::vector<Box> filter_small(std::vector<Box> boxes, long long min_area);

/// Repeatedly merges the first adjacent pair (sorted by center y) with
/// vertical center distance < tau into its hull, until all pairs are at
/// least tau apart.
std::vector<Box> merge_stage2(std::vector<Box> boxes, int tau);

/// One patch per box, clamped to slice bounds, ranked by ascending
/// center y.
std::vector<GlyphPatch> extract_patches(const Slice& s,
                                        const std::vector<Box>& boxes);

/// Full extraction for one slice: binarize, connected components, overlap
/// merge, small-area filter, vertical-proximity merge, patch cropping.
std::vector<GlyphPatch> imnnb(const Slice& s, const ImnnbParams& params,
                              ImnnbDiagnostics* diag = nullptr);

}  // namespace glyphcut
