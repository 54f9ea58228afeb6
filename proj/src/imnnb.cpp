#include "glyphcut/imnnb.hpp"

#include <algorithm>
#include <stdexcept>

namespace glyphcut {

namespace {

bool scan_order(const Box& a, const Box& b) {
  if (a.y0 != b.y0) return a.y0 < b.y0;
  if (a.x0 != b.x0) return a.x0 < b.x0;
  if (a.y1 != b.y1) return a.y1 < b.y1;
  return a.x1 < b.x1;
}

bool center_y_order(const Box& a, const Box& b) {
  const int ca = center(a).y;
  const int cb = center(b).y;
  if (ca != cb) return ca < cb;
  return scan_order(a, b);
}

}  // namespace

std::vector<Box> merge_stage1(std::vector<Box> boxes) {
  bool merged = true;
  while (merged) {
    merged = false;
    std::sort(boxes.begin(), boxes.end(), scan_order);
    for (std::size_t i = 0; i < boxes.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < boxes.size(); ++j) {
        if (overlaps(boxes[i], boxes[j])) {
          boxes[i] = hull(boxes[i], boxes[j]);
          boxes.erase(boxes.begin() + static_cast<std::ptrdiff_t>(j));
          merged = true;
          break;
        }
      }
    }
  }
  return boxes;
}

std::vector<Box> filter_small(std::vector<Box> boxes, long long min_area) {
  std::erase_if(boxes, [min_area](const Box& b) { return area(b) < min_area; });
  return boxes;
}

std::vector<Box> merge_stage2(std::vector<Box> boxes, int tau) {
  bool merged = true;
  while (merged) {
    merged = false;
    std::sort(boxes.begin(), boxes.end(), center_y_order);
    for (std::size_t i = 0; i + 1 < boxes.size(); ++i) {
      if (center(boxes[i + 1]).y - center(boxes[i]).y < tau) {
        boxes[i] = hull(boxes[i], boxes[i + 1]);
        boxes.erase(boxes.begin() + static_cast<std::ptrdiff_t>(i + 1));
        merged = true;
        break;
      }
    }
  }
  return boxes;
}

std::vector<GlyphPatch> extract_patches(const Slice& s,
                                        const std::vector<Box>& boxes) {
  if (!s.image.valid()) throw std::invalid_argument("slice has no image");
  std::vector<Box> clamped;
  clamped.reserve(boxes.size());
  for (Box b : boxes) {
    b.x0 = std::max(0, b.x0);
    b.y0 = std::max(0, b.y0);
    b.x1 = std::min(s.image.width, b.x1);
    b.y1 = std::min(s.image.height, b.y1);
    if (b.valid()) clamped.push_back(b);
  }
  std::sort(clamped.begin(), clamped.end(), center_y_order);

  std::vector<GlyphPatch> patches;
  patches.reserve(clamped.size());
  for (std::size_t i = 0; i < clamped.size(); ++i) {
    GlyphPatch p;
    p.box_in_slice = clamped[i];
    p.image = s.image.crop(clamped[i]);
    p.page_id = s.page_id;
    p.slice_order_index = s.order_index;
    p.position_rank = static_cast<int>(i);
    patches.push_back(std::move(p));
  }
  return patches;
}

std::vector<GlyphPatch> imnnb(const Slice& s, const ImnnbParams& params,
                              ImnnbDiagnostics* diag) {
  if (!params.valid()) throw std::invalid_argument("invalid ImnnbParams");
  const BinaryImage bin = binarize(s.image, params.binarization);
  std::vector<Box> boxes = connected_components(bin, params.connectivity);
  if (diag) diag->components = boxes;
  boxes = merge_stage1(std::move(boxes));
  if (diag) diag->after_stage1 = boxes;
  boxes = filter_small(std::move(boxes), params.min_area);
  if (diag) diag->after_filter = boxes;
  boxes = merge_stage2(std::move(boxes), params.tau);
  if (diag) diag->after_stage2 = boxes;
  return extract_patches(s, boxes);
}

}  // namespace glyphcut
