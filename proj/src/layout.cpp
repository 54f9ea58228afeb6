#include "glyphcut/layout.hpp"

#include <algorithm>
#include <stdexcept>

namespace glyphcut {

namespace {

struct Run {
  int start = -1;  // first foreground index, -1 = no run
  int end = -1;    // last foreground index, inclusive
  int length() const { return start < 0 ? 0 : end - start + 1; }
};

// Longest foreground run along a line, bridging background gaps up to
// max_gap pixels.
Run longest_run(const BinaryImage& bin, int fixed, bool vertical,
                int max_gap) {
  const int n = vertical ? bin.height : bin.width;
  Run best, cur;
  int gap = 0;
  for (int i = 0; i < n; ++i) {
    const bool fg = vertical ? bin.at(fixed, i) : bin.at(i, fixed);
    if (fg) {
      if (cur.start < 0) cur.start = i;
      cur.end = i;
      gap = 0;
    } else if (cur.start >= 0) {
      if (++gap > max_gap) {
        if (cur.length() > best.length()) best = cur;
        cur = Run{};
        gap = 0;
      }
    }
  }
  if (cur.length() > best.length()) best = cur;
  return best;
}

std::vector<Box> scan_rulings(const BinaryImage& bin, const LayoutSpec& spec,
                              bool vertical) {
  const int lanes = vertical ? bin.width : bin.height;
  const int span = vertical ? bin.height : bin.width;
  const double need = spec.min_ruling_length_frac * span;

  std::vector<Run> runs(lanes);
  std::vector<char> qualifies(lanes, 0);
  for (int i = 0; i < lanes; ++i) {
    runs[i] = longest_run(bin, i, vertical, spec.max_ruling_gap);
    qualifies[i] = runs[i].length() >= need ? 1 : 0;
  }

  std::vector<Box> out;
  int i = 0;
  while (i < lanes) {
    if (!qualifies[i]) {
      ++i;
      continue;
    }
    int j = i;
    int lo = runs[i].start, hi = runs[i].end;
    while (j + 1 < lanes && qualifies[j + 1]) {
      ++j;
      lo = std::min(lo, runs[j].start);
      hi = std::max(hi, runs[j].end);
    }
    const int thickness = j - i + 1;
    if (thickness <= spec.max_ruling_thickness) {
      if (vertical)
        out.push_back(Box{i, lo, j + 1, hi + 1});
      else
        out.push_back(Box{lo, i, hi + 1, j + 1});
    }
    i = j + 1;
  }
  return out;
}

}  // namespace

Rulings detect_rulings(const BinaryImage& bin, const LayoutSpec& spec) {
  if (!spec.valid()) throw std::invalid_argument("invalid LayoutSpec");
  Rulings r;
  r.vertical = scan_rulings(bin, spec, true);
  r.horizontal = scan_rulings(bin, spec, false);
  return r;
}

CropResult crop_slices(const GrayImage& page, const std::string& page_id,
                       const LayoutSpec& spec, BinarizePolicy policy) {
  if (!page.valid()) throw std::invalid_argument("invalid page image");
  const BinaryImage bin = binarize(page, policy);
  const Rulings rulings = detect_rulings(bin, spec);
  const std::uint8_t bg =
      detect_polarity(page) == Polarity::LightOnDark ? 0 : 255;

  CropResult result;
  if (rulings.vertical.empty()) {
    Slice s;
    s.page_id = page_id;
    s.box_on_page = Box{0, 0, page.width, page.height};
    s.image = page;
    result.slices.push_back(std::move(s));
    result.whole_page_fallback = true;
    return result;
  }

  for (std::size_t i = 0; i + 1 < rulings.vertical.size(); ++i) {
    const int x_left = rulings.vertical[i].x1;
    const int x_right = rulings.vertical[i + 1].x0;
    if (x_right - x_left < spec.min_slice_width) continue;
    Slice s;
    s.page_id = page_id;
    s.box_on_page = Box{x_left, 0, x_right, page.height};
    s.image = page.crop(s.box_on_page);
    // erase horizontal rule pixels so they don't become components later
    for (const Box& h : rulings.horizontal) {
      const int hx0 = std::max(h.x0, x_left);
      const int hx1 = std::min(h.x1, x_right);
      for (int y = h.y0; y < h.y1; ++y)
        for (int x = hx0; x < hx1; ++x) s.image.at(x - x_left, y) = bg;
    }
    result.slices.push_back(std::move(s));
  }
  return result;
}

std::vector<Slice> order_slices(std::vector<Slice> slices,
                                const LayoutSpec& spec) {
  const bool rtl = spec.reading_direction == ReadingDirection::RightToLeft;
  std::stable_sort(slices.begin(), slices.end(),
                   [rtl](const Slice& a, const Slice& b) {
                     if (a.box_on_page.x0 != b.box_on_page.x0)
                       return rtl ? a.box_on_page.x0 > b.box_on_page.x0
                                  : a.box_on_page.x0 < b.box_on_page.x0;
                     return a.box_on_page.y0 < b.box_on_page.y0;
                   });
  for (std::size_t i = 0; i < slices.size(); ++i)
    slices[i].order_index = static_cast<int>(i);
  return slices;
}

}  // namespace glyphcut
