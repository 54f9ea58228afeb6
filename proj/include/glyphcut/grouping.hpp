#pragma once

#include <string>
#include <vector>

#include "glyphcut/layout.hpp"
#include "glyphcut/ocr.hpp"

namespace glyphcut {

/// Label given to slices that have no preceding non-empty header to
/// inherit from, or whose header could not be recognized.
inline constexpr const char* kUnresolvedLabel = "UNRESOLVED";

/// Recognition below this confidence quarantines the slice.
inline constexpr double kMinRecognitionConfidence = 0.5;

/// Top band of the slice image; band height = ceil(frac * height), at
/// least one row.
GrayImage crop_header(const Slice& s, const LayoutSpec& spec);

/// True iff the binarized band's ink fraction exceeds ink_eps.
bool detect_header(const GrayImage& band, double ink_eps = 0.005);

struct LabelingStats {
  int recognized = 0;
  int inherited = 0;
  int quarantined = 0;
};

/// Walks slices in reading order; a slice with a non-empty header gets the
/// recognized text as its label, empty-header slices inherit the nearest
/// preceding label. Slices are never dropped or reordered; failures are
/// quarantined in place with kUnresolvedLabel.
LabelingStats assign_labels(std::vector<Slice>& slices_in_order,
                            OcrAdapter& ocr, const LayoutSpec& spec);

}  // namespace glyphcut
