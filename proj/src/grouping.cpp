#include "glyphcut/grouping.hpp"

#include <cmath>
#include <stdexcept>

namespace glyphcut {

GrayImage crop_header(const Slice& s, const LayoutSpec& spec) {
  if (!s.image.valid()) throw std::invalid_argument("slice has no image");
  const int h = s.image.height;
  int band = static_cast<int>(
      std::ceil(spec.header_band_frac * static_cast<double>(h)));
  band = std::max(1, std::min(band, h));
  return s.image.crop(Box{0, 0, s.image.width, band});
}

bool detect_header(const GrayImage& band, double ink_eps) {
  const BinaryImage bin = binarize(band, BinarizePolicy::otsu());
  return static_cast<double>(bin.ink_count()) >
         ink_eps * static_cast<double>(bin.mask.size());
}

LabelingStats assign_labels(std::vector<Slice>& slices_in_order,
                            OcrAdapter& ocr, const LayoutSpec& spec) {
  LabelingStats stats;
  std::string current;  // empty = no label seen yet
  bool current_usable = false;

  for (Slice& s : slices_in_order) {
    const GrayImage band = crop_header(s, spec);
    const bool present = spec.use_adapter_detect
                             ? ocr.detect(band)
                             : detect_header(band, spec.header_ink_eps);
    if (present) {
      const OcrResult r = ocr.recognize(band);
      std::optional<long long> number;
      const std::string text = clean_header_text(r.text, &number);
      if (text.empty() || r.confidence < kMinRecognitionConfidence) {
        s.label = kUnresolvedLabel;
        s.quarantined = true;
        s.quarantine_reason = text.empty()
                                  ? "header detected but no text recognized"
                                  : "recognition confidence below threshold";
        current.clear();
        current_usable = false;
        ++stats.quarantined;
      } else {
        s.label = text;
        s.category_number = number;
        current = text;
        current_usable = true;
        ++stats.recognized;
      }
    } else {
      if (current_usable) {
        s.label = current;
        ++stats.inherited;
      } else {
        s.label = kUnresolvedLabel;
        s.quarantined = true;
        s.quarantine_reason = "no preceding labeled header";
        ++stats.quarantined;
      }
    }
  }
  return stats;
}

}  // namespace glyphcut
