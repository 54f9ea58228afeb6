#pragma once

#include <bitset>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "glyphcut/image.hpp"

namespace glyphcut {

struct OcrResult {
  std::string text;  // empty = no text found
  double confidence = 0.0;
};

/// Recognizer contract for header bands. Implementations must be
/// deterministic for identical input bytes.
class OcrAdapter {
 public:
  virtual ~OcrAdapter() = default;
  virtual bool detect(const GrayImage& band) = 0;
  virtual OcrResult recognize(const GrayImage& band) = 0;
};

/// Closed-vocabulary matcher: binarize, tight-crop the ink (ignoring
/// components under min_component_px, which rejects speckle), resize to
/// 32x32 and pick the nearest template by Hamming distance.
/// Confidence = 1 - distance/1024.
class TemplateMatcher : public OcrAdapter {
 public:
  static constexpr int kSide = 32;
  using Signature = std::bitset<kSide * kSide>;

  explicit TemplateMatcher(const std::map<std::string, GrayImage>& templates,
                           int min_component_px = 8);
  /// Loads every *.png in the directory; the label is the file stem.
  static TemplateMatcher from_directory(const std::string& dir,
                                        int min_component_px = 8);

  bool detect(const GrayImage& band) override;
  OcrResult recognize(const GrayImage& band) override;

  /// Exposed for tests: empty optional when the image has no usable ink.
  std::optional<Signature> signature(const GrayImage& img) const;

 private:
  struct Entry {
    std::string label;
    Signature bits;
  };
  std::vector<Entry> entries_;  // sorted by label for deterministic ties
  int min_component_px_;
};

/// Spawns a configured command per band:
///   argv = [command..., absolute-image-path]
/// stdout line 1 = recognized text (UTF-8, may be empty), optional line 2 =
/// confidence in [0,1]; nonzero exit = detection failure. Concurrent child
/// processes are bounded by max_concurrency.
class ExternalProcessOcr : public OcrAdapter {
 public:
  explicit ExternalProcessOcr(std::vector<std::string> command,
                              int max_concurrency = 4);
  ~ExternalProcessOcr() override;

  bool detect(const GrayImage& band) override;
  OcrResult recognize(const GrayImage& band) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Header cleanup: strips ASCII digits, punctuation and whitespace, keeps
/// the first remaining character cluster. Digits, when present, are parsed
/// into number_out as the book-assigned category number.
std::string clean_header_text(const std::string& raw,
                              std::optional<long long>* number_out = nullptr);

}  // namespace glyphcut
