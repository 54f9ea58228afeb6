#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "glyphcut/image.hpp"

namespace glyphcut {

/// Parameters for rendering one tabular dictionary page. Geometric ranges
/// are chosen so a noiseless render is recovered exactly by the default
/// extraction parameters: every glyph blob box has area >= min_area,
/// blobs of one glyph sit closer than tau, distinct glyphs farther apart,
/// caption marks stay below min_area.
struct PageSpec {
  int columns = 4;
  int page_width = 1000;
  int page_height = 3400;
  int min_glyphs = 2;
  int max_glyphs = 6;
  // blob square side, multiple of 8 within this range; keep
  // 2*(blob_max_size + intra_gap_max) < tau or a tall cluster stops
  // chain-merging before its last blob
  int blob_min_size = 48;
  int blob_max_size = 56;
  int min_blobs = 2;
  int max_blobs = 4;
  int intra_gap_min = 8;    // blob edge gap within a glyph
  int intra_gap_max = 16;
  int inter_gap_min = 160;  // blob edge gap between glyphs, > tau
  int inter_gap_max = 200;
  bool caption_marks = true;
  std::vector<std::string> header_labels;  // empty = default template set
  double header_empty_prob = 0.35;         // never applied to the first slice
  double noise_rate = 0.0;                 // salt-and-pepper per pixel
  Polarity polarity = Polarity::DarkOnLight;
  int ruling_thickness = 3;
  int tau = 150;
  long long min_area = 2000;
  std::uint64_t seed = 0;
};

struct TrueGlyph {
  Box box_on_page;
  std::string category;
  int slice_index = -1;  // reading-order index
  int rank = -1;         // top-to-bottom within the slice
};

struct GroundTruthPage {
  std::string page_id;
  GrayImage image;
  std::vector<Box> true_slices;  // reading order, page coordinates
  std::vector<std::string> slice_labels;
  std::vector<TrueGlyph> true_glyphs;
};

/// Deterministic polyomino glyph bitmaps keyed by label; the same set
/// feeds the header stamps and the template matcher.
std::map<std::string, GrayImage> default_template_set();

/// Deterministic for a given spec (including seed). Throws on a spec whose
/// worst-case column content cannot fit the page height.
GroundTruthPage render_page(const PageSpec& spec);

struct PredictedGlyph {
  Box box_on_page;
  std::string category;
};

struct Scores {
  double recall = 0.0;
  double precision = 0.0;
  double label_accuracy = 0.0;
  bool slice_count_match = false;
  int matched = 0;
  int truth_count = 0;
  int predicted_count = 0;
};

/// Greedy one-to-one matching by descending IoU at threshold 0.5.
Scores evaluate_extraction(const GroundTruthPage& gt,
                           const std::vector<PredictedGlyph>& predicted,
                           std::optional<int> predicted_slice_count =
                               std::nullopt);

/// Ground-truth sidecar (de)serialization for the synth/eval commands.
std::string ground_truth_to_json(const GroundTruthPage& gt);
GroundTruthPage ground_truth_from_json(const std::string& text);

}  // namespace glyphcut
