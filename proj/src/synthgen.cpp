#include "glyphcut/synthgen.hpp"

#include <algorithm>
#include <stdexcept>

#include "glyphcut/rng.hpp"
#include "json.hpp"

namespace glyphcut {

namespace {

using ordered_json = nlohmann::ordered_json;

const std::vector<std::string>& default_labels() {
  static const std::vector<std::string> labels = {
      "木", "安", "国", "日", "月", "山",
      "水", "火", "土", "金", "竹", "石"};
  return labels;
}

void fill_rect(GrayImage& img, const Box& b, std::uint8_t v) {
  for (int y = std::max(0, b.y0); y < std::min(img.height, b.y1); ++y)
    for (int x = std::max(0, b.x0); x < std::min(img.width, b.x1); ++x)
      img.at(x, y) = v;
}

// Connected polyomino on a g x g cell grid containing the (0,0) and
// (g-1,g-1) cells, so its bounding box is the full grid.
std::vector<std::uint8_t> staircase_polyomino(int g, SplitMix64& rng,
                                              int min_cells) {
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(g) * g, 0);
  auto at = [&](int cx, int cy) -> std::uint8_t& {
    return cells[static_cast<std::size_t>(cy) * g + cx];
  };
  int x = 0, y = 0;
  at(0, 0) = 1;
  while (x < g - 1 || y < g - 1) {
    if (x == g - 1) ++y;
    else if (y == g - 1) ++x;
    else if (rng.next() & 1) ++x;
    else ++y;
    at(x, y) = 1;
  }
  int filled = 2 * g - 1;
  while (filled < min_cells) {
    const int before = filled;
    for (int cy = 0; cy < g; ++cy) {
      for (int cx = 0; cx < g; ++cx) {
        if (at(cx, cy)) continue;
        const bool adjacent =
            (cx > 0 && at(cx - 1, cy)) || (cx < g - 1 && at(cx + 1, cy)) ||
            (cy > 0 && at(cx, cy - 1)) || (cy < g - 1 && at(cx, cy + 1));
        if (adjacent && rng.uniform01() < 0.4) {
          at(cx, cy) = 1;
          if (++filled >= min_cells) return cells;
        }
      }
    }
    if (filled == before) break;  // can't grow further
  }
  return cells;
}

void stamp_polyomino(GrayImage& img, int x0, int y0, int g, int cell,
                     const std::vector<std::uint8_t>& cells) {
  for (int cy = 0; cy < g; ++cy)
    for (int cx = 0; cx < g; ++cx)
      if (cells[static_cast<std::size_t>(cy) * g + cx])
        fill_rect(img,
                  Box{x0 + cx * cell, y0 + cy * cell, x0 + (cx + 1) * cell,
                      y0 + (cy + 1) * cell},
                  0);
}

void stamp_bitmap(GrayImage& page, const GrayImage& bitmap, int x0, int y0) {
  for (int y = 0; y < bitmap.height; ++y)
    for (int x = 0; x < bitmap.width; ++x)
      if (bitmap.at(x, y) < 128) page.at(x0 + x, y0 + y) = 0;
}

}  // namespace

std::map<std::string, GrayImage> default_template_set() {
  std::map<std::string, GrayImage> out;
  constexpr int g = 11;
  constexpr int cell = 4;  // 44x44 stamps, box area 1936 < the area filter
  for (const std::string& label : default_labels()) {
    SplitMix64 rng(fnv1a64(label.data(), label.size()));
    // fill enough that a header band clears the ink-fraction test, but
    // keep ink in the minority so the tile binarizes without inversion
    const auto cells = staircase_polyomino(g, rng, 56);
    GrayImage img = GrayImage::filled(g * cell, g * cell, 255);
    stamp_polyomino(img, 0, 0, g, cell, cells);
    out[label] = std::move(img);
  }
  return out;
}

GroundTruthPage render_page(const PageSpec& spec) {
  if (spec.columns < 1 || spec.page_width < 1 || spec.page_height < 1 ||
      spec.min_glyphs < 1 || spec.min_glyphs > spec.max_glyphs ||
      spec.min_blobs < 1 || spec.min_blobs > spec.max_blobs ||
      spec.blob_min_size < 8 || spec.blob_min_size > spec.blob_max_size ||
      spec.noise_rate < 0 || spec.noise_rate > 1)
    throw std::invalid_argument("invalid PageSpec");

  const int H = spec.page_height;
  const int W = spec.page_width;
  const int t = spec.ruling_thickness;
  const int interior_total = W - (spec.columns + 1) * t;
  const int interior = interior_total / spec.columns;
  if (interior < spec.blob_max_size + 8)
    throw std::invalid_argument("columns too narrow for the glyph size");

  // worst-case vertical budget, checked before rendering
  const int body_top = H * 15 / 100;
  const int caption_h = spec.caption_marks ? 28 : 0;
  const int worst_cluster = spec.max_blobs * spec.blob_max_size +
                            (spec.max_blobs - 1) * spec.intra_gap_max;
  const long long worst = static_cast<long long>(body_top) +
                          static_cast<long long>(spec.max_glyphs) *
                              (worst_cluster + caption_h) +
                          static_cast<long long>(spec.max_glyphs - 1) *
                              spec.inter_gap_max +
                          30;
  if (worst > H)
    throw std::invalid_argument("glyphs don't fit the column height");

  const auto templates = default_template_set();
  std::vector<std::string> labels = spec.header_labels;
  if (labels.empty()) labels = default_labels();
  for (const auto& l : labels)
    if (!templates.count(l))
      throw std::invalid_argument("unknown header label " + l);

  SplitMix64 rng(spec.seed);
  GroundTruthPage gt;
  gt.image = GrayImage::filled(W, H, 255);

  // vertical rulings and the resulting column interiors (left to right)
  std::vector<int> ruling_x(spec.columns + 1);
  std::vector<std::pair<int, int>> interiors(spec.columns);
  {
    int x = 0;
    int spare = interior_total - interior * spec.columns;
    for (int c = 0; c <= spec.columns; ++c) {
      ruling_x[c] = x;
      fill_rect(gt.image, Box{x, 0, x + t, H}, 0);
      if (c < spec.columns) {
        int w = interior + (spare > 0 ? 1 : 0);
        if (spare > 0) --spare;
        interiors[c] = {x + t, x + t + w};
        x += t + w;
      }
    }
  }
  // horizontal rules: page borders plus a header separator below the band
  fill_rect(gt.image, Box{0, 0, W, t}, 0);
  fill_rect(gt.image, Box{0, H - t, W, H}, 0);
  const int sep_y = H * 13 / 100;
  fill_rect(gt.image, Box{0, sep_y, W, sep_y + t}, 0);

  // reading order is right to left
  gt.true_slices.resize(spec.columns);
  gt.slice_labels.resize(spec.columns);
  std::string current_label;
  for (int reading = 0; reading < spec.columns; ++reading) {
    const int col = spec.columns - 1 - reading;
    const auto [ix0, ix1] = interiors[col];
    gt.true_slices[reading] = Box{ix0, 0, ix1, H};

    const bool has_header =
        reading == 0 || rng.uniform01() >= spec.header_empty_prob;
    if (has_header) {
      current_label = labels[rng.bounded(labels.size())];
      const GrayImage& stamp = templates.at(current_label);
      const int sx = ix0 + (ix1 - ix0 - stamp.width) / 2;
      stamp_bitmap(gt.image, stamp, sx, 30);
    }
    gt.slice_labels[reading] = current_label;

    const int glyphs = rng.range(spec.min_glyphs, spec.max_glyphs);
    int y = body_top;
    for (int gi = 0; gi < glyphs; ++gi) {
      if (gi > 0) y += rng.range(spec.inter_gap_min, spec.inter_gap_max);
      const int blobs = rng.range(spec.min_blobs, spec.max_blobs);
      Box glyph_box;
      bool first = true;
      int last_center_x = 0, last_bottom = y;
      for (int bi = 0; bi < blobs; ++bi) {
        if (bi > 0) y += rng.range(spec.intra_gap_min, spec.intra_gap_max);
        const int steps =
            (spec.blob_max_size - spec.blob_min_size) / 8;
        const int s = spec.blob_min_size + 8 * rng.range(0, steps);
        const int bx = ix0 + 4 + static_cast<int>(rng.bounded(
                                     static_cast<std::uint64_t>(
                                         std::max(1, ix1 - ix0 - 8 - s))));
        const auto cells = staircase_polyomino(8, rng, 2 * 8 - 1);
        stamp_polyomino(gt.image, bx, y, 8, s / 8, cells);
        const Box blob{bx, y, bx + s, y + s};
        glyph_box = first ? blob : hull(glyph_box, blob);
        first = false;
        last_center_x = bx + s / 2;
        y += s;
        last_bottom = y;
      }
      if (spec.caption_marks) {
        const int cw = 20, ch = 16;
        const int cx = std::clamp(last_center_x - cw / 2, ix0 + 2, ix1 - cw - 2);
        fill_rect(gt.image, Box{cx, last_bottom + 12, cx + cw,
                                last_bottom + 12 + ch}, 0);
        y = last_bottom + 12 + ch;
      }
      gt.true_glyphs.push_back(
          TrueGlyph{glyph_box, current_label, reading, gi});
    }
  }

  if (spec.polarity == Polarity::LightOnDark)
    for (auto& p : gt.image.pixels) p = static_cast<std::uint8_t>(255 - p);
  if (spec.noise_rate > 0)
    for (auto& p : gt.image.pixels)
      if (rng.uniform01() < spec.noise_rate)
        p = (rng.next() & 1) ? 255 : 0;

  return gt;
}

Scores evaluate_extraction(const GroundTruthPage& gt,
                           const std::vector<PredictedGlyph>& predicted,
                           std::optional<int> predicted_slice_count) {
  struct Pair {
    double iou;
    std::size_t pred;
    std::size_t truth;
  };
  std::vector<Pair> pairs;
  for (std::size_t p = 0; p < predicted.size(); ++p)
    for (std::size_t t = 0; t < gt.true_glyphs.size(); ++t) {
      const double v = iou(predicted[p].box_on_page, gt.true_glyphs[t].box_on_page);
      if (v >= 0.5) pairs.push_back(Pair{v, p, t});
    }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.pred != b.pred) return a.pred < b.pred;
    return a.truth < b.truth;
  });
  std::vector<char> pred_used(predicted.size(), 0);
  std::vector<char> truth_used(gt.true_glyphs.size(), 0);
  int matched = 0;
  int labels_right = 0;
  for (const Pair& pr : pairs) {
    if (pred_used[pr.pred] || truth_used[pr.truth]) continue;
    pred_used[pr.pred] = 1;
    truth_used[pr.truth] = 1;
    ++matched;
    if (predicted[pr.pred].category == gt.true_glyphs[pr.truth].category)
      ++labels_right;
  }

  Scores s;
  s.matched = matched;
  s.truth_count = static_cast<int>(gt.true_glyphs.size());
  s.predicted_count = static_cast<int>(predicted.size());
  s.recall = s.truth_count == 0 ? 1.0
                                : static_cast<double>(matched) / s.truth_count;
  s.precision = s.predicted_count == 0
                    ? 1.0
                    : static_cast<double>(matched) / s.predicted_count;
  s.label_accuracy =
      matched == 0 ? 1.0 : static_cast<double>(labels_right) / matched;
  s.slice_count_match =
      predicted_slice_count.has_value() &&
      *predicted_slice_count == static_cast<int>(gt.true_slices.size());
  return s;
}

std::string ground_truth_to_json(const GroundTruthPage& gt) {
  auto box_json = [](const Box& b) {
    return ordered_json{{"x0", b.x0}, {"y0", b.y0}, {"x1", b.x1}, {"y1", b.y1}};
  };
  ordered_json j;
  j["page_id"] = gt.page_id;
  j["true_slices"] = ordered_json::array();
  for (const Box& b : gt.true_slices) j["true_slices"].push_back(box_json(b));
  j["slice_labels"] = gt.slice_labels;
  j["glyphs"] = ordered_json::array();
  for (const TrueGlyph& g : gt.true_glyphs)
    j["glyphs"].push_back(ordered_json{{"box", box_json(g.box_on_page)},
                                       {"category", g.category},
                                       {"slice_index", g.slice_index},
                                       {"rank", g.rank}});
  return j.dump(2) + "\n";
}

GroundTruthPage ground_truth_from_json(const std::string& text) {
  const auto j = ordered_json::parse(text);
  auto box_from = [](const ordered_json& b) {
    return Box{b.at("x0").get<int>(), b.at("y0").get<int>(),
               b.at("x1").get<int>(), b.at("y1").get<int>()};
  };
  GroundTruthPage gt;
  gt.page_id = j.value("page_id", "");
  for (const auto& b : j.at("true_slices")) gt.true_slices.push_back(box_from(b));
  gt.slice_labels = j.at("slice_labels").get<std::vector<std::string>>();
  for (const auto& g : j.at("glyphs"))
    gt.true_glyphs.push_back(TrueGlyph{box_from(g.at("box")),
                                       g.at("category").get<std::string>(),
                                       g.at("slice_index").get<int>(),
                                       g.at("rank").get<int>()});
  return gt;
}

}  // namespace glyphcut
