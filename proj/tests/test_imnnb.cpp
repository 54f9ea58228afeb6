#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>

#include "glyphcut/imnnb.hpp"
#include "glyphcut/rng.hpp"

using namespace glyphcut;

namespace {

std::vector<Box> sorted_boxes(std::vector<Box> boxes) {
  std::sort(boxes.begin(), boxes.end(), [](const Box& a, const Box& b) {
    return std::tuple(a.y0, a.x0, a.y1, a.x1) <
           std::tuple(b.y0, b.x0, b.y1, b.x1);
  });
  return boxes;
}

// all-orders overlap-merge fixpoints, for confluence checking
void all_fixpoints(std::vector<Box> boxes, std::set<std::vector<Box>>& out,
                   std::set<std::vector<Box>>& seen) {
  boxes = sorted_boxes(std::move(boxes));
  if (!seen.insert(boxes).second) return;
  bool any = false;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    for (std::size_t j = i + 1; j < boxes.size(); ++j) {
      if (!overlaps(boxes[i], boxes[j])) continue;
      any = true;
      std::vector<Box> next;
      for (std::size_t k = 0; k < boxes.size(); ++k)
        if (k != i && k != j) next.push_back(boxes[k]);
      next.push_back(hull(boxes[i], boxes[j]));
      all_fixpoints(std::move(next), out, seen);
    }
  }
  if (!any) out.insert(boxes);
}

Box random_box(SplitMix64& rng, int bound, int max_side) {
  const int x0 = rng.range(0, bound - 2);
  const int y0 = rng.range(0, bound - 2);
  const int w = rng.range(1, std::min(max_side, bound - 1 - x0));
  const int h = rng.range(1, std::min(max_side, bound - 1 - y0));
  return Box{x0, y0, x0 + w, y0 + h};
}

Slice slice_from(GrayImage img) {
  Slice s;
  s.page_id = "p";
  s.order_index = 0;
  s.box_on_page = Box{0, 0, img.width, img.height};
  s.image = std::move(img);
  return s;
}

}  // namespace

TEST_CASE("merge_stage1 collapses overlapping boxes into hulls") {
  SUBCASE("one overlapping pair") {
    const auto out = merge_stage1(
        {Box{0, 0, 10, 10}, Box{5, 5, 15, 15}, Box{100, 100, 110, 110}});
    CHECK(sorted_boxes(out) ==
          std::vector<Box>{Box{0, 0, 15, 15}, Box{100, 100, 110, 110}});
  }
  SUBCASE("empty input") { CHECK(merge_stage1({}).empty()); }
  SUBCASE("chain merges transitively, same result in every order") {
    const std::vector<Box> chain{Box{0, 0, 10, 10}, Box{8, 0, 18, 10},
                                 Box{16, 0, 26, 10}};
    const auto out = merge_stage1(chain);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == Box{0, 0, 26, 10});
    std::set<std::vector<Box>> fixpoints, seen;
    all_fixpoints(chain, fixpoints, seen);
    REQUIRE(fixpoints.size() == 1);
    CHECK(*fixpoints.begin() == out);
  }
}

TEST_CASE("merge_stage1 postconditions on random inputs") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Box> input;
    const int n = rng.range(0, 20);
    for (int i = 0; i < n; ++i) input.push_back(random_box(rng, 500, 120));
    const auto out = merge_stage1(input);
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t j = i + 1; j < out.size(); ++j)
        CHECK(iou(out[i], out[j]) == 0.0);
    for (const Box& b : input) {
      int containers = 0;
      for (const Box& o : out)
        if (contains(o, b)) ++containers;
      CHECK(containers >= 1);
    }
    CHECK(sorted_boxes(merge_stage1(out)) == sorted_boxes(out));
  }
}

TEST_CASE("filter_small keeps boxes at or above the threshold") {
  CHECK(filter_small({Box{0, 0, 40, 50}}, 2000) ==
        std::vector<Box>{Box{0, 0, 40, 50}});  // area exactly 2000 survives
  CHECK(filter_small({Box{0, 0, 40, 49}}, 2000).empty());  // area 1960
  const std::vector<Box> boxes{Box{0, 0, 1, 1}, Box{5, 5, 6, 6}};
  CHECK(filter_small(boxes, 0) == boxes);
}

TEST_CASE("merge_stage2 merges on vertical center distance") {
  SUBCASE("delta 140 below tau 150 merges") {
    const auto out = merge_stage2(
        {Box{0, 80, 40, 120}, Box{0, 220, 40, 260}}, 150);  // centers 100, 240
    REQUIRE(out.size() == 1);
    CHECK(out[0] == Box{0, 80, 40, 260});
  }
  SUBCASE("delta exactly tau does not merge") {
    const auto out = merge_stage2(
        {Box{0, 80, 40, 120}, Box{0, 230, 40, 270}}, 150);  // centers 100, 250
    CHECK(out.size() == 2);
  }
  SUBCASE("single box unchanged") {
    CHECK(merge_stage2({Box{1, 2, 3, 4}}, 150) ==
          std::vector<Box>{Box{1, 2, 3, 4}});
  }
}

TEST_CASE("merge_stage2 postconditions on random inputs") {
  SplitMix64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Box> input;
    const int n = rng.range(0, 15);
    for (int i = 0; i < n; ++i) {
      const int y0 = rng.range(0, 2000);
      input.push_back(Box{0, y0, rng.range(10, 80), y0 + rng.range(10, 80)});
    }
    const int tau = 150;
    const auto out = merge_stage2(input, tau);
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t j = i + 1; j < out.size(); ++j)
        CHECK(std::abs(center(out[i]).y - center(out[j]).y) >= tau);
    for (const Box& b : input) {
      bool contained = false;
      for (const Box& o : out) contained = contained || contains(o, b);
      CHECK(contained);
    }
    CHECK(sorted_boxes(merge_stage2(out, tau)) == sorted_boxes(out));
  }
}

TEST_CASE("extract_patches crops and ranks") {
  GrayImage img = GrayImage::filled(200, 800, 255);
  for (int y = 0; y < 60; ++y)
    for (int x = 0; x < 50; ++x) img.at(x, y) = 42;
  const Slice s = slice_from(img);

  SUBCASE("pixels are bit-equal to the region") {
    const auto patches = extract_patches(s, {Box{0, 0, 50, 60}});
    REQUIRE(patches.size() == 1);
    CHECK(patches[0].image.width == 50);
    CHECK(patches[0].image.height == 60);
    CHECK(patches[0].image == s.image.crop(Box{0, 0, 50, 60}));
  }
  SUBCASE("empty box list") { CHECK(extract_patches(s, {}).empty()); }
  SUBCASE("rank follows center y") {
    const auto patches = extract_patches(
        s, {Box{0, 380, 50, 420}, Box{0, 80, 50, 120}});
    REQUIRE(patches.size() == 2);
    CHECK(patches[0].box_in_slice.y0 == 80);
    CHECK(patches[0].position_rank == 0);
    CHECK(patches[1].box_in_slice.y0 == 380);
    CHECK(patches[1].position_rank == 1);
  }
  SUBCASE("boxes are clamped to the slice") {
    const auto patches = extract_patches(s, {Box{-5, -10, 60, 900}});
    REQUIRE(patches.size() == 1);
    CHECK(patches[0].box_in_slice == Box{0, 0, 60, 800});
  }
}

TEST_CASE("imnnb end to end on constructed slices") {
  SUBCASE("blank slice") {
    const Slice s = slice_from(GrayImage::filled(200, 800, 255));
    CHECK(imnnb(s, ImnnbParams{}).empty());
  }
  SUBCASE("single solid glyph") {
    GrayImage img = GrayImage::filled(200, 800, 255);
    for (int y = 10; y < 110; ++y)
      for (int x = 10; x < 110; ++x) img.at(x, y) = 0;
    const auto patches = imnnb(slice_from(img), ImnnbParams{});
    REQUIRE(patches.size() == 1);
    CHECK(patches[0].box_in_slice == Box{10, 10, 110, 110});
  }
  SUBCASE("two-blob glyph merges, caption mark is filtered") {
    GrayImage img = GrayImage::filled(200, 900, 255);
    auto block = [&](int x0, int y0, int w, int h) {
      for (int y = y0; y < y0 + h; ++y)
        for (int x = x0; x < x0 + w; ++x) img.at(x, y) = 0;
    };
    block(20, 50, 60, 60);    // blob 1
    block(30, 130, 60, 60);   // blob 2, center distance 80 < tau
    block(40, 205, 20, 16);   // caption, area 320 < 2000
    block(20, 500, 70, 70);   // second glyph, far below
    ImnnbDiagnostics diag;
    const auto patches = imnnb(slice_from(img), ImnnbParams{}, &diag);
    REQUIRE(patches.size() == 2);
    CHECK(patches[0].box_in_slice == Box{20, 50, 90, 190});
    CHECK(patches[1].box_in_slice == Box{20, 500, 90, 570});
    CHECK(diag.components.size() == 4);
    CHECK(diag.after_filter.size() == 3);
  }
  SUBCASE("identical input gives identical output") {
    GrayImage img = GrayImage::filled(200, 800, 128);
    for (int y = 100; y < 180; ++y)
      for (int x = 50; x < 130; ++x) img.at(x, y) = 5;
    const auto a = imnnb(slice_from(img), ImnnbParams{});
    const auto b = imnnb(slice_from(img), ImnnbParams{});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].box_in_slice == b[i].box_in_slice);
      CHECK(a[i].image == b[i].image);
    }
  }
}

TEST_CASE("stage 1 is confluent on small random instances") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Box> input;
    const int n = rng.range(0, 6);
    for (int i = 0; i < n; ++i) input.push_back(random_box(rng, 100, 60));
    std::set<std::vector<Box>> fixpoints, seen;
    all_fixpoints(input, fixpoints, seen);
    REQUIRE(fixpoints.size() == 1);
    CHECK(*fixpoints.begin() == sorted_boxes(merge_stage1(input)));
  }
}
