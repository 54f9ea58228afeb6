#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace glyphcut {

/// Axis-aligned pixel rectangle, half-open on both axes: [x0,x1) x [y0,y1).
/// Origin is the top-left corner, y grows downward.
struct Box {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  bool valid() const { return x0 < x1 && y0 < y1; }
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }

  bool operator==(const Box&) const = default;
  auto operator<=>(const Box&) const = default;
};

struct Point {
  int x = 0;
  int y = 0;
  bool operator==(const Point&) const = default;
};

inline long long area(const Box& b) {
  return static_cast<long long>(b.width()) * b.height();
}

inline Point center(const Box& b) {
  // floor division; coordinates are non-negative in practice but keep it
  // correct for negative values too
  auto fdiv2 = [](int a) { return a >= 0 ? a / 2 : -((-a + 1) / 2); };
  return Point{fdiv2(b.x0 + b.x1), fdiv2(b.y0 + b.y1)};
}

inline long long intersection_area(const Box& a, const Box& b) {
  const int ix0 = std::max(a.x0, b.x0);
  const int iy0 = std::max(a.y0, b.y0);
  const int ix1 = std::min(a.x1, b.x1);
  const int iy1 = std::min(a.y1, b.y1);
  if (ix0 >= ix1 || iy0 >= iy1) return 0;
  return static_cast<long long>(ix1 - ix0) * (iy1 - iy0);
}

/// True iff the intersection has positive area. Boxes that only share an
/// edge or a corner do not overlap.
inline bool overlaps(const Box& a, const Box& b) {
  return intersection_area(a, b) > 0;
}

inline double iou(const Box& a, const Box& b) {
  const long long inter = intersection_area(a, b);
  if (inter == 0) return 0.0;
  const long long uni = area(a) + area(b) - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

inline Box hull(const Box& a, const Box& b) {
  return Box{std::min(a.x0, b.x0), std::min(a.y0, b.y0),
             std::max(a.x1, b.x1), std::max(a.y1, b.y1)};
}

inline bool contains(const Box& outer, const Box& inner) {
  return outer.x0 <= inner.x0 && outer.y0 <= inner.y0 &&
         outer.x1 >= inner.x1 && outer.y1 >= inner.y1;
}

/// Historical script period. Folder tokens follow the corpus layout.
enum class Era { Obc, Bi, Ss, Sac, Wsc, Cs };

enum class SourceKind { Book, Website };

inline std::string_view era_token(Era e) {
  switch (e) {
    case Era::Obc: return "Oracle";
    case Era::Bi: return "Bronze";
    case Era::Ss: return "Seal";
    case Era::Sac: return "SprAut";
    case Era::Wsc: return "War";
    case Era::Cs: return "Clerical";
  }
  throw std::logic_error("bad Era");
}

inline std::optional<Era> era_from_token(std::string_view s) {
  if (s == "Oracle" || s == "OBC") return Era::Obc;
  if (s == "Bronze" || s == "BI") return Era::Bi;
  if (s == "Seal" || s == "SS") return Era::Ss;
  if (s == "SprAut" || s == "SAC") return Era::Sac;
  if (s == "War" || s == "WSC") return Era::Wsc;
  if (s == "Clerical" || s == "CS") return Era::Cs;
  return std::nullopt;
}

inline std::string_view source_token(SourceKind s) {
  return s == SourceKind::Book ? "Book" : "Website";
}

inline std::optional<SourceKind> source_from_token(std::string_view s) {
  if (s == "Book") return SourceKind::Book;
  if (s == "Website") return SourceKind::Website;
  return std::nullopt;
}

}  // namespace glyphcut
