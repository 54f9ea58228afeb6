#include "glyphcut/image.hpp"

#include <array>
#include <numeric>
#include <stdexcept>

namespace glyphcut {

GrayImage GrayImage::crop(const Box& b) const {
  if (b.x0 < 0 || b.y0 < 0 || b.x1 > width || b.y1 > height || !b.valid())
    throw std::invalid_argument("crop box outside image");
  GrayImage out;
  out.width = b.width();
  out.height = b.height();
  out.pixels.resize(static_cast<std::size_t>(out.width) * out.height);
  for (int y = 0; y < out.height; ++y) {
    const std::uint8_t* src = &pixels[static_cast<std::size_t>(b.y0 + y) * width + b.x0];
    std::copy(src, src + out.width,
              &out.pixels[static_cast<std::size_t>(y) * out.width]);
  }
  return out;
}

std::size_t BinaryImage::ink_count() const {
  return static_cast<std::size_t>(
      std::accumulate(mask.begin(), mask.end(), std::size_t{0}));
}

int otsu_threshold(const GrayImage& img) {
  std::array<long long, 256> hist{};
  for (std::uint8_t p : img.pixels) ++hist[p];
  const long long total = static_cast<long long>(img.pixels.size());

  // class 0 = pixels < t, class 1 = pixels >= t, t in 0..255
  long long sum_all = 0;
  for (int v = 0; v < 256; ++v) sum_all += static_cast<long long>(v) * hist[v];

  int best_t = 0;
  double best_var = -1.0;
  long long w0 = 0;
  long long sum0 = 0;
  for (int t = 0; t < 256; ++t) {
    if (t > 0) {
      w0 += hist[t - 1];
      sum0 += static_cast<long long>(t - 1) * hist[t - 1];
    }
    const long long w1 = total - w0;
    double var = 0.0;
    if (w0 > 0 && w1 > 0) {
      const double mu0 = static_cast<double>(sum0) / w0;
      const double mu1 = static_cast<double>(sum_all - sum0) / w1;
      const double d = mu0 - mu1;
      var = static_cast<double>(w0) * static_cast<double>(w1) * d * d;
    }
    if (var > best_var) {
      best_var = var;
      best_t = t;
    }
  }
  return best_t;
}

Polarity detect_polarity(const GrayImage& img) {
  std::size_t dark = 0;
  for (std::uint8_t p : img.pixels)
    if (p < 128) ++dark;
  return 2 * dark > img.pixels.size() ? Polarity::LightOnDark
                                      : Polarity::DarkOnLight;
}

GrayImage normalize_polarity(const GrayImage& img) {
  if (detect_polarity(img) == Polarity::DarkOnLight) return img;
  GrayImage out = img;
  for (auto& p : out.pixels) p = static_cast<std::uint8_t>(255 - p);
  return out;
}

BinaryImage binarize(const GrayImage& img, BinarizePolicy policy) {
  const GrayImage norm = normalize_polarity(img);
  const int t = policy.kind == BinarizePolicy::Kind::Otsu
                    ? otsu_threshold(norm)
                    : policy.threshold;
  BinaryImage out;
  out.width = norm.width;
  out.height = norm.height;
  out.mask.resize(norm.pixels.size());
  for (std::size_t i = 0; i < norm.pixels.size(); ++i)
    out.mask[i] = norm.pixels[i] < t ? 1 : 0;
  return out;
}

std::vector<Box> connected_components(const BinaryImage& bin,
                                      int connectivity) {
  if (connectivity != 4 && connectivity != 8)
    throw std::invalid_argument("connectivity must be 4 or 8");
  const int w = bin.width;
  const int h = bin.height;
  std::vector<std::uint8_t> visited(bin.mask.size(), 0);
  std::vector<Box> boxes;
  std::vector<std::pair<int, int>> stack;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (!bin.mask[idx] || visited[idx]) continue;
      Box b{x, y, x + 1, y + 1};
      stack.clear();
      stack.emplace_back(x, y);
      visited[idx] = 1;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        b.x0 = std::min(b.x0, cx);
        b.y0 = std::min(b.y0, cy);
        b.x1 = std::max(b.x1, cx + 1);
        b.y1 = std::max(b.y1, cy + 1);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (connectivity == 4 && dx != 0 && dy != 0) continue;
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
            if (bin.mask[nidx] && !visited[nidx]) {
              visited[nidx] = 1;
              stack.emplace_back(nx, ny);
            }
          }
        }
      }
      boxes.push_back(b);
    }
  }
  std::sort(boxes.begin(), boxes.end(), [](const Box& a, const Box& b) {
    if (a.y0 != b.y0) return a.y0 < b.y0;
    if (a.x0 != b.x0) return a.x0 < b.x0;
    if (a.y1 != b.y1) return a.y1 < b.y1;
    return a.x1 < b.x1;
  });
  return boxes;
}

}  // namespace glyphcut
