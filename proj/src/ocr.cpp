#include "glyphcut/ocr.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <condition_variable>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "glyphcut/png_io.hpp"

namespace glyphcut {

namespace {

constexpr double kHeaderInkEps = 0.005;

// tight ink bbox after dropping components below min_px pixels
std::optional<Box> robust_ink_box(const BinaryImage& bin, int min_px) {
  std::vector<Box> boxes = connected_components(bin, 8);
  // count pixels per component by re-walking; components() only gives boxes,
  // so measure ink inside each box restricted to its own component via a
  // second labeling pass
  const int w = bin.width;
  const int h = bin.height;
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  std::vector<int> sizes;
  std::vector<std::pair<int, int>> stack;
  std::vector<Box> comp_boxes;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (!bin.mask[idx] || label[idx] >= 0) continue;
      const int id = static_cast<int>(sizes.size());
      int count = 0;
      Box b{x, y, x + 1, y + 1};
      stack.assign(1, {x, y});
      label[idx] = id;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        ++count;
        b.x0 = std::min(b.x0, cx);
        b.y0 = std::min(b.y0, cy);
        b.x1 = std::max(b.x1, cx + 1);
        b.y1 = std::max(b.y1, cy + 1);
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if ((dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx >= w || ny >= h)
              continue;
            const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
            if (bin.mask[nidx] && label[nidx] < 0) {
              label[nidx] = id;
              stack.emplace_back(nx, ny);
            }
          }
      }
      sizes.push_back(count);
      comp_boxes.push_back(b);
    }
  }
  std::optional<Box> out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < min_px) continue;
    out = out ? hull(*out, comp_boxes[i]) : comp_boxes[i];
  }
  return out;
}

}  // namespace

TemplateMatcher::TemplateMatcher(const std::map<std::string, GrayImage>& templates,
                                 int min_component_px)
    : min_component_px_(min_component_px) {
  for (const auto& [label, img] : templates) {
    auto sig = signature(img);
    if (!sig) throw std::invalid_argument("template '" + label + "' has no ink");
    entries_.push_back(Entry{label, *sig});
  }
  if (entries_.empty())
    throw std::invalid_argument("TemplateMatcher needs at least one template");
}

TemplateMatcher TemplateMatcher::from_directory(const std::string& dir,
                                                int min_component_px) {
  std::map<std::string, GrayImage> templates;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".png") continue;
    templates[entry.path().stem().string()] =
        load_gray_png(entry.path().string());
  }
  return TemplateMatcher(templates, min_component_px);
}

std::optional<TemplateMatcher::Signature> TemplateMatcher::signature(
    const GrayImage& img) const {
  const BinaryImage bin = binarize(img, BinarizePolicy::otsu());
  const auto box = robust_ink_box(bin, min_component_px_);
  if (!box) return std::nullopt;
  Signature sig;
  const int bw = box->width();
  const int bh = box->height();
  for (int j = 0; j < kSide; ++j) {
    const int sy = box->y0 + ((2 * j + 1) * bh) / (2 * kSide);
    for (int i = 0; i < kSide; ++i) {
      const int sx = box->x0 + ((2 * i + 1) * bw) / (2 * kSide);
      if (bin.at(sx, sy)) sig.set(static_cast<std::size_t>(j) * kSide + i);
    }
  }
  return sig;
}

bool TemplateMatcher::detect(const GrayImage& band) {
  const BinaryImage bin = binarize(band, BinarizePolicy::otsu());
  return static_cast<double>(bin.ink_count()) >
         kHeaderInkEps * static_cast<double>(bin.mask.size());
}

OcrResult TemplateMatcher::recognize(const GrayImage& band) {
  const auto sig = signature(band);
  if (!sig) return OcrResult{};
  std::size_t best_dist = Signature().size() + 1;
  const Entry* best = nullptr;
  for (const Entry& e : entries_) {
    const std::size_t d = (e.bits ^ *sig).count();
    if (d < best_dist) {
      best_dist = d;
      best = &e;
    }
  }
  return OcrResult{best->label,
                   1.0 - static_cast<double>(best_dist) / (kSide * kSide)};
}

struct ExternalProcessOcr::Impl {
  std::vector<std::string> command;
  int max_concurrency;
  int active = 0;
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<unsigned> temp_counter{0};

  // Runs the command with the image path appended, captures stdout.
  // Returns false on nonzero exit.
  bool run(const std::string& image_path, std::string* out) {
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [this] { return active < max_concurrency; });
      ++active;
    }
    bool ok = run_unbounded(image_path, out);
    {
      std::lock_guard lock(mu);
      --active;
    }
    cv.notify_one();
    return ok;
  }

  bool run_unbounded(const std::string& image_path, std::string* out) {
    int fds[2];
    if (pipe(fds) != 0) throw std::runtime_error("pipe failed");
    const pid_t pid = fork();
    if (pid < 0) {
      close(fds[0]);
      close(fds[1]);
      throw std::runtime_error("fork failed");
    }
    if (pid == 0) {
      dup2(fds[1], STDOUT_FILENO);
      close(fds[0]);
      close(fds[1]);
      std::vector<char*> argv;
      for (const auto& a : command) argv.push_back(const_cast<char*>(a.c_str()));
      std::string path_arg = image_path;
      argv.push_back(path_arg.data());
      argv.push_back(nullptr);
      execvp(argv[0], argv.data());
      _exit(127);
    }
    close(fds[1]);
    out->clear();
    char buf[4096];
    ssize_t n;
    while ((n = read(fds[0], buf, sizeof buf)) > 0) out->append(buf, n);
    close(fds[0]);
    int status = 0;
    waitpid(pid, &status, 0);
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
  }

  std::string temp_image(const GrayImage& band) {
    const auto path =
        std::filesystem::temp_directory_path() /
        ("glyphcut-ocr-" + std::to_string(getpid()) + "-" +
         std::to_string(temp_counter.fetch_add(1)) + ".png");
    save_gray_png(path.string(), band);
    return std::filesystem::absolute(path).string();
  }
};

ExternalProcessOcr::ExternalProcessOcr(std::vector<std::string> command,
                                       int max_concurrency)
    : impl_(std::make_unique<Impl>()) {
  if (command.empty())
    throw std::invalid_argument("external OCR command is empty");
  impl_->command = std::move(command);
  impl_->max_concurrency = std::max(1, max_concurrency);
}

ExternalProcessOcr::~ExternalProcessOcr() = default;

bool ExternalProcessOcr::detect(const GrayImage& band) {
  const std::string path = impl_->temp_image(band);
  std::string out;
  const bool ok = impl_->run(path, &out);
  std::filesystem::remove(path);
  if (!ok) return false;
  const auto eol = out.find('\n');
  return !out.substr(0, eol).empty();
}

OcrResult ExternalProcessOcr::recognize(const GrayImage& band) {
  const std::string path = impl_->temp_image(band);
  std::string out;
  const bool ok = impl_->run(path, &out);
  std::filesystem::remove(path);
  if (!ok) return OcrResult{};
  std::istringstream lines(out);
  OcrResult r;
  std::getline(lines, r.text);
  std::string conf_line;
  if (std::getline(lines, conf_line) && !conf_line.empty()) {
    try {
      r.confidence = std::clamp(std::stod(conf_line), 0.0, 1.0);
    } catch (const std::exception&) {
      r.confidence = 0.0;
    }
  } else {
    r.confidence = r.text.empty() ? 0.0 : 1.0;
  }
  return r;
}

std::string clean_header_text(const std::string& raw,
                              std::optional<long long>* number_out) {
  std::string digits;
  std::string first_cluster;
  std::string current;
  bool done = false;
  for (char ch : raw) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80) {
      if (std::isdigit(c)) {
        digits.push_back(ch);
        // digits separate clusters but are recorded as metadata
        if (!current.empty() && !done) {
          first_cluster = current;
          done = true;
        }
        current.clear();
      } else if (std::isalpha(c)) {
        if (!done) current.push_back(ch);
      } else {
        // punctuation / whitespace / control: cluster separator
        if (!current.empty() && !done) {
          first_cluster = current;
          done = true;
        }
        current.clear();
      }
    } else {
      if (!done) current.push_back(ch);
    }
  }
  if (!done && !current.empty()) first_cluster = current;
  if (number_out) {
    *number_out = std::nullopt;
    if (!digits.empty() && digits.size() <= 18)
      *number_out = std::stoll(digits);
  }
  return first_cluster;
}

}  // namespace glyphcut
