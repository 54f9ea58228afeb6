#include "glyphcut/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <stdexcept>
#include <thread>

#include "glyphcut/grouping.hpp"
#include "glyphcut/png_io.hpp"
#include "glyphcut/rng.hpp"
#include "json.hpp"

namespace glyphcut {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string now_rfc3339() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json box_json(const Box& b) {
  return ordered_json{{"x0", b.x0}, {"y0", b.y0}, {"x1", b.x1}, {"y1", b.y1}};
}

struct Candidate {
  GrayImage image;
  std::string category;
  BookProvenance provenance;
};

struct PageOutput {
  bool ok = false;
  std::string error;
  int slices = 0;
  int quarantined = 0;
  bool whole_page_fallback = false;
  std::vector<Candidate> candidates;
};

PageOutput process_page(const std::string& path, const RunConfig& cfg,
                        OcrAdapter& ocr, const ConversionTable& table) {
  PageOutput out;
  GrayImage page;
  try {
    page = load_gray_png(path);
  } catch (const std::exception& e) {
    out.error = e.what();
    return out;
  }
  const std::string page_id = fs::path(path).stem().string();

  CropResult crop = crop_slices(page, page_id, cfg.layout,
                                cfg.params.binarization);
  out.whole_page_fallback = crop.whole_page_fallback;
  std::vector<Slice> slices = order_slices(std::move(crop.slices), cfg.layout);
  out.slices = static_cast<int>(slices.size());
  assign_labels(slices, ocr, cfg.layout);

  for (const Slice& s : slices) {
    if (s.quarantined) {
      ++out.quarantined;
      continue;
    }
    ImnnbDiagnostics diag;
    const auto patches =
        imnnb(s, cfg.params, cfg.write_debug_sidecars ? &diag : nullptr);
    if (cfg.write_debug_sidecars) {
      ordered_json j;
      j["page_id"] = s.page_id;
      j["slice_order_index"] = s.order_index;
      j["box_on_page"] = box_json(s.box_on_page);
      for (const auto& [key, boxes] :
           {std::pair<const char*, const std::vector<Box>*>{"components",
                                                            &diag.components},
            {"after_stage1", &diag.after_stage1},
            {"after_filter", &diag.after_filter},
            {"after_stage2", &diag.after_stage2}}) {
        j[key] = ordered_json::array();
        for (const Box& b : *boxes) j[key].push_back(box_json(b));
      }
      const fs::path dir = fs::path(cfg.output_root) / "debug";
      fs::create_directories(dir);
      std::ofstream f(dir / (s.page_id + "_slice" +
                             std::to_string(s.order_index) + ".json"));
      f << j.dump(2) << "\n";
    }
    for (const GlyphPatch& p : patches) {
      Candidate c;
      c.image = normalize_polarity(p.image);
      c.category = unify_category(*s.label, table);
      c.provenance.book = cfg.book_name;
      c.provenance.page = s.page_id;
      c.provenance.slice_index = s.order_index;
      c.provenance.rank = p.position_rank;
      c.provenance.box_on_page =
          Box{s.box_on_page.x0 + p.box_in_slice.x0,
              s.box_on_page.y0 + p.box_in_slice.y0,
              s.box_on_page.x0 + p.box_in_slice.x1,
              s.box_on_page.y0 + p.box_in_slice.y1};
      out.candidates.push_back(std::move(c));
    }
  }
  out.ok = true;
  return out;
}

}  // namespace

std::vector<std::string> collect_page_paths(
    const std::vector<std::string>& inputs) {
  std::vector<std::string> paths;
  for (const std::string& input : inputs) {
    if (fs::is_directory(input)) {
      for (const auto& entry : fs::directory_iterator(input))
        if (entry.path().extension() == ".png")
          paths.push_back(entry.path().string());
    } else {
      paths.push_back(input);
    }
  }
  std::sort(paths.begin(), paths.end());
  paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
  return paths;
}

PipelineResult run_pipeline(const RunConfig& cfg) {
  if (cfg.output_root.empty())
    throw std::invalid_argument("output_root is required");
  if (!cfg.layout.valid()) throw std::invalid_argument("invalid LayoutSpec");
  if (!cfg.params.valid()) throw std::invalid_argument("invalid ImnnbParams");

  ConversionTable table;
  if (!cfg.conversion_table_path.empty())
    table = ConversionTable::load_tsv(cfg.conversion_table_path);

  std::unique_ptr<OcrAdapter> ocr;
  if (cfg.ocr_kind == "template") {
    ocr = cfg.template_dir.empty()
              ? std::make_unique<TemplateMatcher>(default_template_set())
              : std::make_unique<TemplateMatcher>(
                    TemplateMatcher::from_directory(cfg.template_dir));
  } else if (cfg.ocr_kind == "external") {
    ocr = std::make_unique<ExternalProcessOcr>(cfg.external_command,
                                               std::max(1, cfg.jobs));
  } else {
    throw std::invalid_argument("unknown OCR kind '" + cfg.ocr_kind + "'");
  }

  const std::vector<std::string> paths = collect_page_paths(cfg.inputs);
  PipelineResult result;
  if (paths.empty()) return result;

  std::vector<PageOutput> outputs(paths.size());
  const int jobs = std::clamp(cfg.jobs, 1,
                              static_cast<int>(paths.size()));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < paths.size(); ++i)
      outputs[i] = process_page(paths[i], cfg, *ocr, table);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w)
      workers.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < paths.size();
             i = next.fetch_add(1)) {
          try {
            outputs[i] = process_page(paths[i], cfg, *ocr, table);
          } catch (const std::exception& e) {
            outputs[i].ok = false;
            outputs[i].error = e.what();
          }
        }
      });
    for (auto& w : workers) w.join();
  }

  // deterministic id assignment: pages are already sorted by path, and
  // candidates within a page follow (slice order, rank)
  Manifest& manifest = result.manifest;
  long long next_id = 0;
  fs::create_directories(cfg.output_root);
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    PageOutput& out = outputs[i];
    if (!out.ok) {
      ++result.pages_failed;
      result.page_errors.push_back(paths[i] + ": " + out.error);
      continue;
    }
    ++result.pages_processed;
    result.slices += out.slices;
    result.quarantined += out.quarantined;
    if (out.whole_page_fallback) ++result.whole_page_fallbacks;
    for (Candidate& c : out.candidates) {
      GlyphRecord r;
      r.category = c.category;
      r.era = cfg.era;
      r.source = cfg.source;
      r.id = next_id++;
      r.width = c.image.width;
      r.height = c.image.height;
      r.provenance = c.provenance;
      r.relative_path = record_path(r);
      const fs::path dest = fs::path(cfg.output_root) / r.relative_path;
      fs::create_directories(dest.parent_path());
      save_gray_png(dest.string(), c.image);
      manifest.records.push_back(std::move(r));
      ++result.records;
    }
  }

  // keep the in-memory order identical to the canonical on-disk order so
  // the returned manifest round-trips field-for-field
  std::sort(manifest.records.begin(), manifest.records.end(),
            [](const GlyphRecord& a, const GlyphRecord& b) {
              return a.relative_path < b.relative_path;
            });

  manifest.run_metadata.tool_version = "glyphcut 0.1.0";
  manifest.run_metadata.created_at = now_rfc3339();
  manifest.run_metadata.binarization =
      cfg.params.binarization.kind == BinarizePolicy::Kind::Otsu
          ? "otsu"
          : "fixed:" + std::to_string(cfg.params.binarization.threshold);
  manifest.run_metadata.min_area = cfg.params.min_area;
  manifest.run_metadata.tau = cfg.params.tau;
  manifest.run_metadata.connectivity = cfg.params.connectivity;
  {
    const std::string lj = layout_spec_to_json(cfg.layout);
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(
                      fnv1a64(lj.data(), lj.size())));
    manifest.run_metadata.layout_spec_hash = hex;
  }
  manifest.run_metadata.seed = cfg.seed;

  result.manifest_path =
      (fs::path(cfg.output_root) / "manifest.json").string();
  write_manifest(manifest, result.manifest_path);
  return result;
}

ValidationReport validate_corpus(const Manifest& m, const std::string& root) {
  ValidationReport report;
  static const std::regex path_re(
      R"(^(Book|Website)_(Oracle|Bronze|Seal|SprAut|War|Clerical)/[^/]+/(Book|Website)_(Oracle|Bronze|Seal|SprAut|War|Clerical)_[0-9]+\.png$)");
  std::set<std::tuple<SourceKind, Era, long long>> ids;
  for (const GlyphRecord& r : m.records) {
    std::smatch match;
    if (!std::regex_match(r.relative_path, match, path_re)) {
      report.errors.push_back("bad path: " + r.relative_path);
      continue;
    }
    if (match[1] != match[3] || match[2] != match[4])
      report.errors.push_back("folder/name token mismatch: " +
                              r.relative_path);
    if (match[1].str() != std::string(source_token(r.source)) ||
        match[2].str() != std::string(era_token(r.era)))
      report.errors.push_back("path tokens disagree with record fields: " +
                              r.relative_path);
    if (r.relative_path != record_path(r))
      report.errors.push_back("path not derived from record fields: " +
                              r.relative_path);
    if (!ids.insert({r.source, r.era, r.id}).second)
      report.errors.push_back("duplicate id: " +
                              name_record(r.source, r.era, r.id));
    if (!is_standard_folder(r.source, r.era))
      report.warnings.push_back("non-standard source/era folder: " +
                                r.relative_path);
    const fs::path file = fs::path(root) / r.relative_path;
    if (!fs::exists(file)) {
      report.errors.push_back("missing file: " + r.relative_path);
      continue;
    }
    try {
      const GrayImage img = load_gray_png(file.string());
      if (img.width != r.width || img.height != r.height)
        report.errors.push_back("size mismatch: " + r.relative_path);
    } catch (const std::exception& e) {
      report.errors.push_back(r.relative_path + ": " + e.what());
    }
  }
  return report;
}

std::vector<PredictedGlyph> predictions_for_page(const Manifest& m,
                                                 const std::string& page_id) {
  std::vector<PredictedGlyph> out;
  for (const GlyphRecord& r : m.records)
    if (const auto* bp = std::get_if<BookProvenance>(&r.provenance))
      if (bp->page == page_id && bp->box_on_page)
        out.push_back(PredictedGlyph{*bp->box_on_page, r.category});
  return out;
}

std::string layout_spec_to_json(const LayoutSpec& spec) {
  ordered_json j{
      {"reading_direction",
       spec.reading_direction == ReadingDirection::RightToLeft
           ? "right_to_left"
           : "left_to_right"},
      {"min_ruling_length_frac", spec.min_ruling_length_frac},
      {"max_ruling_thickness", spec.max_ruling_thickness},
      {"max_ruling_gap", spec.max_ruling_gap},
      {"header_band_frac", spec.header_band_frac},
      {"min_slice_width", spec.min_slice_width},
      {"header_ink_eps", spec.header_ink_eps},
      {"use_adapter_detect", spec.use_adapter_detect},
  };
  return j.dump(2) + "\n";
}

LayoutSpec layout_spec_from_json(const std::string& text) {
  const auto j = ordered_json::parse(text);
  LayoutSpec spec;
  const std::string dir = j.value("reading_direction", "right_to_left");
  if (dir == "right_to_left")
    spec.reading_direction = ReadingDirection::RightToLeft;
  else if (dir == "left_to_right")
    spec.reading_direction = ReadingDirection::LeftToRight;
  else
    throw std::runtime_error("bad reading_direction '" + dir + "'");
  spec.min_ruling_length_frac =
      j.value("min_ruling_length_frac", spec.min_ruling_length_frac);
  spec.max_ruling_thickness =
      j.value("max_ruling_thickness", spec.max_ruling_thickness);
  spec.max_ruling_gap = j.value("max_ruling_gap", spec.max_ruling_gap);
  spec.header_band_frac = j.value("header_band_frac", spec.header_band_frac);
  spec.min_slice_width = j.value("min_slice_width", spec.min_slice_width);
  spec.header_ink_eps = j.value("header_ink_eps", spec.header_ink_eps);
  spec.use_adapter_detect =
      j.value("use_adapter_detect", spec.use_adapter_detect);
  if (!spec.valid()) throw std::runtime_error("invalid layout spec values");
  return spec;
}

std::string page_spec_to_json(const PageSpec& spec) {
  ordered_json j{
      {"columns", spec.columns},
      {"page_width", spec.page_width},
      {"page_height", spec.page_height},
      {"min_glyphs", spec.min_glyphs},
      {"max_glyphs", spec.max_glyphs},
      {"blob_min_size", spec.blob_min_size},
      {"blob_max_size", spec.blob_max_size},
      {"min_blobs", spec.min_blobs},
      {"max_blobs", spec.max_blobs},
      {"intra_gap_min", spec.intra_gap_min},
      {"intra_gap_max", spec.intra_gap_max},
      {"inter_gap_min", spec.inter_gap_min},
      {"inter_gap_max", spec.inter_gap_max},
      {"caption_marks", spec.caption_marks},
      {"header_labels", spec.header_labels},
      {"header_empty_prob", spec.header_empty_prob},
      {"noise_rate", spec.noise_rate},
      {"polarity", spec.polarity == Polarity::DarkOnLight ? "dark_on_light"
                                                          : "light_on_dark"},
      {"ruling_thickness", spec.ruling_thickness},
      {"tau", spec.tau},
      {"min_area", spec.min_area},
      {"seed", spec.seed},
  };
  return j.dump(2) + "\n";
}

PageSpec page_spec_from_json(const std::string& text) {
  const auto j = ordered_json::parse(text);
  PageSpec spec;
  spec.columns = j.value("columns", spec.columns);
  spec.page_width = j.value("page_width", spec.page_width);
  spec.page_height = j.value("page_height", spec.page_height);
  spec.min_glyphs = j.value("min_glyphs", spec.min_glyphs);
  spec.max_glyphs = j.value("max_glyphs", spec.max_glyphs);
  spec.blob_min_size = j.value("blob_min_size", spec.blob_min_size);
  spec.blob_max_size = j.value("blob_max_size", spec.blob_max_size);
  spec.min_blobs = j.value("min_blobs", spec.min_blobs);
  spec.max_blobs = j.value("max_blobs", spec.max_blobs);
  spec.intra_gap_min = j.value("intra_gap_min", spec.intra_gap_min);
  spec.intra_gap_max = j.value("intra_gap_max", spec.intra_gap_max);
  spec.inter_gap_min = j.value("inter_gap_min", spec.inter_gap_min);
  spec.inter_gap_max = j.value("inter_gap_max", spec.inter_gap_max);
  spec.caption_marks = j.value("caption_marks", spec.caption_marks);
  spec.header_labels =
      j.value("header_labels", spec.header_labels);
  spec.header_empty_prob = j.value("header_empty_prob", spec.header_empty_prob);
  spec.noise_rate = j.value("noise_rate", spec.noise_rate);
  const std::string pol = j.value("polarity", "dark_on_light");
  if (pol == "dark_on_light") spec.polarity = Polarity::DarkOnLight;
  else if (pol == "light_on_dark") spec.polarity = Polarity::LightOnDark;
  else throw std::runtime_error("bad polarity '" + pol + "'");
  spec.ruling_thickness = j.value("ruling_thickness", spec.ruling_thickness);
  spec.tau = j.value("tau", spec.tau);
  spec.min_area = j.value("min_area", spec.min_area);
  spec.seed = j.value("seed", spec.seed);
  return spec;
}

std::string scores_to_json(const Scores& s) {
  ordered_json j{
      {"recall", s.recall},
      {"precision", s.precision},
      {"label_accuracy", s.label_accuracy},
      {"slice_count_match", s.slice_count_match},
      {"matched", s.matched},
      {"truth_count", s.truth_count},
      {"predicted_count", s.predicted_count},
  };
  return j.dump(2) + "\n";
}

}  // namespace glyphcut
