#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glyphcut/catalog.hpp"
#include "glyphcut/imnnb.hpp"
#include "glyphcut/layout.hpp"
#include "glyphcut/synthgen.hpp"

namespace glyphcut {

struct RunConfig {
  std::vector<std::string> inputs;  // page image paths or directories
  std::string output_root;
  LayoutSpec layout;
  ImnnbParams params;
  std::string ocr_kind = "template";  // "template" | "external"
  std::string template_dir;
  std::vector<std::string> external_command;
  SourceKind source = SourceKind::Book;
  Era era = Era::Wsc;
  std::string book_name = "book";
  std::string conversion_table_path;  // empty = identity
  int jobs = 1;
  std::uint64_t seed = 0;
  bool write_debug_sidecars = false;
};

struct PipelineResult {
  Manifest manifest;
  std::string manifest_path;
  int pages_processed = 0;
  int pages_failed = 0;
  int slices = 0;
  int quarantined = 0;
  int records = 0;
  int whole_page_fallbacks = 0;
  std::vector<std::string> page_errors;
};

/// Runs the full extraction over every input page and writes the corpus
/// (images laid out per record_path, plus manifest.json) under
/// output_root. Output is deterministic for fixed inputs, config and seed
/// regardless of jobs; the manifest created_at timestamp is the only
/// varying field. Throws on configuration errors; per-page failures are
/// collected, not fatal.
PipelineResult run_pipeline(const RunConfig& cfg);

/// Expands directories to their sorted *.png members; plain paths pass
/// through. The result is sorted and deduplicated.
std::vector<std::string> collect_page_paths(
    const std::vector<std::string>& inputs);

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
};

/// Checks a manifest against its corpus root: path scheme, id uniqueness,
/// files on disk with matching dimensions, standard folder combinations.
ValidationReport validate_corpus(const Manifest& m, const std::string& root);

/// Predicted glyphs for scoring: page-coordinate boxes taken from each
/// record's provenance.
std::vector<PredictedGlyph> predictions_for_page(const Manifest& m,
                                                 const std::string& page_id);

// JSON (de)serialization for the CLI config surface.
std::string layout_spec_to_json(const LayoutSpec& spec);
LayoutSpec layout_spec_from_json(const std::string& text);
std::string page_spec_to_json(const PageSpec& spec);
PageSpec page_spec_from_json(const std::string& text);
std::string scores_to_json(const Scores& s);

}  // namespace glyphcut
