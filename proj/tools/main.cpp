#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "glyphcut/pipeline.hpp"
#include "glyphcut/png_io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace glyphcut;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Applies config-file values for options the command line did not set.
void apply_config_file(const std::string& path, const CLI::App& cmd,
                       RunConfig& cfg) {
  const auto j = ordered_json::parse(read_file(path));
  auto unset = [&](const std::string& flag) {
    const auto* opt = cmd.get_option_no_throw(flag);
    return opt == nullptr || opt->count() == 0;
  };
  if (j.contains("inputs") && unset("--input"))
    cfg.inputs = j.at("inputs").get<std::vector<std::string>>();
  if (j.contains("out") && unset("--out"))
    cfg.output_root = j.at("out").get<std::string>();
  if (j.contains("layout") && unset("--layout"))
    cfg.layout = layout_spec_from_json(read_file(j.at("layout")));
  if (j.contains("min_area") && unset("--min-area"))
    cfg.params.min_area = j.at("min_area").get<long long>();
  if (j.contains("tau") && unset("--tau"))
    cfg.params.tau = j.at("tau").get<int>();
  if (j.contains("connectivity") && unset("--connectivity"))
    cfg.params.connectivity = j.at("connectivity").get<int>();
  if (j.contains("ocr") && unset("--ocr"))
    cfg.ocr_kind = j.at("ocr").get<std::string>();
  if (j.contains("templates") && unset("--templates"))
    cfg.template_dir = j.at("templates").get<std::string>();
  if (j.contains("ocr_command") && unset("--ocr-command"))
    cfg.external_command =
        j.at("ocr_command").get<std::vector<std::string>>();
  if (j.contains("table") && unset("--table"))
    cfg.conversion_table_path = j.at("table").get<std::string>();
  if (j.contains("source") && unset("--source")) {
    const auto s = source_from_token(j.at("source").get<std::string>());
    if (!s) throw std::runtime_error("bad source token in config");
    cfg.source = *s;
  }
  if (j.contains("era") && unset("--era")) {
    const auto e = era_from_token(j.at("era").get<std::string>());
    if (!e) throw std::runtime_error("bad era token in config");
    cfg.era = *e;
  }
  if (j.contains("book") && unset("--book"))
    cfg.book_name = j.at("book").get<std::string>();
  if (j.contains("jobs") && unset("--jobs")) cfg.jobs = j.at("jobs").get<int>();
  if (j.contains("seed") && unset("--seed"))
    cfg.seed = j.at("seed").get<std::uint64_t>();
}

int cmd_pipeline(const CLI::App& cmd, RunConfig cfg,
                 const std::string& config_path, const std::string& layout_path,
                 const std::string& source_tok, const std::string& era_tok) {
  if (!config_path.empty()) apply_config_file(config_path, cmd, cfg);
  if (!layout_path.empty())
    cfg.layout = layout_spec_from_json(read_file(layout_path));
  if (!source_tok.empty()) {
    const auto s = source_from_token(source_tok);
    if (!s) {
      std::cerr << "error: bad source token '" << source_tok << "'\n";
      return 2;
    }
    cfg.source = *s;
  }
  if (!era_tok.empty()) {
    const auto e = era_from_token(era_tok);
    if (!e) {
      std::cerr << "error: bad era token '" << era_tok << "'\n";
      return 2;
    }
    cfg.era = *e;
  }

  const auto paths = collect_page_paths(cfg.inputs);
  if (paths.empty()) {
    std::cerr << "nothing to do: no input pages\n";
    return 0;
  }
  const PipelineResult result = run_pipeline(cfg);
  for (const std::string& err : result.page_errors)
    std::cerr << "page status=fail reason=\"" << err << "\"\n";
  std::cerr << "summary pages=" << result.pages_processed
            << " failed=" << result.pages_failed
            << " slices=" << result.slices
            << " quarantined=" << result.quarantined
            << " records=" << result.records
            << " fallbacks=" << result.whole_page_fallbacks << "\n";
  if (result.pages_processed == 0) return 1;
  std::cout << result.manifest_path << "\n";
  return result.pages_failed > 0 ? 1 : 0;
}

int cmd_synth(const std::string& spec_path, int pages, const std::string& out,
              std::uint64_t seed) {
  PageSpec spec;
  if (!spec_path.empty()) spec = page_spec_from_json(read_file(spec_path));
  fs::create_directories(fs::path(out) / "pages");
  fs::create_directories(fs::path(out) / "templates");

  for (const auto& [label, img] : default_template_set())
    save_gray_png((fs::path(out) / "templates" / (label + ".png")).string(),
                  img);

  for (int i = 0; i < pages; ++i) {
    PageSpec page_spec = spec;
    page_spec.seed = seed + static_cast<std::uint64_t>(i);
    GroundTruthPage gt = render_page(page_spec);
    char name[32];
    std::snprintf(name, sizeof name, "page%04d", i);
    gt.page_id = name;
    save_gray_png((fs::path(out) / "pages" / (gt.page_id + ".png")).string(),
                  gt.image);
    std::ofstream f(fs::path(out) / "pages" / (gt.page_id + ".gt.json"));
    f << ground_truth_to_json(gt);
  }
  {
    std::ofstream f(fs::path(out) / "layout.json");
    f << layout_spec_to_json(LayoutSpec{});
  }
  {
    std::ofstream f(fs::path(out) / "pagespec.json");
    f << page_spec_to_json(spec);
  }
  std::cout << out << "\n";
  return 0;
}

int cmd_eval(const std::string& gt_dir, const std::string& manifest_path) {
  const Manifest m = read_manifest(manifest_path);
  long long matched = 0, truth = 0, predicted = 0, labels_right = 0;
  bool all_slices_match = true;
  int pages = 0;
  for (const auto& entry : fs::directory_iterator(gt_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() < 8 || name.substr(name.size() - 8) != ".gt.json") continue;
    ++pages;
    const GroundTruthPage gt = ground_truth_from_json(read_file(entry.path()));
    const auto preds = predictions_for_page(m, gt.page_id);
    // slice count proxy: distinct slice indices carrying records
    std::set<int> slice_ids;
    for (const GlyphRecord& r : m.records)
      if (const auto* bp = std::get_if<BookProvenance>(&r.provenance))
        if (bp->page == gt.page_id) slice_ids.insert(bp->slice_index);
    const Scores s = evaluate_extraction(gt, preds,
                                         static_cast<int>(slice_ids.size()));
    matched += s.matched;
    truth += s.truth_count;
    predicted += s.predicted_count;
    labels_right += static_cast<long long>(s.label_accuracy * s.matched + 0.5);
    all_slices_match = all_slices_match && s.slice_count_match;
  }
  Scores total;
  total.matched = static_cast<int>(matched);
  total.truth_count = static_cast<int>(truth);
  total.predicted_count = static_cast<int>(predicted);
  total.recall = truth == 0 ? 1.0 : static_cast<double>(matched) / truth;
  total.precision =
      predicted == 0 ? 1.0 : static_cast<double>(matched) / predicted;
  total.label_accuracy =
      matched == 0 ? 1.0 : static_cast<double>(labels_right) / matched;
  total.slice_count_match = pages > 0 && all_slices_match;
  std::cout << scores_to_json(total);
  return 0;
}

int cmd_split(const std::string& manifest_path, std::uint64_t seed,
              const std::string& out) {
  const Manifest m = read_manifest(manifest_path);
  const auto [train, val] = split(m, seed);
  fs::create_directories(out);
  write_manifest(train, (fs::path(out) / "train.json").string());
  write_manifest(val, (fs::path(out) / "val.json").string());
  std::cout << (fs::path(out) / "train.json").string() << "\n"
            << (fs::path(out) / "val.json").string() << "\n";
  return 0;
}

int cmd_validate(const std::string& manifest_path, std::string root) {
  const Manifest m = read_manifest(manifest_path);
  if (root.empty()) root = fs::path(manifest_path).parent_path().string();
  const ValidationReport report = validate_corpus(m, root);
  for (const std::string& w : report.warnings)
    std::cerr << "warning: " << w << "\n";
  for (const std::string& e : report.errors) std::cerr << "error: " << e << "\n";
  std::cout << "records=" << m.records.size()
            << " errors=" << report.errors.size()
            << " warnings=" << report.warnings.size() << "\n";
  return report.errors.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extract labeled glyph images from scanned tabular "
               "dictionary pages"};
  app.require_subcommand(1);

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "run the full extraction");
  RunConfig cfg;
  std::string config_path, layout_path, source_tok, era_tok;
  pipe->add_option("--config", config_path, "JSON config file");
  pipe->add_option("--input,-i", cfg.inputs, "page images or directories");
  pipe->add_option("--out,-o", cfg.output_root, "corpus output root");
  pipe->add_option("--layout", layout_path, "layout spec JSON");
  pipe->add_option("--min-area", cfg.params.min_area, "area filter threshold");
  pipe->add_option("--tau", cfg.params.tau, "vertical merge threshold");
  pipe->add_option("--connectivity", cfg.params.connectivity, "4 or 8");
  pipe->add_option("--ocr", cfg.ocr_kind, "template|external");
  pipe->add_option("--templates", cfg.template_dir, "template directory");
  pipe->add_option("--ocr-command", cfg.external_command,
                   "external OCR argv prefix");
  pipe->add_option("--table", cfg.conversion_table_path,
                   "simplified/traditional conversion TSV");
  pipe->add_option("--source", source_tok, "Book|Website");
  pipe->add_option("--era", era_tok,
                   "Oracle|Bronze|Seal|SprAut|War|Clerical");
  pipe->add_option("--book", cfg.book_name, "book name for provenance");
  pipe->add_option("--jobs,-j", cfg.jobs, "page-level parallelism");
  pipe->add_option("--seed", cfg.seed, "run seed (recorded in manifest)");
  pipe->add_flag("--debug-sidecars", cfg.write_debug_sidecars,
                 "write per-slice stage box JSON");

  // synth
  auto* synth = app.add_subcommand("synth", "render synthetic pages");
  std::string synth_spec, synth_out;
  int synth_pages = 1;
  std::uint64_t synth_seed = 0;
  synth->add_option("--spec", synth_spec, "page spec JSON");
  synth->add_option("--pages,-n", synth_pages, "number of pages");
  synth->add_option("--out,-o", synth_out, "output directory")->required();
  synth->add_option("--seed", synth_seed, "base seed");

  // eval
  auto* eval = app.add_subcommand("eval", "score a manifest against truth");
  std::string eval_gt, eval_manifest;
  eval->add_option("--gt", eval_gt, "ground truth directory")->required();
  eval->add_option("--manifest", eval_manifest, "manifest JSON")->required();

  // split
  auto* spl = app.add_subcommand("split", "deterministic 9:1 split");
  std::string split_manifest, split_out;
  std::uint64_t split_seed = 0;
  spl->add_option("--manifest", split_manifest, "manifest JSON")->required();
  spl->add_option("--seed", split_seed, "shuffle seed");
  spl->add_option("--out,-o", split_out, "output directory")->required();

  // validate
  auto* val = app.add_subcommand("validate", "check manifest and corpus");
  std::string val_manifest, val_root;
  val->add_option("--manifest", val_manifest, "manifest JSON")->required();
  val->add_option("--root", val_root, "corpus root (default manifest dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // 0 covers --help
  }

  try {
    if (pipe->parsed())
      return cmd_pipeline(*pipe, cfg, config_path, layout_path, source_tok,
                          era_tok);
    if (synth->parsed())
      return cmd_synth(synth_spec, synth_pages, synth_out, synth_seed);
    if (eval->parsed()) return cmd_eval(eval_gt, eval_manifest);
    if (spl->parsed()) return cmd_split(split_manifest, split_seed, split_out);
    if (val->parsed()) return cmd_validate(val_manifest, val_root);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
