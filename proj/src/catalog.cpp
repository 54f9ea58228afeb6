#include "glyphcut/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "glyphcut/rng.hpp"
#include "json.hpp"

namespace glyphcut {

namespace {

using ordered_json = nlohmann::ordered_json;

int utf8_seq_len(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;  // invalid byte, treat as one unit
}

std::vector<std::string> utf8_chars(const std::string& s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const int len = std::min<std::size_t>(
        utf8_seq_len(static_cast<unsigned char>(s[i])), s.size() - i);
    out.push_back(s.substr(i, static_cast<std::size_t>(len)));
    i += static_cast<std::size_t>(len);
  }
  return out;
}

ordered_json box_to_json(const Box& b) {
  return ordered_json{{"x0", b.x0}, {"y0", b.y0}, {"x1", b.x1}, {"y1", b.y1}};
}

Box box_from_json(const ordered_json& j) {
  return Box{j.at("x0").get<int>(), j.at("y0").get<int>(),
             j.at("x1").get<int>(), j.at("y1").get<int>()};
}

}  // namespace

ConversionTable ConversionTable::load_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open conversion table " + path);
  ConversionTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected two tab-separated columns");
    t.mapping_[line.substr(0, tab)] = line.substr(tab + 1);
  }
  // canonical characters must be fixpoints
  for (const auto& [variant, canonical] : t.mapping_) {
    const auto it = t.mapping_.find(canonical);
    if (it != t.mapping_.end() && it->second != canonical)
      throw std::runtime_error("conversion table is not idempotent at '" +
                               variant + "'");
  }
  return t;
}

ConversionTable ConversionTable::from_pairs(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  ConversionTable t;
  for (const auto& [variant, canonical] : pairs) t.mapping_[variant] = canonical;
  return t;
}

const std::string& ConversionTable::map_char(const std::string& cp) const {
  const auto it = mapping_.find(cp);
  return it == mapping_.end() ? cp : it->second;
}

std::string unify_category(const std::string& label,
                           const ConversionTable& t) {
  std::string out;
  for (const std::string& cp : utf8_chars(label)) out += t.map_char(cp);
  return out;
}

std::string name_record(SourceKind source, Era era, long long id) {
  if (id < 0) throw std::invalid_argument("record id must be >= 0");
  std::string s{source_token(source)};
  s += '_';
  s += era_token(era);
  s += '_';
  s += std::to_string(id);
  return s;
}

std::string record_path(const GlyphRecord& r) {
  if (r.category.empty() ||
      r.category.find('/') != std::string::npos ||
      r.category.find('\\') != std::string::npos)
    throw std::invalid_argument("category '" + r.category +
                                "' is empty or contains a path separator");
  std::string s{source_token(r.source)};
  s += '_';
  s += era_token(r.era);
  s += '/';
  s += r.category;
  s += '/';
  s += name_record(r.source, r.era, r.id);
  s += ".png";
  return s;
}

bool is_standard_folder(SourceKind source, Era era) {
  if (source == SourceKind::Book)
    return era == Era::Obc || era == Era::Bi || era == Era::Sac ||
           era == Era::Wsc;
  return era != Era::Sac;  // all website eras except SprAut
}

std::string manifest_to_json(const Manifest& m) {
  std::set<std::tuple<SourceKind, Era, long long>> seen;
  for (const GlyphRecord& r : m.records) {
    if (!seen.insert({r.source, r.era, r.id}).second)
      throw std::runtime_error("duplicate record id " +
                               name_record(r.source, r.era, r.id));
  }

  std::vector<const GlyphRecord*> sorted;
  sorted.reserve(m.records.size());
  for (const auto& r : m.records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const GlyphRecord* a, const GlyphRecord* b) {
              return a->relative_path < b->relative_path;
            });

  ordered_json j;
  j["schema"] = "evobc-manifest/1";
  j["run_metadata"] = ordered_json{
      {"tool_version", m.run_metadata.tool_version},
      {"created_at", m.run_metadata.created_at},
      {"binarization", m.run_metadata.binarization},
      {"min_area", m.run_metadata.min_area},
      {"tau", m.run_metadata.tau},
      {"connectivity", m.run_metadata.connectivity},
      {"layout_spec_hash", m.run_metadata.layout_spec_hash},
      {"seed", m.run_metadata.seed},
  };
  j["records"] = ordered_json::array();
  for (const GlyphRecord* r : sorted) {
    ordered_json rec{
        {"path", r->relative_path}, {"category", r->category},
        {"era", std::string(era_token(r->era))},
        {"source", std::string(source_token(r->source))},
        {"id", r->id},           {"width", r->width},
        {"height", r->height},
    };
    if (const auto* bp = std::get_if<BookProvenance>(&r->provenance)) {
      ordered_json p{{"kind", "book"},
                     {"book", bp->book},
                     {"page", bp->page},
                     {"slice_index", bp->slice_index},
                     {"rank", bp->rank}};
      if (bp->box_on_page) p["box_on_page"] = box_to_json(*bp->box_on_page);
      rec["provenance"] = std::move(p);
    } else if (const auto* wp = std::get_if<WebProvenance>(&r->provenance)) {
      rec["provenance"] =
          ordered_json{{"kind", "website"}, {"site", wp->site}, {"url", wp->url}};
    }
    j["records"].push_back(std::move(rec));
  }
  return j.dump(2) + "\n";
}

void write_manifest(const Manifest& m, const std::string& dest) {
  const std::string text = manifest_to_json(m);
  std::ofstream out(dest, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + dest);
  out << text;
}

Manifest manifest_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // e.what() carries the byte position
    throw std::runtime_error(std::string("manifest parse error: ") + e.what());
  }
  if (j.value("schema", "") != "evobc-manifest/1")
    throw std::runtime_error("unsupported manifest schema");

  Manifest m;
  const auto& meta = j.at("run_metadata");
  m.run_metadata.tool_version = meta.value("tool_version", "");
  m.run_metadata.created_at = meta.value("created_at", "");
  m.run_metadata.binarization = meta.value("binarization", "otsu");
  m.run_metadata.min_area = meta.value("min_area", 2000LL);
  m.run_metadata.tau = meta.value("tau", 150);
  m.run_metadata.connectivity = meta.value("connectivity", 8);
  m.run_metadata.layout_spec_hash = meta.value("layout_spec_hash", "");
  m.run_metadata.seed = meta.value("seed", std::uint64_t{0});

  for (const auto& rec : j.at("records")) {
    GlyphRecord r;
    r.relative_path = rec.at("path").get<std::string>();
    r.category = rec.at("category").get<std::string>();
    const auto era = era_from_token(rec.at("era").get<std::string>());
    const auto source = source_from_token(rec.at("source").get<std::string>());
    if (!era || !source)
      throw std::runtime_error("bad era/source token in record " +
                               r.relative_path);
    r.era = *era;
    r.source = *source;
    r.id = rec.at("id").get<long long>();
    r.width = rec.at("width").get<int>();
    r.height = rec.at("height").get<int>();
    if (rec.contains("provenance")) {
      const auto& p = rec.at("provenance");
      if (p.at("kind") == "book") {
        BookProvenance bp;
        bp.book = p.at("book").get<std::string>();
        bp.page = p.at("page").get<std::string>();
        bp.slice_index = p.at("slice_index").get<int>();
        bp.rank = p.at("rank").get<int>();
        if (p.contains("box_on_page"))
          bp.box_on_page = box_from_json(p.at("box_on_page"));
        r.provenance = bp;
      } else {
        r.provenance = WebProvenance{p.at("site").get<std::string>(),
                                     p.at("url").get<std::string>()};
      }
    }
    m.records.push_back(std::move(r));
  }
  return m;
}

Manifest read_manifest(const std::string& src) {
  std::ifstream in(src, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open manifest " + src);
  std::ostringstream buf;
  buf << in.rdbuf();
  return manifest_from_json(buf.str());
}

std::pair<Manifest, Manifest> split(const Manifest& m, std::uint64_t seed) {
  std::map<std::string, std::vector<const GlyphRecord*>> by_category;
  for (const GlyphRecord& r : m.records)
    by_category[r.category].push_back(&r);

  Manifest train, val;
  train.run_metadata = m.run_metadata;
  val.run_metadata = m.run_metadata;

  for (auto& [category, recs] : by_category) {
    std::sort(recs.begin(), recs.end(),
              [](const GlyphRecord* a, const GlyphRecord* b) {
                return a->relative_path < b->relative_path;
              });
    Lcg64 rng(seed ^ fnv1a64(category.data(), category.size()));
    for (std::size_t i = recs.size(); i > 1; --i)
      std::swap(recs[i - 1], recs[rng.bounded(i)]);

    const std::size_t n = recs.size();
    const std::size_t val_n = n >= 2 ? std::max<std::size_t>(n / 10, 1) : 0;
    for (std::size_t i = 0; i < n; ++i)
      (i < val_n ? val : train).records.push_back(*recs[i]);
  }
  return {std::move(train), std::move(val)};
}

}  // namespace glyphcut
