#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "glyphcut/geometry.hpp"

namespace glyphcut {

struct BookProvenance {
  std::string book;
  std::string page;
  int slice_index = -1;
  int rank = -1;
  std::optional<Box> box_on_page;
  bool operator==(const BookProvenance&) const = default;
};

struct WebProvenance {
  std::string site;
  std::string url;
  bool operator==(const WebProvenance&) const = default;
};

using Provenance = std::variant<std::monostate, BookProvenance, WebProvenance>;

/// One extracted glyph image in the corpus.
struct GlyphRecord {
  std::string relative_path;
  std::string category;
  Era era = Era::Obc;
  SourceKind source = SourceKind::Book;
  long long id = 0;
  int width = 0;
  int height = 0;
  Provenance provenance;
  bool operator==(const GlyphRecord&) const = default;
};

struct RunMetadata {
  std::string tool_version;
  std::string created_at;  // RFC 3339; excluded from determinism checks
  std::string binarization;  // "otsu" or "fixed:<t>"
  long long min_area = 2000;
  int tau = 150;
  int connectivity = 8;
  std::string layout_spec_hash;
  std::uint64_t seed = 0;
  bool operator==(const RunMetadata&) const = default;
};

struct Manifest {
  std::vector<GlyphRecord> records;
  RunMetadata run_metadata;
  bool operator==(const Manifest&) const = default;
};

/// Variant character -> canonical character map; canonical characters are
/// fixpoints. Loaded from UTF-8 TSV (variant <TAB> canonical, '#' comments).
class ConversionTable {
 public:
  ConversionTable() = default;
  static ConversionTable load_tsv(const std::string& path);
  static ConversionTable from_pairs(
      const std::vector<std::pair<std::string, std::string>>& pairs);

  /// Single-codepoint lookup, identity when absent.
  const std::string& map_char(const std::string& cp) const;
  std::size_t size() const { return mapping_.size(); }

 private:
  std::map<std::string, std::string> mapping_;
};

/// Maps each character of label through the table; identity when absent.
/// Idempotent and length-preserving in characters.
std::string unify_category(const std::string& label, const ConversionTable& t);

/// "<SourceToken>_<EraToken>_<id>", id decimal without padding.
std::string name_record(SourceKind source, Era era, long long id);

/// "<SourceToken>_<EraToken>/<category>/<name>.png". Throws when the
/// category contains a path separator.
std::string record_path(const GlyphRecord& r);

/// The nine source/era folder combinations present in the corpus layout.
bool is_standard_folder(SourceKind source, Era era);

/// JSON, stable key order, records sorted by relative_path. Refuses
/// duplicate (source, era, id). read(write(m)) == m field-for-field.
void write_manifest(const Manifest& m, const std::string& dest);
std::string manifest_to_json(const Manifest& m);
Manifest read_manifest(const std::string& src);
Manifest manifest_from_json(const std::string& text);

/// Deterministic per-category 9:1 split. Within each category, records
/// sorted by relative_path are Fisher-Yates shuffled with an Lcg64 seeded
/// by seed xor fnv1a64(category); the first floor(n/10) (minimum 1 when
/// n >= 2) go to validation.
std::pair<Manifest, Manifest> split(const Manifest& m, std::uint64_t seed);

}  // namespace glyphcut
