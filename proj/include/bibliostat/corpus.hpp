#pragma once

// Publication corpus: loading, validation, citation merge, author identity
// resolution, and ground-truth gender labels.
//
// Corpus files are JSON Lines, one paper per line:
//   {"id":"p1","venue":"SOUPS","year":2008,"title":"...","authors":["A","B"],"citations":12}
// "citations" is optional (absent or null). Unknown keys are rejected.
// Citations, ground-truth and alias files are TSV; see README.

#include "bibliostat/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace bibliostat::corpus {

struct VenueRange {
  int inception = 0;
  int end = 0;
  bool operator==(const VenueRange&) const = default;
};

using VenueConfig = std::map<std::string, VenueRange>;

struct PaperRecord {
  std::string id;
  std::string venue;
  int year = 0;
  std::string title;
  std::vector<std::string> authors;  // raw strings, published order
  std::optional<std::int64_t> citations;

  bool operator==(const PaperRecord&) const = default;
};

struct AuthorIdentity {
  std::string canonical_name;
  std::set<std::string> aliases;  // raw strings resolving here

  bool operator==(const AuthorIdentity&) const = default;
};

/// Normalized raw name -> canonical name.
using AliasMap = std::map<std::string, std::string>;

class IdentityTable {
 public:
  IdentityTable() = default;

  /// Builds the table from every raw author string in `papers`. Raw strings
  /// are normalized (trim, whitespace collapse, NFC), then mapped through
  /// `aliases` when present.
  static IdentityTable build(const std::vector<PaperRecord>& papers, const AliasMap& aliases);

  /// Canonical name for a raw author string. Throws std::out_of_range.
  const std::string& canonical(const std::string& raw) const;

  std::size_t size() const { return identities_.size(); }
  /// Sorted by canonical name.
  const std::vector<AuthorIdentity>& identities() const { return identities_; }

  bool operator==(const IdentityTable&) const = default;

 private:
  std::vector<AuthorIdentity> identities_;
  std::map<std::string, std::size_t> by_raw_;
};

struct Corpus {
  std::vector<PaperRecord> papers;
  IdentityTable identities;
  std::optional<GenderTable> ground_truth;
  VenueConfig venues;

  /// Canonical author names of `paper`, in published order.
  std::vector<std::string> team(const PaperRecord& paper) const;

  /// Venues that have at least one paper, sorted.
  std::vector<std::string> venues_present() const;
};

/// Reads and validates a corpus file. Throws ValidationError ("path:line: ...")
/// on the first malformed record, duplicate id, unknown venue, out-of-range
/// year, empty author list, or author repeated within a paper.
Corpus load_corpus(const std::filesystem::path& path, const VenueConfig& venues);
Corpus parse_corpus(std::istream& in, const std::string& source_name, const VenueConfig& venues);

/// Serializes papers back to the JSON Lines schema.
void write_corpus(const Corpus& corpus, std::ostream& out);

struct CitationMerge {
  Corpus corpus;
  std::vector<std::string> unknown_ids;  // ids in the file but not in the corpus, sorted
};

/// Citations file rows: id <TAB> non-negative integer.
CitationMerge merge_citations(Corpus corpus, const std::filesystem::path& citations_path);

/// Alias file rows: raw name <TAB> canonical name.
AliasMap load_alias_map(const std::filesystem::path& path);

Corpus resolve_identities(Corpus corpus, const AliasMap& aliases);
Corpus resolve_identities(Corpus corpus, const std::optional<std::filesystem::path>& alias_path);

/// Ground-truth rows: canonical name <TAB> male|female.
GenderTable load_ground_truth(const std::filesystem::path& path);

/// Papers of one venue with year <= as_of_year, in corpus order.
std::vector<const PaperRecord*> papers_up_to(const Corpus& corpus, const std::string& venue,
                                             int as_of_year);

}  // namespace bibliostat::corpus
