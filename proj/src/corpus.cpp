#include "bibliostat/corpus.hpp"

#include "bibliostat/error.hpp"
#include "bibliostat/text.hpp"
#include "bibliostat/tsv.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <unordered_set>

namespace bibliostat::corpus {
namespace {

using nlohmann::json;

const std::set<std::string> kCorpusKeys = {"id", "venue", "year", "title", "authors", "citations"};

PaperRecord parse_record(const json& j, const std::string& where) {
  if (!j.is_object()) {
    throw ValidationError(where + "record is not a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    if (!kCorpusKeys.contains(key)) {
      throw ValidationError(where + "unknown field '" + key + "'");
    }
  }
  auto require_string = [&](const char* key) -> std::string {
    if (!j.contains(key) || !j.at(key).is_string()) {
      throw ValidationError(where + "missing or non-string '" + key + "'");
    }
    return j.at(key).get<std::string>();
  };
  PaperRecord paper;
  paper.id = require_string("id");
  if (paper.id.empty()) {
    throw ValidationError(where + "empty id");
  }
  const std::string ctx = where + "paper " + paper.id + ": ";
  paper.venue = require_string("venue");
  paper.title = require_string("title");
  if (text::normalize_display_name(paper.title).empty()) {
    throw ValidationError(ctx + "empty title");
  }
  if (!j.contains("year") || !j.at("year").is_number_integer()) {
    throw ValidationError(ctx + "missing or non-integer 'year'");
  }
  paper.year = j.at("year").get<int>();
  if (!j.contains("authors") || !j.at("authors").is_array()) {
    throw ValidationError(ctx + "missing 'authors' list");
  }
  for (const auto& a : j.at("authors")) {
    if (!a.is_string()) {
      throw ValidationError(ctx + "non-string author entry");
    }
    paper.authors.push_back(a.get<std::string>());
  }
  if (paper.authors.empty()) {
    throw ValidationError(ctx + "empty author list");
  }
  if (j.contains("citations") && !j.at("citations").is_null()) {
    const auto& c = j.at("citations");
    if (!c.is_number_integer() || c.get<std::int64_t>() < 0) {
      throw ValidationError(ctx + "citations must be a non-negative integer");
    }
    paper.citations = c.get<std::int64_t>();
  }
  return paper;
}

void check_team(const Corpus& corpus, const PaperRecord& paper, const std::string& where) {
  std::set<std::string> seen;
  for (const auto& raw : paper.authors) {
    const std::string& name = corpus.identities.canonical(raw);
    if (!seen.insert(name).second) {
      throw ValidationError(where + "paper " + paper.id + ": author '" + name +
                            "' listed more than once");
    }
  }
}

std::int64_t parse_count(const std::string& token, const std::string& where) {
  std::int64_t value = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ValidationError(where + "not an integer: '" + token + "'");
  }
  if (value < 0) {
    throw ValidationError(where + "negative citation count " + token);
  }
  return value;
}

}  // namespace

IdentityTable IdentityTable::build(const std::vector<PaperRecord>& papers,
                                   const AliasMap& aliases) {
  std::map<std::string, std::set<std::string>> grouped;
  std::map<std::string, std::string> raw_to_canonical;
  for (const auto& paper : papers) {
    for (const auto& raw : paper.authors) {
      if (raw_to_canonical.contains(raw)) {
        continue;
      }
      std::string key = text::normalize_display_name(raw);
      if (key.empty()) {
        throw ValidationError("paper " + paper.id + ": author name is blank");
      }
      auto alias = aliases.find(key);
      std::string canonical = alias == aliases.end() ? key : alias->second;
      grouped[canonical].insert(raw);
      raw_to_canonical.emplace(raw, std::move(canonical));
    }
  }
  IdentityTable table;
  std::map<std::string, std::size_t> index;
  for (auto& [canonical, raws] : grouped) {
    index.emplace(canonical, table.identities_.size());
    table.identities_.push_back(AuthorIdentity{canonical, std::move(raws)});
  }
  for (const auto& [raw, canonical] : raw_to_canonical) {
    table.by_raw_.emplace(raw, index.at(canonical));
  }
  return table;
}

const std::string& IdentityTable::canonical(const std::string& raw) const {
  auto it = by_raw_.find(raw);
  if (it == by_raw_.end()) {
    throw std::out_of_range("unresolved author name: " + raw);
  }
  return identities_[it->second].canonical_name;
}

std::vector<std::string> Corpus::team(const PaperRecord& paper) const {
  std::vector<std::string> names;
  names.reserve(paper.authors.size());
  for (const auto& raw : paper.authors) {
    names.push_back(identities.canonical(raw));
  }
  return names;
}

std::vector<std::string> Corpus::venues_present() const {
  std::set<std::string> found;
  for (const auto& p : papers) {
    found.insert(p.venue);
  }
  return {found.begin(), found.end()};
}

Corpus parse_corpus(std::istream& in, const std::string& source_name, const VenueConfig& venues) {
  Corpus corpus;
  corpus.venues = venues;
  std::unordered_set<std::string> ids;
  std::vector<std::size_t> line_of;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.find_first_not_of(" \t") == std::string::npos) {
      continue;
    }
    const std::string where = at_line(source_name, number, "");
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ValidationError(where + "malformed JSON: " + e.what());
    }
    PaperRecord paper = parse_record(j, where);
    auto venue = venues.find(paper.venue);
    if (venue == venues.end()) {
      throw ValidationError(where + "paper " + paper.id + ": unknown venue '" + paper.venue + "'");
    }
    if (paper.year < venue->second.inception || paper.year > venue->second.end) {
      throw ValidationError(where + "paper " + paper.id + ": year " + std::to_string(paper.year) +
                            " outside " + paper.venue + " range " +
                            std::to_string(venue->second.inception) + ".." +
                            std::to_string(venue->second.end));
    }
    if (!ids.insert(paper.id).second) {
      throw ValidationError(where + "duplicate id '" + paper.id + "'");
    }
    corpus.papers.push_back(std::move(paper));
    line_of.push_back(number);
  }
  try {
    corpus.identities = IdentityTable::build(corpus.papers, {});
  } catch (const ValidationError& e) {
    throw ValidationError(source_name + ": " + e.what());
  }
  for (std::size_t i = 0; i < corpus.papers.size(); ++i) {
    check_team(corpus, corpus.papers[i], at_line(source_name, line_of[i], ""));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, const VenueConfig& venues) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open corpus file " + path.string());
  }
  return parse_corpus(in, path.string(), venues);
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& p : corpus.papers) {
    nlohmann::ordered_json j;
    j["id"] = p.id;
    j["venue"] = p.venue;
    j["year"] = p.year;
    j["title"] = p.title;
    j["authors"] = p.authors;
    if (p.citations) {
      j["citations"] = *p.citations;
    }
    out << j.dump() << '\n';
  }
}

CitationMerge merge_citations(Corpus corpus, const std::filesystem::path& citations_path) {
  const std::string source = citations_path.string();
  std::map<std::string, std::int64_t> counts;
  for (const auto& row : tsv::read(citations_path)) {
    const std::string where = at_line(source, row.line, "");
    if (row.fields.size() != 2) {
      throw ValidationError(where + "expected 2 columns (id, citations)");
    }
    const std::int64_t value = parse_count(row.fields[1], where);
    auto [it, inserted] = counts.emplace(row.fields[0], value);
    if (!inserted && it->second != value) {
      throw ValidationError(where + "conflicting citation counts for id '" + row.fields[0] + "'");
    }
  }
  std::set<std::string> known;
  for (auto& paper : corpus.papers) {
    known.insert(paper.id);
    auto it = counts.find(paper.id);
    if (it == counts.end()) {
      continue;
    }
    if (paper.citations && *paper.citations != it->second) {
      throw ValidationError(source + ": conflicting citation counts for id '" + paper.id +
                            "' (corpus " + std::to_string(*paper.citations) + ", file " +
                            std::to_string(it->second) + ")");
    }
    paper.citations = it->second;
  }
  CitationMerge result{std::move(corpus), {}};
  for (const auto& [id, value] : counts) {
    if (!known.contains(id)) {
      result.unknown_ids.push_back(id);
    }
  }
  return result;
}

AliasMap load_alias_map(const std::filesystem::path& path) {
  const std::string source = path.string();
  AliasMap aliases;
  for (const auto& row : tsv::read(path)) {
    const std::string where = at_line(source, row.line, "");
    if (row.fields.size() != 2) {
      throw ValidationError(where + "expected 2 columns (raw name, canonical name)");
    }
    std::string raw = text::normalize_display_name(row.fields[0]);
    std::string canonical = text::normalize_display_name(row.fields[1]);
    if (raw.empty() || canonical.empty()) {
      throw ValidationError(where + "blank name");
    }
    auto [it, inserted] = aliases.emplace(raw, canonical);
    if (!inserted && it->second != canonical) {
      throw ValidationError(where + "'" + raw + "' mapped to both '" + it->second + "' and '" +
                            canonical + "'");
    }
  }
  for (const auto& [raw, canonical] : aliases) {
    auto next = aliases.find(canonical);
    if (next != aliases.end() && next->second != canonical) {
      throw ValidationError(source + ": alias chain '" + raw + "' -> '" + canonical + "' -> '" +
                            next->second + "'");
    }
  }
  return aliases;
}

Corpus resolve_identities(Corpus corpus, const AliasMap& aliases) {
  corpus.identities = IdentityTable::build(corpus.papers, aliases);
  for (const auto& paper : corpus.papers) {
    check_team(corpus, paper, "");
  }
  return corpus;
}

Corpus resolve_identities(Corpus corpus, const std::optional<std::filesystem::path>& alias_path) {
  return resolve_identities(std::move(corpus), alias_path ? load_alias_map(*alias_path) : AliasMap{});
}

GenderTable load_ground_truth(const std::filesystem::path& path) {
  const std::string source = path.string();
  GenderTable table;
  for (const auto& row : tsv::read(path)) {
    const std::string where = at_line(source, row.line, "");
    if (row.fields.size() != 2) {
      throw ValidationError(where + "expected 2 columns (name, label)");
    }
    const std::string name = text::normalize_display_name(row.fields[0]);
    if (name.empty()) {
      throw ValidationError(where + "blank name");
    }
    auto label = parse_binary_gender(row.fields[1]);
    if (!label) {
      throw ValidationError(where + "unknown label '" + row.fields[1] + "'");
    }
    if (table.contains(name) && table.lookup(name) != *label) {
      throw ValidationError(where + "conflicting labels for '" + name + "'");
    }
    table.set(name, *label);
  }
  return table;
}

std::vector<const PaperRecord*> papers_up_to(const Corpus& corpus, const std::string& venue,
                                             int as_of_year) {
  std::vector<const PaperRecord*> out;
  for (const auto& p : corpus.papers) {
    if (p.venue == venue && p.year <= as_of_year) {
      out.push_back(&p);
    }
  }
  return out;
}

}  // namespace bibliostat::corpus
