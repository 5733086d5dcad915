#include "bibliostat/topics.hpp"

#include "bibliostat/error.hpp"
#include "bibliostat/text.hpp"
#include "bibliostat/tsv.hpp"

#include <json.hpp>
#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace bibliostat::topics {
namespace {

std::string normalize_phrase(std::string_view raw) {
  std::istringstream in(text::to_lower(raw));
  std::string word;
  std::string out;
  while (in >> word) {
    if (!out.empty()) {
      out += ' ';
    }
    out += word;
  }
  return out;
}

std::size_t word_count(const std::string& phrase) {
  if (phrase.empty()) {
    return 0;
  }
  return static_cast<std::size_t>(std::count(phrase.begin(), phrase.end(), ' ')) + 1;
}

struct Token {
  std::string word;
  bool breaks_after = false;  // followed by punctuation
};

UChar32 peek(std::string_view s, std::size_t pos) {
  if (pos >= s.size()) {
    return U_SENTINEL;
  }
  UChar32 c = 0;
  int32_t i = static_cast<int32_t>(pos);
  U8_NEXT(s.data(), i, static_cast<int32_t>(s.size()), c);
  return c;
}

std::size_t next_pos(std::string_view s, std::size_t pos) {
  int32_t i = static_cast<int32_t>(pos);
  U8_FWD_1(s.data(), i, static_cast<int32_t>(s.size()));
  return static_cast<std::size_t>(i);
}

bool is_word_char(UChar32 c) { return c >= 0 && u_isalnum(c); }

std::vector<Token> tokenize(std::string_view lowered) {
  std::vector<Token> tokens;
  std::string word;
  auto finish = [&](bool punct) {
    if (!word.empty()) {
      tokens.push_back({std::move(word), false});
      word.clear();
    }
    if (punct && !tokens.empty()) {
      tokens.back().breaks_after = true;
    }
  };
  std::size_t pos = 0;
  while (pos < lowered.size()) {
    const UChar32 c = peek(lowered, pos);
    const std::size_t after = next_pos(lowered, pos);
    if (is_word_char(c)) {
      word.append(lowered.substr(pos, after - pos));
      pos = after;
      continue;
    }
    const bool hyphen = c == '-' || c == 0x2010 || c == 0x2011;
    const bool apostrophe = c == '\'' || c == 0x2019;
    if (!word.empty() && (hyphen || apostrophe) && is_word_char(peek(lowered, after))) {
      if (hyphen) {
        word += '-';
        pos = after;
        continue;
      }
      // possessive 's is dropped, other apostrophes are squeezed out
      if (peek(lowered, after) == 's' && !is_word_char(peek(lowered, after + 1))) {
        pos = after + 1;
      } else {
        pos = after;
      }
      continue;
    }
    if (!word.empty() && apostrophe) {
      // plural possessive ("users'")
      pos = after;
      continue;
    }
    finish(!u_isspace(c));
    pos = after;
  }
  finish(false);
  return tokens;
}

bool has_letter(const std::string& word) {
  std::size_t pos = 0;
  while (pos < word.size()) {
    if (u_isalpha(peek(word, pos))) {
      return true;
    }
    pos = next_pos(word, pos);
  }
  return false;
}

const std::string& canonical(const std::string& phrase, const TopicLexicon& lexicon) {
  auto it = lexicon.merge_rules.find(phrase);
  return it == lexicon.merge_rules.end() ? phrase : it->second;
}

std::vector<std::string> dedupe_in_order(std::vector<std::string> phrases) {
  std::vector<std::string> out;
  for (auto& p : phrases) {
    if (std::find(out.begin(), out.end(), p) == out.end()) {
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace

const std::set<std::string>& function_words() {
  static const std::set<std::string> words = {
      "a",       "about",   "above",  "across",  "after",   "against", "all",     "along",   "among",   "around",
      "behind",  "despite", "like",   "near",    "onto",    "since",   "unlike",
      "an",      "and",     "any",    "are",     "as",      "at",    "be",      "been",
      "before",  "being",   "below",  "between", "beyond",  "both",  "but",     "by",
      "can",     "could",   "do",     "does",    "doing",   "down",  "during",  "each",
      "either",  "for",     "from",   "had",     "has",     "have",  "he",      "her",
      "his",     "how",     "i",      "if",      "in",      "into",  "is",      "it",
      "its",     "just",    "may",    "me",      "might",   "more",  "most",    "much",
      "must",    "my",      "no",     "nor",     "not",     "of",    "off",     "on",
      "one",     "only",    "or",     "other",   "our",     "ours",  "out",     "over",
      "own",     "per",     "same",   "she",     "should",  "so",    "some",    "such",
      "than",    "that",    "the",    "their",   "them",    "then",  "there",   "these",
      "they",    "this",    "those",  "through", "to",      "too",   "toward",  "towards",
      "under",   "until",   "up",     "upon",    "us",      "very",  "via",     "vs",
      "was",     "we",      "were",   "what",    "when",    "where", "whether", "which",
      "while",   "who",     "whom",   "whose",   "why",     "will",  "with",    "within",
      "without", "would",   "yet",    "you",     "your",    "versus"};
  return words;
}

void TopicLexicon::validate() const {
  for (const auto& [variant, target] : merge_rules) {
    if (variant.empty() || target.empty()) {
      throw ValidationError("lexicon: empty merge rule phrase");
    }
    if (word_count(target) > kMaxPhraseWords) {
      throw ValidationError("lexicon: canonical phrase '" + target + "' has more than " +
                            std::to_string(kMaxPhraseWords) + " words");
    }
    if (merge_rules.count(target) != 0) {
      throw ValidationError("lexicon: merge rule '" + variant + "' -> '" + target +
                            "' points at another variant");
    }
  }
  for (const auto& word : stoplist) {
    if (word.empty() || word.find(' ') != std::string::npos) {
      throw ValidationError("lexicon: stoplist entry '" + word + "' is not a single word");
    }
  }
  for (const auto& [id, phrases] : overrides) {
    if (phrases.empty() || phrases.size() > kMaxTopics) {
      throw ValidationError("lexicon: override for " + id + " must list 1 to " +
                            std::to_string(kMaxTopics) + " topics");
    }
    for (const auto& p : phrases) {
      if (p.empty() || word_count(p) > kMaxPhraseWords) {
        throw ValidationError("lexicon: override topic '" + p + "' for " + id +
                              " must have 1 to " + std::to_string(kMaxPhraseWords) + " words");
      }
    }
  }
}

TopicLexicon parse_lexicon(std::string_view json_text, const std::string& source_name) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(source_name + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw ValidationError(source_name + ": lexicon must be a JSON object");
  }
  TopicLexicon lex;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "merge_rules") {
        for (const auto& [variant, target] : value.items()) {
          lex.merge_rules[normalize_phrase(variant)] = normalize_phrase(target.get<std::string>());
        }
      } else if (key == "stoplist") {
        for (const auto& word : value) {
          lex.stoplist.insert(normalize_phrase(word.get<std::string>()));
        }
      } else if (key == "overrides") {
        for (const auto& [id, list] : value.items()) {
          std::vector<std::string> phrases;
          for (const auto& p : list) {
            phrases.push_back(normalize_phrase(p.get<std::string>()));
          }
          lex.overrides[id] = dedupe_in_order(std::move(phrases));
        }
      } else {
        throw ValidationError(source_name + ": unknown lexicon key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(source_name + ": " + e.what());
  }
  try {
    lex.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(source_name + ": " + e.what());
  }
  return lex;
}

TopicLexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open lexicon " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_lexicon(buf.str(), path.string());
}

std::vector<std::string> candidate_phrases(std::string_view title, const TopicLexicon& lexicon) {
  const auto& fwords = function_words();
  std::set<std::string> found;
  std::vector<std::string> chunk;
  auto flush = [&] {
    if (chunk.empty()) {
      return;
    }
    const std::size_t skip = chunk.size() > kMaxPhraseWords ? chunk.size() - kMaxPhraseWords : 0;
    std::string phrase;
    for (std::size_t i = skip; i < chunk.size(); ++i) {
      if (!phrase.empty()) {
        phrase += ' ';
      }
      phrase += chunk[i];
    }
    found.insert(canonical(phrase, lexicon));
    chunk.clear();
  };
  for (auto& token : tokenize(text::to_lower(title))) {
    const bool keep = has_letter(token.word) && text::code_point_count(token.word) > 1 &&
                      fwords.count(token.word) == 0 && lexicon.stoplist.count(token.word) == 0;
    if (keep) {
      chunk.push_back(std::move(token.word));
    } else {
      flush();
    }
    if (token.breaks_after) {
      flush();
    }
  }
  flush();
  return {found.begin(), found.end()};
}

PhraseCounts document_frequency(const std::vector<std::vector<std::string>>& candidates) {
  PhraseCounts counts;
  for (const auto& list : candidates) {
    for (const auto& p : list) {
      ++counts[p];
    }
  }
  return counts;
}

std::vector<std::string> select_topics(std::vector<std::string> candidates,
                                       const PhraseCounts& frequency) {
  auto freq = [&](const std::string& p) {
    auto it = frequency.find(p);
    return it == frequency.end() ? std::size_t{0} : it->second;
  };
  std::sort(candidates.begin(), candidates.end(), [&](const std::string& a, const std::string& b) {
    const auto fa = freq(a);
    const auto fb = freq(b);
    return fa != fb ? fa > fb : a < b;
  });
  if (candidates.size() > kMaxTopics) {
    candidates.resize(kMaxTopics);
  }
  return candidates;
}

TopicAssignment extract_topics(std::string_view title, const TopicLexicon& lexicon) {
  TopicAssignment out;
  out.topics = select_topics(candidate_phrases(title, lexicon), {});
  out.flagged = out.topics.empty();
  return out;
}

std::vector<TopicAssignment> extract_corpus_topics(const corpus::Corpus& corpus,
                                                   const TopicLexicon& lexicon) {
  std::vector<std::vector<std::string>> candidates;
  candidates.reserve(corpus.papers.size());
  for (const auto& paper : corpus.papers) {
    candidates.push_back(candidate_phrases(paper.title, lexicon));
  }
  const PhraseCounts df = document_frequency(candidates);
  std::vector<TopicAssignment> out;
  out.reserve(corpus.papers.size());
  for (std::size_t i = 0; i < corpus.papers.size(); ++i) {
    TopicAssignment a;
    a.paper_id = corpus.papers[i].id;
    a.topics = select_topics(std::move(candidates[i]), df);
    if (a.topics.empty()) {
      auto it = lexicon.overrides.find(a.paper_id);
      if (it != lexicon.overrides.end()) {
        for (const auto& p : it->second) {
          a.topics.push_back(canonical(p, lexicon));
        }
        a.topics = dedupe_in_order(std::move(a.topics));
        a.from_override = true;
      }
    }
    a.flagged = a.topics.empty();
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<TopicAssignment> apply_merge_rules(std::vector<TopicAssignment> assignments,
                                               const TopicLexicon& lexicon) {
  for (auto& a : assignments) {
    for (auto& p : a.topics) {
      p = canonical(p, lexicon);
    }
    a.topics = dedupe_in_order(std::move(a.topics));
  }
  return assignments;
}

std::vector<CumulativeTopics> cumulative_topic_counts(const std::vector<TopicAssignment>& assignments,
                                                      const corpus::Corpus& corpus) {
  std::unordered_map<std::string, const TopicAssignment*> by_id;
  for (const auto& a : assignments) {
    by_id.emplace(a.paper_id, &a);
  }
  std::vector<CumulativeTopics> out;
  for (const auto& venue : corpus.venues_present()) {
    std::map<int, std::vector<const corpus::PaperRecord*>> by_year;
    for (const auto& p : corpus.papers) {
      if (p.venue == venue) {
        by_year[p.year].push_back(&p);
      }
    }
    std::set<std::string> seen;
    std::size_t papers = 0;
    for (const auto& [year, list] : by_year) {
      for (const auto* p : list) {
        ++papers;
        auto it = by_id.find(p->id);
        if (it != by_id.end()) {
          seen.insert(it->second->topics.begin(), it->second->topics.end());
        }
      }
      out.push_back({venue, year, papers, seen.size()});
    }
  }
  return out;
}

std::vector<PhraseFrequency> topic_frequency_table(const std::vector<TopicAssignment>& assignments) {
  std::map<std::string, std::size_t> counts;
  for (const auto& a : assignments) {
    for (const auto& p : a.topics) {
      ++counts[p];
    }
  }
  std::vector<PhraseFrequency> out;
  for (const auto& [phrase, count] : counts) {
    out.push_back({phrase, count});
  }
  std::stable_sort(out.begin(), out.end(), [](const PhraseFrequency& a, const PhraseFrequency& b) {
    return a.count > b.count;
  });
  return out;
}

tsv::Table assignments_table(const std::vector<TopicAssignment>& assignments) {
  tsv::Table table({"paper_id", "topics", "flagged"});
  for (const auto& a : assignments) {
    table.add({a.paper_id, text::join(a.topics, "; "), a.flagged ? "1" : "0"});
  }
  return table;
}

void write_assignments(const std::vector<TopicAssignment>& assignments,
                       const std::filesystem::path& path) {
  assignments_table(assignments).write(path);
}

std::vector<TopicAssignment> load_assignments(const std::filesystem::path& path) {
  const auto table = tsv::Table::load(path);
  std::vector<TopicAssignment> out;
  for (const auto& row : table.data()) {
    if (row.size() != 3) {
      throw ValidationError(path.string() + ": assignment rows need 3 fields");
    }
    TopicAssignment a;
    a.paper_id = row[0];
    std::size_t start = 0;
    while (start < row[1].size()) {
      std::size_t end = row[1].find("; ", start);
      if (end == std::string::npos) {
        end = row[1].size();
      }
      a.topics.push_back(row[1].substr(start, end - start));
      start = end + 2;
    }
    a.flagged = row[2] == "1";
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace bibliostat::topics
