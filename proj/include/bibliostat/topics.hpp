#pragma once

// Topic phrases from paper titles.
//
// Extraction rules, applied to the lowercased title:
//   - punctuation, numbers, single-character tokens, function words and
//     lexicon stoplist words all end the current chunk and are dropped;
//     intra-word hyphens are kept and possessive apostrophes ("'s", "s'") are removed
//   - each remaining chunk of consecutive words is one candidate; chunks
//     longer than three words keep their last three
//   - merge rules map variants to canonical phrases; duplicates collapse
//   - a title keeps its three candidates with the highest document frequency
//     across the corpus, ties broken lexicographically
// A title with no surviving candidate takes its manual override, if any, and
// is otherwise flagged for triage.

#include "bibliostat/corpus.hpp"
#include "bibliostat/tsv.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace bibliostat::topics {

inline constexpr std::size_t kMaxPhraseWords = 3;
inline constexpr std::size_t kMaxTopics = 3;

struct TopicLexicon {
  std::map<std::string, std::string> merge_rules;  // variant -> canonical
  std::set<std::string> stoplist;
  std::map<std::string, std::vector<std::string>> overrides;  // paper id -> topics

  /// Throws ValidationError for chained rules, over-long phrases, or bad overrides.
  void validate() const;
};

/// JSON object with optional keys "merge_rules", "stoplist", "overrides".
/// Phrases are lowercased and whitespace-collapsed on load.
TopicLexicon load_lexicon(const std::filesystem::path& path);
TopicLexicon parse_lexicon(std::string_view json_text, const std::string& source_name);

/// Built-in function words that never appear inside a phrase.
const std::set<std::string>& function_words();

struct TopicAssignment {
  std::string paper_id;
  std::vector<std::string> topics;
  bool flagged = false;        // no topics; needs a manual override
  bool from_override = false;
  bool operator==(const TopicAssignment&) const = default;
};

/// Merged, deduplicated candidate phrases of one title, sorted.
std::vector<std::string> candidate_phrases(std::string_view title, const TopicLexicon& lexicon);

using PhraseCounts = std::map<std::string, std::size_t, std::less<>>;

/// Number of titles each candidate phrase occurs in.
PhraseCounts document_frequency(const std::vector<std::vector<std::string>>& candidates);

/// Keeps the kMaxTopics candidates ranked highest by `frequency`.
std::vector<std::string> select_topics(std::vector<std::string> candidates,
                                       const PhraseCounts& frequency);

/// One title on its own: candidates ranked lexicographically, no overrides.
TopicAssignment extract_topics(std::string_view title, const TopicLexicon& lexicon);

/// Every paper of the corpus, ranked against corpus-wide document frequency.
/// Overrides fill titles without candidates. Output follows corpus order.
std::vector<TopicAssignment> extract_corpus_topics(const corpus::Corpus& corpus,
                                                   const TopicLexicon& lexicon);

/// Replaces variants by canonicals, keeping the first occurrence of duplicates.
std::vector<TopicAssignment> apply_merge_rules(std::vector<TopicAssignment> assignments,
                                               const TopicLexicon& lexicon);

struct CumulativeTopics {
  std::string venue;
  int year = 0;
  std::size_t cumulative_papers = 0;
  std::size_t cumulative_topics = 0;  // distinct phrases seen so far
  bool operator==(const CumulativeTopics&) const = default;
};

/// Per venue, one row per year with papers. Assignments for papers outside
/// the corpus are ignored.
std::vector<CumulativeTopics> cumulative_topic_counts(const std::vector<TopicAssignment>& assignments,
                                                      const corpus::Corpus& corpus);

struct PhraseFrequency {
  std::string phrase;
  std::size_t count = 0;
  bool operator==(const PhraseFrequency&) const = default;
};

/// Count desc, phrase asc.
std::vector<PhraseFrequency> topic_frequency_table(const std::vector<TopicAssignment>& assignments);

/// Assignments file: paper id <TAB> topics joined by "; " <TAB> flag.
tsv::Table assignments_table(const std::vector<TopicAssignment>& assignments);
void write_assignments(const std::vector<TopicAssignment>& assignments,
                       const std::filesystem::path& path);
std::vector<TopicAssignment> load_assignments(const std::filesystem::path& path);

}  // namespace bibliostat::topics
