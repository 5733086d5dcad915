#include "bibliostat/error.hpp"
#include "bibliostat/text.hpp"
#include "bibliostat/topics.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>

namespace tp = bibliostat::topics;

namespace {

using Strings = std::vector<std::string>;

tp::TopicLexicon lexicon(const std::string& json) { return tp::parse_lexicon(json, "lex"); }

}  // namespace

TEST_SUITE("topics") {
  TEST_CASE("chunking rules") {
    const tp::TopicLexicon none;
    CHECK(tp::candidate_phrases("Mental Models of Password Managers", none) ==
          Strings{"mental models", "password managers"});
    CHECK(tp::candidate_phrases("Users' Trust in Two-Factor Authentication Prompts", none) ==
          Strings{"two-factor authentication prompts", "users trust"});
    CHECK(tp::candidate_phrases("Alice's Secure Protocols", none) == Strings{"alice secure protocols"});
    // long chunks keep their last three words
    CHECK(tp::candidate_phrases("Secure Group Key Exchange Protocols", none) == Strings{"key exchange protocols"});
    // numbers and single characters end a chunk
    CHECK(tp::candidate_phrases("Top 10 Password Tips", none) == Strings{"password tips", "top"});
    CHECK(tp::candidate_phrases("X Window Security", none) == Strings{"window security"});
  }

  TEST_CASE("privacy label example") {
    const auto lex = lexicon(R"({"merge_rules":{"nutrition label":"privacy label"},"stoplist":["privacy"]})");
    const auto a = tp::extract_topics("A \"Nutrition Label\" for Privacy", lex);
    CHECK(a.topics == Strings{"privacy label"});
    CHECK_FALSE(a.flagged);
    const auto plain = tp::extract_topics("A \"Nutrition Label\" for Privacy", {});
    CHECK(plain.topics == Strings{"nutrition label", "privacy"});
  }

  TEST_CASE("stopword-only titles are flagged") {
    const auto a = tp::extract_topics("On What It Is", {});
    CHECK(a.flagged);
    CHECK(a.topics.empty());
  }

  TEST_CASE("overrides fill titles without candidates") {
    const auto c = support::corpus_from(
        R"({"id":"a","venue":"V","year":2001,"title":"On What It Is","authors":["X"]})" "\n"
        R"({"id":"b","venue":"V","year":2001,"title":"Of and For","authors":["X"]})" "\n",
        {{"V", {2000, 2005}}});
    const auto lex = lexicon(R"({"overrides":{"a":["usage"]}})");
    const auto out = tp::extract_corpus_topics(c, lex);
    REQUIRE(out.size() == 2);
    CHECK(out[0].topics == Strings{"usage"});
    CHECK(out[0].from_override);
    CHECK(out[1].flagged);
  }

  TEST_CASE("at most three topics, ranked by corpus frequency") {
    const auto c = support::corpus_from(
        R"({"id":"a","venue":"V","year":2001,"title":"Alpha, Beta, Gamma, Delta","authors":["X"]})" "\n"
        R"({"id":"b","venue":"V","year":2001,"title":"Delta and Gamma","authors":["X"]})" "\n"
        R"({"id":"c","venue":"V","year":2002,"title":"Delta","authors":["X"]})" "\n",
        {{"V", {2000, 2005}}});
    const auto out = tp::extract_corpus_topics(c, {});
    CHECK(out[0].topics == Strings{"delta", "gamma", "alpha"});
    const auto freq = tp::topic_frequency_table(out);
    REQUIRE(freq.size() == 3);
    CHECK(freq[0] == tp::PhraseFrequency{"delta", 3});
    CHECK(freq[1] == tp::PhraseFrequency{"gamma", 2});
    const auto cum = tp::cumulative_topic_counts(out, c);
    REQUIRE(cum.size() == 2);
    CHECK(cum[0].cumulative_papers == 2);
    CHECK(cum[0].cumulative_topics == 3);
    CHECK(cum[1].cumulative_papers == 3);
    CHECK(cum[1].cumulative_topics == 3);
  }

  TEST_CASE("merge rules") {
    const auto lex = lexicon(R"({"merge_rules":{"e-cash":"electronic cash"}})");
    const std::vector<tp::TopicAssignment> in = {{"p", {"e-cash", "electronic cash", "tokens"}, false, false}};
    const auto once = tp::apply_merge_rules(in, lex);
    CHECK(once[0].topics == Strings{"electronic cash", "tokens"});
    CHECK(tp::apply_merge_rules(once, lex) == once);
    CHECK(tp::apply_merge_rules(in, {}) == in);
  }

  TEST_CASE("lexicon validation") {
    CHECK_THROWS_AS(lexicon(R"({"merge_rules":{"a":"b","b":"c"}})"), bibliostat::ValidationError);
    CHECK_THROWS_AS(lexicon(R"({"merge_rules":{"a":"one two three four"}})"), bibliostat::ValidationError);
    CHECK_THROWS_AS(lexicon(R"({"stoplist":["two words"]})"), bibliostat::ValidationError);
    CHECK_THROWS_AS(lexicon(R"({"overrides":{"p":[]}})"), bibliostat::ValidationError);
    CHECK_THROWS_AS(lexicon(R"({"synonyms":{}})"), bibliostat::ValidationError);
    CHECK_THROWS_AS(lexicon("[1]"), bibliostat::ValidationError);
    const auto ok = lexicon(R"({"merge_rules":{"  E-Cash ":"Electronic   Cash"}})");
    CHECK(ok.merge_rules.at("e-cash") == "electronic cash");
  }

  TEST_CASE("assignments file round-trips") {
    const std::vector<tp::TopicAssignment> a = {{"p1", {"x y", "z"}, false, false}, {"p2", {}, true, false}};
    const auto dir = support::temp_dir("topics");
    tp::write_assignments(a, dir / "a.tsv");
    CHECK(tp::load_assignments(dir / "a.tsv") == a);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("emitted phrases are short and lowercase") {
    const auto c = bibliostat::corpus::load_corpus(support::fixture("topics_corpus.jsonl"), {{"SOUPS", {2005, 2024}}});
    const auto out = tp::extract_corpus_topics(c, tp::load_lexicon(support::fixture("topics_lexicon.json")));
    for (const auto& a : out) {
      CHECK(a.topics.size() <= tp::kMaxTopics);
      for (const auto& p : a.topics) {
        CHECK(std::count(p.begin(), p.end(), ' ') < 3);
        CHECK(bibliostat::text::to_lower(p) == p);
      }
    }
  }
}
