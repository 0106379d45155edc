#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <regex>

#include "helpers.hpp"
#include "regcheck/text.hpp"

using namespace regcheck::corpus;

namespace {

WordSet load(const std::string& name, bool fold) {
  std::ifstream in(std::string(REGCHECK_DATA_DIR) + "/" + name);
  return load_word_list(in, fold);
}

// Reference count: runs of ASCII alphanumerics, or single other characters.
std::vector<std::string> regex_tokens(const std::string& text) {
  static const std::regex re(R"([A-Za-z0-9]+|[^\sA-Za-z0-9])");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
       it != std::sregex_iterator(); ++it) {
    out.push_back(it->str());
  }
  return out;
}

std::vector<std::string> surfaces(const std::vector<Token>& toks) {
  std::vector<std::string> out;
  for (const auto& t : toks) out.push_back(t.surface);
  return out;
}

const std::string kExample1First =
    "In the case of a personal data breach, the controller shall without undue delay "
    "and, where feasible, not later than 72 hours after having become aware of it, "
    "notify the personal data breach to the supervisory authority competent in "
    "accordance with Article 55, unless the personal data breach is unlikely to result "
    "in a risk to the rights and freedoms of natural persons.";

}  // namespace

TEST(WordLists, EmbeddedDefaultsMatchDataFiles) {
  EXPECT_EQ(default_stopwords(), load("stopwords.txt", true));
  EXPECT_EQ(default_abbreviations(), load("abbreviations.txt", false));
}

TEST(WordLists, CommentsAndBlanksSkipped) {
  std::istringstream in("# header\n\n  Shall \nWILL\n");
  const auto ws = load_word_list(in, true);
  EXPECT_EQ(ws, (WordSet{"shall", "will"}));
}

TEST(SplitSentences, TwoSentencesOfExample1) {
  const std::string text =
      kExample1First +
      " Where the notification to the supervisory authority is not made within 72 hours, "
      "it shall be accompanied by reasons for the delay.";
  const auto b = split_sentences(text, default_abbreviations());
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(text.substr(b[0].begin, b[0].end - b[0].begin), kExample1First);
  EXPECT_EQ(text.substr(b[1].begin, 5), "Where");
  EXPECT_EQ(b[1].end, text.size());
}

TEST(SplitSentences, AbbreviationDoesNotSplit) {
  const std::string text = "See Art. 5 of the Regulation. It applies.";
  const auto b = split_sentences(text, default_abbreviations());
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(text.substr(b[0].begin, b[0].end), "See Art. 5 of the Regulation.");
}

TEST(SplitSentences, LowercaseContinuationDoesNotSplit) {
  EXPECT_EQ(split_sentences("Fees apply. then more.", {}).size(), 1u);
  EXPECT_EQ(split_sentences("Is it? Yes! (Done.) Next.", {}).size(), 4u);
  EXPECT_TRUE(split_sentences("   \n\t ", {}).empty());
}

TEST(Tokenize, Example1FirstSentenceMatchesReferenceCount) {
  const auto toks = tokenize(kExample1First, 0, TextResources::defaults());
  const auto ref = regex_tokens(kExample1First);
  EXPECT_EQ(surfaces(toks), ref);
  EXPECT_EQ(toks.size(), 69u);
}

TEST(Tokenize, JoinersStayInsideWords) {
  const auto toks = tokenize("third-party data, e.g. 1,000.50 users' rights", 10,
                             TextResources::defaults());
  EXPECT_EQ(surfaces(toks),
            (std::vector<std::string>{"third-party", "data", ",", "e.g.", "1,000.50",
                                      "users", "'", "rights"}));
  EXPECT_EQ(toks[1].char_offset, 22u);
  EXPECT_TRUE(toks.back().surface == "rights" && !toks.back().is_stopword);
}

TEST(Tokenize, StopwordFlagUsesLowercase) {
  const auto toks = tokenize("The controller SHALL act", 0, TextResources::defaults());
  EXPECT_TRUE(toks[0].is_stopword);
  EXPECT_FALSE(toks[1].is_stopword);
  EXPECT_TRUE(toks[2].is_stopword);
  EXPECT_EQ(toks[2].lower, "shall");
}

TEST(Tokenize, OffsetsPointAtSurfacesOnRandomText) {
  std::mt19937 rng(7);
  const std::string alphabet = "abcXYZ09 ,.;:-'()\n";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  for (int round = 0; round < 300; ++round) {
    std::string text;
    for (int i = 0; i < 60; ++i) text += alphabet[pick(rng)];
    for (const auto& t : tokenize(text, 100, TextResources::defaults())) {
      ASSERT_GE(t.char_offset, 100u);
      EXPECT_EQ(text.substr(t.char_offset - 100, t.surface.size()), t.surface) << text;
      EXPECT_EQ(t.lower, fold_case(t.surface));
    }
  }
}

TEST(LowerTerms, KeepsStopwords) {
  EXPECT_EQ(lower_terms("Delete YOUR data."),
            (std::vector<std::string>{"delete", "your", "data", "."}));
}
