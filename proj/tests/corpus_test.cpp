#include <gtest/gtest.h>

#include <random>
#include <set>

#include "helpers.hpp"
#include "regcheck/corpus.hpp"

using namespace regcheck;
using namespace regcheck::corpus;
using testing_support::data_path;
using testing_support::read_file;

namespace {

Document article33() {
  std::istringstream meta(read_file(data_path("article33/metadata.txt")));
  return load_document(read_file(data_path("article33/text.txt")), parse_metadata(meta));
}

}  // namespace

TEST(Metadata, BothSeparators) {
  std::istringstream in("# c\ndoc_id: GDPR\ntitle = General Data Protection Regulation\n");
  const auto m = parse_metadata(in);
  EXPECT_EQ(m.at("doc_id"), "GDPR");
  EXPECT_EQ(m.at("title"), "General Data Protection Regulation");
}

TEST(LoadDocument, Article33Structure) {
  const auto doc = article33();
  EXPECT_EQ(doc.doc_id, "GDPR");
  ASSERT_EQ(doc.articles.size(), 1u);
  EXPECT_EQ(doc.articles[0].article_id, "33");
  ASSERT_EQ(doc.sentences.size(), 2u);
  EXPECT_EQ(doc.sentences[1].sent_id, 1);
  EXPECT_EQ(doc.sentences[0].tokens.size(), 69u);
  EXPECT_TRUE(doc.sentences[1].text.starts_with("Where the notification"));
  const auto raw = read_file(data_path("article33/text.txt"));
  for (const auto& s : doc.sentences) {
    EXPECT_EQ(raw.substr(s.char_offset, s.text.size()), s.text);
    for (const auto& t : s.tokens) EXPECT_EQ(raw.substr(t.char_offset, t.surface.size()), t.surface);
  }
}

TEST(LoadDocument, Errors) {
  EXPECT_ERROR_CODE(load_document("  \n ", {{"doc_id", "x"}}), ErrorCode::InvalidInput);
  EXPECT_ERROR_CODE(load_document("Some text.", {{"title", "x"}}), ErrorCode::MissingMetadata);
  EXPECT_ERROR_CODE(load_document("Article 1\nA.\nArticle 1\nB.", {{"doc_id", "x"}}),
                    ErrorCode::InvalidInput);
}

TEST(LoadDocument, BodyAndPreamble) {
  const auto body = load_document("One sentence. Two sentences.", {{"doc_id", "d"}});
  ASSERT_EQ(body.articles.size(), 1u);
  EXPECT_EQ(body.articles[0].article_id, "body");
  const auto pre = load_document("Intro text.\nArticle 2a\nRule text.", {{"doc_id", "d"}});
  ASSERT_EQ(pre.articles.size(), 2u);
  EXPECT_EQ(pre.articles[0].article_id, "preamble");
  EXPECT_EQ(pre.articles[1].article_id, "2a");
  EXPECT_EQ(pre.article("2a").sentence_ids, std::vector<int>{1});
}

TEST(CrossReferences, Forms) {
  const auto doc = load_document(
      "Article 1\nAs set out in Article 55 and in Articles 12 and 13, or Article 6(1).",
      {{"doc_id", "d"}});
  std::vector<std::string> targets;
  for (const auto& r : doc.cross_references) targets.push_back(r.target);
  EXPECT_EQ(targets, (std::vector<std::string>{"Article 55", "Article 12", "Article 13",
                                               "Article 6(1)"}));
  EXPECT_EQ(article33().cross_references.at(0).target, "Article 55");
}

TEST(Spans, Article33IsOneSpan) {
  const auto doc = article33();
  const auto spans = partition_spans(doc);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0].span_id, "art33#1");
  EXPECT_EQ(spans[0].sentence_ids, (std::vector<int>{0, 1}));
  EXPECT_EQ(spans[0].token_count, 93);
  EXPECT_FALSE(spans[0].oversized);
  EXPECT_EQ(span_text(spans[0], doc), doc.sentences[0].text + " " + doc.sentences[1].text);
}

TEST(Spans, SmallBudgetMarksOversized) {
  const auto doc = article33();
  const auto spans = partition_spans(doc, 30);
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_TRUE(spans[0].oversized);
  EXPECT_FALSE(spans[1].oversized);
  EXPECT_EQ(spans[1].token_count, 24);
  EXPECT_ERROR_CODE(partition_spans(doc, 0), ErrorCode::InvalidInput);
}

TEST(Spans, RandomDocumentsSatisfyPartitionLaw) {
  std::mt19937 rng(20240);
  std::uniform_int_distribution<int> n_articles(1, 4), n_sent(1, 6), n_words(1, 40),
      budget_d(8, 512);
  for (int round = 0; round < 100; ++round) {
    std::string text;
    std::vector<int> expected_tokens;
    const int arts = n_articles(rng);
    for (int a = 1; a <= arts; ++a) {
      text += "Article " + std::to_string(a) + "\n";
      const int ns = n_sent(rng);
      for (int s = 0; s < ns; ++s) {
        const int nw = n_words(rng);
        text += "Word";
        for (int w = 1; w < nw; ++w) text += " term" + std::to_string(w % 7);
        text += ". ";
        expected_tokens.push_back(nw + 1);
      }
      text += "\n";
    }
    const auto doc = load_document(text, {{"doc_id", "r"}});
    ASSERT_EQ(doc.sentences.size(), expected_tokens.size());
    const int budget = budget_d(rng);
    const auto spans = partition_spans(doc, budget);
    std::vector<int> seen(doc.sentences.size(), 0);
    for (const auto& sp : spans) {
      int total = 0;
      for (int id : sp.sentence_ids) {
        ++seen[static_cast<std::size_t>(id)];
        EXPECT_EQ(doc.sentence(id).article_id, sp.article_id);
        total += expected_tokens[static_cast<std::size_t>(id)];
      }
      EXPECT_EQ(sp.token_count, total);
      if (sp.oversized) {
        EXPECT_EQ(sp.sentence_ids.size(), 1u);
        EXPECT_GE(sp.token_count, budget);
      } else {
        EXPECT_LT(sp.token_count, budget);
      }
    }
    for (int c : seen) EXPECT_EQ(c, 1);
  }
}

TEST(DocumentJson, RoundTrip) {
  const auto doc = article33();
  EXPECT_EQ(document_from_json(nlohmann::json::parse(to_json(doc).dump())), doc);
}
