#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "regcheck/text.hpp"

namespace regcheck::corpus {

inline constexpr int kDefaultTokenBudget = 512;

using Metadata = std::map<std::string, std::string>;

struct Sentence {
  int sent_id = 0;
  std::string article_id;
  std::string text;
  std::vector<Token> tokens;
  std::size_t char_offset = 0;

  bool operator==(const Sentence&) const = default;
};

struct Paragraph {
  std::string text;
  std::size_t char_offset = 0;

  bool operator==(const Paragraph&) const = default;
};

struct Article {
  std::string article_id;
  std::vector<Paragraph> paragraphs;
  std::vector<int> sentence_ids;

  bool operator==(const Article&) const = default;
};

struct CrossReference {
  int source_sentence = 0;
  std::string target;
  std::size_t char_offset = 0;

  bool operator==(const CrossReference&) const = default;
};

/// A regulation or policy after segmentation. Sentence ids are 0-based
/// positions in `sentences`; offsets index the original raw text.
struct Document {
  std::string doc_id;
  std::string title;
  std::vector<Article> articles;
  std::vector<Sentence> sentences;
  std::vector<CrossReference> cross_references;

  const Sentence& sentence(int sent_id) const;
  const Article& article(std::string_view article_id) const;

  bool operator==(const Document&) const = default;
};

/// Consecutive sentences of one article whose token total stays under the
/// budget. A single sentence at or above the budget forms its own span with
/// `oversized` set.
struct ContextSpan {
  std::string span_id;
  std::string article_id;
  std::vector<int> sentence_ids;
  int token_count = 0;
  bool oversized = false;

  bool operator==(const ContextSpan&) const = default;
};

/// "key: value" or "key = value" lines; '#' comments and blank lines skipped.
Metadata parse_metadata(std::istream& in);

/// Lines of the form "Article <n>" open a new article; every other
/// non-blank line is one paragraph of the current article. Text before the
/// first marker lands in an article named "preamble"; a text without any
/// marker becomes a single article named "body".
Document load_document(std::string_view raw_text, const Metadata& metadata,
                       const TextResources& resources = TextResources::defaults());

std::vector<ContextSpan> partition_spans(const Document& doc,
                                         int budget = kDefaultTokenBudget);

/// "Article 55", "Articles 12 and 13", "Article 6(1)", case-insensitive.
std::vector<CrossReference> detect_cross_references(const Sentence& sentence);
std::vector<CrossReference> detect_cross_references(const Document& doc);

/// Span text as the member sentences joined by single spaces. Answer
/// character ranges are relative to this string.
std::string span_text(const ContextSpan& span, const Document& doc);

nlohmann::ordered_json to_json(const Document& doc);
nlohmann::ordered_json to_json(const ContextSpan& span);
Document document_from_json(const nlohmann::json& j);

}  // namespace regcheck::corpus
