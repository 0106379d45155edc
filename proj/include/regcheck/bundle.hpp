#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "regcheck/annotations.hpp"
#include "regcheck/corpus.hpp"

namespace regcheck::bundle {

/// A segmented document with its context spans and, optionally, one parse
/// per sentence. This is what `regcheck ingest` writes and every other
/// command reads.
struct Bundle {
  corpus::Document document;
  int budget = corpus::kDefaultTokenBudget;
  std::vector<corpus::ContextSpan> spans;
  // Parallel to document.sentences when present.
  std::optional<std::vector<annotations::AnnotatedSentence>> annotations;

  /// "s<sent_id>"
  static std::string segment_id(int sent_id);
  /// Lowercased lemmas when parsed, lowercased token surfaces otherwise.
  std::vector<std::string> sentence_terms(int sent_id) const;
  /// Lowercased token surfaces; keyword phrases are matched against these.
  std::vector<std::string> sentence_surface_terms(int sent_id) const;
};

/// Throws CrossReferenceError when the number of parses differs from the
/// number of sentences.
Bundle make_bundle(corpus::Document doc, int budget,
                   std::optional<std::vector<annotations::AnnotatedSentence>> parses);

nlohmann::ordered_json to_json(const Bundle& b);
Bundle bundle_from_json(const nlohmann::json& j);

}  // namespace regcheck::bundle
