#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "regcheck/corpus.hpp"
#include "regcheck/vectorize.hpp"

namespace regcheck::qa {

/// 16 lowercase hex digits of the 64-bit FNV-1a hash of the UTF-8 question
/// text. Keys the external score and answer files.
std::string question_hash(std::string_view text);

struct Question {
  std::string text;
  std::vector<std::string> tokens;  // lowercase, stopwords removed
  std::string hash;
};

Question make_question(std::string text, const corpus::TextResources& resources =
                                             corpus::TextResources::defaults());

/// Relevance of one sentence to a question, in [0, 1]. Implementations must
/// be deterministic and safe to call concurrently.
class SentenceScorer {
 public:
  virtual ~SentenceScorer() = default;
  virtual double score(const Question& q, const corpus::Sentence& s) const = 0;
};

/// BM25 over the document's sentences, squashed with s / (s + 1).
class Bm25Scorer final : public SentenceScorer {
 public:
  explicit Bm25Scorer(const corpus::Document& doc,
                      vectorize::Bm25Params params = {});
  double score(const Question& q, const corpus::Sentence& s) const override;

 private:
  vectorize::TermIndex index_;
  vectorize::Bm25Params params_;
};

/// Precomputed scores keyed by (question hash, sentence id). A missing key
/// throws ScoreUnavailable.
class ExternalScorer final : public SentenceScorer {
 public:
  explicit ExternalScorer(std::istream& in);
  double score(const Question& q, const corpus::Sentence& s) const override;
  std::size_t size() const { return scores_.size(); }

 private:
  std::map<std::pair<std::string, int>, double> scores_;
};

struct SpanRelevance {
  double relevance = 0.0;
  int best_sentence_id = 0;
};

struct RankedSpan {
  std::string span_id;
  double relevance = 0.0;
  int best_sentence_id = 0;
  std::size_t position = 0;  // index in the input span list
};

/// Maximum sentence score over the span (earliest sentence on ties). Throws
/// InvalidInput for an empty span and ScorerContractViolation for a score
/// outside [0, 1].
SpanRelevance span_relevance(const Question& q, const corpus::ContextSpan& span,
                             const corpus::Document& doc,
                             const SentenceScorer& scorer);

/// Spans by descending relevance, document order on ties, truncated to k.
/// Throws InvalidInput for k < 1.
std::vector<RankedSpan> top_k_spans(const Question& q,
                                    const std::vector<corpus::ContextSpan>& spans,
                                    const corpus::Document& doc, int k,
                                    const SentenceScorer& scorer);
std::vector<RankedSpan> top_k_spans_serial(
    const Question& q, const std::vector<corpus::ContextSpan>& spans,
    const corpus::Document& doc, int k, const SentenceScorer& scorer);

struct Answer {
  std::string span_id;
  std::string text;
  std::size_t char_begin = 0;  // into span_text(span)
  std::size_t char_end = 0;
  double confidence = 0.0;
};

class AnswerExtractor {
 public:
  virtual ~AnswerExtractor() = default;
  virtual Answer extract(const Question& q, const corpus::ContextSpan& span,
                         const corpus::Document& doc) const = 0;
};

/// Returns the best-scoring sentence of the span, confidence = its score.
class BaselineExtractor final : public AnswerExtractor {
 public:
  explicit BaselineExtractor(const SentenceScorer& scorer) : scorer_(scorer) {}
  Answer extract(const Question& q, const corpus::ContextSpan& span,
                 const corpus::Document& doc) const override;

 private:
  const SentenceScorer& scorer_;
};

/// Answers precomputed by an external reader model, keyed by
/// (question hash, span id).
class ExternalExtractor final : public AnswerExtractor {
 public:
  explicit ExternalExtractor(std::istream& in);
  Answer extract(const Question& q, const corpus::ContextSpan& span,
                 const corpus::Document& doc) const override;

 private:
  struct Row {
    std::size_t begin = 0;
    std::size_t end = 0;
    double confidence = 0.0;
  };
  std::map<std::pair<std::string, std::string>, Row> rows_;
};

struct QaResult {
  Question question;
  std::vector<RankedSpan> ranked;
  std::vector<Answer> answers;
  // Every retrieved span scored 0; answers are returned but carry no signal.
  bool zero_relevance = false;
};

QaResult answer_question(const Question& q,
                         const std::vector<corpus::ContextSpan>& spans,
                         const corpus::Document& doc, int k,
                         const SentenceScorer& scorer,
                         const AnswerExtractor& extractor);

nlohmann::ordered_json to_json(const QaResult& result);

}  // namespace regcheck::qa
