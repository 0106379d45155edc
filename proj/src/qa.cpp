#include "regcheck/qa.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <exception>

#include "detail/fields.hpp"
#include "regcheck/error.hpp"

namespace regcheck::qa {

namespace {

std::vector<std::string> sentence_terms(const corpus::Sentence& s) {
  std::vector<std::string> out;
  out.reserve(s.tokens.size());
  for (const auto& t : s.tokens) out.push_back(t.lower);
  return out;
}

double checked(double score, int sent_id) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw Error(ErrorCode::ScorerContractViolation,
                "score " + std::to_string(score) + " for sentence " +
                    std::to_string(sent_id) + " is outside [0, 1]");
  }
  return score;
}

std::vector<std::string> tsv_row(const std::string& line, std::size_t columns,
                                 int line_no) {
  auto cols = detail::split(line, '\t');
  if (cols.size() != columns) {
    throw Error(ErrorCode::InvalidInput,
                "expected " + std::to_string(columns) +
                    " tab-separated columns, found " + std::to_string(cols.size()),
                line_no);
  }
  for (auto& c : cols) c = std::string(detail::trim(c));
  return cols;
}

void sort_ranked(std::vector<RankedSpan>& ranked, int k) {
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedSpan& a, const RankedSpan& b) {
                     return a.relevance > b.relevance;
                   });
  if (ranked.size() > static_cast<std::size_t>(k)) {
    ranked.resize(static_cast<std::size_t>(k));
  }
}

void check_k(int k) {
  if (k < 1) {
    throw Error(ErrorCode::InvalidInput, "K must be >= 1, got " + std::to_string(k));
  }
}

}  // namespace

std::string question_hash(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Question make_question(std::string text, const corpus::TextResources& resources) {
  Question q;
  q.hash = question_hash(text);
  for (const auto& t : corpus::tokenize(text, 0, resources)) {
    if (!t.is_stopword && std::any_of(t.lower.begin(), t.lower.end(),
                                      corpus::is_word_byte)) {
      q.tokens.push_back(t.lower);
    }
  }
  q.text = std::move(text);
  return q;
}

Bm25Scorer::Bm25Scorer(const corpus::Document& doc, vectorize::Bm25Params params)
    : params_(params) {
  std::vector<std::vector<std::string>> segments;
  segments.reserve(doc.sentences.size());
  for (const auto& s : doc.sentences) segments.push_back(sentence_terms(s));
  index_ = vectorize::build_index(segments);
}

double Bm25Scorer::score(const Question& q, const corpus::Sentence& s) const {
  const double raw = vectorize::bm25_score(
      q.tokens, static_cast<std::size_t>(s.sent_id), index_, params_);
  return raw / (raw + 1.0);
}

ExternalScorer::ExternalScorer(std::istream& in) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_skippable(line)) continue;
    const auto cols = tsv_row(line, 3, line_no);
    const auto sid = detail::parse_number<int>(cols[1]);
    const auto score = detail::parse_number<double>(cols[2]);
    if (!sid || !score) {
      throw Error(ErrorCode::InvalidInput, "bad sentence id or score", line_no);
    }
    if (!scores_.emplace(std::make_pair(cols[0], *sid), *score).second) {
      throw Error(ErrorCode::DuplicateId,
                  cols[0] + "/" + std::to_string(*sid), line_no);
    }
  }
}

double ExternalScorer::score(const Question& q, const corpus::Sentence& s) const {
  auto it = scores_.find({q.hash, s.sent_id});
  if (it == scores_.end()) {
    throw Error(ErrorCode::ScoreUnavailable,
                "no external score for question " + q.hash + ", sentence " +
                    std::to_string(s.sent_id));
  }
  return it->second;
}

SpanRelevance span_relevance(const Question& q, const corpus::ContextSpan& span,
                             const corpus::Document& doc,
                             const SentenceScorer& scorer) {
  if (span.sentence_ids.empty()) {
    throw Error(ErrorCode::InvalidInput, "span " + span.span_id + " is empty");
  }
  SpanRelevance best;
  bool first = true;
  for (int sid : span.sentence_ids) {
    const double s = checked(scorer.score(q, doc.sentence(sid)), sid);
    if (first || s > best.relevance) {
      best = {s, sid};
      first = false;
    }
  }
  return best;
}

std::vector<RankedSpan> top_k_spans(const Question& q,
                                    const std::vector<corpus::ContextSpan>& spans,
                                    const corpus::Document& doc, int k,
                                    const SentenceScorer& scorer) {
  check_k(k);
  std::vector<RankedSpan> ranked(spans.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(spans.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto pos = static_cast<std::size_t>(i);
    try {
      const auto rel = span_relevance(q, spans[pos], doc, scorer);
      ranked[pos] = {spans[pos].span_id, rel.relevance, rel.best_sentence_id, pos};
    } catch (...) {
#pragma omp critical(regcheck_qa_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  sort_ranked(ranked, k);
  return ranked;
}

std::vector<RankedSpan> top_k_spans_serial(
    const Question& q, const std::vector<corpus::ContextSpan>& spans,
    const corpus::Document& doc, int k, const SentenceScorer& scorer) {
  check_k(k);
  std::vector<RankedSpan> ranked;
  ranked.reserve(spans.size());
  for (std::size_t pos = 0; pos < spans.size(); ++pos) {
    const auto rel = span_relevance(q, spans[pos], doc, scorer);
    ranked.push_back({spans[pos].span_id, rel.relevance, rel.best_sentence_id, pos});
  }
  sort_ranked(ranked, k);
  return ranked;
}

Answer BaselineExtractor::extract(const Question& q,
                                  const corpus::ContextSpan& span,
                                  const corpus::Document& doc) const {
  if (span.sentence_ids.empty()) {
    throw Error(ErrorCode::AnswerUnavailable, "span " + span.span_id + " is empty");
  }
  const auto best = span_relevance(q, span, doc, scorer_);
  std::size_t offset = 0;
  for (int sid : span.sentence_ids) {
    if (sid == best.best_sentence_id) break;
    offset += doc.sentence(sid).text.size() + 1;
  }
  const auto& text = doc.sentence(best.best_sentence_id).text;
  return {span.span_id, text, offset, offset + text.size(), best.relevance};
}

ExternalExtractor::ExternalExtractor(std::istream& in) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_skippable(line)) continue;
    const auto cols = tsv_row(line, 5, line_no);
    const auto begin = detail::parse_number<std::size_t>(cols[2]);
    const auto end = detail::parse_number<std::size_t>(cols[3]);
    const auto conf = detail::parse_number<double>(cols[4]);
    if (!begin || !end || !conf || *begin > *end) {
      throw Error(ErrorCode::InvalidInput, "bad character range or confidence",
                  line_no);
    }
    if (!(*conf >= 0.0 && *conf <= 1.0)) {
      throw Error(ErrorCode::InvalidInput, "confidence outside [0, 1]", line_no);
    }
    if (!rows_.emplace(std::make_pair(cols[0], cols[1]), Row{*begin, *end, *conf})
             .second) {
      throw Error(ErrorCode::DuplicateId, cols[0] + "/" + cols[1], line_no);
    }
  }
}

Answer ExternalExtractor::extract(const Question& q,
                                  const corpus::ContextSpan& span,
                                  const corpus::Document& doc) const {
  auto it = rows_.find({q.hash, span.span_id});
  if (it == rows_.end() || span.sentence_ids.empty()) {
    throw Error(ErrorCode::AnswerUnavailable,
                "no external answer for question " + q.hash + ", span " +
                    span.span_id);
  }
  const std::string text = corpus::span_text(span, doc);
  const Row& row = it->second;
  if (row.end > text.size()) {
    throw Error(ErrorCode::InvalidInput,
                "answer range ends past span " + span.span_id);
  }
  return {span.span_id, text.substr(row.begin, row.end - row.begin), row.begin,
          row.end, row.confidence};
}

QaResult answer_question(const Question& q,
                         const std::vector<corpus::ContextSpan>& spans,
                         const corpus::Document& doc, int k,
                         const SentenceScorer& scorer,
                         const AnswerExtractor& extractor) {
  QaResult result;
  result.question = q;
  result.ranked = top_k_spans(q, spans, doc, k, scorer);
  result.zero_relevance =
      !result.ranked.empty() &&
      std::all_of(result.ranked.begin(), result.ranked.end(),
                  [](const RankedSpan& r) { return r.relevance == 0.0; });
  for (const auto& r : result.ranked) {
    result.answers.push_back(extractor.extract(q, spans[r.position], doc));
  }
  return result;
}

nlohmann::ordered_json to_json(const QaResult& result) {
  nlohmann::ordered_json j;
  j["question"] = result.question.text;
  j["question_hash"] = result.question.hash;
  j["zero_relevance"] = result.zero_relevance;
  auto& spans = j["spans"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < result.ranked.size(); ++i) {
    const auto& r = result.ranked[i];
    nlohmann::ordered_json js;
    js["rank"] = i + 1;
    js["span_id"] = r.span_id;
    js["relevance"] = r.relevance;
    js["best_sentence_id"] = r.best_sentence_id;
    if (i < result.answers.size()) {
      const auto& a = result.answers[i];
      js["answer"] = {{"text", a.text},
                      {"char_begin", a.char_begin},
                      {"char_end", a.char_end},
                      {"confidence", a.confidence}};
    }
    spans.push_back(std::move(js));
  }
  return j;
}

}  // namespace regcheck::qa
