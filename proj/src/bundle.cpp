#include "regcheck/bundle.hpp"

#include "regcheck/error.hpp"
#include "regcheck/text.hpp"

namespace regcheck::bundle {

namespace {

constexpr const char* kFormat = "regcheck-bundle/1";

corpus::ContextSpan span_from_json(const nlohmann::json& j) {
  corpus::ContextSpan s;
  s.span_id = j.at("span_id").get<std::string>();
  s.article_id = j.at("article_id").get<std::string>();
  s.sentence_ids = j.at("sentence_ids").get<std::vector<int>>();
  s.token_count = j.at("token_count").get<int>();
  s.oversized = j.value("oversized", false);
  return s;
}

}  // namespace

std::string Bundle::segment_id(int sent_id) { return "s" + std::to_string(sent_id); }

std::vector<std::string> Bundle::sentence_terms(int sent_id) const {
  std::vector<std::string> out;
  if (annotations) {
    for (const auto& e : annotations->at(static_cast<std::size_t>(sent_id)).entries()) {
      out.push_back(corpus::fold_case(e.lemma == "_" ? e.form : e.lemma));
    }
    return out;
  }
  return sentence_surface_terms(sent_id);
}

std::vector<std::string> Bundle::sentence_surface_terms(int sent_id) const {
  std::vector<std::string> out;
  for (const auto& t : document.sentence(sent_id).tokens) out.push_back(t.lower);
  return out;
}

Bundle make_bundle(corpus::Document doc, int budget,
                   std::optional<std::vector<annotations::AnnotatedSentence>> parses) {
  if (parses && parses->size() != doc.sentences.size()) {
    throw Error(ErrorCode::CrossReferenceError,
                "annotations hold " + std::to_string(parses->size()) +
                    " sentences, document has " + std::to_string(doc.sentences.size()));
  }
  Bundle b;
  b.spans = corpus::partition_spans(doc, budget);
  b.document = std::move(doc);
  b.budget = budget;
  b.annotations = std::move(parses);
  return b;
}

nlohmann::ordered_json to_json(const Bundle& b) {
  nlohmann::ordered_json j;
  j["format"] = kFormat;
  j["budget"] = b.budget;
  j["document"] = corpus::to_json(b.document);
  auto spans = nlohmann::ordered_json::array();
  for (const auto& s : b.spans) spans.push_back(corpus::to_json(s));
  j["spans"] = std::move(spans);
  if (b.annotations) {
    auto parses = nlohmann::ordered_json::array();
    for (const auto& s : *b.annotations) parses.push_back(annotations::to_json(s));
    j["annotations"] = std::move(parses);
  } else {
    j["annotations"] = nullptr;
  }
  return j;
}

Bundle bundle_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != kFormat) {
      throw Error(ErrorCode::InvalidInput, "not a regcheck bundle");
    }
    Bundle b;
    b.budget = j.at("budget").get<int>();
    b.document = corpus::document_from_json(j.at("document"));
    for (const auto& s : j.at("spans")) b.spans.push_back(span_from_json(s));
    const auto& a = j.at("annotations");
    if (!a.is_null()) {
      std::vector<annotations::AnnotatedSentence> parses;
      int id = 0;
      for (const auto& s : a) parses.push_back(annotations::annotated_sentence_from_json(id++, s));
      if (parses.size() != b.document.sentences.size()) {
        throw Error(ErrorCode::CrossReferenceError, "annotation count differs from sentences");
      }
      b.annotations = std::move(parses);
    }
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("bad bundle: ") + e.what());
  }
}

}  // namespace regcheck::bundle
