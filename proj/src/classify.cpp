#include "regcheck/classify.hpp"

#include <algorithm>
#include <exception>
#include <sstream>

#include "detail/fields.hpp"
#include "regcheck/error.hpp"
#include "regcheck/text.hpp"

namespace regcheck::classify {

namespace {

bool contains_sequence(const std::vector<std::string>& terms,
                       const std::vector<std::string>& needle) {
  return !needle.empty() &&
         std::search(terms.begin(), terms.end(), needle.begin(), needle.end()) !=
             terms.end();
}

std::string format_confidence(double c) {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed << c;
  return out.str();
}

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::Auto: return "auto";
    case Method::Keyword: return "keyword";
    case Method::Centroid: return "centroid";
    case Method::External: return "external";
  }
  return "auto";
}

Method method_from_string(std::string_view name) {
  const std::string n = corpus::fold_case(name);
  if (n.empty() || n == "auto") return Method::Auto;
  if (n == "keyword") return Method::Keyword;
  if (n == "centroid") return Method::Centroid;
  if (n == "external" || n == "ml") return Method::External;
  throw Error(ErrorCode::InvalidInput, "unknown classification method '" + n + "'");
}

ConceptModel::ConceptModel(std::vector<Concept> concepts)
    : concepts_(std::move(concepts)) {
  for (std::size_t i = 0; i < concepts_.size(); ++i) {
    if (concepts_[i].id.empty()) {
      throw Error(ErrorCode::InvalidInput, "concept without an id");
    }
    if (!by_id_.emplace(concepts_[i].id, i).second) {
      throw Error(ErrorCode::DuplicateId, "concept " + concepts_[i].id);
    }
  }
  for (const auto& c : concepts_) {
    if (!c.parent.empty() && !contains(c.parent)) {
      throw Error(ErrorCode::UnknownConcept,
                  "parent '" + c.parent + "' of concept " + c.id);
    }
    std::string cursor = c.parent;
    for (std::size_t steps = 0; !cursor.empty(); ++steps) {
      if (steps > concepts_.size() || cursor == c.id) {
        throw Error(ErrorCode::InvalidInput, "parent cycle through concept " + c.id);
      }
      cursor = find(cursor)->parent;
    }
  }
}

const Concept* ConceptModel::find(std::string_view id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &concepts_[it->second];
}

std::set<std::string> ConceptModel::ids() const {
  std::set<std::string> out;
  for (const auto& c : concepts_) out.insert(c.id);
  return out;
}

std::vector<std::string> ConceptModel::ancestors(std::string_view id) const {
  std::vector<std::string> out;
  const Concept* c = find(id);
  while (c && !c->parent.empty()) {
    out.push_back(c->parent);
    c = find(c->parent);
  }
  return out;
}

ConceptSet ConceptModel::with_ancestors(const ConceptSet& labels) const {
  ConceptSet out = labels;
  for (const auto& l : labels) {
    for (auto& a : ancestors(l)) out.insert(std::move(a));
  }
  return out;
}

ConceptModel load_concept_model(std::istream& in) {
  std::vector<Concept> concepts;
  try {
    const auto j = nlohmann::json::parse(in);
    const auto& list = j.is_array() ? j : j.at("concepts");
    for (const auto& jc : list) {
      Concept c;
      c.id = jc.at("id").get<std::string>();
      if (jc.contains("parent") && !jc.at("parent").is_null()) {
        c.parent = jc.at("parent").get<std::string>();
      }
      for (const auto& kw : jc.value("keywords", std::vector<std::string>{})) {
        auto terms = corpus::lower_terms(kw);
        if (!terms.empty()) c.keywords.push_back(std::move(terms));
      }
      c.method = method_from_string(jc.value("method", "auto"));
      concepts.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("bad concept model: ") + e.what());
  }
  return ConceptModel(std::move(concepts));
}

ConceptSet keyword_predict(const std::vector<std::string>& terms,
                           const ConceptModel& model) {
  ConceptSet out;
  for (const auto& c : model.concepts()) {
    for (const auto& kw : c.keywords) {
      if (contains_sequence(terms, kw)) {
        out.insert(c.id);
        break;
      }
    }
  }
  return out;
}

CentroidModel centroid_train(const std::vector<LabeledSegment>& segments,
                             const vectorize::TermIndex& idx, double threshold) {
  if (threshold < 0.0 || threshold > 1.0) {
    throw Error(ErrorCode::InvalidInput, "centroid threshold must lie in [0, 1]");
  }
  std::map<std::string, std::map<vectorize::TermId, double>> sums;
  std::map<std::string, std::size_t> members;
  CentroidModel cm;
  cm.threshold = threshold;
  for (const auto& seg : segments) {
    const auto v = vectorize::tfidf_vector(seg.terms, idx);
    for (const auto& c : seg.concepts) {
      ++cm.training_counts[c];
      if (v.empty()) continue;
      ++members[c];
      auto& sum = sums[c];
      for (const auto& [id, w] : v.entries()) sum[id] += w;
    }
  }
  for (const auto& [concept_id, count] : cm.training_counts) {
    const auto m = members.find(concept_id);
    if (m == members.end()) {
      throw Error(ErrorCode::UntrainableConcept,
                  concept_id + " has no training segment with a non-zero vector");
    }
    auto& sum = sums[concept_id];
    for (auto& [id, w] : sum) w /= static_cast<double>(m->second);
    cm.centroids.emplace(concept_id, vectorize::SparseVector(sum));
  }
  return cm;
}

ConceptSet centroid_predict(const std::vector<std::string>& terms,
                            const CentroidModel& cm, const vectorize::TermIndex& idx,
                            std::vector<std::string>* diagnostics) {
  ConceptSet out;
  const auto v = vectorize::tfidf_vector(terms, idx);
  if (v.empty()) {
    if (diagnostics) {
      diagnostics->push_back("segment has a zero vector; centroid labels skipped");
    }
    return out;
  }
  for (const auto& [id, centroid] : cm.centroids) {
    if (vectorize::cosine(v, centroid) > cm.threshold) out.insert(id);
  }
  return out;
}

ConceptSet PredictionSet::labels(std::string_view segment_id) const {
  ConceptSet out;
  auto it = by_segment.find(std::string(segment_id));
  if (it == by_segment.end()) return out;
  for (const auto& [c, conf] : it->second) out.insert(c);
  return out;
}

PredictionSet load_external_predictions(std::istream& in, const ConceptModel* model) {
  PredictionSet set;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_skippable(line)) continue;
    auto cols = detail::split(line, '\t');
    if (cols.size() != 3) {
      throw Error(ErrorCode::InvalidInput,
                  "expected '<segment>\\t<concept>\\t<confidence>'", line_no);
    }
    const std::string segment(detail::trim(cols[0]));
    const std::string concept_id(detail::trim(cols[1]));
    const auto conf = detail::parse_number<double>(cols[2]);
    if (!conf) throw Error(ErrorCode::InvalidInput, "bad confidence", line_no);
    if (*conf < 0.0 || *conf > 1.0) {
      throw Error(ErrorCode::InvalidInput,
                  "confidence " + std::string(detail::trim(cols[2])) +
                      " outside [0, 1]",
                  line_no);
    }
    if (model && !model->contains(concept_id)) {
      throw Error(ErrorCode::UnknownConcept, concept_id, line_no);
    }
    auto& slot = set.by_segment[segment][concept_id];
    slot = std::max(slot, *conf);
    set.concepts.insert(concept_id);
  }
  return set;
}

ConceptSet SegmentPrediction::concepts() const {
  ConceptSet out;
  for (const auto& p : labels) out.insert(p.concept_id);
  return out;
}

HybridClassifier::HybridClassifier(const ConceptModel& model,
                                   const CentroidModel* centroids,
                                   const vectorize::TermIndex* index,
                                   const PredictionSet* external,
                                   HybridOptions options)
    : model_(model),
      centroids_(centroids),
      index_(index),
      external_(external),
      options_(options) {
  if (centroids_ && !index_) {
    throw Error(ErrorCode::InvalidInput, "centroid model given without a term index");
  }
}

std::optional<Method> HybridClassifier::resolve(const Concept& c) const {
  const bool has_external = external_ && external_->covers(c.id);
  bool has_centroid = false;
  if (centroids_ && centroids_->centroids.count(c.id) != 0) {
    const auto n = centroids_->training_counts.find(c.id);
    has_centroid = n != centroids_->training_counts.end() &&
                   n->second >= options_.min_train_for_centroid;
  }
  const bool has_keywords = !c.keywords.empty();
  switch (c.method) {
    case Method::External:
      return has_external ? std::optional(Method::External) : std::nullopt;
    case Method::Centroid:
      return centroids_ && centroids_->centroids.count(c.id) != 0
                 ? std::optional(Method::Centroid)
                 : std::nullopt;
    case Method::Keyword:
      return has_keywords ? std::optional(Method::Keyword) : std::nullopt;
    case Method::Auto:
      if (has_external) return Method::External;
      if (has_centroid) return Method::Centroid;
      if (has_keywords) return Method::Keyword;
      return std::nullopt;
  }
  return std::nullopt;
}

SegmentPrediction HybridClassifier::predict(std::string_view segment_id,
                                            const std::vector<std::string>& terms) const {
  SegmentPrediction out;
  out.segment_id = std::string(segment_id);
  std::optional<vectorize::SparseVector> vec;
  bool zero_reported = false;

  for (const auto& c : model_.concepts()) {
    const auto method = resolve(c);
    if (!method) {
      out.diagnostics.push_back(std::string(to_string(ErrorCode::UnclassifiableConcept)) +
                                ": " + c.id);
      continue;
    }
    switch (*method) {
      case Method::External: {
        auto seg = external_->by_segment.find(out.segment_id);
        if (seg == external_->by_segment.end()) break;
        auto hit = seg->second.find(c.id);
        if (hit != seg->second.end()) {
          out.labels.push_back({c.id, hit->second, Method::External});
        }
        break;
      }
      case Method::Centroid: {
        if (!vec) vec = vectorize::tfidf_vector(terms, *index_);
        if (vec->empty()) {
          if (!zero_reported) {
            out.diagnostics.push_back("segment has a zero vector; centroid labels skipped");
            zero_reported = true;
          }
          break;
        }
        const double sim = vectorize::cosine(*vec, centroids_->centroids.at(c.id));
        if (sim > centroids_->threshold) {
          out.labels.push_back({c.id, sim, Method::Centroid});
        }
        break;
      }
      case Method::Keyword: {
        for (const auto& kw : c.keywords) {
          if (contains_sequence(terms, kw)) {
            out.labels.push_back({c.id, 1.0, Method::Keyword});
            break;
          }
        }
        break;
      }
      case Method::Auto:
        break;
    }
  }
  std::sort(out.labels.begin(), out.labels.end(),
            [](const Prediction& a, const Prediction& b) {
              return a.concept_id < b.concept_id;
            });
  return out;
}

std::vector<SegmentPrediction> classify_segments(const HybridClassifier& clf,
                                                 const std::vector<Segment>& segments) {
  std::vector<SegmentPrediction> out(segments.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(segments.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& seg = segments[static_cast<std::size_t>(i)];
    try {
      out[static_cast<std::size_t>(i)] = clf.predict(seg.id, seg.terms);
    } catch (...) {
#pragma omp critical(regcheck_classify_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<SegmentPrediction> classify_segments_serial(
    const HybridClassifier& clf, const std::vector<Segment>& segments) {
  std::vector<SegmentPrediction> out;
  out.reserve(segments.size());
  for (const auto& seg : segments) out.push_back(clf.predict(seg.id, seg.terms));
  return out;
}

std::string write_predictions(const std::vector<SegmentPrediction>& predictions) {
  std::string out;
  for (const auto& p : predictions) {
    for (const auto& l : p.labels) {
      out += p.segment_id + '\t' + l.concept_id + '\t' +
             format_confidence(l.confidence) + '\n';
    }
  }
  return out;
}

}  // namespace regcheck::classify
