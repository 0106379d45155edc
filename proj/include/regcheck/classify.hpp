#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "regcheck/vectorize.hpp"

namespace regcheck::classify {

using ConceptSet = std::set<std::string>;

enum class Method { Auto, Keyword, Centroid, External };

const char* to_string(Method m);
Method method_from_string(std::string_view name);

struct Concept {
  std::string id;
  std::string parent;                         // empty for top-level concepts
  std::vector<std::vector<std::string>> keywords;  // lowercased term sequences
  Method method = Method::Auto;
};

/// Concepts with optional parent links. Ids are unique and the parent
/// graph is acyclic; both are checked on construction.
class ConceptModel {
 public:
  ConceptModel() = default;
  explicit ConceptModel(std::vector<Concept> concepts);

  const std::vector<Concept>& concepts() const { return concepts_; }
  const Concept* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }
  std::set<std::string> ids() const;
  /// Parent chain of `id`, nearest first.
  std::vector<std::string> ancestors(std::string_view id) const;
  /// `labels` plus every ancestor of each label.
  ConceptSet with_ancestors(const ConceptSet& labels) const;

 private:
  std::vector<Concept> concepts_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
};

/// {"concepts": [{"id", "parent"?, "keywords"?: [...], "method"?}]}
ConceptModel load_concept_model(std::istream& in);

/// Labels whose keywords occur as contiguous term subsequences of `terms`
/// (lowercased lemmas of the segment).
ConceptSet keyword_predict(const std::vector<std::string>& terms,
                           const ConceptModel& model);

struct LabeledSegment {
  std::vector<std::string> terms;
  ConceptSet concepts;
};

struct CentroidModel {
  std::map<std::string, vectorize::SparseVector> centroids;
  std::map<std::string, std::size_t> training_counts;
  double threshold = 0.5;
};

/// Centroid of each concept = mean TF-IDF vector of its training segments.
/// Segments whose vector is zero do not contribute; a concept left with no
/// contributing segment throws UntrainableConcept.
CentroidModel centroid_train(const std::vector<LabeledSegment>& segments,
                             const vectorize::TermIndex& idx,
                             double threshold = 0.5);

/// Concepts whose centroid has cosine strictly greater than the threshold.
/// A zero segment vector yields the empty set and a diagnostic.
ConceptSet centroid_predict(const std::vector<std::string>& terms,
                            const CentroidModel& cm, const vectorize::TermIndex& idx,
                            std::vector<std::string>* diagnostics = nullptr);

/// segment id -> concept id -> confidence
struct PredictionSet {
  std::map<std::string, std::map<std::string, double>> by_segment;
  std::set<std::string> concepts;  // every concept the file mentions

  ConceptSet labels(std::string_view segment_id) const;
  bool covers(std::string_view concept_id) const {
    return concepts.count(std::string(concept_id)) != 0;
  }
};

/// "<segment_id>\t<concept_id>\t<confidence>" lines. Throws UnknownConcept
/// when a model is given and does not define the concept, InvalidInput for
/// confidences outside [0, 1].
PredictionSet load_external_predictions(std::istream& in,
                                        const ConceptModel* model = nullptr);

struct HybridOptions {
  std::size_t min_train_for_centroid = 5;
};

struct Prediction {
  std::string concept_id;
  double confidence = 0.0;
  Method method = Method::Keyword;
};

struct SegmentPrediction {
  std::string segment_id;
  std::vector<Prediction> labels;  // sorted by concept id
  std::vector<std::string> diagnostics;

  ConceptSet concepts() const;
};

/// Per-concept method choice. Auto follows: external prediction when the
/// file covers the concept, else the centroid when trained on at least
/// min_train_for_centroid segments, else keywords. A concept with no usable
/// method is reported as an UnclassifiableConcept diagnostic.
class HybridClassifier {
 public:
  HybridClassifier(const ConceptModel& model, const CentroidModel* centroids,
                   const vectorize::TermIndex* index,
                   const PredictionSet* external, HybridOptions options = {});

  SegmentPrediction predict(std::string_view segment_id,
                            const std::vector<std::string>& terms) const;
  /// Method actually used for a concept, or nullopt when unclassifiable.
  std::optional<Method> resolve(const Concept& c) const;

 private:
  const ConceptModel& model_;
  const CentroidModel* centroids_;
  const vectorize::TermIndex* index_;
  const PredictionSet* external_;
  HybridOptions options_;
};

struct Segment {
  std::string id;
  std::vector<std::string> terms;
};

std::vector<SegmentPrediction> classify_segments(const HybridClassifier& clf,
                                                 const std::vector<Segment>& segments);
std::vector<SegmentPrediction> classify_segments_serial(
    const HybridClassifier& clf, const std::vector<Segment>& segments);

/// Same layout as the external prediction file.
std::string write_predictions(const std::vector<SegmentPrediction>& predictions);

}  // namespace regcheck::classify
