#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "regcheck/classify.hpp"
#include "regcheck/text.hpp"

using namespace regcheck;
using namespace regcheck::classify;
using testing_support::data_path;
using testing_support::read_file;

namespace {

ConceptModel rights_model() {
  std::istringstream in(read_file(data_path("classify/concepts.json")));
  return load_concept_model(in);
}

const std::string kRightsSentence =
    "You can update your information in your profile or delete your data by closing "
    "your account.";

}  // namespace

TEST(ConceptModel, HierarchyAndValidation) {
  const auto m = rights_model();
  EXPECT_EQ(m.ancestors("RightToRemove"), std::vector<std::string>{"DataSubjectRight"});
  EXPECT_EQ(m.with_ancestors({"RightToRectify"}),
            (ConceptSet{"DataSubjectRight", "RightToRectify"}));
  EXPECT_ERROR_CODE(ConceptModel({{"A", "", {}, Method::Auto}, {"A", "", {}, Method::Auto}}),
                    ErrorCode::DuplicateId);
  EXPECT_ERROR_CODE(ConceptModel({{"A", "B", {}, Method::Auto}, {"B", "A", {}, Method::Auto}}),
                    ErrorCode::InvalidInput);
  EXPECT_ERROR_CODE(ConceptModel({{"A", "Missing", {}, Method::Auto}}), ErrorCode::UnknownConcept);
}

TEST(Keyword, RightsSentenceIsMultiLabel) {
  const auto m = rights_model();
  EXPECT_EQ(keyword_predict(corpus::lower_terms(kRightsSentence), m),
            (ConceptSet{"RightToRectify", "RightToRemove"}));
  EXPECT_TRUE(keyword_predict(corpus::lower_terms("We store data in the EU."), m).empty());
}

TEST(Hybrid, AutoFallsBackToKeywords) {
  const auto m = rights_model();
  const HybridClassifier clf(m, nullptr, nullptr, nullptr);
  const auto p = clf.predict("s0", corpus::lower_terms(kRightsSentence));
  EXPECT_EQ(p.concepts(), (ConceptSet{"RightToRectify", "RightToRemove"}));
  for (const auto& l : p.labels) EXPECT_EQ(l.method, Method::Keyword);
  EXPECT_EQ(clf.resolve(*m.find("DataSubjectRight")), std::nullopt);
}

TEST(Hybrid, ExternalPredictionsWinForCoveredConcepts) {
  const auto m = rights_model();
  std::istringstream in("s0\tRightToAccess\t0.9\n");
  const auto ext = load_external_predictions(in, &m);
  const HybridClassifier clf(m, nullptr, nullptr, &ext);
  const auto p = clf.predict("s0", corpus::lower_terms(kRightsSentence));
  EXPECT_EQ(p.concepts(), (ConceptSet{"RightToAccess", "RightToRectify", "RightToRemove"}));
  EXPECT_EQ(clf.resolve(*m.find("RightToAccess")), Method::External);
  EXPECT_TRUE(clf.predict("s9", {}).concepts().empty());
}

TEST(ExternalPredictions, Errors) {
  const auto m = rights_model();
  std::istringstream unknown("s0\tRightToFly\t0.5\n");
  EXPECT_ERROR_CODE(load_external_predictions(unknown, &m), ErrorCode::UnknownConcept);
  std::istringstream range("s0\tRightToAccess\t1.5\n");
  EXPECT_ERROR_CODE(load_external_predictions(range, &m), ErrorCode::InvalidInput);
}

TEST(Centroid, TrainPredictAndUntrainable) {
  const std::vector<LabeledSegment> train = {
      {{"delete", "account", "data"}, {"RightToRemove"}},
      {{"erase", "data", "account"}, {"RightToRemove"}},
      {{"update", "profile", "information"}, {"RightToRectify"}},
      {{"correct", "profile", "details"}, {"RightToRectify"}},
  };
  std::vector<std::vector<std::string>> docs;
  for (const auto& s : train) docs.push_back(s.terms);
  const auto idx = vectorize::build_index(docs, {});
  const auto cm = centroid_train(train, idx, 0.3);
  EXPECT_EQ(cm.training_counts.at("RightToRemove"), 2u);
  EXPECT_EQ(centroid_predict({"delete", "account"}, cm, idx), ConceptSet{"RightToRemove"});
  std::vector<std::string> diags;
  EXPECT_TRUE(centroid_predict({"unrelated"}, cm, idx, &diags).empty());
  EXPECT_EQ(diags.size(), 1u);
  const std::vector<LabeledSegment> empty_only = {{{"the"}, {"X"}}};
  EXPECT_ERROR_CODE(centroid_train(empty_only, idx), ErrorCode::UntrainableConcept);
}

TEST(Centroid, MeanOfTrainingVectors) {
  // Oracle: centroid weight = average of per-segment TF-IDF weights.
  const std::vector<LabeledSegment> train = {{{"a1", "b1"}, {"C"}}, {{"a1", "a1"}, {"C"}}};
  const auto idx = vectorize::build_index({train[0].terms, train[1].terms}, {});
  const auto cm = centroid_train(train, idx);
  const auto v0 = vectorize::tfidf_vector(train[0].terms, idx);
  const auto v1 = vectorize::tfidf_vector(train[1].terms, idx);
  const auto a = *idx.id("a1");
  EXPECT_NEAR(cm.centroids.at("C").get(a), (v0.get(a) + v1.get(a)) / 2, 1e-12);
}

TEST(ClassifySegments, ParallelMatchesSerial) {
  const auto m = rights_model();
  const HybridClassifier clf(m, nullptr, nullptr, nullptr);
  std::mt19937 rng(8);
  const std::vector<std::string> vocab = {"update", "your", "information", "delete", "data",
                                          "access", "copy", "of", "profile"};
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  std::vector<Segment> segs;
  for (int i = 0; i < 200; ++i) {
    Segment s{"s" + std::to_string(i), {}};
    for (int k = 0; k < 12; ++k) s.terms.push_back(vocab[pick(rng)]);
    segs.push_back(std::move(s));
  }
  const auto a = classify_segments(clf, segs);
  const auto b = classify_segments_serial(clf, segs);
  EXPECT_EQ(write_predictions(a), write_predictions(b));
  std::istringstream back(write_predictions(a));
  const auto reloaded = load_external_predictions(back, &m);
  for (const auto& p : a) EXPECT_EQ(reloaded.labels(p.segment_id), p.concepts());
}
