#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "regcheck/criteria.hpp"
#include "regcheck/srl.hpp"
#include "regcheck/text.hpp"
#include "regcheck/vectorize.hpp"

namespace regcheck::compliance {

struct TextItem {
  std::string id;
  std::vector<std::string> terms;  // lowercased lemmas or tokens
};

class Vectorizer {
 public:
  virtual ~Vectorizer() = default;
  virtual vectorize::FeatureVector vectorize(const TextItem& item) const = 0;
};

/// TF-IDF over an index of every segment and requirement.
class TfidfVectorizer final : public Vectorizer {
 public:
  explicit TfidfVectorizer(vectorize::TermIndex index) : index_(std::move(index)) {}
  static TfidfVectorizer over(const std::vector<TextItem>& segments,
                              const std::vector<TextItem>& requirements,
                              const corpus::WordSet& stopwords =
                                  corpus::default_stopwords());
  vectorize::FeatureVector vectorize(const TextItem& item) const override;
  const vectorize::TermIndex& index() const { return index_; }

 private:
  vectorize::TermIndex index_;
};

/// Looks vectors up by item id. Throws CrossReferenceError for an id the
/// table does not hold.
class EmbeddingVectorizer final : public Vectorizer {
 public:
  explicit EmbeddingVectorizer(const vectorize::EmbeddingTable& table) : table_(table) {}
  vectorize::FeatureVector vectorize(const TextItem& item) const override;

 private:
  const vectorize::EmbeddingTable& table_;
};

struct RelevantPair {
  std::string req_id;
  std::string segment_id;
  double similarity = 0.0;
  std::size_t segment_index = 0;
  std::size_t requirement_index = 0;

  bool operator==(const RelevantPair&) const = default;
};

struct RelevanceResult {
  std::vector<RelevantPair> pairs;  // by (segment index, requirement index)
  std::vector<std::string> diagnostics;
};

/// Every (segment, requirement) pair with cosine >= theta. Items whose
/// vector is zero are skipped with one diagnostic each. Throws
/// InvalidInput for theta outside [0, 1].
RelevanceResult detect_relevance(const std::vector<TextItem>& segments,
                                 const std::vector<TextItem>& requirements,
                                 double theta, const Vectorizer& vectorizer);
/// Loop-for-loop reference of detect_relevance.
RelevanceResult detect_relevance_serial(const std::vector<TextItem>& segments,
                                        const std::vector<TextItem>& requirements,
                                        double theta, const Vectorizer& vectorizer);

struct Alignment {
  srl::LabelSet missing;       // in the requirement only
  srl::LabelSet not_required;  // in the segment only
  srl::LabelSet shared;
};

/// Label-level set algebra. Throws InvalidRequirement for an empty
/// requirement frame.
Alignment align_roles(const srl::SemanticFrame& requirement,
                      const srl::SemanticFrame& segment);

/// Symmetric, transitive synonym classes plus multi-word aliases. Each
/// lemma canonicalizes to the lexicographically smallest member of its
/// class; alias surface forms are rewritten to their canonical entity
/// first.
class SynonymLexicon {
 public:
  void add_synonyms(const std::vector<std::string>& group);
  void add_alias(const std::vector<std::string>& surface,
                 const std::vector<std::string>& canonical);

  const std::string& canonical(const std::string& lemma) const;
  std::set<std::string> synonyms(const std::string& lemma) const;
  std::vector<std::string> rewrite_aliases(const std::vector<std::string>& terms) const;
  std::vector<std::string> canonicalize(const std::vector<std::string>& terms) const;

 private:
  std::vector<std::set<std::string>> classes_;
  std::map<std::string, std::size_t> class_of_;
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> aliases_;
};

/// "lemma: syn1, syn2" lines.
void load_synonyms(std::istream& in, SynonymLexicon& lexicon);
/// "surface form = canonical entity" lines.
void load_aliases(std::istream& in, SynonymLexicon& lexicon);

struct TextMatch {
  bool matched = false;
  double similarity = 0.0;
  std::optional<std::string> diagnostic;
};

/// Jaccard overlap of the two roles' lemma sets after alias rewriting,
/// stopword removal and synonym canonicalization; matched iff
/// similarity >= tau_text. Throws InvalidInput when the labels differ.
TextMatch match_role_text(const srl::SemanticRole& requirement_role,
                          const srl::SemanticRole& segment_role,
                          const SynonymLexicon& lexicon, double tau_text,
                          const corpus::WordSet& stopwords = corpus::default_stopwords());

/// Lemma set used by match_role_text.
std::set<std::string> normalized_lemmas(const std::vector<std::string>& lemmas,
                                        const SynonymLexicon& lexicon,
                                        const corpus::WordSet& stopwords);

struct RoleMatch {
  std::string label;
  double similarity = 0.0;
  bool matched = false;
};

struct SatisfactionResult {
  std::string req_id;
  std::string segment_id;
  Alignment alignment;
  std::vector<RoleMatch> role_matches;  // one per shared label
  srl::LabelSet matched_roles;
  double score = 0.0;  // |matched_roles| / |labels(requirement)|
  bool satisfied = false;
};

struct Thresholds {
  double theta = 0.5;     // relevance, sim >= theta
  double tau_text = 0.5;  // role text match, sim >= tau_text
  double tau_sat = 0.8;   // satisfaction, score >= tau_sat
};

SatisfactionResult score_segment(const criteria::LegalRequirement& requirement,
                                 const srl::SemanticFrame& segment_frame,
                                 std::string segment_id,
                                 const SynonymLexicon& lexicon,
                                 double tau_text, double tau_sat,
                                 const corpus::WordSet& stopwords =
                                     corpus::default_stopwords());

struct DocumentSegment {
  std::string id;
  std::string text;
  std::vector<std::string> terms;
  srl::SemanticFrame frame;
};

struct ComplianceConfig {
  Thresholds thresholds;
  bool gate = true;                // score only relevance-detected pairs
  bool per_segment_rules = false;  // rule facts per segment, not per document
  std::optional<std::string> generated_at;
  nlohmann::ordered_json extra_config = nlohmann::ordered_json::object();
};

struct ComplianceInputs {
  std::string doc_id;
  std::vector<DocumentSegment> segments;
  std::vector<criteria::LegalRequirement> requirements;
  std::vector<criteria::TemplateRule> rules;
  std::map<std::string, criteria::FactSet> segment_facts;  // by segment id
  std::shared_ptr<const Vectorizer> vectorizer;  // TF-IDF when null
  SynonymLexicon lexicon;
  corpus::WordSet stopwords = corpus::default_stopwords();
};

enum class RequirementStatus { Satisfied, Violated };

const char* to_string(RequirementStatus s);

struct RequirementVerdict {
  std::string req_id;
  std::string source_ref;
  RequirementStatus status = RequirementStatus::Violated;
  std::vector<RelevantPair> relevant;
  std::optional<SatisfactionResult> best;
  std::string evidence;
};

struct ComplianceReport {
  std::string doc_id;
  std::optional<std::string> generated_at;
  nlohmann::ordered_json config;
  std::vector<RequirementVerdict> requirements;  // ordered by id
  std::vector<criteria::RuleVerdict> rules;      // ordered by id
  std::vector<std::string> diagnostics;

  std::size_t violated_requirements() const;
  std::size_t violated_rules() const;
  std::size_t violations() const { return violated_requirements() + violated_rules(); }
};

/// Relevance detection, phrasal scoring of the relevant pairs, best result
/// per requirement, then rule verdicts over the predicted concepts. A
/// requirement is Violated iff no segment satisfies it. Throws
/// CrossReferenceError for duplicate segment ids or facts keyed by an
/// unknown segment.
ComplianceReport check_compliance(const ComplianceInputs& inputs,
                                  const ComplianceConfig& config);

/// Digit runs compare numerically: r2 < r10.
bool natural_less(std::string_view a, std::string_view b);

nlohmann::ordered_json to_json(const ComplianceReport& report);

}  // namespace regcheck::compliance
