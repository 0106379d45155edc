#pragma once

#include <istream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "regcheck/annotations.hpp"

namespace regcheck::srl {

namespace role {
inline constexpr std::string_view kAction = "Action";
inline constexpr std::string_view kActor = "Actor";
inline constexpr std::string_view kObject = "Object";
inline constexpr std::string_view kCondition = "Condition";
inline constexpr std::string_view kConstraint = "Constraint";
inline constexpr std::string_view kBeneficiary = "Beneficiary";
}  // namespace role

/// "actor" -> "Actor"; labels outside the six extracted ones (e.g. "reason")
/// are kept as open labels with the first letter capitalized.
std::string canonical_label(std::string_view label);

/// Orders the extracted labels first (Action, Actor, Object, Condition,
/// Constraint, Beneficiary), then open labels alphabetically.
struct LabelLess {
  bool operator()(const std::string& a, const std::string& b) const;
};
using LabelSet = std::set<std::string, LabelLess>;

struct SemanticRole {
  std::string label;
  annotations::TokenRange token_range;  // covering interval, 1-based
  std::vector<int> tokens;              // the role's entries, sorted
  std::string text;                     // surface of `tokens`
  std::vector<std::string> lemmas;      // lowercased, parallel to `tokens`
  std::string head_lemma;
};

struct SemanticFrame {
  int sentence_id = -1;
  std::vector<SemanticRole> roles;
  std::vector<std::string> diagnostics;

  LabelSet labels() const;
  bool has(std::string_view label) const;
  std::vector<const SemanticRole*> roles_with(std::string_view label) const;
};

using Marker = std::vector<std::string>;

struct MarkerLexicon {
  std::vector<Marker> condition;
  std::vector<Marker> constraint;
  std::vector<Marker> beneficiary;

  static const MarkerLexicon& defaults();
};

/// "<category>: m1, m2" lines, category in {condition, constraint,
/// beneficiary}; repeated categories append. Categories absent from the
/// file keep their defaults. Throws InvalidInput for a file with no entries
/// or an unknown category.
MarkerLexicon load_marker_lexicon(std::istream& in);

/// True when `marker` occurs contiguously in `lemmas`.
bool contains_marker(const std::vector<std::string>& lemmas, const Marker& marker);

/// Lemma sequence used for marker matching: lowercased lemmas of the
/// entries in `range`, determiners dropped.
std::vector<std::string> marker_sequence(const annotations::AnnotatedSentence& s,
                                         const annotations::TokenRange& range);

/// Legal semantic roles of one parsed sentence. Action is the root verb
/// with its auxiliaries; Actor the subject NP; Object the direct-object NP;
/// Beneficiary a prepositional dependent introduced by a beneficiary marker
/// (or the subject of a secondary clause); Condition/Constraint a
/// prepositional, adverbial or clausal dependent of the root that opens
/// with a marker. A sentence without a verb yields an empty frame with a
/// diagnostic.
SemanticFrame extract_frame(const annotations::AnnotatedSentence& s,
                            const MarkerLexicon& lexicon = MarkerLexicon::defaults());

/// Gold frames: a JSON array of {label, text, token_range?: [first, last],
/// lemmas?: [...]}. Missing lemmas default to the lowercased tokens of
/// text.
SemanticFrame frame_from_json(const nlohmann::json& roles, int sentence_id = -1);
nlohmann::ordered_json to_json(const SemanticFrame& frame);
nlohmann::ordered_json to_json(const SemanticRole& role);

}  // namespace regcheck::srl
