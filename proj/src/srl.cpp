#include "regcheck/srl.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <sstream>

#include "detail/fields.hpp"
#include "embedded_resources.hpp"
#include "regcheck/error.hpp"
#include "regcheck/text.hpp"

namespace regcheck::srl {

namespace {

using annotations::AnnotatedSentence;
using annotations::TokenRange;

constexpr std::array<std::string_view, 6> kCoreLabels = {
    role::kAction,    role::kActor,      role::kObject,
    role::kCondition, role::kConstraint, role::kBeneficiary};

int label_rank(const std::string& label) {
  for (std::size_t i = 0; i < kCoreLabels.size(); ++i) {
    if (label == kCoreLabels[i]) return static_cast<int>(i);
  }
  return static_cast<int>(kCoreLabels.size());
}

std::string base_relation(const std::string& deprel) {
  return deprel.substr(0, deprel.find(':'));
}

std::vector<Marker> parse_markers(std::string_view list) {
  std::vector<Marker> out;
  for (const auto& item : detail::split(list, ',')) {
    std::istringstream words(corpus::fold_case(item));
    Marker m;
    for (std::string w; words >> w;) m.push_back(w);
    if (!m.empty()) out.push_back(std::move(m));
  }
  return out;
}

MarkerLexicon parse_lexicon(std::istream& in, const MarkerLexicon* fallback) {
  MarkerLexicon lex;
  bool any = false, has_condition = false, has_constraint = false,
       has_beneficiary = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_skippable(line)) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::InvalidInput, "expected '<category>: markers'", line_no);
    }
    const std::string key =
        corpus::fold_case(detail::trim(std::string_view(line).substr(0, colon)));
    auto markers = parse_markers(std::string_view(line).substr(colon + 1));
    std::vector<Marker>* target = nullptr;
    if (key == "condition") {
      target = &lex.condition;
      has_condition = true;
    } else if (key == "constraint") {
      target = &lex.constraint;
      has_constraint = true;
    } else if (key == "beneficiary") {
      target = &lex.beneficiary;
      has_beneficiary = true;
    } else {
      throw Error(ErrorCode::InvalidInput, "unknown marker category '" + key + "'",
                  line_no);
    }
    any = any || !markers.empty();
    target->insert(target->end(), markers.begin(), markers.end());
  }
  if (!any) throw Error(ErrorCode::InvalidInput, "marker lexicon has no entries");
  if (fallback) {
    if (!has_condition) lex.condition = fallback->condition;
    if (!has_constraint) lex.constraint = fallback->constraint;
    if (!has_beneficiary) lex.beneficiary = fallback->beneficiary;
  }
  if (lex.condition.empty() || lex.constraint.empty() || lex.beneficiary.empty()) {
    throw Error(ErrorCode::InvalidInput, "every marker category needs an entry");
  }
  return lex;
}

bool starts_with_marker(const std::vector<std::string>& seq, const Marker& m) {
  return m.size() <= seq.size() && std::equal(m.begin(), m.end(), seq.begin());
}

int count_leading(const std::vector<std::string>& seq,
                  const std::vector<Marker>& markers) {
  return static_cast<int>(std::count_if(
      markers.begin(), markers.end(),
      [&](const Marker& m) { return starts_with_marker(seq, m); }));
}

bool is_punct(const AnnotatedSentence& s, int i) { return s.at(i).upos == "PUNCT"; }

SemanticRole make_role(const AnnotatedSentence& s, std::string_view label,
                       std::vector<int> tokens, int head) {
  SemanticRole r;
  r.label = std::string(label);
  std::sort(tokens.begin(), tokens.end());
  r.tokens = std::move(tokens);
  r.token_range = {r.tokens.front(), r.tokens.back()};
  r.text = s.text(r.tokens);
  for (int i : r.tokens) r.lemmas.push_back(corpus::fold_case(s.at(i).lemma));
  r.head_lemma = corpus::fold_case(s.at(head).lemma);
  return r;
}

// Covering interval of the head's subtree with punctuation trimmed from
// both edges.
std::optional<TokenRange> phrase_range(const AnnotatedSentence& s, int head) {
  TokenRange r = annotations::subtree_span(s, head);
  while (r.first < r.last && is_punct(s, r.first)) ++r.first;
  while (r.last > r.first && is_punct(s, r.last)) --r.last;
  if (is_punct(s, r.first)) return std::nullopt;
  return r;
}

std::vector<int> indices(const TokenRange& r) {
  std::vector<int> out;
  for (int i = r.first; i <= r.last; ++i) out.push_back(i);
  return out;
}

SemanticRole phrase_role(const AnnotatedSentence& s, std::string_view label,
                         const TokenRange& r, int head) {
  return make_role(s, label, indices(r), head);
}

// Leftmost "case" dependent of a nominal, i.e. its preposition.
std::optional<int> preposition_of(const AnnotatedSentence& s, int head) {
  for (int c : s.children(head)) {
    if (base_relation(s.at(c).deprel) == "case") return c;
  }
  return std::nullopt;
}

bool is_candidate_relation(const std::string& rel) {
  return rel == "obl" || rel == "nmod" || rel == "advmod" || rel == "advcl" ||
         rel == "acl";
}

bool is_clause_relation(const std::string& rel) {
  return rel == "advcl" || rel == "ccomp" || rel == "xcomp" || rel == "parataxis";
}

}  // namespace

std::string canonical_label(std::string_view label) {
  std::string out = corpus::fold_case(detail::trim(label));
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') {
    out[0] = static_cast<char>(out[0] - 'a' + 'A');
  }
  return out;
}

bool LabelLess::operator()(const std::string& a, const std::string& b) const {
  const int ra = label_rank(a);
  const int rb = label_rank(b);
  if (ra != rb) return ra < rb;
  return a < b;
}

LabelSet SemanticFrame::labels() const {
  LabelSet out;
  for (const auto& r : roles) out.insert(r.label);
  return out;
}

bool SemanticFrame::has(std::string_view label) const {
  return std::any_of(roles.begin(), roles.end(),
                     [&](const SemanticRole& r) { return r.label == label; });
}

std::vector<const SemanticRole*> SemanticFrame::roles_with(
    std::string_view label) const {
  std::vector<const SemanticRole*> out;
  for (const auto& r : roles) {
    if (r.label == label) out.push_back(&r);
  }
  return out;
}

const MarkerLexicon& MarkerLexicon::defaults() {
  static const MarkerLexicon lex = [] {
    std::istringstream in{std::string(resources::kMarkers)};
    return parse_lexicon(in, nullptr);
  }();
  return lex;
}

MarkerLexicon load_marker_lexicon(std::istream& in) {
  return parse_lexicon(in, &MarkerLexicon::defaults());
}

bool contains_marker(const std::vector<std::string>& lemmas, const Marker& marker) {
  if (marker.empty()) return false;
  return std::search(lemmas.begin(), lemmas.end(), marker.begin(), marker.end()) !=
         lemmas.end();
}

std::vector<std::string> marker_sequence(const AnnotatedSentence& s,
                                         const TokenRange& range) {
  std::vector<std::string> out;
  for (int i = range.first; i <= range.last; ++i) {
    const auto& e = s.at(i);
    if (e.upos == "DET") continue;
    out.push_back(corpus::fold_case(e.lemma));
  }
  return out;
}

SemanticFrame extract_frame(const AnnotatedSentence& s, const MarkerLexicon& lex) {
  SemanticFrame frame;
  frame.sentence_id = s.sent_id();
  int root = 0;
  try {
    root = annotations::find_root_verb(s);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoRootVerb) throw;
    frame.diagnostics.push_back(e.what());
    return frame;
  }

  std::vector<int> action{root};
  for (int c : s.children(root)) {
    if (base_relation(s.at(c).deprel) == "aux") action.push_back(c);
  }
  frame.roles.push_back(make_role(s, role::kAction, action, root));

  std::optional<SemanticRole> actor, object, prepositional_object;
  std::vector<SemanticRole> beneficiaries, qualifiers, clause_beneficiaries;

  for (int c : s.children(root)) {
    const std::string rel = base_relation(s.at(c).deprel);
    const auto range = phrase_range(s, c);
    if (!range) continue;

    if (rel == "nsubj" || rel == "csubj") {
      if (!actor) actor = phrase_role(s, role::kActor, *range, c);
      continue;
    }
    if (rel == "obj") {
      if (!object) object = phrase_role(s, role::kObject, *range, c);
      continue;
    }
    if (rel == "iobj") {
      beneficiaries.push_back(phrase_role(s, role::kBeneficiary, *range, c));
      continue;
    }
    if (!is_candidate_relation(rel) && !is_clause_relation(rel)) continue;

    const auto seq = marker_sequence(s, *range);
    const int conditions = count_leading(seq, lex.condition);
    const int constraints = count_leading(seq, lex.constraint);
    if (is_candidate_relation(rel) && conditions + constraints > 0) {
      const auto label = constraints > conditions ? role::kConstraint : role::kCondition;
      qualifiers.push_back(phrase_role(s, label, *range, c));
      continue;
    }

    if (rel == "obl" || rel == "nmod") {
      const auto prep = preposition_of(s, c);
      if (!prep) continue;
      const Marker prep_lemma{corpus::fold_case(s.at(*prep).lemma)};
      const bool beneficiary_marker =
          std::any_of(lex.beneficiary.begin(), lex.beneficiary.end(),
                      [&](const Marker& m) { return m == prep_lemma; });
      if (beneficiary_marker) {
        TokenRange np = *range;
        while (np.first <= *prep && np.first < np.last) ++np.first;
        beneficiaries.push_back(phrase_role(s, role::kBeneficiary, np, c));
      } else if (!prepositional_object) {
        prepositional_object = phrase_role(s, role::kObject, *range, c);
      }
      continue;
    }

    if (is_clause_relation(rel)) {
      for (int gc : s.children(c)) {
        if (base_relation(s.at(gc).deprel) != "nsubj") continue;
        if (auto sub = phrase_range(s, gc)) {
          clause_beneficiaries.push_back(
              phrase_role(s, role::kBeneficiary, *sub, gc));
        }
        break;
      }
    }
  }

  if (actor) frame.roles.push_back(std::move(*actor));
  if (object) {
    frame.roles.push_back(std::move(*object));
  } else if (prepositional_object) {
    frame.roles.push_back(std::move(*prepositional_object));
  }
  if (beneficiaries.empty()) beneficiaries = std::move(clause_beneficiaries);
  for (auto& q : qualifiers) frame.roles.push_back(std::move(q));
  for (auto& b : beneficiaries) frame.roles.push_back(std::move(b));
  return frame;
}

SemanticFrame frame_from_json(const nlohmann::json& roles, int sentence_id) {
  if (!roles.is_array()) {
    throw Error(ErrorCode::InvalidInput, "a frame must be a JSON array of roles");
  }
  SemanticFrame frame;
  frame.sentence_id = sentence_id;
  try {
    for (const auto& jr : roles) {
      SemanticRole r;
      r.label = canonical_label(jr.at("label").get<std::string>());
      r.text = jr.at("text").get<std::string>();
      if (r.label.empty()) throw Error(ErrorCode::InvalidInput, "role without a label");
      if (jr.contains("token_range")) {
        const auto range = jr.at("token_range").get<std::vector<int>>();
        if (range.size() != 2 || range[0] > range[1]) {
          throw Error(ErrorCode::InvalidInput,
                      "token_range must be [first, last] for " + r.label);
        }
        r.token_range = {range[0], range[1]};
        for (int i = range[0]; i <= range[1]; ++i) r.tokens.push_back(i);
      }
      r.lemmas = jr.contains("lemmas")
                     ? jr.at("lemmas").get<std::vector<std::string>>()
                     : corpus::lower_terms(r.text);
      for (auto& l : r.lemmas) l = corpus::fold_case(l);
      r.head_lemma = jr.value("head_lemma", r.lemmas.empty() ? "" : r.lemmas.back());
      frame.roles.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("bad gold frame: ") + e.what());
  }
  if (frame.roles_with(role::kAction).size() > 1) {
    throw Error(ErrorCode::InvalidInput, "a frame holds at most one Action");
  }
  return frame;
}

nlohmann::ordered_json to_json(const SemanticRole& role) {
  nlohmann::ordered_json j;
  j["label"] = role.label;
  j["text"] = role.text;
  if (!role.tokens.empty()) {
    j["token_range"] = {role.token_range.first, role.token_range.last};
  }
  return j;
}

nlohmann::ordered_json to_json(const SemanticFrame& frame) {
  auto roles = nlohmann::ordered_json::array();
  for (const auto& r : frame.roles) roles.push_back(to_json(r));
  return roles;
}

}  // namespace regcheck::srl
