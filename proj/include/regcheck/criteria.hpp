#pragma once

#include <istream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "regcheck/srl.hpp"

namespace regcheck::criteria {

struct LegalRequirement {
  std::string req_id;
  std::string text;
  srl::SemanticFrame frame;  // gold decomposition
  std::string source_ref;
};

/// JSON array (or {"requirements": [...]}) of
/// {"id", "text", "source"?, "frame": [roles]}. Throws InvalidRequirement
/// for an empty frame and DuplicateId for a repeated id.
std::vector<LegalRequirement> load_requirements(std::istream& in);

using FactSet = std::set<std::string>;

/// Boolean expression over concept atoms.
struct Expr {
  enum class Kind { Atom, Not, And, Or };

  Kind kind = Kind::Atom;
  std::string atom;
  std::vector<Expr> operands;

  bool evaluate(const FactSet& facts) const;
  void collect_atoms(std::set<std::string>& out) const;
  std::string to_string() const;
  /// True if no Not node appears anywhere in the expression.
  bool negation_free() const;
};

struct TemplateRule {
  std::string rule_id;
  std::optional<Expr> precondition;  // absent: always applicable
  std::vector<std::string> postcondition;
  std::string source;                // the rule line as written
};

/// One rule per line:
///   [<id>:] IF <expr> THEN <atom> [AND|, <atom>]...
/// with AND/OR/NOT and parentheses in <expr>. The bracket form
/// "IF [A], THEN <B>" is accepted too. Ids default to R1, R2, ... by rule
/// order. Throws ParseError(line, column), DuplicateId, and UnknownConcept
/// when `known_atoms` is given and lacks an atom.
std::vector<TemplateRule> load_rules(std::istream& in,
                                     const std::set<std::string>* known_atoms = nullptr);
TemplateRule parse_rule(std::string_view line, std::string default_id,
                        int line_no = 1);

enum class RuleStatus { Compliant, Violated, NotApplicable };

const char* to_string(RuleStatus s);

struct RuleVerdict {
  std::string rule_id;
  RuleStatus status = RuleStatus::NotApplicable;
  std::vector<std::string> missing_atoms;
};

/// Closed world: an atom absent from `facts` is false.
RuleVerdict evaluate_rule(const TemplateRule& rule, const FactSet& facts);

/// Per-segment evaluation folded into one verdict: Violated if any segment
/// violates (missing atoms merged), else Compliant if any segment
/// complies, else NotApplicable.
RuleVerdict evaluate_rule_per_segment(const TemplateRule& rule,
                                      const std::vector<FactSet>& segment_facts);

nlohmann::ordered_json to_json(const RuleVerdict& v);

}  // namespace regcheck::criteria
