#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "helpers.hpp"
#include "regcheck/criteria.hpp"

using namespace regcheck;
using namespace regcheck::criteria;
using testing_support::data_path;
using testing_support::read_file;

namespace {

std::vector<TemplateRule> article33_rules() {
  std::istringstream in(read_file(data_path("rules/rules.txt")));
  return load_rules(in);
}

// Random boolean formula rendered as text, paired with its own evaluator.
struct Formula {
  std::string text;
  std::function<bool(const FactSet&)> eval;
};

Formula random_formula(std::mt19937& rng, int depth) {
  static const std::vector<std::string> atoms = {"A", "B.x", "C_1", "D"};
  std::uniform_int_distribution<int> kind(0, depth > 0 ? 3 : 0);
  std::uniform_int_distribution<std::size_t> atom(0, atoms.size() - 1);
  switch (kind(rng)) {
    case 0: {
      const auto a = atoms[atom(rng)];
      return {a, [a](const FactSet& f) { return f.count(a) > 0; }};
    }
    case 1: {
      auto x = random_formula(rng, depth - 1);
      return {"NOT " + x.text, [x](const FactSet& f) { return !x.eval(f); }};
    }
    case 2: {
      auto x = random_formula(rng, depth - 1), y = random_formula(rng, depth - 1);
      return {"(" + x.text + " AND " + y.text + ")",
              [x, y](const FactSet& f) { return x.eval(f) && y.eval(f); }};
    }
    default: {
      auto x = random_formula(rng, depth - 1), y = random_formula(rng, depth - 1);
      return {"(" + x.text + " or " + y.text + ")",
              [x, y](const FactSet& f) { return x.eval(f) || y.eval(f); }};
    }
  }
}

}  // namespace

TEST(Rules, PaperTemplateForms) {
  const auto rules = article33_rules();
  ASSERT_EQ(rules.size(), 2u);
  EXPECT_EQ(rules[0].rule_id, "R1");
  EXPECT_EQ(rules[0].precondition->to_string(), "DataBreach.Risk_to_natural_person");
  EXPECT_EQ(rules[0].postcondition, std::vector<std::string>{"Notification.Early"});
  EXPECT_EQ(rules[1].postcondition, std::vector<std::string>{"Reasons.Delay"});
}

TEST(Rules, Article33FactCases) {
  const auto rules = article33_rules();
  const auto r1 = evaluate_rule(rules[0], {"DataBreach", "DataBreach.Risk_to_natural_person"});
  EXPECT_EQ(r1.status, RuleStatus::Violated);
  EXPECT_EQ(r1.missing_atoms, std::vector<std::string>{"Notification.Early"});
  EXPECT_EQ(evaluate_rule(rules[0], {"DataBreach.Risk_to_natural_person", "Notification.Early"})
                .status,
            RuleStatus::Compliant);
  EXPECT_EQ(evaluate_rule(rules[1], {"DataBreach.Risk_to_natural_person"}).status,
            RuleStatus::NotApplicable);
}

TEST(Rules, GrammarVariants) {
  const auto r = parse_rule("late: if (A and not B) or C then X, Y AND Z", "R9");
  EXPECT_EQ(r.rule_id, "late");
  EXPECT_EQ(r.postcondition, (std::vector<std::string>{"X", "Y", "Z"}));
  EXPECT_FALSE(r.precondition->negation_free());
  EXPECT_EQ(r.precondition->to_string(), "((A AND NOT B) OR C)");
  const auto always = parse_rule("THEN <Notice>", "R1");
  EXPECT_FALSE(always.precondition.has_value());
  EXPECT_EQ(evaluate_rule(always, {}).status, RuleStatus::Violated);
}

TEST(Rules, ParseErrorsCarryPosition) {
  try {
    parse_rule("IF A AND THEN B", "R1", 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_EQ(e.line(), 4);
    EXPECT_EQ(e.column(), 10);
  }
  EXPECT_ERROR_CODE(parse_rule("IF (A THEN B", "R1"), ErrorCode::ParseError);
  EXPECT_ERROR_CODE(parse_rule("IF A THEN", "R1"), ErrorCode::ParseError);
  EXPECT_ERROR_CODE(parse_rule("IF A % THEN B", "R1"), ErrorCode::ParseError);
  std::istringstream dup("x: IF A THEN B\nx: IF B THEN C\n");
  EXPECT_ERROR_CODE(load_rules(dup), ErrorCode::DuplicateId);
  std::istringstream strict("IF A THEN Unknown\n");
  const std::set<std::string> known{"A"};
  EXPECT_ERROR_CODE(load_rules(strict, &known), ErrorCode::UnknownConcept);
}

TEST(Rules, RandomFormulasEvaluateLikeOracle) {
  std::mt19937 rng(2024);
  const std::vector<std::string> atoms = {"A", "B.x", "C_1", "D"};
  for (int round = 0; round < 300; ++round) {
    const auto f = random_formula(rng, 3);
    const auto rule = parse_rule("IF " + f.text + " THEN Post", "R1");
    for (unsigned mask = 0; mask < 16; ++mask) {
      FactSet facts;
      for (unsigned b = 0; b < 4; ++b) {
        if (mask & (1u << b)) facts.insert(atoms[b]);
      }
      const bool pre = f.eval(facts);
      EXPECT_EQ(rule.precondition->evaluate(facts), pre) << f.text;
      const auto v = evaluate_rule(rule, facts);
      EXPECT_EQ(v.status, pre ? RuleStatus::Violated : RuleStatus::NotApplicable);
      facts.insert("Post");
      EXPECT_EQ(evaluate_rule(rule, facts).status,
                pre ? RuleStatus::Compliant : RuleStatus::NotApplicable);
    }
  }
}

TEST(Rules, PerSegmentFold) {
  const auto rule = parse_rule("IF A THEN B", "R1");
  EXPECT_EQ(evaluate_rule_per_segment(rule, {{"A", "B"}, {"A"}}).status, RuleStatus::Violated);
  EXPECT_EQ(evaluate_rule_per_segment(rule, {{"A", "B"}, {}}).status, RuleStatus::Compliant);
  EXPECT_EQ(evaluate_rule_per_segment(rule, {{}, {"B"}}).status, RuleStatus::NotApplicable);
  EXPECT_EQ(evaluate_rule_per_segment(rule, {}).status, RuleStatus::NotApplicable);
}

TEST(Requirements, LoadFixtureAndErrors) {
  std::istringstream in(read_file(data_path("table2/requirements.json")));
  const auto reqs = load_requirements(in);
  ASSERT_EQ(reqs.size(), 1u);
  EXPECT_EQ(reqs[0].req_id, "r1");
  EXPECT_EQ(reqs[0].frame.roles.size(), 6u);
  std::istringstream empty(R"([{"id": "r1", "text": "x", "frame": []}])");
  EXPECT_ERROR_CODE(load_requirements(empty), ErrorCode::InvalidRequirement);
  std::istringstream dup(R"([{"id": "r1", "frame": [{"label": "Actor", "text": "a"}]},
                            {"id": "r1", "frame": [{"label": "Actor", "text": "b"}]}])");
  EXPECT_ERROR_CODE(load_requirements(dup), ErrorCode::DuplicateId);
}
