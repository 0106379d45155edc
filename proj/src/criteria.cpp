#include "regcheck/criteria.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "detail/fields.hpp"
#include "regcheck/error.hpp"
#include "regcheck/text.hpp"

namespace regcheck::criteria {

namespace {

enum class Tok { Ident, If, Then, And, Or, Not, LParen, RParen, Comma, Colon, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int column = 1;  // 1-based
};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
         c == '-';
}

class Lexer {
 public:
  Lexer(std::string_view line, int line_no) : line_(line), line_no_(line_no) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line_.size()) {
      const char c = line_[i];
      const int col = static_cast<int>(i) + 1;
      if (std::isspace(static_cast<unsigned char>(c)) || c == '[' || c == ']' ||
          c == '<' || c == '>' || c == ';') {
        ++i;
        continue;
      }
      if (c == '(') out.push_back({Tok::LParen, "(", col});
      else if (c == ')') out.push_back({Tok::RParen, ")", col});
      else if (c == ',') out.push_back({Tok::Comma, ",", col});
      else if (c == ':') out.push_back({Tok::Colon, ":", col});
      else if (ident_start(c)) {
        std::size_t j = i + 1;
        while (j < line_.size() && ident_char(line_[j])) ++j;
        std::string word(line_.substr(i, j - i));
        while (!word.empty() && (word.back() == '.' || word.back() == '-')) {
          word.pop_back();
        }
        out.push_back({keyword(word), word, col});
        i = j;
        continue;
      } else if (c == '.' && out.size() > 0) {
        // sentence-final period after the postcondition
      } else {
        throw Error(ErrorCode::ParseError,
                    std::string("unexpected character '") + c + "'", line_no_, col);
      }
      ++i;
    }
    out.push_back({Tok::End, "", static_cast<int>(line_.size()) + 1});
    return out;
  }

 private:
  static Tok keyword(const std::string& w) {
    const std::string u = [&] {
      std::string s = w;
      for (char& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      return s;
    }();
    if (u == "IF") return Tok::If;
    if (u == "THEN") return Tok::Then;
    if (u == "AND") return Tok::And;
    if (u == "OR") return Tok::Or;
    if (u == "NOT") return Tok::Not;
    return Tok::Ident;
  }

  std::string_view line_;
  int line_no_;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, int line_no)
      : tokens_(std::move(tokens)), line_no_(line_no) {}

  TemplateRule rule(std::string default_id) {
    TemplateRule r;
    r.rule_id = std::move(default_id);
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::Colon) {
      r.rule_id = next().text;
      next();
    }
    if (accept(Tok::If)) {
      r.precondition = expr();
      accept(Tok::Comma);
    }
    expect(Tok::Then, "THEN");
    r.postcondition.push_back(expect(Tok::Ident, "a postcondition atom").text);
    while (accept(Tok::Comma) || accept(Tok::And)) {
      r.postcondition.push_back(expect(Tok::Ident, "a postcondition atom").text);
    }
    expect(Tok::End, "end of rule");
    return r;
  }

 private:
  Expr expr() {
    Expr left = conjunction();
    if (peek().kind != Tok::Or) return left;
    Expr node{Expr::Kind::Or, {}, {std::move(left)}};
    while (accept(Tok::Or)) node.operands.push_back(conjunction());
    return node;
  }

  Expr conjunction() {
    Expr left = unary();
    if (peek().kind != Tok::And) return left;
    Expr node{Expr::Kind::And, {}, {std::move(left)}};
    while (accept(Tok::And)) node.operands.push_back(unary());
    return node;
  }

  Expr unary() {
    if (accept(Tok::Not)) return Expr{Expr::Kind::Not, {}, {unary()}};
    if (accept(Tok::LParen)) {
      Expr inner = expr();
      expect(Tok::RParen, "')'");
      return inner;
    }
    return Expr{Expr::Kind::Atom, expect(Tok::Ident, "a concept atom").text, {}};
  }

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& next() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  const Token& expect(Tok k, const std::string& what) {
    if (peek().kind != k) {
      const auto& t = peek();
      throw Error(ErrorCode::ParseError,
                  "expected " + what + ", found " +
                      (t.kind == Tok::End ? std::string("end of line")
                                          : "'" + t.text + "'"),
                  line_no_, t.column);
    }
    return next();
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int line_no_;
};

RuleStatus fold(RuleStatus acc, RuleStatus s) {
  if (acc == RuleStatus::Violated || s == RuleStatus::Violated) {
    return RuleStatus::Violated;
  }
  if (acc == RuleStatus::Compliant || s == RuleStatus::Compliant) {
    return RuleStatus::Compliant;
  }
  return RuleStatus::NotApplicable;
}

}  // namespace

std::vector<LegalRequirement> load_requirements(std::istream& in) {
  std::vector<LegalRequirement> out;
  std::set<std::string> seen;
  try {
    const auto j = nlohmann::json::parse(in);
    const auto& list = j.is_array() ? j : j.at("requirements");
    for (const auto& jr : list) {
      LegalRequirement r;
      r.req_id = jr.at("id").get<std::string>();
      r.text = jr.value("text", "");
      r.source_ref = jr.value("source", "");
      r.frame = srl::frame_from_json(jr.value("frame", nlohmann::json::array()));
      if (r.frame.roles.empty()) {
        throw Error(ErrorCode::InvalidRequirement,
                    r.req_id + " has no semantic roles");
      }
      if (!seen.insert(r.req_id).second) {
        throw Error(ErrorCode::DuplicateId, "requirement " + r.req_id);
      }
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("bad requirements file: ") + e.what());
  }
  return out;
}

bool Expr::evaluate(const FactSet& facts) const {
  switch (kind) {
    case Kind::Atom: return facts.count(atom) != 0;
    case Kind::Not: return !operands.front().evaluate(facts);
    case Kind::And:
      return std::all_of(operands.begin(), operands.end(),
                         [&](const Expr& e) { return e.evaluate(facts); });
    case Kind::Or:
      return std::any_of(operands.begin(), operands.end(),
                         [&](const Expr& e) { return e.evaluate(facts); });
  }
  return false;
}

void Expr::collect_atoms(std::set<std::string>& out) const {
  if (kind == Kind::Atom) out.insert(atom);
  for (const auto& o : operands) o.collect_atoms(out);
}

std::string Expr::to_string() const {
  switch (kind) {
    case Kind::Atom: return atom;
    case Kind::Not: return "NOT " + operands.front().to_string();
    case Kind::And:
    case Kind::Or: {
      std::string out = "(";
      for (std::size_t i = 0; i < operands.size(); ++i) {
        if (i) out += kind == Kind::And ? " AND " : " OR ";
        out += operands[i].to_string();
      }
      return out + ")";
    }
  }
  return {};
}

bool Expr::negation_free() const {
  if (kind == Kind::Not) return false;
  return std::all_of(operands.begin(), operands.end(),
                     [](const Expr& e) { return e.negation_free(); });
}

TemplateRule parse_rule(std::string_view line, std::string default_id, int line_no) {
  Parser parser(Lexer(line, line_no).run(), line_no);
  TemplateRule r = parser.rule(std::move(default_id));
  r.source = std::string(detail::trim(line));
  return r;
}

std::vector<TemplateRule> load_rules(std::istream& in,
                                     const std::set<std::string>* known_atoms) {
  std::vector<TemplateRule> out;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_skippable(line)) continue;
    auto rule = parse_rule(line, "R" + std::to_string(out.size() + 1), line_no);
    if (!seen.insert(rule.rule_id).second) {
      throw Error(ErrorCode::DuplicateId, "rule " + rule.rule_id, line_no);
    }
    if (known_atoms) {
      std::set<std::string> atoms(rule.postcondition.begin(), rule.postcondition.end());
      if (rule.precondition) rule.precondition->collect_atoms(atoms);
      for (const auto& a : atoms) {
        if (known_atoms->count(a) == 0) {
          throw Error(ErrorCode::UnknownConcept, a + " in rule " + rule.rule_id,
                      line_no);
        }
      }
    }
    out.push_back(std::move(rule));
  }
  return out;
}

const char* to_string(RuleStatus s) {
  switch (s) {
    case RuleStatus::Compliant: return "Compliant";
    case RuleStatus::Violated: return "Violated";
    case RuleStatus::NotApplicable: return "NotApplicable";
  }
  return "NotApplicable";
}

RuleVerdict evaluate_rule(const TemplateRule& rule, const FactSet& facts) {
  RuleVerdict v;
  v.rule_id = rule.rule_id;
  if (rule.precondition && !rule.precondition->evaluate(facts)) {
    v.status = RuleStatus::NotApplicable;
    return v;
  }
  for (const auto& atom : rule.postcondition) {
    if (facts.count(atom) == 0) v.missing_atoms.push_back(atom);
  }
  v.status = v.missing_atoms.empty() ? RuleStatus::Compliant : RuleStatus::Violated;
  return v;
}

RuleVerdict evaluate_rule_per_segment(const TemplateRule& rule,
                                      const std::vector<FactSet>& segment_facts) {
  RuleVerdict out;
  out.rule_id = rule.rule_id;
  std::set<std::string> missing;
  for (const auto& facts : segment_facts) {
    const auto v = evaluate_rule(rule, facts);
    out.status = fold(out.status, v.status);
    if (v.status == RuleStatus::Violated) {
      missing.insert(v.missing_atoms.begin(), v.missing_atoms.end());
    }
  }
  if (out.status == RuleStatus::Violated) {
    // Keep postcondition order.
    for (const auto& a : rule.postcondition) {
      if (missing.count(a)) out.missing_atoms.push_back(a);
    }
  }
  return out;
}

nlohmann::ordered_json to_json(const RuleVerdict& v) {
  return {{"rule_id", v.rule_id},
          {"status", to_string(v.status)},
          {"missing_atoms", v.missing_atoms}};
}

}  // namespace regcheck::criteria
