#include <gtest/gtest.h>

#include "helpers.hpp"
#include "regcheck/srl.hpp"

using namespace regcheck;
using namespace regcheck::srl;
using testing_support::data_path;
using testing_support::read_file;

namespace {

annotations::AnnotatedSentence parsed(const std::string& rel, std::size_t i = 0) {
  return annotations::parse_annotations(read_file(data_path(rel))).at(i);
}

const SemanticRole& only(const SemanticFrame& f, std::string_view label) {
  const auto rs = f.roles_with(label);
  EXPECT_EQ(rs.size(), 1u) << label;
  return *rs.at(0);
}

}  // namespace

TEST(ExtractFrame, Table2RequirementHasAllSixRoles) {
  const auto f = extract_frame(parsed("table2/requirement.conllu"));
  EXPECT_TRUE(f.diagnostics.empty());
  EXPECT_EQ(f.labels(), (LabelSet{"Action", "Actor", "Object", "Condition", "Constraint",
                                  "Beneficiary"}));
  struct Want {
    const char* label;
    const char* text;
    annotations::TokenRange range;
  };
  for (const auto& w : std::vector<Want>{
           {"Condition", "In the case of a personal data breach", {1, 8}},
           {"Actor", "the controller", {10, 11}},
           {"Action", "shall notify", {12, 18}},
           {"Constraint", "without undue delay", {14, 16}},
           {"Beneficiary", "the supervisory authority", {24, 26}},
           {"Object", "the personal data breach", {19, 22}}}) {
    const auto& r = only(f, w.label);
    EXPECT_EQ(r.text, w.text) << w.label;
    EXPECT_EQ(r.token_range, w.range) << w.label;
  }
  EXPECT_EQ(only(f, "Action").tokens, (std::vector<int>{12, 18}));
  EXPECT_EQ(only(f, "Object").head_lemma, "breach");
}

TEST(ExtractFrame, AssistSentence) {
  const auto s = parsed("code3/assist.conllu");
  EXPECT_EQ(s.at(annotations::find_root_verb(s)).lemma, "assist");
  const auto f = extract_frame(s);
  EXPECT_EQ(only(f, "Actor").text, "The processor");
  EXPECT_EQ(only(f, "Action").text, "shall assist");
  EXPECT_EQ(only(f, "Object").text, "the controller");
  EXPECT_FALSE(f.has("Condition"));
}

TEST(ExtractFrame, Example1FirstSentence) {
  const auto f = extract_frame(parsed("article33/annotations.conllu"));
  EXPECT_EQ(only(f, "Condition").text, "In the case of a personal data breach");
  EXPECT_EQ(only(f, "Action").text, "shall notify");
  EXPECT_EQ(only(f, "Object").text, "the personal data breach");
  EXPECT_EQ(only(f, "Beneficiary").text,
            "the supervisory authority competent in accordance with Article 55");
  std::vector<std::string> constraints;
  for (const auto* r : f.roles_with("Constraint")) constraints.push_back(r->text);
  EXPECT_NE(std::find(constraints.begin(), constraints.end(), "without undue delay"),
            constraints.end());
}

TEST(ExtractFrame, NoVerbGivesEmptyFrameWithDiagnostic) {
  const auto s = annotations::parse_annotations(
      "1\tData\tdata\tNOUN\t_\t_\t2\tcompound\t_\t_\n"
      "2\tbreach\tbreach\tNOUN\t_\t_\t0\troot\t_\t_\n")[0];
  const auto f = extract_frame(s);
  EXPECT_TRUE(f.roles.empty());
  ASSERT_EQ(f.diagnostics.size(), 1u);
  EXPECT_NE(f.diagnostics[0].find("NoRootVerb"), std::string::npos);
}

TEST(MarkerLexicon, FileReplacesListedCategories) {
  std::istringstream in("# custom\ncondition: provided that, where\n");
  const auto lex = load_marker_lexicon(in);
  EXPECT_EQ(lex.condition, (std::vector<Marker>{{"provided", "that"}, {"where"}}));
  EXPECT_EQ(lex.constraint, MarkerLexicon::defaults().constraint);
  std::istringstream bad("deadline: within\n");
  EXPECT_ERROR_CODE(load_marker_lexicon(bad), ErrorCode::InvalidInput);
  std::istringstream empty("# nothing\n");
  EXPECT_ERROR_CODE(load_marker_lexicon(empty), ErrorCode::InvalidInput);
}

TEST(MarkerLexicon, DefaultsMatchPaperMarkers) {
  const auto& d = MarkerLexicon::defaults();
  EXPECT_TRUE(contains_marker({"in", "case", "of", "breach"}, {"in", "case", "of"}));
  EXPECT_NE(std::find(d.condition.begin(), d.condition.end(), Marker{"if"}), d.condition.end());
  EXPECT_NE(std::find(d.constraint.begin(), d.constraint.end(), Marker{"without"}),
            d.constraint.end());
  EXPECT_EQ(d.beneficiary, (std::vector<Marker>{{"to"}, {"for"}}));
}

TEST(MarkerSequence, DropsDeterminers) {
  const auto s = parsed("table2/requirement.conllu");
  EXPECT_EQ(marker_sequence(s, {1, 8}),
            (std::vector<std::string>{"in", "case", "of", "personal", "data", "breach"}));
}

TEST(Labels, CanonicalAndOrder) {
  EXPECT_EQ(canonical_label("reason"), "Reason");
  EXPECT_EQ(canonical_label(" ACTOR "), "Actor");
  const LabelSet s{"Reason", "Beneficiary", "Action", "Constraint", "Actor", "Object",
                   "Condition", "Purpose"};
  EXPECT_EQ(std::vector<std::string>(s.begin(), s.end()),
            (std::vector<std::string>{"Action", "Actor", "Object", "Condition", "Constraint",
                                      "Beneficiary", "Purpose", "Reason"}));
}

TEST(FrameJson, GoldFramesAndErrors) {
  const auto j = nlohmann::json::parse(R"([
    {"label": "actor", "text": "ORGANIZATION X"},
    {"label": "Action", "text": "will inform", "lemmas": ["will", "Inform"]}])");
  const auto f = frame_from_json(j, 4);
  EXPECT_EQ(f.sentence_id, 4);
  EXPECT_EQ(only(f, "Actor").lemmas, (std::vector<std::string>{"organization", "x"}));
  EXPECT_EQ(only(f, "Action").lemmas, (std::vector<std::string>{"will", "inform"}));
  const auto two = nlohmann::json::parse(
      R"([{"label": "Action", "text": "a"}, {"label": "Action", "text": "b"}])");
  EXPECT_ERROR_CODE(frame_from_json(two), ErrorCode::InvalidInput);
  const auto back = frame_from_json(nlohmann::json::parse(to_json(f).dump()), 4);
  EXPECT_EQ(back.labels(), f.labels());
}
