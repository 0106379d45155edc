// Acceptance checks, one line per criterion. Exit status is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "regcheck/annotations.hpp"
#include "regcheck/classify.hpp"
#include "regcheck/cli.hpp"
#include "regcheck/compliance.hpp"
#include "regcheck/corpus.hpp"
#include "regcheck/criteria.hpp"
#include "regcheck/evaluation.hpp"
#include "regcheck/qa.hpp"
#include "regcheck/srl.hpp"
#include "regcheck/vectorize.hpp"

using namespace regcheck;
using testing_support::data_path;
using testing_support::read_file;

namespace {

using Clock = std::chrono::steady_clock;

// Collects the first failure message; a criterion passes with none.
struct Check {
  std::string failure;
  void expect(bool ok, const std::string& what) {
    if (!ok && failure.empty()) failure = what;
  }
};

int failures = 0;

void criterion(const std::string& name, double budget_seconds,
               const std::function<void(Check&)>& body) {
  Check c;
  const auto start = Clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failure = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (budget_seconds > 0 && secs >= budget_seconds && c.failure.empty()) {
    std::ostringstream m;
    m << "took " << secs << " s, limit " << budget_seconds << " s";
    c.failure = m.str();
  }
  const bool ok = c.failure.empty();
  if (!ok) ++failures;
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << name;
  std::cout << " (" << static_cast<long>(secs * 1000) << " ms)";
  if (!ok) std::cout << ": " << c.failure;
  std::cout << "\n";
}

// ---- 1 ---------------------------------------------------------------------

void table2(Check& c) {
  std::istringstream reqs(read_file(data_path("table2/requirements.json")));
  const auto r = criteria::load_requirements(reqs).at(0);
  const auto frames = nlohmann::json::parse(read_file(data_path("table2/segment_frames.json")));
  const auto t = srl::frame_from_json(frames.at("s0"));
  compliance::SynonymLexicon lex;
  std::istringstream syn(read_file(data_path("table2/synonyms.txt")));
  compliance::load_synonyms(syn, lex);
  std::istringstream ali(read_file(data_path("table2/aliases.txt")));
  compliance::load_aliases(ali, lex);

  const auto a = compliance::align_roles(r.frame, t);
  c.expect(a.missing == srl::LabelSet{"Condition", "Constraint"}, "missing roles");
  c.expect(a.not_required == srl::LabelSet{"Reason"}, "not-required roles");
  const auto s = compliance::score_segment(r, t, "s0", lex, 0.5, 0.8);
  c.expect(std::abs(s.score - 0.6667) <= 0.005, "score " + std::to_string(s.score));
  c.expect(!s.satisfied, "should be Violated at tau_sat 0.8");
}

// ---- 2 ---------------------------------------------------------------------

void algorithm1(Check& c) {
  std::mt19937 rng(1);
  std::uniform_int_distribution<int> count(1, 10), len(0, 8), word(0, 19), theta_d(1, 9);
  for (int round = 0; round < 200; ++round) {
    std::vector<compliance::TextItem> segs, reqs;
    for (int i = count(rng); i > 0; --i) {
      compliance::TextItem item{"s" + std::to_string(segs.size()), {}};
      for (int k = len(rng); k > 0; --k) item.terms.push_back("w" + std::to_string(word(rng)));
      segs.push_back(item);
    }
    for (int i = count(rng); i > 0; --i) {
      compliance::TextItem item{"r" + std::to_string(reqs.size()), {}};
      for (int k = len(rng) + 1; k > 0; --k) item.terms.push_back("w" + std::to_string(word(rng)));
      reqs.push_back(item);
    }
    const double theta = theta_d(rng) / 10.0;
    const auto vec = compliance::TfidfVectorizer::over(segs, reqs, {});
    std::vector<compliance::RelevantPair> expect;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const auto v = vec.vectorize(segs[i]);
      if (std::get<vectorize::SparseVector>(v).empty()) continue;
      for (std::size_t j = 0; j < reqs.size(); ++j) {
        const auto w = vec.vectorize(reqs[j]);
        if (std::get<vectorize::SparseVector>(w).empty()) continue;
        const double sim = vectorize::cosine(v, w);
        if (sim >= theta) expect.push_back({reqs[j].id, segs[i].id, sim, i, j});
      }
    }
    const auto got = compliance::detect_relevance(segs, reqs, theta, vec);
    c.expect(got.pairs == expect, "instance " + std::to_string(round) + " differs");
  }
}

// ---- 3 ---------------------------------------------------------------------

void span_law(Check& c) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> n_articles(1, 4), n_sent(1, 8), n_words(1, 60),
      budget_d(8, 512);
  for (int round = 0; round < 100; ++round) {
    std::string text;
    for (int a = n_articles(rng); a > 0; --a) {
      text += "Article " + std::to_string(a + 100 * round) + "\n";
      for (int s = n_sent(rng); s > 0; --s) {
        text += "Clause";
        for (int w = n_words(rng); w > 1; --w) text += " word";
        text += ". ";
      }
      text += "\n";
    }
    const auto doc = corpus::load_document(text, {{"doc_id", "r"}});
    const int budget = budget_d(rng);
    std::vector<int> seen(doc.sentences.size(), 0);
    for (const auto& sp : corpus::partition_spans(doc, budget)) {
      for (int id : sp.sentence_ids) ++seen[static_cast<std::size_t>(id)];
      if (!sp.oversized) c.expect(sp.token_count < budget, "span over budget");
    }
    for (int n : seen) c.expect(n == 1, "sentence not covered exactly once");
  }
}

// ---- 4 ---------------------------------------------------------------------

class TableScorer final : public qa::SentenceScorer {
 public:
  std::vector<double> scores;
  double score(const qa::Question&, const corpus::Sentence& s) const override {
    return scores.at(static_cast<std::size_t>(s.sent_id));
  }
};

void max_aggregation(Check& c) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  std::string text;
  for (int i = 0; i < 20; ++i) text += "Sentence " + std::to_string(i) + ". ";
  const auto doc = corpus::load_document(text, {{"doc_id", "m"}});
  const auto q = qa::make_question("How should we handle personal data breach?");
  for (int round = 0; round < 500; ++round) {
    TableScorer sc;
    for (int i = 0; i < 20; ++i) sc.scores.push_back(u(rng));
    corpus::ContextSpan span{"s", "body", {}, 0, false};
    double prev = -1;
    double running_max = -1;
    for (int i = 0; i < 20; ++i) {
      span.sentence_ids.push_back(i);
      running_max = std::max(running_max, sc.scores[static_cast<std::size_t>(i)]);
      const double r = qa::span_relevance(q, span, doc, sc).relevance;
      c.expect(r == running_max, "not the multiset maximum");
      c.expect(r >= prev, "appending a sentence decreased relevance");
      prev = r;
    }
  }
}

// ---- 5 ---------------------------------------------------------------------

void cosine_suite(Check& c) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> val(-3, 3), scale(0.1, 50);
  constexpr double eps = 1e-9;
  for (int round = 0; round < 500; ++round) {
    vectorize::DenseVector v(10), w(10);
    for (auto& x : v) x = val(rng);
    for (auto& x : w) x = val(rng);
    c.expect(std::abs(vectorize::cosine(v, w) - vectorize::cosine(w, v)) < eps, "symmetry");
    c.expect(std::abs(vectorize::cosine(v, v) - 1.0) < eps, "self-similarity");
    auto sv = v;
    const double k = scale(rng);
    for (auto& x : sv) x *= k;
    c.expect(std::abs(vectorize::cosine(sv, w) - vectorize::cosine(v, w)) < eps, "scale invariance");
  }
  c.expect(std::abs(vectorize::cosine(vectorize::DenseVector{1, 0, 2, 0},
                                      vectorize::DenseVector{0, 5, 0, 1})) < eps,
           "orthogonality");

  std::uniform_int_distribution<int> len(1, 15), term(0, 11);
  for (int round = 0; round < 100; ++round) {
    std::vector<std::vector<std::string>> docs(10);
    for (auto& d : docs) {
      for (int i = len(rng); i > 0; --i) d.push_back("t" + std::to_string(term(rng)));
    }
    const auto idx = vectorize::build_index(docs, {});
    for (std::size_t d = 0; d < docs.size(); ++d) {
      c.expect(vectorize::bm25_score({"nothere"}, d, idx) == 0.0, "zero overlap not 0");
    }
    double prev = -1;
    for (int k = 1; k < 12; ++k) {
      docs[0].assign(12, "pad");
      std::fill_n(docs[0].begin(), k, "q");
      const double s = vectorize::bm25_score({"q"}, 0, vectorize::build_index(docs, {}));
      c.expect(s > prev, "BM25 not increasing in tf");
      prev = s;
    }
  }
}

// ---- 6 ---------------------------------------------------------------------

void table1_extraction(Check& c) {
  const auto s = annotations::parse_annotations(read_file(data_path("table2/requirement.conllu"))).at(0);
  const auto f = srl::extract_frame(s);
  const std::map<std::string, std::string> want = {
      {"Condition", "In the case of a personal data breach"},
      {"Actor", "the controller"},
      {"Action", "shall notify"},
      {"Constraint", "without undue delay"},
      {"Beneficiary", "the supervisory authority"},
      {"Object", "the personal data breach"}};
  c.expect(f.roles.size() == 6, std::to_string(f.roles.size()) + " roles extracted");
  for (const auto& [label, text] : want) {
    const auto rs = f.roles_with(label);
    c.expect(rs.size() == 1 && rs[0]->text == text,
             label + " = \"" + (rs.empty() ? std::string("<none>") : rs[0]->text) + "\"");
  }
}

// ---- 7 ---------------------------------------------------------------------

void multilabel(Check& c) {
  std::istringstream in(read_file(data_path("classify/concepts.json")));
  const auto model = classify::load_concept_model(in);
  const classify::HybridClassifier clf(model, nullptr, nullptr, nullptr);
  const auto p = clf.predict(
      "s0", corpus::lower_terms("You can update your information in your profile or delete "
                                "your data by closing your account."));
  c.expect(p.concepts() == classify::ConceptSet{"RightToRectify", "RightToRemove"},
           "unexpected label set");
}

// ---- 8 ---------------------------------------------------------------------

void template_rules(Check& c) {
  std::istringstream in(read_file(data_path("rules/rules.txt")));
  const auto rules = criteria::load_rules(in);
  c.expect(rules.size() == 2, "rule count");
  using S = criteria::RuleStatus;
  c.expect(criteria::evaluate_rule(rules[0], {"DataBreach", "DataBreach.Risk_to_natural_person"})
                   .status == S::Violated,
           "breach+risk without early notification");
  c.expect(criteria::evaluate_rule(rules[0], {"DataBreach", "DataBreach.Risk_to_natural_person",
                                              "Notification.Early"})
                   .status == S::Compliant,
           "breach+risk with early notification");
  c.expect(criteria::evaluate_rule(rules[1], {"DataBreach", "Notification.Early"}).status ==
               S::NotApplicable,
           "rule 2 without late notification");
}

// ---- 9 ---------------------------------------------------------------------

void pr_grid(Check& c) {
  int n = 0;
  for (std::size_t tp = 0; tp < 5 && n < 50; ++tp) {
    for (std::size_t fp = 0; fp < 5 && n < 50; ++fp) {
      for (std::size_t fn = 0; fn < 2 && n < 50; ++fn, ++n) {
        const auto pr = evaluation::precision_recall({tp, fp, fn});
        if (tp + fp == 0) {
          c.expect(!pr.precision, "precision should be undefined");
        } else {
          c.expect(pr.precision && *pr.precision == double(tp) / double(tp + fp), "precision");
        }
        if (tp + fn == 0) {
          c.expect(!pr.recall, "recall should be undefined");
        } else {
          c.expect(pr.recall && *pr.recall == double(tp) / double(tp + fn), "recall");
        }
      }
    }
  }
  c.expect(n == 50, "grid size " + std::to_string(n));
}

// ---- 10 --------------------------------------------------------------------

void determinism(Check& c) {
  std::ostringstream sink, err;
  const std::string bundle = "acceptance_table2.bundle.json";
  c.expect(cli::run({"ingest", "--text", data_path("table2/text.txt"), "--metadata",
                     data_path("table2/metadata.txt"), "-o", bundle},
                    sink, err) == 0,
           "ingest failed: " + err.str());
  const std::vector<std::string> args = {
      "--config", data_path("table2/config.toml"), "check", "--bundle", bundle,
      "--requirements", data_path("table2/requirements.json"),
      "--segment-frames", data_path("table2/segment_frames.json"),
      "--synonyms", data_path("table2/synonyms.txt"), "--aliases", data_path("table2/aliases.txt"),
      "--rules", data_path("rules/rules.txt"), "--concepts", data_path("rules/concepts.json")};
  std::ostringstream a, b;
  c.expect(cli::run(args, a, err) == 0, "check failed: " + err.str());
  c.expect(cli::run(args, b, err) == 0, "check failed: " + err.str());
  c.expect(!a.str().empty() && a.str() == b.str(), "reports differ");
}

}  // namespace

int main() {
  criterion("Table 2 reproduction", 1.0, table2);
  criterion("Algorithm 1 oracle equivalence", 10.0, algorithm1);
  criterion("Context-span law", 0, span_law);
  criterion("Max-aggregation", 0, max_aggregation);
  criterion("Cosine suite", 0, cosine_suite);
  criterion("Table 1 extraction", 0, table1_extraction);
  criterion("Multi-label classification", 0, multilabel);
  criterion("Template rules", 0, template_rules);
  criterion("Evaluation formulas", 0, pr_grid);
  criterion("Determinism", 0, determinism);
  std::cout << (10 - failures) << "/10 criteria passed\n";
  return failures;
}
