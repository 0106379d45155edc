#include "regcheck/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "regcheck/annotations.hpp"
#include "regcheck/bundle.hpp"
#include "regcheck/classify.hpp"
#include "regcheck/compliance.hpp"
#include "regcheck/corpus.hpp"
#include "regcheck/criteria.hpp"
#include "regcheck/error.hpp"
#include "regcheck/evaluation.hpp"
#include "regcheck/qa.hpp"
#include "regcheck/srl.hpp"
#include "regcheck/vectorize.hpp"

namespace regcheck::cli {

namespace {

std::ifstream open_in(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, std::string("cannot open ") + what + " " + path);
  return in;
}

std::string slurp(const std::string& path, const char* what) {
  auto in = open_in(path, what);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const std::string& path, const char* what) {
  auto in = open_in(path, what);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, path + ": " + e.what());
  }
}

// Writes to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + path);
  f << text;
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

corpus::TextResources resources(const std::string& stopwords, const std::string& abbreviations) {
  auto r = corpus::TextResources::defaults();
  if (!stopwords.empty()) {
    auto in = open_in(stopwords, "stopword list");
    r.stopwords = corpus::load_word_list(in, true);
  }
  if (!abbreviations.empty()) {
    auto in = open_in(abbreviations, "abbreviation list");
    r.abbreviations = corpus::load_word_list(in, false);
  }
  return r;
}

bundle::Bundle load_bundle(const std::string& path) {
  return bundle::bundle_from_json(read_json(path, "bundle"));
}

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(ErrorCode::InvalidInput, std::string(name) + " must lie in [0, 1]");
  }
}

// ---- ingest ---------------------------------------------------------------

struct IngestArgs {
  std::string text, metadata, annotations, stopwords, abbreviations, output;
  int budget = corpus::kDefaultTokenBudget;
};

int cmd_ingest(const IngestArgs& a, std::ostream& out) {
  if (a.budget < 1) throw Error(ErrorCode::InvalidInput, "budget must be >= 1");
  const auto raw = slurp(a.text, "text file");
  auto meta_in = open_in(a.metadata, "metadata file");
  const auto meta = corpus::parse_metadata(meta_in);
  auto doc = corpus::load_document(raw, meta, resources(a.stopwords, a.abbreviations));
  std::optional<std::vector<annotations::AnnotatedSentence>> parses;
  if (!a.annotations.empty()) {
    auto in = open_in(a.annotations, "annotation file");
    parses = annotations::parse_annotations(in);
  }
  const auto b = bundle::make_bundle(std::move(doc), a.budget, std::move(parses));
  emit(a.output, dump(bundle::to_json(b)), out);
  return kExitOk;
}

// ---- qa -------------------------------------------------------------------

struct QaArgs {
  std::string bundle, question, scorer = "bm25", scores, extractor = "baseline", answers,
                                output, stopwords;
  int k = 3;
};

int cmd_qa(const QaArgs& a, std::ostream& out) {
  if (a.k < 1) throw Error(ErrorCode::InvalidInput, "k must be >= 1");
  const auto b = load_bundle(a.bundle);
  const auto q = qa::make_question(a.question, resources(a.stopwords, ""));

  std::unique_ptr<qa::SentenceScorer> scorer;
  if (a.scorer == "bm25") {
    scorer = std::make_unique<qa::Bm25Scorer>(b.document);
  } else if (a.scorer == "external") {
    if (a.scores.empty()) throw Error(ErrorCode::InvalidInput, "--scores is required");
    auto in = open_in(a.scores, "score file");
    scorer = std::make_unique<qa::ExternalScorer>(in);
  } else {
    throw Error(ErrorCode::InvalidInput, "unknown scorer " + a.scorer);
  }

  std::unique_ptr<qa::AnswerExtractor> extractor;
  if (a.extractor == "baseline") {
    extractor = std::make_unique<qa::BaselineExtractor>(*scorer);
  } else if (a.extractor == "external") {
    if (a.answers.empty()) throw Error(ErrorCode::InvalidInput, "--answers is required");
    auto in = open_in(a.answers, "answer file");
    extractor = std::make_unique<qa::ExternalExtractor>(in);
  } else {
    throw Error(ErrorCode::InvalidInput, "unknown extractor " + a.extractor);
  }

  const auto res = qa::answer_question(q, b.spans, b.document, a.k, *scorer, *extractor);
  out << "question " << q.hash << ": " << q.text << "\n";
  if (res.zero_relevance) out << "note: every retrieved span scored 0\n";
  for (std::size_t i = 0; i < res.ranked.size(); ++i) {
    const auto& r = res.ranked[i];
    out << (i + 1) << ". " << r.span_id << "  relevance " << std::fixed
        << std::setprecision(4) << r.relevance << "  best sentence " << r.best_sentence_id
        << "\n   answer: " << res.answers[i].text << "\n";
  }
  out.unsetf(std::ios::floatfield);
  if (!a.output.empty()) emit(a.output, dump(qa::to_json(res)), out);
  return kExitOk;
}

// ---- classification shared by classify and check -------------------------

struct ClassifyOptions {
  std::string concepts, predictions, training;
  double centroid_threshold = 0.5;
  std::size_t min_train = 5;
};

struct Classification {
  classify::ConceptModel model;
  std::vector<classify::SegmentPrediction> predictions;
};

Classification run_classifier(const ClassifyOptions& o, const bundle::Bundle& b,
                              const corpus::WordSet& stopwords) {
  check_unit(o.centroid_threshold, "centroid threshold");
  Classification c;
  {
    auto in = open_in(o.concepts, "concept model");
    c.model = classify::load_concept_model(in);
  }
  std::optional<classify::PredictionSet> external;
  if (!o.predictions.empty()) {
    auto in = open_in(o.predictions, "prediction file");
    external = classify::load_external_predictions(in, &c.model);
  }
  std::optional<vectorize::TermIndex> index;
  std::optional<classify::CentroidModel> centroids;
  if (!o.training.empty()) {
    const auto j = read_json(o.training, "training file");
    std::vector<classify::LabeledSegment> train;
    std::vector<std::vector<std::string>> docs;
    try {
      for (const auto& row : j) {
        classify::LabeledSegment s;
        s.terms = corpus::lower_terms(row.at("text").get<std::string>());
        for (const auto& id : row.at("concepts")) {
          const auto cid = id.get<std::string>();
          if (!c.model.contains(cid)) throw Error(ErrorCode::UnknownConcept, cid);
          s.concepts.insert(cid);
        }
        docs.push_back(s.terms);
        train.push_back(std::move(s));
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidInput, o.training + ": " + e.what());
    }
    index = vectorize::build_index(docs, stopwords);
    centroids = classify::centroid_train(train, *index, o.centroid_threshold);
  }
  classify::HybridClassifier clf(c.model, centroids ? &*centroids : nullptr,
                                 index ? &*index : nullptr, external ? &*external : nullptr,
                                 {o.min_train});
  std::vector<classify::Segment> segs;
  for (const auto& s : b.document.sentences) {
    segs.push_back({bundle::Bundle::segment_id(s.sent_id), b.sentence_surface_terms(s.sent_id)});
  }
  c.predictions = classify::classify_segments(clf, segs);
  return c;
}

struct ClassifyArgs {
  std::string bundle, stopwords, output;
  ClassifyOptions opts;
};

int cmd_classify(const ClassifyArgs& a, std::ostream& out, std::ostream& err) {
  const auto b = load_bundle(a.bundle);
  const auto c = run_classifier(a.opts, b, resources(a.stopwords, "").stopwords);
  std::set<std::string> diags;
  for (const auto& p : c.predictions) diags.insert(p.diagnostics.begin(), p.diagnostics.end());
  for (const auto& d : diags) err << "warning: " << d << "\n";
  emit(a.output, classify::write_predictions(c.predictions), out);
  return kExitOk;
}

// ---- check ----------------------------------------------------------------

struct CheckArgs {
  std::string bundle, requirements, rules, synonyms, aliases, markers, stopwords, embeddings,
      segment_frames, generated_at, output;
  ClassifyOptions classify;
  compliance::Thresholds thresholds;
  bool no_gate = false, per_segment_rules = false, fail_on_violation = false;
};

int cmd_check(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  check_unit(a.thresholds.theta, "theta");
  check_unit(a.thresholds.tau_text, "tau-text");
  check_unit(a.thresholds.tau_sat, "tau-sat");
  const auto b = load_bundle(a.bundle);

  compliance::ComplianceInputs in;
  in.doc_id = b.document.doc_id;
  in.stopwords = resources(a.stopwords, "").stopwords;
  if (!a.requirements.empty()) {
    auto f = open_in(a.requirements, "requirements file");
    in.requirements = criteria::load_requirements(f);
  }
  if (!a.synonyms.empty()) {
    auto f = open_in(a.synonyms, "synonym file");
    compliance::load_synonyms(f, in.lexicon);
  }
  if (!a.aliases.empty()) {
    auto f = open_in(a.aliases, "alias file");
    compliance::load_aliases(f, in.lexicon);
  }
  srl::MarkerLexicon markers = srl::MarkerLexicon::defaults();
  if (!a.markers.empty()) {
    auto f = open_in(a.markers, "marker file");
    markers = srl::load_marker_lexicon(f);
  }

  std::map<std::string, srl::SemanticFrame> gold_frames;
  if (!a.segment_frames.empty()) {
    const auto j = read_json(a.segment_frames, "segment frame file");
    if (!j.is_object()) {
      throw Error(ErrorCode::InvalidInput, a.segment_frames + ": expected an object");
    }
    for (const auto& [sid, roles] : j.items()) gold_frames[sid] = srl::frame_from_json(roles);
  }

  std::set<std::string> known_segments;
  for (const auto& s : b.document.sentences) {
    compliance::DocumentSegment seg;
    seg.id = bundle::Bundle::segment_id(s.sent_id);
    seg.text = s.text;
    seg.terms = b.sentence_terms(s.sent_id);
    if (auto it = gold_frames.find(seg.id); it != gold_frames.end()) {
      seg.frame = it->second;
    } else if (b.annotations) {
      seg.frame = srl::extract_frame(b.annotations->at(static_cast<std::size_t>(s.sent_id)),
                                     markers);
    } else {
      seg.frame.diagnostics.push_back("no annotation; empty frame");
    }
    seg.frame.sentence_id = s.sent_id;
    known_segments.insert(seg.id);
    in.segments.push_back(std::move(seg));
  }
  for (const auto& [sid, _] : gold_frames) {
    if (!known_segments.count(sid)) {
      throw Error(ErrorCode::CrossReferenceError, "segment frame for unknown segment " + sid);
    }
  }

  std::optional<vectorize::EmbeddingTable> table;
  if (!a.embeddings.empty()) {
    auto f = open_in(a.embeddings, "embedding file");
    table = vectorize::load_embeddings(f);
    in.vectorizer = std::make_shared<compliance::EmbeddingVectorizer>(*table);
  }

  std::optional<classify::ConceptModel> model;
  if (!a.classify.concepts.empty()) {
    auto c = run_classifier(a.classify, b, in.stopwords);
    for (const auto& p : c.predictions) {
      auto labels = c.model.with_ancestors(p.concepts());
      if (!labels.empty()) in.segment_facts[p.segment_id] = std::move(labels);
    }
    model = std::move(c.model);
  }
  if (!a.rules.empty()) {
    auto f = open_in(a.rules, "rule file");
    const auto ids = model ? model->ids() : std::set<std::string>{};
    in.rules = criteria::load_rules(f, model ? &ids : nullptr);
  }

  compliance::ComplianceConfig cfg;
  cfg.thresholds = a.thresholds;
  cfg.gate = !a.no_gate;
  cfg.per_segment_rules = a.per_segment_rules;
  if (!a.generated_at.empty()) cfg.generated_at = a.generated_at;
  cfg.extra_config = {{"relevance", table ? "embedding" : "tfidf"},
                      {"centroid_threshold", a.classify.centroid_threshold}};

  const auto report = compliance::check_compliance(in, cfg);
  emit(a.output, dump(compliance::to_json(report)), out);
  err << report.violated_requirements() << " of " << report.requirements.size()
      << " requirements violated, " << report.violated_rules() << " of "
      << report.rules.size() << " rules violated\n";
  if (a.fail_on_violation && report.violations() > 0) return kExitViolations;
  return kExitOk;
}

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
  std::string gold, output;
  std::vector<std::string> reports;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  auto g = open_in(a.gold, "gold file");
  const auto gold = evaluation::load_gold(g);
  std::map<std::string, evaluation::IdSet> predicted;
  for (const auto& path : a.reports) {
    const auto j = read_json(path, "report");
    const auto doc = j.value("doc_id", std::string());
    if (doc.empty()) throw Error(ErrorCode::InvalidInput, path + ": report without doc_id");
    const auto ids = evaluation::violations_from_report(j);
    predicted[doc].insert(ids.begin(), ids.end());
  }
  emit(a.output, evaluation::to_tsv(evaluation::evaluate(gold, predicted)), out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Regulatory compliance text analysis", "regcheck"};
  app.set_config("--config", "", "TOML/INI file with option values; [subcommand] sections");
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Segment a text into a document bundle");
  c_ingest->add_option("--text", ingest.text, "Raw text file")->required();
  c_ingest->add_option("--metadata", ingest.metadata, "Metadata file (doc_id, title)")->required();
  c_ingest->add_option("--annotations", ingest.annotations, "CoNLL-U parses, one per sentence");
  c_ingest->add_option("--budget", ingest.budget, "Context span token budget");
  c_ingest->add_option("--stopwords", ingest.stopwords, "Stopword list");
  c_ingest->add_option("--abbreviations", ingest.abbreviations, "Abbreviation list");
  c_ingest->add_option("-o,--output", ingest.output, "Bundle path (stdout if omitted)");

  QaArgs qa_args;
  auto* c_qa = app.add_subcommand("qa", "Rank context spans and extract answers");
  c_qa->add_option("--bundle", qa_args.bundle, "Document bundle")->required();
  c_qa->add_option("-q,--question", qa_args.question, "Question text")->required();
  c_qa->add_option("-k,--k", qa_args.k, "Number of spans to return");
  c_qa->add_option("--scorer", qa_args.scorer, "bm25 or external");
  c_qa->add_option("--scores", qa_args.scores, "External sentence scores");
  c_qa->add_option("--extractor", qa_args.extractor, "baseline or external");
  c_qa->add_option("--answers", qa_args.answers, "External answers");
  c_qa->add_option("--stopwords", qa_args.stopwords, "Stopword list");
  c_qa->add_option("-o,--output", qa_args.output, "JSON result path");

  ClassifyArgs cls;
  auto* c_cls = app.add_subcommand("classify", "Predict concept labels per segment");
  c_cls->add_option("--bundle", cls.bundle, "Document bundle")->required();
  c_cls->add_option("--concepts", cls.opts.concepts, "Concept model")->required();
  c_cls->add_option("--predictions", cls.opts.predictions, "External predictions");
  c_cls->add_option("--training", cls.opts.training, "Labeled segments for centroids");
  c_cls->add_option("--centroid-threshold", cls.opts.centroid_threshold, "Cosine threshold");
  c_cls->add_option("--min-train", cls.opts.min_train, "Segments needed to use a centroid");
  c_cls->add_option("--stopwords", cls.stopwords, "Stopword list");
  c_cls->add_option("-o,--output", cls.output, "Prediction TSV path");

  CheckArgs chk;
  auto* c_chk = app.add_subcommand("check", "Check a document against requirements and rules");
  c_chk->add_option("--bundle", chk.bundle, "Document bundle")->required();
  c_chk->add_option("--requirements", chk.requirements, "Requirements JSON");
  c_chk->add_option("--rules", chk.rules, "Template rules");
  c_chk->add_option("--concepts", chk.classify.concepts, "Concept model");
  c_chk->add_option("--predictions", chk.classify.predictions, "External predictions");
  c_chk->add_option("--training", chk.classify.training, "Labeled segments for centroids");
  c_chk->add_option("--centroid-threshold", chk.classify.centroid_threshold, "Cosine threshold");
  c_chk->add_option("--min-train", chk.classify.min_train, "Segments needed to use a centroid");
  c_chk->add_option("--synonyms", chk.synonyms, "Synonym lexicon");
  c_chk->add_option("--aliases", chk.aliases, "Alias file");
  c_chk->add_option("--markers", chk.markers, "Marker lexicon");
  c_chk->add_option("--stopwords", chk.stopwords, "Stopword list");
  c_chk->add_option("--embeddings", chk.embeddings, "Dense vectors keyed by segment/requirement id");
  c_chk->add_option("--segment-frames", chk.segment_frames, "Gold frames keyed by segment id");
  c_chk->add_option("--theta", chk.thresholds.theta, "Relevance threshold");
  c_chk->add_option("--tau-text", chk.thresholds.tau_text, "Role text match threshold");
  c_chk->add_option("--tau-sat", chk.thresholds.tau_sat, "Satisfaction threshold");
  c_chk->add_flag("--no-gate", chk.no_gate, "Score every segment, not only relevant ones");
  c_chk->add_flag("--per-segment-rules", chk.per_segment_rules, "Evaluate rules per segment");
  c_chk->add_flag("--fail-on-violation", chk.fail_on_violation, "Exit 2 when anything is violated");
  c_chk->add_option("--generated-at", chk.generated_at, "Timestamp recorded in the report");
  c_chk->add_option("-o,--output", chk.output, "Report path (stdout if omitted)");

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Precision and recall of reported violations");
  c_eval->add_option("--gold", ev.gold, "Gold violations TSV")->required();
  c_eval->add_option("--report", ev.reports, "Compliance report(s)")->required();
  c_eval->add_option("-o,--output", ev.output, "TSV path (stdout if omitted)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitError;
  }

  try {
    if (c_ingest->parsed()) return cmd_ingest(ingest, out);
    if (c_qa->parsed()) return cmd_qa(qa_args, out);
    if (c_cls->parsed()) return cmd_classify(cls, out, err);
    if (c_chk->parsed()) return cmd_check(chk, out, err);
    if (c_eval->parsed()) return cmd_eval(ev, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace regcheck::cli
