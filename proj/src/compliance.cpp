#include "regcheck/compliance.hpp"

#include <algorithm>
#include <cctype>
#include <exception>
#include <sstream>

#include "detail/fields.hpp"
#include "regcheck/error.hpp"

namespace regcheck::compliance {

namespace {

bool is_zero(const vectorize::FeatureVector& v) {
  if (const auto* s = std::get_if<vectorize::SparseVector>(&v)) return s->empty();
  const auto& d = std::get<vectorize::DenseVector>(v);
  return std::all_of(d.begin(), d.end(), [](double x) { return x == 0.0; });
}

void check_theta(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw Error(ErrorCode::InvalidInput, "relevance threshold must lie in [0, 1]");
  }
}

struct Vectors {
  std::vector<std::optional<vectorize::FeatureVector>> segments;
  std::vector<std::optional<vectorize::FeatureVector>> requirements;
  std::vector<std::string> diagnostics;
};

Vectors vectorize_all(const std::vector<TextItem>& segments,
                      const std::vector<TextItem>& requirements,
                      const Vectorizer& vectorizer) {
  Vectors out;
  auto run = [&](const std::vector<TextItem>& items, const char* kind,
                 std::vector<std::optional<vectorize::FeatureVector>>& dst) {
    for (const auto& item : items) {
      auto v = vectorizer.vectorize(item);
      if (is_zero(v)) {
        out.diagnostics.push_back(std::string("ZeroVector: ") + kind + " " + item.id +
                                  " has no indexable content; skipped");
        dst.emplace_back();
      } else {
        dst.emplace_back(std::move(v));
      }
    }
  };
  run(segments, "segment", out.segments);
  run(requirements, "requirement", out.requirements);
  return out;
}

std::vector<std::string> lower_words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(corpus::fold_case(w));
  return out;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  for (const auto& part : detail::split(s, ',')) {
    const auto t = detail::trim(part);
    if (!t.empty()) out.push_back(corpus::fold_case(t));
  }
  return out;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::size_t shared = 0;
  for (const auto& x : a) shared += b.count(x);
  const std::size_t uni = a.size() + b.size() - shared;
  return uni == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(uni);
}

template <typename T, typename Key>
void sort_by_id(std::vector<T>& v, Key key) {
  std::stable_sort(v.begin(), v.end(), [&](const T& a, const T& b) {
    return natural_less(key(a), key(b));
  });
}

}  // namespace

TfidfVectorizer TfidfVectorizer::over(const std::vector<TextItem>& segments,
                                      const std::vector<TextItem>& requirements,
                                      const corpus::WordSet& stopwords) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(segments.size() + requirements.size());
  for (const auto& s : segments) docs.push_back(s.terms);
  for (const auto& r : requirements) docs.push_back(r.terms);
  return TfidfVectorizer(vectorize::build_index(docs, stopwords));
}

vectorize::FeatureVector TfidfVectorizer::vectorize(const TextItem& item) const {
  return vectorize::tfidf_vector(item.terms, index_);
}

vectorize::FeatureVector EmbeddingVectorizer::vectorize(const TextItem& item) const {
  const auto* v = table_.find(item.id);
  if (!v) {
    throw Error(ErrorCode::CrossReferenceError, "no embedding for " + item.id);
  }
  return *v;
}

RelevanceResult detect_relevance_serial(const std::vector<TextItem>& segments,
                                        const std::vector<TextItem>& requirements,
                                        double theta, const Vectorizer& vectorizer) {
  check_theta(theta);
  auto vecs = vectorize_all(segments, requirements, vectorizer);
  RelevanceResult out;
  out.diagnostics = std::move(vecs.diagnostics);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (!vecs.segments[i]) continue;
    for (std::size_t j = 0; j < requirements.size(); ++j) {
      if (!vecs.requirements[j]) continue;
      const double sim = vectorize::cosine(*vecs.segments[i], *vecs.requirements[j]);
      if (sim >= theta) {
        out.pairs.push_back({requirements[j].id, segments[i].id, sim, i, j});
      }
    }
  }
  return out;
}

RelevanceResult detect_relevance(const std::vector<TextItem>& segments,
                                 const std::vector<TextItem>& requirements,
                                 double theta, const Vectorizer& vectorizer) {
  check_theta(theta);
  auto vecs = vectorize_all(segments, requirements, vectorizer);
  // Each segment row is filled independently; rows are concatenated in
  // segment order so the result matches the serial loop exactly.
  std::vector<std::vector<RelevantPair>> rows(segments.size());
  std::exception_ptr failure;
  const auto n = static_cast<long>(segments.size());
#pragma omp parallel for schedule(dynamic)
  for (long ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    if (!vecs.segments[i]) continue;
    try {
      for (std::size_t j = 0; j < requirements.size(); ++j) {
        if (!vecs.requirements[j]) continue;
        const double sim = vectorize::cosine(*vecs.segments[i], *vecs.requirements[j]);
        if (sim >= theta) {
          rows[i].push_back({requirements[j].id, segments[i].id, sim, i, j});
        }
      }
    } catch (...) {
#pragma omp critical(regcheck_relevance)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  RelevanceResult out;
  out.diagnostics = std::move(vecs.diagnostics);
  for (auto& row : rows) {
    out.pairs.insert(out.pairs.end(), row.begin(), row.end());
  }
  return out;
}

Alignment align_roles(const srl::SemanticFrame& requirement,
                      const srl::SemanticFrame& segment) {
  if (requirement.roles.empty()) {
    throw Error(ErrorCode::InvalidRequirement, "requirement frame has no roles");
  }
  Alignment a;
  const auto r = requirement.labels();
  const auto t = segment.labels();
  for (const auto& l : r) (t.count(l) ? a.shared : a.missing).insert(l);
  for (const auto& l : t) {
    if (!r.count(l)) a.not_required.insert(l);
  }
  return a;
}

void SynonymLexicon::add_synonyms(const std::vector<std::string>& group) {
  if (group.empty()) return;
  std::set<std::size_t> hit;
  for (const auto& w : group) {
    auto it = class_of_.find(w);
    if (it != class_of_.end()) hit.insert(it->second);
  }
  std::size_t target;
  if (hit.empty()) {
    target = classes_.size();
    classes_.emplace_back();
  } else {
    target = *hit.begin();
    for (auto it = std::next(hit.begin()); it != hit.end(); ++it) {
      classes_[target].insert(classes_[*it].begin(), classes_[*it].end());
      classes_[*it].clear();
    }
  }
  classes_[target].insert(group.begin(), group.end());
  for (const auto& w : classes_[target]) class_of_[w] = target;
}

void SynonymLexicon::add_alias(const std::vector<std::string>& surface,
                               const std::vector<std::string>& canonical) {
  if (surface.empty()) {
    throw Error(ErrorCode::InvalidInput, "alias with an empty surface form");
  }
  aliases_.emplace_back(surface, canonical);
  // Longest surface first so rewriting prefers the most specific alias.
  std::stable_sort(aliases_.begin(), aliases_.end(), [](const auto& a, const auto& b) {
    return a.first.size() > b.first.size();
  });
}

const std::string& SynonymLexicon::canonical(const std::string& lemma) const {
  const auto it = class_of_.find(lemma);
  if (it == class_of_.end()) return lemma;
  return *classes_[it->second].begin();
}

std::set<std::string> SynonymLexicon::synonyms(const std::string& lemma) const {
  const auto it = class_of_.find(lemma);
  if (it == class_of_.end()) return {lemma};
  return classes_[it->second];
}

std::vector<std::string> SynonymLexicon::rewrite_aliases(
    const std::vector<std::string>& terms) const {
  if (aliases_.empty()) return terms;
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < terms.size()) {
    bool replaced = false;
    for (const auto& [surface, canonical] : aliases_) {
      if (i + surface.size() > terms.size()) continue;
      if (std::equal(surface.begin(), surface.end(), terms.begin() + static_cast<long>(i))) {
        out.insert(out.end(), canonical.begin(), canonical.end());
        i += surface.size();
        replaced = true;
        break;
      }
    }
    if (!replaced) out.push_back(terms[i++]);
  }
  return out;
}

std::vector<std::string> SynonymLexicon::canonicalize(
    const std::vector<std::string>& terms) const {
  std::vector<std::string> out;
  out.reserve(terms.size());
  for (const auto& t : rewrite_aliases(terms)) out.push_back(canonical(t));
  return out;
}

void load_synonyms(std::istream& in, SynonymLexicon& lexicon) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_skippable(line)) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::InvalidInput, "expected 'lemma: synonym, ...'", line_no);
    }
    const auto head = corpus::fold_case(detail::trim(std::string_view(line).substr(0, colon)));
    if (head.empty()) {
      throw Error(ErrorCode::InvalidInput, "empty lemma", line_no);
    }
    auto group = split_list(std::string_view(line).substr(colon + 1));
    group.push_back(head);
    lexicon.add_synonyms(group);
  }
}

void load_aliases(std::istream& in, SynonymLexicon& lexicon) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_skippable(line)) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidInput, "expected 'surface = canonical'", line_no);
    }
    auto surface = lower_words(std::string_view(line).substr(0, eq));
    auto canonical = lower_words(std::string_view(line).substr(eq + 1));
    if (surface.empty() || canonical.empty()) {
      throw Error(ErrorCode::InvalidInput, "empty alias side", line_no);
    }
    lexicon.add_alias(surface, canonical);
  }
}

std::set<std::string> normalized_lemmas(const std::vector<std::string>& lemmas,
                                        const SynonymLexicon& lexicon,
                                        const corpus::WordSet& stopwords) {
  std::vector<std::string> lowered;
  lowered.reserve(lemmas.size());
  for (const auto& l : lemmas) lowered.push_back(corpus::fold_case(l));
  std::set<std::string> out;
  for (const auto& t : lexicon.rewrite_aliases(lowered)) {
    if (stopwords.count(t) || !std::any_of(t.begin(), t.end(), [](char c) {
          return corpus::is_word_byte(static_cast<unsigned char>(c));
        })) {
      continue;
    }
    out.insert(lexicon.canonical(t));
  }
  return out;
}

TextMatch match_role_text(const srl::SemanticRole& requirement_role,
                          const srl::SemanticRole& segment_role,
                          const SynonymLexicon& lexicon, double tau_text,
                          const corpus::WordSet& stopwords) {
  if (requirement_role.label != segment_role.label) {
    throw Error(ErrorCode::InvalidInput, "cannot match " + requirement_role.label +
                                             " against " + segment_role.label);
  }
  const auto a = normalized_lemmas(requirement_role.lemmas, lexicon, stopwords);
  const auto b = normalized_lemmas(segment_role.lemmas, lexicon, stopwords);
  TextMatch m;
  if (a.empty() || b.empty()) {
    m.diagnostic = requirement_role.label + " has no content words after normalization";
    return m;
  }
  m.similarity = jaccard(a, b);
  m.matched = m.similarity >= tau_text;
  return m;
}

SatisfactionResult score_segment(const criteria::LegalRequirement& requirement,
                                 const srl::SemanticFrame& segment_frame,
                                 std::string segment_id,
                                 const SynonymLexicon& lexicon, double tau_text,
                                 double tau_sat, const corpus::WordSet& stopwords) {
  SatisfactionResult res;
  res.req_id = requirement.req_id;
  res.segment_id = std::move(segment_id);
  res.alignment = align_roles(requirement.frame, segment_frame);
  for (const auto& label : res.alignment.shared) {
    // Every requirement role under the label needs some matching segment
    // role; the label's similarity is the weakest of those best matches.
    RoleMatch rm{label, 1.0, true};
    for (const auto* r : requirement.frame.roles_with(label)) {
      double best = 0.0;
      bool any = false;
      for (const auto* t : segment_frame.roles_with(label)) {
        const auto m = match_role_text(*r, *t, lexicon, tau_text, stopwords);
        best = std::max(best, m.similarity);
        any = any || m.matched;
      }
      rm.similarity = std::min(rm.similarity, best);
      rm.matched = rm.matched && any;
    }
    if (rm.matched) res.matched_roles.insert(label);
    res.role_matches.push_back(rm);
  }
  const auto total = requirement.frame.labels().size();
  res.score = static_cast<double>(res.matched_roles.size()) / static_cast<double>(total);
  res.satisfied = res.score >= tau_sat;
  return res;
}

const char* to_string(RequirementStatus s) {
  return s == RequirementStatus::Satisfied ? "Satisfied" : "Violated";
}

std::size_t ComplianceReport::violated_requirements() const {
  return static_cast<std::size_t>(
      std::count_if(requirements.begin(), requirements.end(), [](const auto& r) {
        return r.status == RequirementStatus::Violated;
      }));
}

std::size_t ComplianceReport::violated_rules() const {
  return static_cast<std::size_t>(std::count_if(rules.begin(), rules.end(), [](const auto& r) {
    return r.status == criteria::RuleStatus::Violated;
  }));
}

bool natural_less(std::string_view a, std::string_view b) {
  auto digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (digit(a[i]) && digit(b[j])) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && digit(a[ie])) ++ie;
      while (je < b.size() && digit(b[je])) ++je;
      auto na = a.substr(i, ie - i), nb = b.substr(j, je - j);
      while (na.size() > 1 && na.front() == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb.front() == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
  return a < b;
}

ComplianceReport check_compliance(const ComplianceInputs& inputs,
                                  const ComplianceConfig& config) {
  const auto& th = config.thresholds;
  for (double t : {th.tau_text, th.tau_sat}) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw Error(ErrorCode::InvalidInput, "thresholds must lie in [0, 1]");
    }
  }

  std::map<std::string, std::size_t> segment_index;
  for (std::size_t i = 0; i < inputs.segments.size(); ++i) {
    if (!segment_index.emplace(inputs.segments[i].id, i).second) {
      throw Error(ErrorCode::CrossReferenceError,
                  "duplicate segment id " + inputs.segments[i].id);
    }
  }
  for (const auto& [sid, facts] : inputs.segment_facts) {
    if (!segment_index.count(sid)) {
      throw Error(ErrorCode::CrossReferenceError, "predictions for unknown segment " + sid);
    }
  }

  ComplianceReport report;
  report.doc_id = inputs.doc_id;
  report.generated_at = config.generated_at;
  report.config = {{"theta", th.theta},
                   {"tau_text", th.tau_text},
                   {"tau_sat", th.tau_sat},
                   {"gate", config.gate},
                   {"rule_scope", config.per_segment_rules ? "segment" : "document"}};
  for (const auto& [k, v] : config.extra_config.items()) report.config[k] = v;

  for (const auto& seg : inputs.segments) {
    for (const auto& d : seg.frame.diagnostics) {
      report.diagnostics.push_back("segment " + seg.id + ": " + d);
    }
  }

  // Relevance.
  std::vector<TextItem> seg_items, req_items;
  for (const auto& s : inputs.segments) seg_items.push_back({s.id, s.terms});
  for (const auto& r : inputs.requirements) {
    std::vector<std::string> terms = corpus::lower_terms(r.text);
    if (terms.empty()) {
      for (const auto& role : r.frame.roles) {
        terms.insert(terms.end(), role.lemmas.begin(), role.lemmas.end());
      }
    }
    req_items.push_back({r.req_id, std::move(terms)});
  }

  std::vector<std::vector<RelevantPair>> relevant(inputs.requirements.size());
  if (!inputs.segments.empty() && !inputs.requirements.empty()) {
    std::shared_ptr<const Vectorizer> vec = inputs.vectorizer;
    if (!vec) {
      try {
        vec = std::make_shared<TfidfVectorizer>(
            TfidfVectorizer::over(seg_items, req_items, inputs.stopwords));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InvalidInput) throw;
        report.diagnostics.push_back("no indexable terms in segments or requirements");
      }
    }
    if (vec) {
      auto rel = detect_relevance(seg_items, req_items, th.theta, *vec);
      report.diagnostics.insert(report.diagnostics.end(), rel.diagnostics.begin(),
                                rel.diagnostics.end());
      for (auto& p : rel.pairs) relevant[p.requirement_index].push_back(std::move(p));
    }
  }

  // Phrasal scoring of (requirement, segment) jobs.
  struct Job {
    std::size_t req;
    std::size_t seg;
  };
  std::vector<Job> jobs;
  for (std::size_t r = 0; r < inputs.requirements.size(); ++r) {
    if (config.gate) {
      for (const auto& p : relevant[r]) jobs.push_back({r, p.segment_index});
    } else {
      for (std::size_t s = 0; s < inputs.segments.size(); ++s) jobs.push_back({r, s});
    }
  }
  std::vector<SatisfactionResult> results(jobs.size());
  std::exception_ptr failure;
  const auto n = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < n; ++k) {
    const auto& job = jobs[static_cast<std::size_t>(k)];
    try {
      const auto& seg = inputs.segments[job.seg];
      results[static_cast<std::size_t>(k)] =
          score_segment(inputs.requirements[job.req], seg.frame, seg.id, inputs.lexicon,
                        th.tau_text, th.tau_sat, inputs.stopwords);
    } catch (...) {
#pragma omp critical(regcheck_scoring)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  // Best result per requirement: highest score, earliest segment on ties.
  std::vector<std::optional<std::size_t>> best(inputs.requirements.size());
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    auto& b = best[jobs[k].req];
    if (!b || results[k].score > results[*b].score ||
        (results[k].score == results[*b].score && jobs[k].seg < jobs[*b].seg)) {
      b = k;
    }
  }

  for (std::size_t r = 0; r < inputs.requirements.size(); ++r) {
    const auto& req = inputs.requirements[r];
    RequirementVerdict v;
    v.req_id = req.req_id;
    v.source_ref = req.source_ref;
    v.relevant = relevant[r];
    if (best[r]) {
      const auto& res = results[*best[r]];
      v.best = res;
      v.status = res.satisfied ? RequirementStatus::Satisfied : RequirementStatus::Violated;
      v.evidence = inputs.segments[jobs[*best[r]].seg].text;
    } else {
      v.status = RequirementStatus::Violated;
      v.evidence = "no relevant segment";
    }
    report.requirements.push_back(std::move(v));
  }
  sort_by_id(report.requirements, [](const RequirementVerdict& v) -> std::string_view {
    return v.req_id;
  });

  // Template rules over predicted concepts.
  if (config.per_segment_rules) {
    std::vector<criteria::FactSet> facts;
    for (const auto& seg : inputs.segments) {
      const auto it = inputs.segment_facts.find(seg.id);
      facts.push_back(it == inputs.segment_facts.end() ? criteria::FactSet{} : it->second);
    }
    for (const auto& rule : inputs.rules) {
      report.rules.push_back(criteria::evaluate_rule_per_segment(rule, facts));
    }
  } else {
    criteria::FactSet facts;
    for (const auto& [sid, f] : inputs.segment_facts) facts.insert(f.begin(), f.end());
    for (const auto& rule : inputs.rules) {
      report.rules.push_back(criteria::evaluate_rule(rule, facts));
    }
  }
  sort_by_id(report.rules, [](const criteria::RuleVerdict& v) -> std::string_view {
    return v.rule_id;
  });
  return report;
}

namespace {

nlohmann::ordered_json labels_json(const srl::LabelSet& s) {
  return nlohmann::ordered_json(std::vector<std::string>(s.begin(), s.end()));
}

}  // namespace

nlohmann::ordered_json to_json(const ComplianceReport& report) {
  using nlohmann::ordered_json;
  ordered_json reqs = ordered_json::array();
  for (const auto& v : report.requirements) {
    ordered_json rel = ordered_json::array();
    for (const auto& p : v.relevant) {
      rel.push_back({{"segment_id", p.segment_id}, {"similarity", p.similarity}});
    }
    ordered_json j = {{"req_id", v.req_id},
                      {"source", v.source_ref},
                      {"status", to_string(v.status)},
                      {"relevant_segments", rel}};
    if (v.best) {
      const auto& b = *v.best;
      ordered_json roles = ordered_json::array();
      for (const auto& m : b.role_matches) {
        roles.push_back(
            {{"label", m.label}, {"similarity", m.similarity}, {"matched", m.matched}});
      }
      j["best"] = {{"segment_id", b.segment_id},
                   {"score", b.score},
                   {"satisfied", b.satisfied},
                   {"matched_roles", labels_json(b.matched_roles)},
                   {"missing_roles", labels_json(b.alignment.missing)},
                   {"not_required_roles", labels_json(b.alignment.not_required)},
                   {"role_matches", roles}};
    } else {
      j["best"] = nullptr;
    }
    j["evidence"] = v.evidence;
    reqs.push_back(std::move(j));
  }
  ordered_json rules = ordered_json::array();
  for (const auto& r : report.rules) rules.push_back(criteria::to_json(r));

  ordered_json out;
  out["doc_id"] = report.doc_id;
  out["generated_at"] = report.generated_at ? ordered_json(*report.generated_at)
                                            : ordered_json(nullptr);
  out["config"] = report.config;
  out["summary"] = {{"requirements", report.requirements.size()},
                    {"violated_requirements", report.violated_requirements()},
                    {"rules", report.rules.size()},
                    {"violated_rules", report.violated_rules()}};
  out["requirements"] = std::move(reqs);
  out["rules"] = std::move(rules);
  out["diagnostics"] = report.diagnostics;
  return out;
}

}  // namespace regcheck::compliance
