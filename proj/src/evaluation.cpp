#include "regcheck/evaluation.hpp"

#include <cstdio>

#include "detail/fields.hpp"
#include "regcheck/error.hpp"

namespace regcheck::evaluation {

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string fmt(const std::optional<double>& v) {
  if (!v) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

}  // namespace

Confusion confusion(const IdSet& gold, const IdSet& predicted) {
  Confusion c;
  for (const auto& id : predicted) (gold.count(id) ? c.tp : c.fp)++;
  for (const auto& id : gold) {
    if (!predicted.count(id)) ++c.fn;
  }
  return c;
}

PrecisionRecall precision_recall(const Confusion& c) {
  return {ratio(c.tp, c.tp + c.fp), ratio(c.tp, c.tp + c.fn)};
}

std::map<std::string, IdSet> load_gold(std::istream& in) {
  std::map<std::string, IdSet> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_skippable(line)) continue;
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 2) {
      throw Error(ErrorCode::InvalidInput, "expected doc_id<TAB>id", line_no);
    }
    const auto doc = std::string(detail::trim(fields[0]));
    const auto id = std::string(detail::trim(fields[1]));
    if (doc.empty() || id.empty()) {
      throw Error(ErrorCode::InvalidInput, "empty field", line_no);
    }
    out[doc].insert(id);
  }
  return out;
}

IdSet violations_from_report(const nlohmann::json& report) {
  IdSet out;
  try {
    for (const auto& r : report.at("requirements")) {
      if (r.at("status").get<std::string>() == "Violated") {
        out.insert(r.at("req_id").get<std::string>());
      }
    }
    for (const auto& r : report.value("rules", nlohmann::json::array())) {
      if (r.at("status").get<std::string>() == "Violated") {
        out.insert(r.at("rule_id").get<std::string>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("bad report: ") + e.what());
  }
  return out;
}

EvaluationTable evaluate(const std::map<std::string, IdSet>& gold,
                         const std::map<std::string, IdSet>& predicted) {
  std::set<std::string> docs;
  for (const auto& [d, _] : gold) docs.insert(d);
  for (const auto& [d, _] : predicted) docs.insert(d);
  const IdSet none;
  EvaluationTable t;
  t.total.doc_id = "TOTAL";
  for (const auto& d : docs) {
    const auto g = gold.find(d);
    const auto p = predicted.find(d);
    DocumentScore s;
    s.doc_id = d;
    s.counts = confusion(g == gold.end() ? none : g->second,
                         p == predicted.end() ? none : p->second);
    s.pr = precision_recall(s.counts);
    t.total.counts += s.counts;
    t.documents.push_back(std::move(s));
  }
  t.total.pr = precision_recall(t.total.counts);
  return t;
}

std::string to_tsv(const EvaluationTable& table) {
  std::string out = "doc_id\tTP\tFP\tFN\tP\tR\n";
  auto row = [&](const DocumentScore& s) {
    out += s.doc_id + '\t' + std::to_string(s.counts.tp) + '\t' +
           std::to_string(s.counts.fp) + '\t' + std::to_string(s.counts.fn) + '\t' +
           fmt(s.pr.precision) + '\t' + fmt(s.pr.recall) + '\n';
  };
  for (const auto& s : table.documents) row(s);
  row(table.total);
  return out;
}

}  // namespace regcheck::evaluation
