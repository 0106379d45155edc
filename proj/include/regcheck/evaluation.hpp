#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace regcheck::evaluation {

using IdSet = std::set<std::string>;

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  Confusion& operator+=(const Confusion& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const Confusion&) const = default;
};

/// Positives are violations.
Confusion confusion(const IdSet& gold, const IdSet& predicted);

/// nullopt marks a zero denominator.
struct PrecisionRecall {
  std::optional<double> precision;
  std::optional<double> recall;
};

PrecisionRecall precision_recall(const Confusion& c);

/// "<doc_id>\t<requirement_or_rule_id>" lines.
std::map<std::string, IdSet> load_gold(std::istream& in);

/// Violated requirement and rule ids of a compliance report.
IdSet violations_from_report(const nlohmann::json& report);

struct DocumentScore {
  std::string doc_id;
  Confusion counts;
  PrecisionRecall pr;
};

struct EvaluationTable {
  std::vector<DocumentScore> documents;  // sorted by doc id
  DocumentScore total;                   // micro-averaged, doc_id "TOTAL"
};

/// Documents present on either side are scored; a side missing a document
/// counts as an empty set.
EvaluationTable evaluate(const std::map<std::string, IdSet>& gold,
                         const std::map<std::string, IdSet>& predicted);

/// doc_id, TP, FP, FN, P, R with a header row; undefined ratios print as
/// "undefined".
std::string to_tsv(const EvaluationTable& table);

}  // namespace regcheck::evaluation
