#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "regcheck/text.hpp"

namespace regcheck::vectorize {

using TermId = std::uint32_t;

/// Term id -> weight, sorted by id, zero weights never stored.
class SparseVector {
 public:
  using Entry = std::pair<TermId, double>;

  SparseVector() = default;
  explicit SparseVector(const std::map<TermId, double>& weights);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  double get(TermId id) const;
  double norm() const;

  bool operator==(const SparseVector&) const = default;

 private:
  std::vector<Entry> entries_;
};

using DenseVector = std::vector<double>;
using FeatureVector = std::variant<SparseVector, DenseVector>;

/// Corpus statistics over segments of lowercased, stopword-free terms.
struct TermIndex {
  std::unordered_map<std::string, TermId> vocabulary;
  std::vector<std::string> terms;       // by id
  std::vector<std::size_t> doc_freq;    // by id
  std::size_t doc_count = 0;
  double avg_doc_len = 0.0;
  std::vector<std::unordered_map<TermId, std::size_t>> term_freqs;  // by segment
  std::vector<std::size_t> doc_len;                                 // by segment
  corpus::WordSet stopwords;

  std::optional<TermId> id(std::string_view term) const;
  std::size_t df(std::string_view term) const;
};

/// Lowercases, drops stopwords and tokens without any word character.
std::vector<std::string> index_terms(const std::vector<std::string>& tokens,
                                     const corpus::WordSet& stopwords);

/// Throws InvalidInput for an empty corpus or one with no indexable term.
TermIndex build_index(
    const std::vector<std::vector<std::string>>& segments,
    const corpus::WordSet& stopwords = corpus::default_stopwords());

/// ln((N+1)/(df+1)) + 1
double smoothed_idf(const TermIndex& idx, TermId id);

/// weight(t) = tf(t) * smoothed_idf(t); terms outside the vocabulary are
/// ignored.
SparseVector tfidf_vector(const std::vector<std::string>& tokens,
                          const TermIndex& idx);

/// v.w / (|v||w|). Throws ZeroVector if either norm is zero and
/// DimensionMismatch for dense vectors of different length or mixed kinds.
double cosine(const SparseVector& v, const SparseVector& w);
double cosine(std::span<const double> v, std::span<const double> w);
inline double cosine(const DenseVector& v, const DenseVector& w) {
  return cosine(std::span<const double>(v), std::span<const double>(w));
}
double cosine(const FeatureVector& v, const FeatureVector& w);

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

/// ln(1 + (N - df + 0.5) / (df + 0.5))
double bm25_idf(const TermIndex& idx, TermId id);

/// Sum over query term occurrences of
/// idf(t) * tf (k1 + 1) / (tf + k1 (1 - b + b len / avglen)).
/// Throws IndexError for an unknown segment, InvalidInput for bad params.
double bm25_score(const std::vector<std::string>& query, std::size_t segment,
                  const TermIndex& idx, const Bm25Params& params = {});

/// Scores for every segment. The serial variant is the reference the
/// OpenMP variant is tested against.
std::vector<double> bm25_scores(const std::vector<std::string>& query,
                                const TermIndex& idx,
                                const Bm25Params& params = {});
std::vector<double> bm25_scores_serial(const std::vector<std::string>& query,
                                       const TermIndex& idx,
                                       const Bm25Params& params = {});

nlohmann::ordered_json to_json(const TermIndex& idx);

/// Externally computed dense vectors keyed by segment id.
struct EmbeddingTable {
  std::size_t dim = 0;
  std::map<std::string, DenseVector> vectors;

  const DenseVector* find(std::string_view id) const;
};

/// Header "dim=<d>", then one "<id><ws><d floats>" row per segment.
/// Throws DimensionMismatch(id), DuplicateId(id) or InvalidInput.
EmbeddingTable load_embeddings(std::istream& in);

}  // namespace regcheck::vectorize
