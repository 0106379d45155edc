#include "regcheck/vectorize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "regcheck/error.hpp"

namespace regcheck::vectorize {

namespace {

bool has_word_char(std::string_view s) {
  return std::any_of(s.begin(), s.end(), corpus::is_word_byte);
}

double dot(const SparseVector& v, const SparseVector& w) {
  const auto& a = v.entries();
  const auto& b = w.entries();
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (b[j].first < a[i].first) {
      ++j;
    } else {
      sum += a[i].second * b[j].second;
      ++i;
      ++j;
    }
  }
  return sum;
}

void check_params(const Bm25Params& p) {
  if (!(p.k1 > 0.0) || p.b < 0.0 || p.b > 1.0) {
    throw Error(ErrorCode::InvalidInput, "BM25 requires k1 > 0 and 0 <= b <= 1");
  }
}

double bm25_unchecked(const std::vector<std::string>& query,
                      std::size_t segment, const TermIndex& idx,
                      const Bm25Params& params) {
  const auto& freqs = idx.term_freqs[segment];
  const double len = static_cast<double>(idx.doc_len[segment]);
  const double norm =
      params.k1 * (1.0 - params.b + params.b * len / idx.avg_doc_len);
  double score = 0.0;
  for (const auto& term : index_terms(query, idx.stopwords)) {
    const auto id = idx.id(term);
    if (!id) continue;
    const auto it = freqs.find(*id);
    if (it == freqs.end()) continue;
    const double tf = static_cast<double>(it->second);
    score += bm25_idf(idx, *id) * tf * (params.k1 + 1.0) / (tf + norm);
  }
  return score;
}

}  // namespace

SparseVector::SparseVector(const std::map<TermId, double>& weights) {
  entries_.reserve(weights.size());
  for (const auto& [id, w] : weights) {
    if (w != 0.0) entries_.emplace_back(id, w);
  }
}

double SparseVector::get(TermId id) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), id,
      [](const Entry& e, TermId key) { return e.first < key; });
  return it != entries_.end() && it->first == id ? it->second : 0.0;
}

double SparseVector::norm() const { return std::sqrt(dot(*this, *this)); }

std::optional<TermId> TermIndex::id(std::string_view term) const {
  auto it = vocabulary.find(std::string(term));
  if (it == vocabulary.end()) return std::nullopt;
  return it->second;
}

std::size_t TermIndex::df(std::string_view term) const {
  const auto i = id(term);
  return i ? doc_freq[*i] : 0;
}

std::vector<std::string> index_terms(const std::vector<std::string>& tokens,
                                     const corpus::WordSet& stopwords) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    std::string lower = corpus::fold_case(t);
    if (!has_word_char(lower) || stopwords.count(lower) != 0) continue;
    out.push_back(std::move(lower));
  }
  return out;
}

TermIndex build_index(const std::vector<std::vector<std::string>>& segments,
                      const corpus::WordSet& stopwords) {
  if (segments.empty()) {
    throw Error(ErrorCode::InvalidInput, "cannot index an empty corpus");
  }
  TermIndex idx;
  idx.stopwords = stopwords;
  idx.doc_count = segments.size();
  std::size_t total_len = 0;
  for (const auto& seg : segments) {
    std::unordered_map<TermId, std::size_t> tf;
    const auto terms = index_terms(seg, stopwords);
    for (const auto& term : terms) {
      auto [it, inserted] =
          idx.vocabulary.try_emplace(term, static_cast<TermId>(idx.terms.size()));
      if (inserted) {
        idx.terms.push_back(term);
        idx.doc_freq.push_back(0);
      }
      if (tf[it->second]++ == 0) ++idx.doc_freq[it->second];
    }
    idx.doc_len.push_back(terms.size());
    total_len += terms.size();
    idx.term_freqs.push_back(std::move(tf));
  }
  if (total_len == 0) {
    throw Error(ErrorCode::InvalidInput, "corpus has no indexable terms");
  }
  idx.avg_doc_len =
      static_cast<double>(total_len) / static_cast<double>(idx.doc_count);
  return idx;
}

double smoothed_idf(const TermIndex& idx, TermId id) {
  const double n = static_cast<double>(idx.doc_count);
  const double df = static_cast<double>(idx.doc_freq[id]);
  return std::log((n + 1.0) / (df + 1.0)) + 1.0;
}

SparseVector tfidf_vector(const std::vector<std::string>& tokens,
                          const TermIndex& idx) {
  std::map<TermId, double> tf;
  for (const auto& term : index_terms(tokens, idx.stopwords)) {
    if (auto id = idx.id(term)) tf[*id] += 1.0;
  }
  for (auto& [id, w] : tf) w *= smoothed_idf(idx, id);
  return SparseVector(tf);
}

double cosine(const SparseVector& v, const SparseVector& w) {
  const double nv = v.norm();
  const double nw = w.norm();
  if (nv == 0.0 || nw == 0.0) {
    throw Error(ErrorCode::ZeroVector, "cosine of a zero-norm vector");
  }
  return dot(v, w) / (nv * nw);
}

double cosine(std::span<const double> v, std::span<const double> w) {
  if (v.size() != w.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "cosine of vectors with dimensions " + std::to_string(v.size()) +
                    " and " + std::to_string(w.size()));
  }
  double vw = 0.0, vv = 0.0, ww = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    vw += v[i] * w[i];
    vv += v[i] * v[i];
    ww += w[i] * w[i];
  }
  if (vv == 0.0 || ww == 0.0) {
    throw Error(ErrorCode::ZeroVector, "cosine of a zero-norm vector");
  }
  return vw / (std::sqrt(vv) * std::sqrt(ww));
}

double cosine(const FeatureVector& v, const FeatureVector& w) {
  if (v.index() != w.index()) {
    throw Error(ErrorCode::DimensionMismatch,
                "cosine of a sparse and a dense vector");
  }
  if (const auto* sv = std::get_if<SparseVector>(&v)) {
    return cosine(*sv, std::get<SparseVector>(w));
  }
  return cosine(std::span<const double>(std::get<DenseVector>(v)),
                std::span<const double>(std::get<DenseVector>(w)));
}

double bm25_idf(const TermIndex& idx, TermId id) {
  const double n = static_cast<double>(idx.doc_count);
  const double df = static_cast<double>(idx.doc_freq[id]);
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

double bm25_score(const std::vector<std::string>& query, std::size_t segment,
                  const TermIndex& idx, const Bm25Params& params) {
  check_params(params);
  if (segment >= idx.doc_count) {
    throw Error(ErrorCode::IndexError,
                "segment " + std::to_string(segment) + " not in index of " +
                    std::to_string(idx.doc_count));
  }
  return bm25_unchecked(query, segment, idx, params);
}

std::vector<double> bm25_scores(const std::vector<std::string>& query,
                                const TermIndex& idx, const Bm25Params& params) {
  check_params(params);
  const auto n = static_cast<std::ptrdiff_t>(idx.doc_count);
  std::vector<double> out(idx.doc_count);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    out[static_cast<std::size_t>(s)] =
        bm25_unchecked(query, static_cast<std::size_t>(s), idx, params);
  }
  return out;
}

std::vector<double> bm25_scores_serial(const std::vector<std::string>& query,
                                       const TermIndex& idx,
                                       const Bm25Params& params) {
  check_params(params);
  std::vector<double> out;
  out.reserve(idx.doc_count);
  for (std::size_t s = 0; s < idx.doc_count; ++s) {
    out.push_back(bm25_unchecked(query, s, idx, params));
  }
  return out;
}

nlohmann::ordered_json to_json(const TermIndex& idx) {
  nlohmann::ordered_json j;
  j["doc_count"] = idx.doc_count;
  j["avg_doc_len"] = idx.avg_doc_len;
  auto& terms = j["terms"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < idx.terms.size(); ++i) {
    terms.push_back({{"term", idx.terms[i]}, {"df", idx.doc_freq[i]}});
  }
  j["doc_len"] = idx.doc_len;
  return j;
}

const DenseVector* EmbeddingTable::find(std::string_view id) const {
  auto it = vectors.find(std::string(id));
  return it == vectors.end() ? nullptr : &it->second;
}

EmbeddingTable load_embeddings(std::istream& in) {
  EmbeddingTable table;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!have_header) {
      const auto pos = line.find("dim=");
      int dim = 0;
      const char* begin = line.data() + (pos == std::string::npos ? 0 : pos + 4);
      const char* end = line.data() + line.size();
      auto [ptr, ec] = std::from_chars(begin, end, dim);
      if (pos != 0 || ec != std::errc() || ptr != end || dim < 1) {
        throw Error(ErrorCode::InvalidInput,
                    "embedding file must start with 'dim=<d>'", line_no);
      }
      table.dim = static_cast<std::size_t>(dim);
      have_header = true;
      continue;
    }
    std::istringstream row(line);
    std::string id;
    row >> id;
    DenseVector v;
    std::string field;
    while (row >> field) {
      double x = 0.0;
      const char* fend = field.data() + field.size();
      auto [ptr, ec] = std::from_chars(field.data(), fend, x);
      if (ec != std::errc() || ptr != fend) {
        throw Error(ErrorCode::InvalidInput,
                    "bad number '" + field + "' for " + id, line_no);
      }
      v.push_back(x);
    }
    if (v.size() != table.dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  id + ": expected " + std::to_string(table.dim) +
                      " values, found " + std::to_string(v.size()),
                  line_no);
    }
    if (!table.vectors.emplace(id, std::move(v)).second) {
      throw Error(ErrorCode::DuplicateId, id, line_no);
    }
  }
  if (!have_header) {
    throw Error(ErrorCode::InvalidInput, "embedding file has no header");
  }
  return table;
}

}  // namespace regcheck::vectorize
