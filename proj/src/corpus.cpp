#include "regcheck/corpus.hpp"

#include <cctype>
#include <regex>
#include <set>

#include "regcheck/error.hpp"

namespace regcheck::corpus {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

const std::regex& article_marker() {
  static const std::regex re(R"(^\s*Article\s+(\d+[A-Za-z]?)\s*$)");
  return re;
}

const std::regex& reference_pattern() {
  static const std::regex re(
      R"(\b(articles?)\s+(\d+[a-z]?(?:\(\d+\))*(?:(?:\s*,\s*|\s+and\s+|\s+or\s+)\d+[a-z]?(?:\(\d+\))*)*))",
      std::regex::icase);
  return re;
}

const std::regex& reference_number() {
  static const std::regex re(R"(\d+[a-zA-Z]?(?:\(\d+\))*)");
  return re;
}

struct Line {
  std::string_view text;
  std::size_t offset;
};

std::vector<Line> split_lines(std::string_view raw) {
  std::vector<Line> lines;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    std::size_t nl = raw.find('\n', pos);
    if (nl == std::string_view::npos) nl = raw.size();
    lines.push_back({raw.substr(pos, nl - pos), pos});
    pos = nl + 1;
  }
  return lines;
}

}  // namespace

const Sentence& Document::sentence(int sent_id) const {
  if (sent_id < 0 || static_cast<std::size_t>(sent_id) >= sentences.size()) {
    throw Error(ErrorCode::IndexError,
                "sentence id " + std::to_string(sent_id) + " out of range");
  }
  return sentences[static_cast<std::size_t>(sent_id)];
}

const Article& Document::article(std::string_view article_id) const {
  for (const auto& a : articles) {
    if (a.article_id == article_id) return a;
  }
  throw Error(ErrorCode::IndexError,
              "unknown article '" + std::string(article_id) + "'");
}

Metadata parse_metadata(std::istream& in) {
  Metadata meta;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    const std::size_t sep = entry.find_first_of(":=");
    if (sep == std::string_view::npos) continue;
    meta[std::string(trim(entry.substr(0, sep)))] =
        std::string(trim(entry.substr(sep + 1)));
  }
  return meta;
}

Document load_document(std::string_view raw_text, const Metadata& metadata,
                       const TextResources& resources) {
  if (trim(raw_text).empty()) {
    throw Error(ErrorCode::InvalidInput, "document text is empty");
  }
  const auto id = metadata.find("doc_id");
  if (id == metadata.end() || id->second.empty()) {
    throw Error(ErrorCode::MissingMetadata, "metadata has no doc_id");
  }

  Document doc;
  doc.doc_id = id->second;
  if (auto t = metadata.find("title"); t != metadata.end()) doc.title = t->second;

  const auto lines = split_lines(raw_text);
  bool has_markers = false;
  for (const auto& line : lines) {
    if (std::regex_match(line.text.begin(), line.text.end(), article_marker())) {
      has_markers = true;
      break;
    }
  }

  std::set<std::string> seen;
  auto open_article = [&](std::string article_id) {
    if (!seen.insert(article_id).second) {
      throw Error(ErrorCode::InvalidInput,
                  "duplicate article id '" + article_id + "'");
    }
    doc.articles.push_back(Article{std::move(article_id), {}, {}});
  };

  for (const auto& line : lines) {
    std::match_results<std::string_view::const_iterator> m;
    if (std::regex_match(line.text.begin(), line.text.end(), m,
                         article_marker())) {
      open_article(m[1].str());
      continue;
    }
    const std::string_view body = trim(line.text);
    if (body.empty()) continue;
    if (doc.articles.empty()) open_article(has_markers ? "preamble" : "body");

    Article& article = doc.articles.back();
    const std::size_t para_offset =
        line.offset + static_cast<std::size_t>(body.data() - line.text.data());
    article.paragraphs.push_back({std::string(body), para_offset});

    for (const auto& b : split_sentences(body, resources.abbreviations)) {
      Sentence s;
      s.sent_id = static_cast<int>(doc.sentences.size());
      s.article_id = article.article_id;
      s.char_offset = para_offset + b.begin;
      s.text = std::string(body.substr(b.begin, b.end - b.begin));
      s.tokens = tokenize(s.text, s.char_offset, resources);
      article.sentence_ids.push_back(s.sent_id);
      doc.sentences.push_back(std::move(s));
    }
  }

  doc.cross_references = detect_cross_references(doc);
  return doc;
}

std::vector<ContextSpan> partition_spans(const Document& doc, int budget) {
  if (budget < 1) {
    throw Error(ErrorCode::InvalidInput,
                "token budget must be >= 1, got " + std::to_string(budget));
  }
  std::vector<ContextSpan> spans;
  for (const auto& article : doc.articles) {
    int ordinal = 0;
    ContextSpan current;
    auto start_span = [&] {
      current = ContextSpan{};
      current.span_id =
          "art" + article.article_id + "#" + std::to_string(++ordinal);
      current.article_id = article.article_id;
    };
    auto flush = [&] {
      if (!current.sentence_ids.empty()) spans.push_back(current);
      current.sentence_ids.clear();
    };

    start_span();
    for (int sid : article.sentence_ids) {
      const int n = static_cast<int>(doc.sentence(sid).tokens.size());
      if (n >= budget) {
        if (!current.sentence_ids.empty()) {
          flush();
          start_span();
        }
        current.sentence_ids.push_back(sid);
        current.token_count = n;
        current.oversized = true;
        flush();
        start_span();
        continue;
      }
      if (!current.sentence_ids.empty() && current.token_count + n >= budget) {
        flush();
        start_span();
      }
      current.sentence_ids.push_back(sid);
      current.token_count += n;
    }
    flush();
  }
  return spans;
}

std::vector<CrossReference> detect_cross_references(const Sentence& sentence) {
  std::vector<CrossReference> refs;
  const std::string& text = sentence.text;
  for (auto it = std::sregex_iterator(text.begin(), text.end(),
                                      reference_pattern());
       it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    const std::string numbers = m[2].str();
    const auto list_offset = static_cast<std::size_t>(m.position(2));
    bool first = true;
    for (auto nit = std::sregex_iterator(numbers.begin(), numbers.end(),
                                         reference_number());
         nit != std::sregex_iterator(); ++nit) {
      CrossReference ref;
      ref.source_sentence = sentence.sent_id;
      ref.target = "Article " + nit->str();
      const std::size_t local =
          first ? static_cast<std::size_t>(m.position(0))
                : list_offset + static_cast<std::size_t>(nit->position());
      ref.char_offset = sentence.char_offset + local;
      refs.push_back(std::move(ref));
      first = false;
    }
  }
  return refs;
}

std::vector<CrossReference> detect_cross_references(const Document& doc) {
  std::vector<CrossReference> refs;
  for (const auto& s : doc.sentences) {
    auto found = detect_cross_references(s);
    refs.insert(refs.end(), found.begin(), found.end());
  }
  return refs;
}

std::string span_text(const ContextSpan& span, const Document& doc) {
  std::string out;
  for (int sid : span.sentence_ids) {
    if (!out.empty()) out += ' ';
    out += doc.sentence(sid).text;
  }
  return out;
}

nlohmann::ordered_json to_json(const Document& doc) {
  nlohmann::ordered_json j;
  j["doc_id"] = doc.doc_id;
  j["title"] = doc.title;
  auto& articles = j["articles"] = nlohmann::ordered_json::array();
  for (const auto& a : doc.articles) {
    nlohmann::ordered_json ja;
    ja["article_id"] = a.article_id;
    auto& paras = ja["paragraphs"] = nlohmann::ordered_json::array();
    for (const auto& p : a.paragraphs) {
      paras.push_back({{"char_offset", p.char_offset}, {"text", p.text}});
    }
    ja["sentence_ids"] = a.sentence_ids;
    articles.push_back(std::move(ja));
  }
  auto& sentences = j["sentences"] = nlohmann::ordered_json::array();
  for (const auto& s : doc.sentences) {
    nlohmann::ordered_json js;
    js["sent_id"] = s.sent_id;
    js["article_id"] = s.article_id;
    js["char_offset"] = s.char_offset;
    js["text"] = s.text;
    auto& tokens = js["tokens"] = nlohmann::ordered_json::array();
    for (const auto& t : s.tokens) {
      tokens.push_back({{"surface", t.surface},
                        {"lower", t.lower},
                        {"char_offset", t.char_offset},
                        {"is_stopword", t.is_stopword}});
    }
    sentences.push_back(std::move(js));
  }
  auto& refs = j["cross_references"] = nlohmann::ordered_json::array();
  for (const auto& r : doc.cross_references) {
    refs.push_back({{"source_sentence", r.source_sentence},
                    {"target", r.target},
                    {"char_offset", r.char_offset}});
  }
  return j;
}

nlohmann::ordered_json to_json(const ContextSpan& span) {
  return {{"span_id", span.span_id},
          {"article_id", span.article_id},
          {"sentence_ids", span.sentence_ids},
          {"token_count", span.token_count},
          {"oversized", span.oversized}};
}

Document document_from_json(const nlohmann::json& j) {
  try {
    Document doc;
    doc.doc_id = j.at("doc_id").get<std::string>();
    doc.title = j.value("title", "");
    for (const auto& ja : j.at("articles")) {
      Article a;
      a.article_id = ja.at("article_id").get<std::string>();
      for (const auto& p : ja.at("paragraphs")) {
        a.paragraphs.push_back({p.at("text").get<std::string>(),
                                p.at("char_offset").get<std::size_t>()});
      }
      a.sentence_ids = ja.at("sentence_ids").get<std::vector<int>>();
      doc.articles.push_back(std::move(a));
    }
    for (const auto& js : j.at("sentences")) {
      Sentence s;
      s.sent_id = js.at("sent_id").get<int>();
      s.article_id = js.at("article_id").get<std::string>();
      s.char_offset = js.at("char_offset").get<std::size_t>();
      s.text = js.at("text").get<std::string>();
      for (const auto& jt : js.at("tokens")) {
        s.tokens.push_back({jt.at("surface").get<std::string>(),
                            jt.at("lower").get<std::string>(),
                            jt.at("char_offset").get<std::size_t>(),
                            jt.at("is_stopword").get<bool>()});
      }
      if (s.sent_id != static_cast<int>(doc.sentences.size())) {
        throw Error(ErrorCode::InvalidInput, "sentence ids are not contiguous");
      }
      doc.sentences.push_back(std::move(s));
    }
    for (const auto& jr : j.at("cross_references")) {
      doc.cross_references.push_back(
          {jr.at("source_sentence").get<int>(), jr.at("target").get<std::string>(),
           jr.at("char_offset").get<std::size_t>()});
    }
    if (doc.doc_id.empty()) {
      throw Error(ErrorCode::MissingMetadata, "bundle has an empty doc_id");
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput,
                std::string("malformed document bundle: ") + e.what());
  }
}

}  // namespace regcheck::corpus
