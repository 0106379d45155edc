#include "regcheck/annotations.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <sstream>

#include "regcheck/error.hpp"

namespace regcheck::annotations {

namespace {

constexpr int kColumns = 10;

[[noreturn]] void malformed(const std::string& msg, int line) {
  throw Error(ErrorCode::MalformedAnnotation, msg, line);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t pos = 0;
  while (true) {
    const std::size_t tab = line.find('\t', pos);
    cols.push_back(line.substr(pos, tab == std::string::npos ? std::string::npos
                                                            : tab - pos));
    if (tab == std::string::npos) break;
    pos = tab + 1;
  }
  return cols;
}

bool parse_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

struct TreeDefect {
  int entry = 0;  // 1-based entry index the defect is reported against
  std::string message;
};

std::optional<TreeDefect> find_tree_defect(
    const std::vector<AnnotationEntry>& entries) {
  const int n = static_cast<int>(entries.size());
  if (n == 0) return TreeDefect{0, "empty sentence"};
  std::vector<int> heads(static_cast<std::size_t>(n + 1), 0);
  int roots = 0;
  for (int i = 1; i <= n; ++i) {
    const auto& e = entries[static_cast<std::size_t>(i - 1)];
    if (e.index != i) {
      return TreeDefect{i, "expected index " + std::to_string(i) + ", got " +
                               std::to_string(e.index)};
    }
    if (e.head < 0 || e.head > n) {
      return TreeDefect{i, "head " + std::to_string(e.head) +
                               " out of range 0.." + std::to_string(n)};
    }
    if (e.head == i) return TreeDefect{i, "entry is its own head"};
    if (e.head == 0 && ++roots > 1) {
      return TreeDefect{i, "second root (head 0) in sentence"};
    }
    heads[static_cast<std::size_t>(i)] = e.head;
  }
  if (roots == 0) return TreeDefect{1, "sentence has no root (head 0)"};
  // Walk up from every node; more than n steps means a cycle.
  for (int i = 1; i <= n; ++i) {
    int node = i;
    for (int steps = 0; node != 0; ++steps) {
      if (steps > n) {
        return TreeDefect{i, "cycle through entry " + std::to_string(i)};
      }
      node = heads[static_cast<std::size_t>(node)];
    }
  }
  return std::nullopt;
}

struct PendingBlock {
  std::vector<AnnotationEntry> entries;
  std::vector<int> lines;  // file line of each entry
};

}  // namespace

bool AnnotationEntry::space_after() const {
  return misc.find("SpaceAfter=No") == std::string::npos;
}

const char* to_string(PhraseLabel label) {
  switch (label) {
    case PhraseLabel::VP: return "VP";
    case PhraseLabel::NP: return "NP";
    case PhraseLabel::PP: return "PP";
    case PhraseLabel::ADVP: return "ADVP";
    case PhraseLabel::OTHER: return "OTHER";
  }
  return "OTHER";
}

AnnotatedSentence::AnnotatedSentence(int sent_id,
                                     std::vector<AnnotationEntry> entries)
    : sent_id_(sent_id), entries_(std::move(entries)) {
  if (auto defect = find_tree_defect(entries_)) {
    throw Error(ErrorCode::MalformedAnnotation,
                "sentence " + std::to_string(sent_id) + ": " + defect->message);
  }
  const int n = size();
  children_.assign(static_cast<std::size_t>(n + 1), {});
  for (const auto& e : entries_) {
    children_[static_cast<std::size_t>(e.head)].push_back(e.index);
  }
  root_ = children_[0].front();

  depth_.assign(static_cast<std::size_t>(n + 1), 0);
  std::vector<int> queue{root_};
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const int node = queue[q];
    for (int child : children_[static_cast<std::size_t>(node)]) {
      depth_[static_cast<std::size_t>(child)] =
          depth_[static_cast<std::size_t>(node)] + 1;
      queue.push_back(child);
    }
  }
}

const AnnotationEntry& AnnotatedSentence::at(int index) const {
  if (index < 1 || index > size()) {
    throw Error(ErrorCode::IndexError,
                "entry index " + std::to_string(index) + " out of range 1.." +
                    std::to_string(size()));
  }
  return entries_[static_cast<std::size_t>(index - 1)];
}

const std::vector<int>& AnnotatedSentence::children(int index) const {
  at(index);
  return children_[static_cast<std::size_t>(index)];
}

int AnnotatedSentence::depth(int index) const {
  at(index);
  return depth_[static_cast<std::size_t>(index)];
}

std::string AnnotatedSentence::text(const TokenRange& range) const {
  std::vector<int> indices;
  for (int i = range.first; i <= range.last; ++i) indices.push_back(i);
  return text(indices);
}

std::string AnnotatedSentence::text(const std::vector<int>& indices) const {
  std::string out;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto& e = at(indices[k]);
    out += e.form;
    const bool last = k + 1 == indices.size();
    // Adjacent tokens follow SpaceAfter; gaps always get a space.
    if (!last && (e.space_after() || indices[k + 1] != indices[k] + 1)) {
      out += ' ';
    }
  }
  return out;
}

std::vector<AnnotatedSentence> parse_annotations(std::istream& in) {
  std::vector<AnnotatedSentence> out;
  PendingBlock block;
  std::string line;
  int line_no = 0;

  auto flush = [&] {
    if (block.entries.empty()) return;
    if (auto defect = find_tree_defect(block.entries)) {
      const int entry = std::max(defect->entry, 1);
      malformed(defect->message,
                block.lines[static_cast<std::size_t>(entry - 1)]);
    }
    out.emplace_back(static_cast<int>(out.size()), std::move(block.entries));
    block = PendingBlock{};
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      flush();
      continue;
    }
    if (line.front() == '#') continue;

    auto cols = split_tabs(line);
    if (static_cast<int>(cols.size()) != kColumns) {
      malformed("expected 10 tab-separated columns, found " +
                    std::to_string(cols.size()),
                line_no);
    }
    if (cols[0].find_first_of("-.") != std::string::npos) {
      malformed("multi-word tokens and empty nodes are not supported ('" +
                    cols[0] + "')",
                line_no);
    }
    AnnotationEntry e;
    if (!parse_int(cols[0], e.index)) {
      malformed("invalid index '" + cols[0] + "'", line_no);
    }
    if (!parse_int(cols[6], e.head)) {
      malformed("invalid head '" + cols[6] + "'", line_no);
    }
    e.form = cols[1];
    e.lemma = cols[2];
    e.upos = cols[3];
    e.xpos = cols[4];
    e.feats = cols[5];
    e.deprel = cols[7];
    e.deps = cols[8];
    e.misc = cols[9];
    block.entries.push_back(std::move(e));
    block.lines.push_back(line_no);
  }
  flush();
  return out;
}

std::vector<AnnotatedSentence> parse_annotations(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_annotations(in);
}

std::string write_annotations(const std::vector<AnnotatedSentence>& sentences) {
  std::ostringstream out;
  for (const auto& s : sentences) {
    out << "# sent_id = " << s.sent_id() << '\n';
    for (const auto& e : s.entries()) {
      out << e.index << '\t' << e.form << '\t' << e.lemma << '\t' << e.upos
          << '\t' << e.xpos << '\t' << e.feats << '\t' << e.head << '\t'
          << e.deprel << '\t' << e.deps << '\t' << e.misc << '\n';
    }
    out << '\n';
  }
  return out.str();
}

namespace {

bool is_verb(const AnnotationEntry& e) {
  return e.upos == "VERB" || e.upos == "AUX";
}

}  // namespace

int find_root_verb(const AnnotatedSentence& s) {
  if (s.empty()) throw Error(ErrorCode::NoRootVerb, "empty sentence");
  if (is_verb(s.at(s.root()))) return s.root();
  int best = 0;
  for (const auto& e : s.entries()) {
    if (!is_verb(e)) continue;
    if (best == 0 || s.depth(e.index) < s.depth(best)) best = e.index;
  }
  if (best == 0) {
    throw Error(ErrorCode::NoRootVerb,
                "sentence " + std::to_string(s.sent_id()) + " has no verb");
  }
  return best;
}

std::vector<int> subtree_indices(const AnnotatedSentence& s, int head) {
  std::vector<int> out{head};
  s.at(head);
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (int child : s.children(out[k])) out.push_back(child);
  }
  std::sort(out.begin(), out.end());
  return out;
}

TokenRange subtree_span(const AnnotatedSentence& s, int head) {
  const auto nodes = subtree_indices(s, head);
  return {nodes.front(), nodes.back()};
}

PhraseLabel phrase_label_for(std::string_view upos) {
  if (upos == "VERB" || upos == "AUX") return PhraseLabel::VP;
  if (upos == "NOUN" || upos == "PROPN" || upos == "PRON") return PhraseLabel::NP;
  if (upos == "ADP") return PhraseLabel::PP;
  if (upos == "ADV") return PhraseLabel::ADVP;
  return PhraseLabel::OTHER;
}

Phrase phrase_of(const AnnotatedSentence& s, int head) {
  const auto nodes = subtree_indices(s, head);
  Phrase p;
  p.head_index = head;
  p.label = phrase_label_for(s.at(head).upos);
  p.token_range = {nodes.front(), nodes.back()};
  p.non_projective = static_cast<int>(nodes.size()) != p.token_range.size();
  p.text = s.text(p.token_range);
  return p;
}

nlohmann::ordered_json to_json(const AnnotatedSentence& s) {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& e : s.entries()) {
    rows.push_back({{"index", e.index},
                    {"form", e.form},
                    {"lemma", e.lemma},
                    {"upos", e.upos},
                    {"xpos", e.xpos},
                    {"feats", e.feats},
                    {"head", e.head},
                    {"deprel", e.deprel},
                    {"deps", e.deps},
                    {"misc", e.misc}});
  }
  return rows;
}

AnnotatedSentence annotated_sentence_from_json(int sent_id,
                                               const nlohmann::json& j) {
  std::vector<AnnotationEntry> entries;
  try {
    for (const auto& r : j) {
      AnnotationEntry e;
      e.index = r.at("index").get<int>();
      e.form = r.at("form").get<std::string>();
      e.lemma = r.at("lemma").get<std::string>();
      e.upos = r.at("upos").get<std::string>();
      e.xpos = r.value("xpos", "_");
      e.feats = r.value("feats", "_");
      e.head = r.at("head").get<int>();
      e.deprel = r.at("deprel").get<std::string>();
      e.deps = r.value("deps", "_");
      e.misc = r.value("misc", "_");
      entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedAnnotation,
                std::string("bad annotation in bundle: ") + e.what());
  }
  return AnnotatedSentence(sent_id, std::move(entries));
}

}  // namespace regcheck::annotations
