#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace regcheck::annotations {

/// One row of the 10-column tab-separated format. Indices are 1-based;
/// head 0 marks the root.
struct AnnotationEntry {
  int index = 0;
  std::string form;
  std::string lemma;
  std::string upos;
  std::string xpos = "_";
  std::string feats = "_";
  int head = 0;
  std::string deprel;
  std::string deps = "_";
  std::string misc = "_";

  bool space_after() const;

  bool operator==(const AnnotationEntry&) const = default;
};

/// Inclusive 1-based interval of entry indices.
struct TokenRange {
  int first = 0;
  int last = 0;

  int size() const { return last - first + 1; }
  bool contains(int index) const { return index >= first && index <= last; }
  bool contains(const TokenRange& other) const {
    return other.first >= first && other.last <= last;
  }

  bool operator==(const TokenRange&) const = default;
};

enum class PhraseLabel { VP, NP, PP, ADVP, OTHER };

const char* to_string(PhraseLabel label);

struct Phrase {
  int head_index = 0;
  PhraseLabel label = PhraseLabel::OTHER;
  TokenRange token_range;
  std::string text;
  // Set when the covering interval picks up tokens outside the subtree.
  bool non_projective = false;
};

/// A dependency tree. Construction validates the tree invariants (1..n
/// indices, heads in range, a single root, no cycles) and throws
/// MalformedAnnotation otherwise.
class AnnotatedSentence {
 public:
  AnnotatedSentence() = default;
  AnnotatedSentence(int sent_id, std::vector<AnnotationEntry> entries);

  int sent_id() const { return sent_id_; }
  int size() const { return static_cast<int>(entries_.size()); }
  bool empty() const { return entries_.empty(); }

  const std::vector<AnnotationEntry>& entries() const { return entries_; }
  const AnnotationEntry& at(int index) const;
  const std::vector<int>& children(int index) const;
  int root() const { return root_; }
  int depth(int index) const;

  /// Surface text of entries in `range`, honoring SpaceAfter=No.
  std::string text(const TokenRange& range) const;
  /// Surface text of the given (sorted) entry indices.
  std::string text(const std::vector<int>& indices) const;

  bool operator==(const AnnotatedSentence& other) const {
    return sent_id_ == other.sent_id_ && entries_ == other.entries_;
  }

 private:
  int sent_id_ = 0;
  std::vector<AnnotationEntry> entries_;
  std::vector<std::vector<int>> children_;  // indexed by head, 0 = virtual root
  std::vector<int> depth_;
  int root_ = 0;
};

/// Blank lines separate sentences, '#' lines are comments. Sentence ids are
/// the 0-based ordinal of each block. Multi-word token ranges ("1-2") and
/// empty nodes ("1.1") are rejected.
std::vector<AnnotatedSentence> parse_annotations(std::istream& in);
std::vector<AnnotatedSentence> parse_annotations(std::string_view text);

std::string write_annotations(const std::vector<AnnotatedSentence>& sentences);

/// Root entry when it is VERB/AUX, otherwise the shallowest VERB/AUX entry
/// (leftmost on ties). Throws NoRootVerb.
int find_root_verb(const AnnotatedSentence& s);

/// Smallest interval covering `head` and all its descendants. Throws
/// IndexError for an invalid head.
TokenRange subtree_span(const AnnotatedSentence& s, int head);

/// Every descendant of `head`, including itself, sorted.
std::vector<int> subtree_indices(const AnnotatedSentence& s, int head);

PhraseLabel phrase_label_for(std::string_view upos);

Phrase phrase_of(const AnnotatedSentence& s, int head);

nlohmann::ordered_json to_json(const AnnotatedSentence& s);
AnnotatedSentence annotated_sentence_from_json(int sent_id,
                                               const nlohmann::json& j);

}  // namespace regcheck::annotations
