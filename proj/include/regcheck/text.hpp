#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace regcheck::corpus {

using WordSet = std::unordered_set<std::string>;

/// Word lists that drive segmentation: stopwords (lowercase) and
/// abbreviations that must not end a sentence (exact surface, with the
/// trailing period, e.g. "Art.").
struct TextResources {
  WordSet stopwords;
  WordSet abbreviations;

  static const TextResources& defaults();
};

const WordSet& default_stopwords();
const WordSet& default_abbreviations();

/// One entry per non-empty, non-'#' line; surrounding whitespace trimmed.
/// Lowercases entries when `fold` is set.
WordSet load_word_list(std::istream& in, bool fold);

/// ASCII case folding; bytes >= 0x80 are copied through.
std::string fold_case(std::string_view text);

bool is_word_byte(char c);

struct Token {
  std::string surface;
  std::string lower;
  std::size_t char_offset = 0;
  bool is_stopword = false;

  bool operator==(const Token&) const = default;
};

/// Half-open byte range [begin, end) into the text handed to split_sentences.
struct SentenceBoundary {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const SentenceBoundary&) const = default;
};

/// Splits on '.', '?' or '!' (optionally followed by closing quotes or
/// brackets) when the next non-space character is an uppercase letter or
/// a digit. A period that closes a listed abbreviation never splits.
/// Returned ranges exclude surrounding whitespace; whitespace-only input
/// yields no sentences.
std::vector<SentenceBoundary> split_sentences(std::string_view text,
                                              const WordSet& abbreviations);

/// Whitespace-delimited words with punctuation detached. Hyphens and
/// apostrophes between word characters stay inside the word, as do '.'
/// and ',' between digits and '.' between letters ("e.g"). A trailing
/// period that completes an abbreviation stays attached. Offsets are
/// `base_offset` plus the position inside `text`.
std::vector<Token> tokenize(std::string_view text, std::size_t base_offset,
                            const TextResources& resources);

/// Lowercased tokens of `text`, stopwords kept. Convenience for short
/// strings such as keywords, markers and role spans.
std::vector<std::string> lower_terms(std::string_view text);

}  // namespace regcheck::corpus
