#include "regcheck/text.hpp"

#include <cctype>
#include <sstream>

#include "embedded_resources.hpp"

namespace regcheck::corpus {

namespace {

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool is_digit(char c) {
  return std::isdigit(static_cast<unsigned char>(c)) != 0;
}

bool is_alpha(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0 ||
         static_cast<unsigned char>(c) >= 0x80;
}

bool is_closing(char c) {
  return c == ')' || c == ']' || c == '"' || c == '\'';
}

bool is_terminator(char c) { return c == '.' || c == '?' || c == '!'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

WordSet parse_embedded(std::string_view text, bool fold) {
  std::istringstream in{std::string(text)};
  return load_word_list(in, fold);
}

// Keeps a joiner character inside the current word.
bool joins(std::string_view text, std::size_t pos) {
  if (pos == 0 || pos + 1 >= text.size()) return false;
  const char prev = text[pos - 1];
  const char next = text[pos + 1];
  if (!is_word_byte(prev) || !is_word_byte(next)) return false;
  switch (text[pos]) {
    case '-':
    case '\'':
      return true;
    case ',':
      return is_digit(prev) && is_digit(next);
    case '.':
      return (is_digit(prev) && is_digit(next)) ||
             (is_alpha(prev) && is_alpha(next));
    default:
      return false;
  }
}

}  // namespace

bool is_word_byte(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 ||
         static_cast<unsigned char>(c) >= 0x80;
}

WordSet load_word_list(std::istream& in, bool fold) {
  WordSet words;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    words.insert(fold ? fold_case(entry) : std::string(entry));
  }
  return words;
}

const WordSet& default_stopwords() {
  static const WordSet words = parse_embedded(resources::kStopwords, true);
  return words;
}

const WordSet& default_abbreviations() {
  static const WordSet words =
      parse_embedded(resources::kAbbreviations, false);
  return words;
}

const TextResources& TextResources::defaults() {
  static const TextResources res{default_stopwords(), default_abbreviations()};
  return res;
}

std::string fold_case(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<SentenceBoundary> split_sentences(std::string_view text,
                                              const WordSet& abbreviations) {
  std::vector<SentenceBoundary> out;
  std::size_t start = 0;
  while (start < text.size() && is_space(text[start])) ++start;

  for (std::size_t i = start; i < text.size(); ++i) {
    if (!is_terminator(text[i])) continue;
    std::size_t end = i + 1;
    while (end < text.size() && is_closing(text[end])) ++end;
    if (end >= text.size() || !is_space(text[end])) continue;
    std::size_t next = end;
    while (next < text.size() && is_space(text[next])) ++next;
    if (next >= text.size()) break;
    std::size_t lead_pos = next;
    while (lead_pos < text.size() &&
           (text[lead_pos] == '(' || text[lead_pos] == '[' || text[lead_pos] == '"')) {
      ++lead_pos;
    }
    if (lead_pos >= text.size()) break;
    const char lead = text[lead_pos];
    if (!(std::isupper(static_cast<unsigned char>(lead)) || is_digit(lead))) {
      continue;
    }
    if (text[i] == '.') {
      std::size_t word_begin = i;
      while (word_begin > start && !is_space(text[word_begin - 1])) {
        --word_begin;
      }
      std::string_view word = text.substr(word_begin, i + 1 - word_begin);
      while (!word.empty() && (word.front() == '(' || word.front() == '[' ||
                               word.front() == '"')) {
        word.remove_prefix(1);
      }
      if (abbreviations.count(std::string(word)) != 0) continue;
    }
    out.push_back({start, end});
    start = next;
    i = next - 1;
  }

  std::size_t stop = text.size();
  while (stop > start && is_space(text[stop - 1])) --stop;
  if (stop > start) out.push_back({start, stop});
  return out;
}

std::vector<Token> tokenize(std::string_view text, std::size_t base_offset,
                            const TextResources& resources) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_space(text[i])) {
      ++i;
      continue;
    }
    std::size_t end = i + 1;
    if (is_word_byte(text[i])) {
      while (end < text.size() &&
             (is_word_byte(text[end]) || joins(text, end))) {
        ++end;
      }
      if (end < text.size() && text[end] == '.') {
        const std::string candidate(text.substr(i, end + 1 - i));
        if (resources.abbreviations.count(candidate) != 0) ++end;
      }
    }
    Token tok;
    tok.surface = std::string(text.substr(i, end - i));
    tok.lower = fold_case(tok.surface);
    tok.char_offset = base_offset + i;
    tok.is_stopword = resources.stopwords.count(tok.lower) != 0;
    tokens.push_back(std::move(tok));
    i = end;
  }
  return tokens;
}

std::vector<std::string> lower_terms(std::string_view text) {
  static const TextResources bare{};
  std::vector<std::string> out;
  for (auto& tok : tokenize(text, 0, bare)) out.push_back(std::move(tok.lower));
  return out;
}

}  // namespace regcheck::corpus
