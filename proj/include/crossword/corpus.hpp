#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crossword/errors.hpp"

namespace crossword {

inline constexpr char kDefaultMaskSymbol = '#';

enum class TokenKind : std::uint8_t { word, punctuation, mask };

struct Token {
  std::string surface;
  TokenKind kind = TokenKind::word;
  std::string normalized;  // lowercased surface for word tokens, empty otherwise

  friend bool operator==(const Token&, const Token&) = default;
};

namespace detail {

inline bool is_ascii_alnum(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z');
}

// Bytes >= 0x80 are treated as letters so UTF-8 sequences stay inside one
// word (this also keeps curly apostrophes attached, e.g. "Trakatelli's").
inline bool is_word_byte(unsigned char c) {
  return is_ascii_alnum(c) || c >= 0x80;
}

inline bool is_space_byte(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

inline std::string lowercase_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace detail

inline Token make_word_token(std::string surface) {
  Token t;
  t.normalized = detail::lowercase_ascii(surface);
  t.surface = std::move(surface);
  t.kind = TokenKind::word;
  return t;
}

inline Token make_punctuation_token(std::string surface) {
  return Token{std::move(surface), TokenKind::punctuation, ""};
}

inline Token make_mask_token(char mask_symbol = kDefaultMaskSymbol) {
  return Token{std::string(1, mask_symbol), TokenKind::mask, ""};
}

struct Sentence {
  std::vector<Token> tokens;

  // N_i: number of word-kind tokens.
  std::size_t word_count() const {
    std::size_t n = 0;
    for (const Token& t : tokens)
      if (t.kind == TokenKind::word) ++n;
    return n;
  }

  std::size_t mask_count() const {
    std::size_t n = 0;
    for (const Token& t : tokens)
      if (t.kind == TokenKind::mask) ++n;
    return n;
  }

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Text {
  std::vector<Sentence> sentences;
  std::string source_name;

  std::size_t word_count() const {
    std::size_t n = 0;
    for (const Sentence& s : sentences) n += s.word_count();
    return n;
  }

  friend bool operator==(const Text&, const Text&) = default;
};

// Floor of fraction*n robust against binary-decimal wobble (0.3*10 must be 3).
inline std::size_t scaled_floor(double fraction, std::size_t n) {
  return static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(n) + 1e-9));
}

/// Split one raw sentence into word / punctuation / mask tokens.
///
/// Words are maximal runs of letters and digits plus apostrophes and
/// internal hyphens (apostrophes join only once a word has started, so a
/// leading quote stays punctuation). A standalone mask symbol becomes a
/// mask token; a mask symbol touching a word run is an error.
inline Sentence tokenize_sentence(std::string_view raw,
                                  char mask_symbol = kDefaultMaskSymbol) {
  using detail::is_word_byte;
  if (is_word_byte(static_cast<unsigned char>(mask_symbol)) ||
      mask_symbol == '\'' || mask_symbol == '-') {
    throw MaskCollision("mask symbol must not be a word character");
  }

  Sentence out;
  const std::size_t n = raw.size();
  std::size_t i = 0;
  auto word_at = [&](std::size_t j) {
    return j < n && is_word_byte(static_cast<unsigned char>(raw[j]));
  };

  while (i < n) {
    const unsigned char c = static_cast<unsigned char>(raw[i]);
    if (detail::is_space_byte(c)) {
      ++i;
      continue;
    }
    if (raw[i] == mask_symbol) {
      if ((i > 0 && is_word_byte(static_cast<unsigned char>(raw[i - 1]))) ||
          word_at(i + 1)) {
        throw MaskCollision("mask symbol '" + std::string(1, mask_symbol) +
                            "' embedded in a word run");
      }
      out.tokens.push_back(make_mask_token(mask_symbol));
      ++i;
      continue;
    }
    if (is_word_byte(c)) {
      const std::size_t start = i++;
      while (i < n) {
        const unsigned char d = static_cast<unsigned char>(raw[i]);
        if (is_word_byte(d) || d == '\'') {
          ++i;
        } else if (d == '-' && word_at(i + 1)) {
          ++i;  // internal hyphen
        } else {
          break;
        }
      }
      out.tokens.push_back(make_word_token(std::string(raw.substr(start, i - start))));
      continue;
    }
    out.tokens.push_back(make_punctuation_token(std::string(1, raw[i])));
    ++i;
  }
  return out;
}

/// Segment raw text into sentences at '.', '!' or '?' followed by
/// whitespace or end of input. The terminator stays with its sentence;
/// sentences without any word or mask token are dropped (a mask stands
/// for a word, so fully masked sentences survive a decode round trip).
/// Abbreviations are not special-cased.
inline Text segment_text(std::string_view raw,
                         char mask_symbol = kDefaultMaskSymbol,
                         std::string source_name = "") {
  Text text;
  text.source_name = std::move(source_name);

  auto flush = [&](std::size_t begin, std::size_t end) {
    if (begin >= end) return;
    Sentence s = tokenize_sentence(raw.substr(begin, end - begin), mask_symbol);
    if (s.word_count() >= 1 || s.mask_count() >= 1)
      text.sentences.push_back(std::move(s));
  };

  std::size_t begin = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if ((c == '.' || c == '!' || c == '?') &&
        (i + 1 >= raw.size() ||
         detail::is_space_byte(static_cast<unsigned char>(raw[i + 1])))) {
      flush(begin, i + 1);
      begin = i + 1;
    }
  }
  flush(begin, raw.size());
  return text;
}

/// Render tokens back to text: one space between word/mask tokens, no
/// space before punctuation, sentences joined by a single space.
inline std::string detokenize_sentence(const Sentence& sentence) {
  std::string out;
  for (std::size_t ti = 0; ti < sentence.tokens.size(); ++ti) {
    const Token& t = sentence.tokens[ti];
    if (!out.empty() && t.kind != TokenKind::punctuation) out += ' ';
    out += t.surface;
  }
  return out;
}

inline std::string detokenize(const Text& text) {
  std::string out;
  for (const Sentence& sentence : text.sentences) {
    for (std::size_t ti = 0; ti < sentence.tokens.size(); ++ti) {
      const Token& t = sentence.tokens[ti];
      if (!out.empty() && (ti == 0 || t.kind != TokenKind::punctuation))
        out += ' ';
      out += t.surface;
    }
  }
  return out;
}

/// Deterministic sentence-level split; the first part receives
/// floor(train_fraction * M) sentences. Both parts keep original order.
inline std::pair<Text, Text> split_corpus(const Text& text,
                                          double train_fraction,
                                          std::uint64_t seed) {
  if (text.sentences.size() < 2)
    throw TooFewSentences("need at least 2 sentences to split, have " +
                          std::to_string(text.sentences.size()));
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw InvalidRatio("train fraction must lie in (0,1)");

  const std::size_t m = text.sentences.size();
  const std::size_t k = scaled_floor(train_fraction, m);

  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  // Explicit Fisher-Yates: std::shuffle is not pinned across libraries.
  std::mt19937_64 rng(seed);
  for (std::size_t i = m - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(order[i], order[j]);
  }

  std::vector<bool> in_train(m, false);
  for (std::size_t i = 0; i < k; ++i) in_train[order[i]] = true;

  Text train, test;
  train.source_name = text.source_name;
  test.source_name = text.source_name;
  for (std::size_t i = 0; i < m; ++i) {
    (in_train[i] ? train : test).sentences.push_back(text.sentences[i]);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace crossword
