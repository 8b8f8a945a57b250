#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <string>
#include <vector>

#include "crossword/corpus.hpp"
#include "crossword/distribution.hpp"
#include "crossword/errors.hpp"

namespace crossword {

// Reserved escape symbol for out-of-vocabulary words; an ASCII control
// byte, so it can never collide with a tokenized word.
inline const std::string kHuffmanEscape = "\x1b";

struct HuffmanCode {
  std::map<std::string, std::string> codewords;  // symbol -> "0101..."
  FiniteDistribution source;

  double expected_length() const {
    double total = 0.0;
    for (const auto& [symbol, code] : codewords)
      total += source.probs.at(symbol) * static_cast<double>(code.size());
    return total;
  }

  double kraft_sum() const {
    double sum = 0.0;
    for (const auto& [_, code] : codewords)
      sum += std::ldexp(1.0, -static_cast<int>(code.size()));
    return sum;
  }
};

/// Huffman construction with deterministic tie-breaking (equal weights
/// merge the node containing the lexicographically smallest symbol first)
/// and canonical codeword assignment.
inline HuffmanCode huffman_build(const FiniteDistribution& dist) {
  validate_distribution(dist);
  if (dist.size() < 2)
    throw InvalidDistribution("Huffman needs at least 2 symbols");
  for (const auto& [symbol, p] : dist.probs) {
    if (p <= 0.0)
      throw InvalidDistribution("symbol '" + symbol +
                                "' has non-positive probability");
  }

  struct Node {
    double prob;
    std::string min_symbol;  // lexicographically smallest contained symbol
    int left = -1, right = -1;
    int symbol_index = -1;
  };
  std::vector<Node> nodes;
  std::vector<std::string> symbols;
  for (const auto& [symbol, p] : dist.probs) {
    nodes.push_back({p, symbol, -1, -1, static_cast<int>(symbols.size())});
    symbols.push_back(symbol);
  }

  auto heap_greater = [&nodes](int a, int b) {
    if (nodes[a].prob != nodes[b].prob) return nodes[a].prob > nodes[b].prob;
    return nodes[a].min_symbol > nodes[b].min_symbol;
  };
  std::priority_queue<int, std::vector<int>, decltype(heap_greater)> heap(
      heap_greater);
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) heap.push(i);

  while (heap.size() > 1) {
    const int a = heap.top();
    heap.pop();
    const int b = heap.top();
    heap.pop();
    Node parent;
    parent.prob = nodes[a].prob + nodes[b].prob;
    parent.min_symbol = std::min(nodes[a].min_symbol, nodes[b].min_symbol);
    parent.left = a;
    parent.right = b;
    nodes.push_back(parent);
    heap.push(static_cast<int>(nodes.size()) - 1);
  }

  // Depths via an explicit stack, then canonical assignment.
  std::vector<int> depth(symbols.size(), 0);
  std::vector<std::pair<int, int>> stack{{static_cast<int>(nodes.size()) - 1, 0}};
  while (!stack.empty()) {
    auto [idx, d] = stack.back();
    stack.pop_back();
    const Node& node = nodes[idx];
    if (node.symbol_index >= 0) {
      depth[node.symbol_index] = d;
      continue;
    }
    stack.push_back({node.left, d + 1});
    stack.push_back({node.right, d + 1});
  }

  std::vector<std::size_t> order(symbols.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (depth[a] != depth[b]) return depth[a] < depth[b];
    return symbols[a] < symbols[b];
  });

  HuffmanCode code;
  code.source = dist;
  std::uint64_t next = 0;
  int prev_len = 0;
  for (std::size_t idx : order) {
    const int len = depth[idx];
    next <<= (len - prev_len);
    prev_len = len;
    std::string bits(static_cast<std::size_t>(len), '0');
    for (int b = 0; b < len; ++b) {
      if (next & (1ull << (len - 1 - b))) bits[static_cast<std::size_t>(b)] = '1';
    }
    code.codewords[symbols[idx]] = std::move(bits);
    ++next;
  }
  return code;
}

/// Codebook from word counts with one escape symbol (pseudo-count 1) so
/// out-of-vocabulary words remain encodable.
inline HuffmanCode huffman_from_counts(
    const std::map<std::string, std::uint64_t>& counts) {
  std::map<std::string, std::uint64_t> with_escape = counts;
  with_escape[kHuffmanEscape] += 1;
  return huffman_build(distribution_from_counts(with_escape));
}

/// Word counts of a text over normalized word forms; optionally also
/// counts punctuation surfaces as symbols.
inline std::map<std::string, std::uint64_t> word_counts(
    const Text& text, bool include_punctuation = false) {
  std::map<std::string, std::uint64_t> counts;
  for (const Sentence& s : text.sentences) {
    for (const Token& t : s.tokens) {
      if (t.kind == TokenKind::word) {
        ++counts[t.normalized];
      } else if (include_punctuation && t.kind == TokenKind::punctuation) {
        ++counts[t.surface];
      }
    }
  }
  return counts;
}

/// Bits per word when coding the text against the codebook. A word with
/// no codeword costs the escape codeword plus 8 bits per byte of the
/// word. Punctuation coding is optional and never changes the
/// denominator, which is always the word count.
inline double huffman_measure(const HuffmanCode& code, const Text& text,
                              bool include_punctuation = false) {
  const auto escape_it = code.codewords.find(kHuffmanEscape);
  auto symbol_bits = [&](const std::string& symbol) -> double {
    if (auto it = code.codewords.find(symbol); it != code.codewords.end())
      return static_cast<double>(it->second.size());
    if (escape_it == code.codewords.end())
      throw InvalidDistribution("symbol '" + symbol +
                                "' has no codeword and no escape exists");
    return static_cast<double>(escape_it->second.size()) +
           8.0 * static_cast<double>(symbol.size());
  };

  double total_bits = 0.0;
  std::size_t words = 0;
  for (const Sentence& s : text.sentences) {
    for (const Token& t : s.tokens) {
      if (t.kind == TokenKind::word) {
        total_bits += symbol_bits(t.normalized);
        ++words;
      } else if (include_punctuation && t.kind == TokenKind::punctuation) {
        total_bits += symbol_bits(t.surface);
      }
    }
  }
  if (words == 0) throw ZeroWords("huffman_measure needs at least one word");
  return total_bits / static_cast<double>(words);
}

/// Plain UTF-8 baseline: 8 bits per byte of the detokenized text,
/// divided by the word count. Empty text measures 0.
inline double utf8_measure(const Text& text) {
  const std::size_t words = text.word_count();
  if (words == 0) return 0.0;
  return 8.0 * static_cast<double>(detokenize(text).size()) /
         static_cast<double>(words);
}

}  // namespace crossword
