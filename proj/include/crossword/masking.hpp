#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "crossword/corpus.hpp"
#include "crossword/embedding.hpp"
#include "crossword/errors.hpp"

namespace crossword {

// Per-word leave-one-out losses of a single sentence, indexed by word
// position 1..N (index 0 of the vectors is word position 1).
struct SentenceLosses {
  std::vector<double> raw;         // sigma_in
  std::vector<double> normalized;  // sigma-bar_in, sums to 1 per sentence
};

struct WordLossTable {
  std::vector<SentenceLosses> sentences;
};

struct VocabularyEntry {
  std::string word;  // normalized form
  // sentence index -> word positions (1-based) holding this word
  std::map<std::size_t, std::vector<std::size_t>> occurrences;
  std::size_t total_count = 0;
  double weight = 0.0;  // occurrence-averaged, length-weighted loss
};

enum class MaskPolicy : std::uint8_t {
  semantic = 0,
  frequency = 1,
  semantic_long_sentence = 2,
};

inline const char* mask_policy_name(MaskPolicy p) {
  switch (p) {
    case MaskPolicy::semantic: return "semantic";
    case MaskPolicy::frequency: return "frequency";
    case MaskPolicy::semantic_long_sentence: return "semantic-long";
  }
  return "unknown";
}

struct MaskPlan {
  std::set<std::string> masked_words;  // normalized forms
  double ratio = 0.0;
  MaskPolicy policy = MaskPolicy::semantic;
};

/// Leave-one-out loss per word: replace word n by the mask symbol, embed,
/// and take the cosine distance to the intact sentence. Normalized losses
/// sum to 1; a sentence whose raw losses all vanish gets the uniform 1/N.
inline SentenceLosses sentence_word_losses(const EmbeddingProvider& provider,
                                           const Sentence& sentence,
                                           char mask_symbol = kDefaultMaskSymbol) {
  std::vector<std::size_t> word_token_indices;
  for (std::size_t ti = 0; ti < sentence.tokens.size(); ++ti) {
    if (sentence.tokens[ti].kind == TokenKind::word)
      word_token_indices.push_back(ti);
  }

  // One batch: the intact sentence followed by each single-word masking.
  std::vector<Sentence> batch;
  batch.reserve(word_token_indices.size() + 1);
  batch.push_back(sentence);
  for (std::size_t ti : word_token_indices) {
    Sentence variant = sentence;
    variant.tokens[ti] = make_mask_token(mask_symbol);
    batch.push_back(std::move(variant));
  }
  const std::vector<SemanticVector> vectors = provider.embed_many(batch);

  SentenceLosses losses;
  losses.raw.reserve(word_token_indices.size());
  double sum = 0.0;
  for (std::size_t n = 0; n < word_token_indices.size(); ++n) {
    const double sigma = cosine_distance(vectors[0], vectors[n + 1]);
    losses.raw.push_back(sigma);
    sum += sigma;
  }

  losses.normalized.resize(losses.raw.size());
  if (sum > 0.0) {
    for (std::size_t n = 0; n < losses.raw.size(); ++n)
      losses.normalized[n] = losses.raw[n] / sum;
  } else if (!losses.raw.empty()) {
    const double uniform = 1.0 / static_cast<double>(losses.raw.size());
    for (double& x : losses.normalized) x = uniform;
  }
  return losses;
}

inline WordLossTable text_word_losses(const EmbeddingProvider& provider,
                                      const Text& text,
                                      char mask_symbol = kDefaultMaskSymbol) {
  WordLossTable table;
  table.sentences.reserve(text.sentences.size());
  for (const Sentence& s : text.sentences)
    table.sentences.push_back(sentence_word_losses(provider, s, mask_symbol));
  return table;
}

namespace detail {

// Vocabulary scaffolding shared by the semantic and frequency paths:
// distinct normalized words in lexicographic order with their occurrence
// positions recorded per sentence.
inline std::vector<VocabularyEntry> collect_vocabulary(const Text& text) {
  std::map<std::string, VocabularyEntry> by_word;
  for (std::size_t i = 0; i < text.sentences.size(); ++i) {
    std::size_t word_pos = 0;
    for (const Token& t : text.sentences[i].tokens) {
      if (t.kind != TokenKind::word) continue;
      ++word_pos;
      VocabularyEntry& entry = by_word[t.normalized];
      entry.word = t.normalized;
      entry.occurrences[i].push_back(word_pos);
      ++entry.total_count;
    }
  }
  std::vector<VocabularyEntry> entries;
  entries.reserve(by_word.size());
  for (auto& [_, entry] : by_word) entries.push_back(std::move(entry));
  return entries;
}

}  // namespace detail

/// Occurrence counts only (weights stay 0); enough for frequency masking.
inline std::vector<VocabularyEntry> word_frequencies(const Text& text) {
  return detail::collect_vocabulary(text);
}

/// Semantic weight of every distinct word: the mean over its occurrences
/// of N_i * sigma-bar_in, i.e. the length-weighted share of sentence
/// meaning the word carries, averaged over where it appears.
inline std::vector<VocabularyEntry> word_weights(
    const EmbeddingProvider& provider, const Text& text,
    char mask_symbol = kDefaultMaskSymbol) {
  const WordLossTable table = text_word_losses(provider, text, mask_symbol);
  std::vector<VocabularyEntry> entries = detail::collect_vocabulary(text);
  for (VocabularyEntry& entry : entries) {
    double weighted = 0.0;
    for (const auto& [sentence_index, positions] : entry.occurrences) {
      const double alpha = static_cast<double>(
          text.sentences[sentence_index].word_count());
      for (std::size_t pos : positions)
        weighted += alpha * table.sentences[sentence_index].normalized[pos - 1];
    }
    entry.weight = weighted / static_cast<double>(entry.total_count);
  }
  return entries;
}

/// Pick floor(ratio * |vocabulary|) words to mask. Semantic policies take
/// the lowest weights first (ties: higher count, then lexicographic);
/// the frequency policy takes the highest counts first.
inline MaskPlan select_masked_words(const std::vector<VocabularyEntry>& entries,
                                    double ratio, MaskPolicy policy) {
  if (!(ratio >= 0.0 && ratio < 1.0))
    throw InvalidRatio("masking ratio must lie in [0,1)");

  std::vector<const VocabularyEntry*> pool;
  pool.reserve(entries.size());
  for (const VocabularyEntry& e : entries) pool.push_back(&e);

  if (policy == MaskPolicy::frequency) {
    std::sort(pool.begin(), pool.end(),
              [](const VocabularyEntry* a, const VocabularyEntry* b) {
                if (a->total_count != b->total_count)
                  return a->total_count > b->total_count;
                return a->word < b->word;
              });
  } else {
    std::sort(pool.begin(), pool.end(),
              [](const VocabularyEntry* a, const VocabularyEntry* b) {
                if (a->weight != b->weight) return a->weight < b->weight;
                if (a->total_count != b->total_count)
                  return a->total_count > b->total_count;
                return a->word < b->word;
              });
  }

  MaskPlan plan;
  plan.ratio = ratio;
  plan.policy = policy;
  const std::size_t take = scaled_floor(ratio, pool.size());
  for (std::size_t i = 0; i < take; ++i)
    plan.masked_words.insert(pool[i]->word);
  return plan;
}

/// Replace every word token whose normalized form is in the plan with a
/// mask token; everything else is untouched.
inline Text mask_text(const Text& text, const MaskPlan& plan,
                      char mask_symbol = kDefaultMaskSymbol) {
  Text out = text;
  for (Sentence& sentence : out.sentences) {
    for (Token& t : sentence.tokens) {
      if (t.kind == TokenKind::word && plan.masked_words.count(t.normalized))
        t = make_mask_token(mask_symbol);
    }
  }
  return out;
}

struct CoalescedText {
  Text text;
  bool trailing_below_min = false;
};

inline constexpr std::size_t kDefaultLongSentenceMinWords = 227;
inline constexpr std::size_t kDefaultLongSentenceMaxWords = 256;

/// Greedily concatenate consecutive sentences into blocks of at most
/// max_words. The final block may fall short of min_words; that is
/// flagged rather than fixed.
inline CoalescedText coalesce_long_sentences(
    const Text& text, std::size_t min_words = kDefaultLongSentenceMinWords,
    std::size_t max_words = kDefaultLongSentenceMaxWords) {
  if (min_words > max_words)
    throw InvalidRatio("coalesce: min_words exceeds max_words");

  CoalescedText result;
  result.text.source_name = text.source_name;

  Sentence block;
  std::size_t block_words = 0;
  auto flush = [&] {
    if (!block.tokens.empty()) {
      result.text.sentences.push_back(std::move(block));
      block = Sentence{};
      block_words = 0;
    }
  };

  for (const Sentence& s : text.sentences) {
    const std::size_t words = s.word_count();
    if (!block.tokens.empty() && block_words + words > max_words) flush();
    block.tokens.insert(block.tokens.end(), s.tokens.begin(), s.tokens.end());
    block_words += words;
  }
  const std::size_t last_words = block_words;
  flush();
  result.trailing_below_min =
      !result.text.sentences.empty() && last_words < min_words;
  return result;
}

}  // namespace crossword
