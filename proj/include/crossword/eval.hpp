#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "crossword/corpus.hpp"
#include "crossword/demask.hpp"
#include "crossword/embedding.hpp"
#include "crossword/huffman.hpp"
#include "crossword/lzw.hpp"
#include "crossword/masking.hpp"
#include "crossword/pipeline.hpp"

namespace crossword {

// Sentence-masking-ratio buckets: [0,0.3), [0.3,0.6), [0.6,1].
inline constexpr std::size_t kGroupCount = 3;

struct GroupStats {
  std::array<std::size_t, kGroupCount> sizes{};
  std::array<double, kGroupCount> mean_similarity{};
  std::array<bool, kGroupCount> present{};
};

/// Bucket sentences by the share of their word positions that are masked
/// and report the mean cosine similarity between original and recovered
/// sentence per bucket. Empty buckets are reported absent.
inline GroupStats group_by_sentence_mask_ratio(const Text& masked,
                                               const Text& original,
                                               const Text& recovered,
                                               const EmbeddingProvider& provider) {
  const std::size_t m = original.sentences.size();
  if (masked.sentences.size() != m || recovered.sentences.size() != m)
    throw AlignmentMismatch("texts are not sentence-aligned");

  GroupStats stats;
  std::array<double, kGroupCount> sums{};
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t words = original.sentences[i].word_count();
    if (masked.sentences[i].tokens.size() != original.sentences[i].tokens.size())
      throw AlignmentMismatch("sentence " + std::to_string(i) +
                              " has a different token count after masking");
    const double gamma =
        words == 0 ? 0.0
                   : static_cast<double>(masked.sentences[i].mask_count()) /
                         static_cast<double>(words);
    const std::size_t bucket = gamma < 0.3 ? 0 : (gamma < 0.6 ? 1 : 2);
    const double eta = cosine_similarity(provider.embed(original.sentences[i]),
                                         provider.embed(recovered.sentences[i]));
    sums[bucket] += eta;
    ++stats.sizes[bucket];
  }
  for (std::size_t g = 0; g < kGroupCount; ++g) {
    stats.present[g] = stats.sizes[g] > 0;
    stats.mean_similarity[g] =
        stats.present[g] ? sums[g] / static_cast<double>(stats.sizes[g]) : 0.0;
  }
  return stats;
}

struct SweepRow {
  std::string method;
  double ratio = 0.0;
  double bits_per_word = 0.0;
  double mean_similarity = 0.0;
  double distortion = 0.0;
  std::optional<GroupStats> groups;
};

struct SweepOptions {
  std::vector<double> ratios{0.0};
  std::vector<MaskPolicy> policies{MaskPolicy::semantic};
  double train_fraction = 0.9;
  std::uint64_t seed = 42;
  bool groups = false;
  char mask_symbol = kDefaultMaskSymbol;
  std::size_t long_min_words = kDefaultLongSentenceMinWords;
  std::size_t long_max_words = kDefaultLongSentenceMaxWords;
};

struct SweepReport {
  std::vector<SweepRow> rows;

  std::string to_csv(bool with_groups) const {
    std::string out =
        "method,ratio,bits_per_word,mean_cosine_similarity,weighted_distortion";
    if (with_groups) {
      out += ",group_low_n,group_low_mean,group_mid_n,group_mid_mean,"
             "group_high_n,group_high_mean";
    }
    out += '\n';
    char buf[64];
    auto num = [&buf](double v) {
      std::snprintf(buf, sizeof buf, "%.6f", v);
      return std::string(buf);
    };
    for (const SweepRow& row : rows) {
      out += row.method;
      out += ',' + num(row.ratio);
      out += ',' + num(row.bits_per_word);
      out += ',' + num(row.mean_similarity);
      out += ',' + num(row.distortion);
      if (with_groups) {
        for (std::size_t g = 0; g < kGroupCount; ++g) {
          if (row.groups.has_value() && row.groups->present[g]) {
            out += ',' + std::to_string(row.groups->sizes[g]);
            out += ',' + num(row.groups->mean_similarity[g]);
          } else {
            out += ",,";  // absent bucket
          }
        }
      }
      out += '\n';
    }
    return out;
  }
};

/// The evaluation harness: split the corpus, parameterize every method on
/// the training split, then mask / encode / decode / demask the test
/// split and account rate and semantic fidelity per (policy, ratio).
/// Appends Huffman (word-level and punctuation-inclusive) and UTF-8
/// baseline rows.
inline SweepReport run_sweep(const Text& corpus,
                             const EmbeddingProvider& provider,
                             const Predictor& predictor,
                             const SweepOptions& options) {
  auto [train, test] = split_corpus(corpus, options.train_fraction, options.seed);
  const std::size_t test_words = test.word_count();

  // Score once per policy; plans for all ratios reuse the same entries.
  std::vector<std::vector<VocabularyEntry>> entries_per_policy;
  for (MaskPolicy policy : options.policies) {
    switch (policy) {
      case MaskPolicy::frequency:
        entries_per_policy.push_back(word_frequencies(train));
        break;
      case MaskPolicy::semantic_long_sentence: {
        const CoalescedText blocks = coalesce_long_sentences(
            train, options.long_min_words, options.long_max_words);
        entries_per_policy.push_back(
            word_weights(provider, blocks.text, options.mask_symbol));
        break;
      }
      case MaskPolicy::semantic:
        entries_per_policy.push_back(
            word_weights(provider, train, options.mask_symbol));
        break;
    }
  }

  // Deterministic row order: policies in enum order, ratios ascending.
  std::vector<std::pair<std::size_t, double>> jobs;
  for (std::size_t pi = 0; pi < options.policies.size(); ++pi)
    for (double ratio : options.ratios) jobs.push_back({pi, ratio});
  std::sort(jobs.begin(), jobs.end(), [&](const auto& a, const auto& b) {
    const auto pa = static_cast<std::uint8_t>(options.policies[a.first]);
    const auto pb = static_cast<std::uint8_t>(options.policies[b.first]);
    if (pa != pb) return pa < pb;
    return a.second < b.second;
  });

  SweepReport report;
  for (const auto& [pi, ratio] : jobs) {
    const MaskPolicy policy = options.policies[pi];
    const MaskPlan plan =
        select_masked_words(entries_per_policy[pi], ratio, policy);
    const Text masked = mask_text(test, plan, options.mask_symbol);

    BlobHeader header;
    header.mask_symbol = options.mask_symbol;
    header.policy = static_cast<std::uint8_t>(policy);
    header.ratio_milli = static_cast<std::uint16_t>(std::lround(ratio * 1000.0));
    const CompressedBlob blob = lz_encode(detokenize(masked), header);

    const Text decoded = decode_blob_text(blob);
    const Text recovered = demask_text(predictor, decoded);

    SweepRow row;
    row.method = mask_policy_name(policy);
    row.ratio = ratio;
    row.bits_per_word = bits_per_word(blob, test_words);
    double similarity_sum = 0.0;
    for (std::size_t i = 0; i < test.sentences.size(); ++i) {
      similarity_sum +=
          cosine_similarity(provider.embed(test.sentences[i]),
                            provider.embed(recovered.sentences[i]));
    }
    row.mean_similarity =
        test.sentences.empty()
            ? 1.0
            : similarity_sum / static_cast<double>(test.sentences.size());
    row.distortion = text_distortion(provider, test, recovered);
    if (options.groups)
      row.groups = group_by_sentence_mask_ratio(masked, test, recovered, provider);
    report.rows.push_back(std::move(row));
  }

  // Lossless baselines, parameterized on the training split.
  {
    SweepRow huffman_row;
    huffman_row.method = "huffman";
    const HuffmanCode code = huffman_from_counts(word_counts(train, false));
    huffman_row.bits_per_word = huffman_measure(code, test, false);
    huffman_row.mean_similarity = 1.0;
    report.rows.push_back(std::move(huffman_row));

    SweepRow huffman_punct_row;
    huffman_punct_row.method = "huffman+punct";
    const HuffmanCode punct_code = huffman_from_counts(word_counts(train, true));
    huffman_punct_row.bits_per_word = huffman_measure(punct_code, test, true);
    huffman_punct_row.mean_similarity = 1.0;
    report.rows.push_back(std::move(huffman_punct_row));

    SweepRow utf8_row;
    utf8_row.method = "utf8";
    utf8_row.bits_per_word = utf8_measure(test);
    utf8_row.mean_similarity = 1.0;
    report.rows.push_back(std::move(utf8_row));
  }
  return report;
}

}  // namespace crossword
