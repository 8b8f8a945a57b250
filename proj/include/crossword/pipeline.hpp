#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "crossword/corpus.hpp"
#include "crossword/demask.hpp"
#include "crossword/embedding.hpp"
#include "crossword/lzw.hpp"
#include "crossword/masking.hpp"

namespace crossword {

struct CompressOptions {
  double ratio = 0.0;
  MaskPolicy policy = MaskPolicy::semantic;
  char mask_symbol = kDefaultMaskSymbol;
  std::size_t long_min_words = kDefaultLongSentenceMinWords;
  std::size_t long_max_words = kDefaultLongSentenceMaxWords;
};

struct CompressOutput {
  CompressedBlob blob;
  MaskPlan plan;
  Text masked;
  std::size_t source_word_count = 0;
};

/// Encoder pipeline: score the vocabulary (on coalesced blocks for the
/// long-sentence policy, cheap counts for the frequency policy), pick the
/// mask set, mask, detokenize, and LZ-encode.
inline CompressOutput compress_text(const Text& text,
                                    const EmbeddingProvider& provider,
                                    const CompressOptions& options) {
  std::vector<VocabularyEntry> entries;
  switch (options.policy) {
    case MaskPolicy::frequency:
      entries = word_frequencies(text);
      break;
    case MaskPolicy::semantic_long_sentence: {
      const CoalescedText blocks = coalesce_long_sentences(
          text, options.long_min_words, options.long_max_words);
      entries = word_weights(provider, blocks.text, options.mask_symbol);
      break;
    }
    case MaskPolicy::semantic:
      entries = word_weights(provider, text, options.mask_symbol);
      break;
  }

  CompressOutput out;
  out.plan = select_masked_words(entries, options.ratio, options.policy);
  out.masked = mask_text(text, out.plan, options.mask_symbol);
  out.source_word_count = text.word_count();

  BlobHeader header;
  header.mask_symbol = options.mask_symbol;
  header.policy = static_cast<std::uint8_t>(options.policy);
  header.ratio_milli =
      static_cast<std::uint16_t>(std::lround(options.ratio * 1000.0));
  out.blob = lz_encode(detokenize(out.masked), header);
  return out;
}

/// LZ-decode a blob and re-tokenize the masked text it carries; the mask
/// symbol travels in the header.
inline Text decode_blob_text(const CompressedBlob& blob) {
  return segment_text(lz_decode_string(blob), blob.header.mask_symbol);
}

/// Full decoder: decode, then fill masks with the predictor's guesses.
inline Text decompress_blob(const CompressedBlob& blob,
                            const Predictor& predictor) {
  return demask_text(predictor, decode_blob_text(blob));
}

inline nlohmann::json mask_plan_to_json(const MaskPlan& plan) {
  nlohmann::json j;
  j["policy"] = mask_policy_name(plan.policy);
  j["ratio"] = plan.ratio;
  j["masked_words"] = plan.masked_words;  // std::set keeps the list sorted
  return j;
}

inline MaskPlan mask_plan_from_json(const nlohmann::json& j) {
  MaskPlan plan;
  const std::string policy = j.at("policy").get<std::string>();
  if (policy == "semantic") {
    plan.policy = MaskPolicy::semantic;
  } else if (policy == "frequency") {
    plan.policy = MaskPolicy::frequency;
  } else if (policy == "semantic-long") {
    plan.policy = MaskPolicy::semantic_long_sentence;
  } else {
    throw UnknownSymbol("unknown mask policy '" + policy + "'");
  }
  plan.ratio = j.at("ratio").get<double>();
  for (const auto& w : j.at("masked_words"))
    plan.masked_words.insert(w.get<std::string>());
  return plan;
}

}  // namespace crossword
