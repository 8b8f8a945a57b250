#include "crossword/eval.hpp"

#include <gtest/gtest.h>

#include <random>

#include "crossword/corpus.hpp"
#include "crossword/pipeline.hpp"
#include "oracles.hpp"

namespace {

using namespace crossword;

Text filler_corpus(std::size_t sentences, std::uint64_t seed) {
  // Planted high-frequency filler words around a modest content vocabulary.
  static const char* const kFillers[] = {"the", "of", "and", "to", "a", "in"};
  static const char* const kContent[] = {
      "committee", "debate",  "report", "tobacco", "regulation", "fund",
      "liberty",   "session", "member", "draft",   "agenda",     "vote"};
  std::mt19937_64 rng(seed);
  std::string raw;
  for (std::size_t i = 0; i < sentences; ++i) {
    const std::size_t words = 6 + rng() % 6;
    for (std::size_t w = 0; w < words; ++w) {
      if (w > 0) raw += ' ';
      raw += (w % 2 == 0) ? kFillers[rng() % 6] : kContent[rng() % 12];
    }
    raw += ". ";
  }
  return segment_text(raw);
}

TEST(GroupBySentenceMaskRatio, NoMasksPutsEverythingInTheLowBucket) {
  const ReferenceHashEmbedder provider(64);
  std::mt19937_64 rng(191);
  const Text text = oracle::random_text(rng, 12);
  const GroupStats stats =
      group_by_sentence_mask_ratio(text, text, text, provider);
  EXPECT_EQ(stats.sizes[0], 12u);
  EXPECT_FALSE(stats.present[1]);
  EXPECT_FALSE(stats.present[2]);
  EXPECT_NEAR(stats.mean_similarity[0], 1.0, 1e-12);
}

TEST(GroupBySentenceMaskRatio, HalfMaskedSentenceLandsInTheMidBucket) {
  const ReferenceHashEmbedder provider(64);
  const Text original =
      segment_text("one two three four five six seven eight nine ten.");
  MaskPlan plan;
  plan.masked_words = {"one", "three", "five", "seven", "nine"};
  const Text masked = mask_text(original, plan);
  ASSERT_EQ(masked.sentences[0].mask_count(), 5u);
  const GroupStats stats =
      group_by_sentence_mask_ratio(masked, original, original, provider);
  EXPECT_EQ(stats.sizes[1], 1u);
  EXPECT_TRUE(stats.present[1]);
  EXPECT_FALSE(stats.present[0]);
}

TEST(GroupBySentenceMaskRatio, BucketsPartitionTheText) {
  const ReferenceHashEmbedder provider(64);
  const Text text = filler_corpus(60, 5);
  const std::vector<VocabularyEntry> entries = word_frequencies(text);
  const MaskPlan plan =
      select_masked_words(entries, 0.4, MaskPolicy::frequency);
  const Text masked = mask_text(text, plan);
  const GroupStats stats =
      group_by_sentence_mask_ratio(masked, text, masked, provider);
  EXPECT_EQ(stats.sizes[0] + stats.sizes[1] + stats.sizes[2],
            text.sentences.size());
}

TEST(GroupBySentenceMaskRatio, MisalignedTextsThrow) {
  const ReferenceHashEmbedder provider(64);
  const Text a = segment_text("One two. Three four.");
  const Text b = segment_text("One two.");
  EXPECT_THROW(group_by_sentence_mask_ratio(a, b, a, provider),
               AlignmentMismatch);
}

TEST(CompressText, RatioZeroRoundTripsThroughTheBlob) {
  const ReferenceHashEmbedder provider(64);
  const Text text = filler_corpus(30, 7);
  CompressOptions options;
  options.ratio = 0.0;
  const CompressOutput result = compress_text(text, provider, options);
  EXPECT_TRUE(result.plan.masked_words.empty());
  EXPECT_EQ(result.masked.sentences, text.sentences);
  const Text decoded = decode_blob_text(result.blob);
  EXPECT_EQ(decoded.sentences, text.sentences);
}

TEST(CompressText, HeaderCarriesPolicyAndRatio) {
  const ReferenceHashEmbedder provider(64);
  const Text text = filler_corpus(12, 9);
  CompressOptions options;
  options.ratio = 0.674;
  options.policy = MaskPolicy::frequency;
  const CompressOutput result = compress_text(text, provider, options);
  EXPECT_EQ(result.blob.header.policy,
            static_cast<std::uint8_t>(MaskPolicy::frequency));
  EXPECT_EQ(result.blob.header.ratio_milli, 674);
  EXPECT_EQ(result.blob.header.mask_symbol, '#');
}

TEST(CompressText, LongSentencePolicyScoresCoalescedBlocks) {
  const ReferenceHashEmbedder provider(64);
  const Text text = filler_corpus(40, 11);
  CompressOptions options;
  options.ratio = 0.3;
  options.policy = MaskPolicy::semantic_long_sentence;
  const CompressOutput result = compress_text(text, provider, options);
  // The plan still masks floor(0.3 * |K|) distinct words of the original.
  const std::size_t vocab = word_frequencies(text).size();
  EXPECT_EQ(result.plan.masked_words.size(), scaled_floor(0.3, vocab));
  const Text decoded = decode_blob_text(result.blob);
  EXPECT_EQ(decoded.sentences, result.masked.sentences);
}

TEST(CompressText, CustomMaskSymbolTravelsInTheHeader) {
  const ReferenceHashEmbedder provider(64);
  const Text text = filler_corpus(20, 31);
  CompressOptions options;
  options.ratio = 0.3;
  options.policy = MaskPolicy::frequency;
  options.mask_symbol = '@';
  const CompressOutput result = compress_text(text, provider, options);
  EXPECT_EQ(result.blob.header.mask_symbol, '@');

  const Text decoded = decode_blob_text(result.blob);
  ASSERT_EQ(decoded.sentences, result.masked.sentences);
  bool saw_mask = false;
  for (const Sentence& s : decoded.sentences) {
    for (const Token& t : s.tokens) {
      if (t.kind == TokenKind::mask) {
        EXPECT_EQ(t.surface, "@");
        saw_mask = true;
      }
    }
  }
  EXPECT_TRUE(saw_mask);
}

TEST(MaskPlanJson, RoundTripsAndStaysSorted) {
  MaskPlan plan;
  plan.policy = MaskPolicy::frequency;
  plan.ratio = 0.25;
  plan.masked_words = {"zulu", "alpha", "mike"};
  const nlohmann::json j = mask_plan_to_json(plan);
  EXPECT_EQ(j["policy"], "frequency");
  EXPECT_EQ(j["masked_words"][0], "alpha");
  EXPECT_EQ(j["masked_words"][2], "zulu");
  const MaskPlan parsed = mask_plan_from_json(j);
  EXPECT_EQ(parsed.masked_words, plan.masked_words);
  EXPECT_EQ(parsed.policy, plan.policy);
  EXPECT_DOUBLE_EQ(parsed.ratio, plan.ratio);
}

TEST(RunSweep, RatioZeroRowIsLosslessAndExact) {
  const ReferenceHashEmbedder provider(96);
  const Text corpus = filler_corpus(80, 13);
  const IdentityPredictor predictor;
  SweepOptions options;
  options.ratios = {0.0};
  options.policies = {MaskPolicy::semantic};
  const SweepReport report = run_sweep(corpus, provider, predictor, options);

  ASSERT_GE(report.rows.size(), 4u);  // one sweep row + three baselines
  const SweepRow& row = report.rows[0];
  EXPECT_EQ(row.method, "semantic");
  EXPECT_EQ(row.mean_similarity, 1.0);
  EXPECT_EQ(row.distortion, 0.0);

  // Accounting identity: the pipeline at ratio 0 equals plain LZ on the
  // test split plus the fixed header.
  const auto [train, test] =
      split_corpus(corpus, options.train_fraction, options.seed);
  const CompressedBlob plain = lz_encode(detokenize(test));
  EXPECT_DOUBLE_EQ(row.bits_per_word,
                   bits_per_word(plain, test.word_count()));
}

TEST(RunSweep, BaselineRowsPresent) {
  const ReferenceHashEmbedder provider(96);
  const Text corpus = filler_corpus(50, 17);
  const IdentityPredictor predictor;
  SweepOptions options;
  options.ratios = {0.0, 0.5};
  options.policies = {MaskPolicy::semantic, MaskPolicy::frequency};
  const SweepReport report = run_sweep(corpus, provider, predictor, options);

  ASSERT_EQ(report.rows.size(), 2 * 2 + 3u);
  EXPECT_EQ(report.rows[report.rows.size() - 3].method, "huffman");
  EXPECT_EQ(report.rows[report.rows.size() - 2].method, "huffman+punct");
  EXPECT_EQ(report.rows[report.rows.size() - 1].method, "utf8");
  for (std::size_t i = report.rows.size() - 3; i < report.rows.size(); ++i) {
    EXPECT_EQ(report.rows[i].mean_similarity, 1.0);
    EXPECT_GT(report.rows[i].bits_per_word, 0.0);
  }
  // Sweep rows are ordered by (policy, ratio).
  EXPECT_EQ(report.rows[0].method, "semantic");
  EXPECT_EQ(report.rows[1].method, "semantic");
  EXPECT_LT(report.rows[0].ratio, report.rows[1].ratio);
  EXPECT_EQ(report.rows[2].method, "frequency");
}

TEST(RunSweep, DeterministicCsvAcrossReruns) {
  const ReferenceHashEmbedder provider(96);
  const Text corpus = filler_corpus(60, 19);
  const auto predictor = train_predictor(PredictorKind::ngram,
      split_corpus(corpus, 0.9, 42).first);
  SweepOptions options;
  options.ratios = {0.0, 0.3, 0.6};
  options.policies = {MaskPolicy::semantic, MaskPolicy::frequency};
  options.groups = true;

  const std::string csv1 =
      run_sweep(corpus, provider, *predictor, options).to_csv(true);
  const std::string csv2 =
      run_sweep(corpus, provider, *predictor, options).to_csv(true);
  EXPECT_EQ(csv1, csv2);
  EXPECT_NE(csv1.find("method,ratio,bits_per_word"), std::string::npos);
  EXPECT_NE(csv1.find("group_high_n"), std::string::npos);
}

TEST(RunSweep, LongSentencePolicyProducesRows) {
  const ReferenceHashEmbedder provider(96);
  const Text corpus = filler_corpus(60, 21);
  const IdentityPredictor predictor;
  SweepOptions options;
  options.ratios = {0.0, 0.4};
  options.policies = {MaskPolicy::semantic_long_sentence};
  const SweepReport report = run_sweep(corpus, provider, predictor, options);
  ASSERT_EQ(report.rows.size(), 2u + 3u);
  EXPECT_EQ(report.rows[0].method, "semantic-long");
  EXPECT_EQ(report.rows[0].mean_similarity, 1.0);  // ratio 0 is lossless
  EXPECT_LT(report.rows[1].mean_similarity, 1.0);
}

TEST(RunSweep, MaskingReducesBitsPerWordOnFillerCorpus) {
  const ReferenceHashEmbedder provider(96);
  const Text corpus = filler_corpus(200, 23);
  const IdentityPredictor predictor;
  SweepOptions options;
  options.ratios = {0.0, 0.6};
  options.policies = {MaskPolicy::semantic, MaskPolicy::frequency};
  const SweepReport report = run_sweep(corpus, provider, predictor, options);

  // Rows: semantic 0.0, semantic 0.6, frequency 0.0, frequency 0.6.
  EXPECT_LT(report.rows[1].bits_per_word, report.rows[0].bits_per_word);
  EXPECT_LT(report.rows[3].bits_per_word, report.rows[2].bits_per_word);
}

}  // namespace
