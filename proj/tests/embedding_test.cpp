#include "crossword/embedding.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <thread>

#include "crossword/corpus.hpp"
#include "oracles.hpp"

namespace {

using namespace crossword;

SemanticVector random_vector(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SemanticVector v(dim);
  for (double& x : v) x = u(rng);
  return v;
}

TEST(ReferenceEmbedder, ZeroWordSentenceEmbedsToZero) {
  const ReferenceHashEmbedder provider(64);
  Sentence punctuation_only;
  punctuation_only.tokens.push_back(make_punctuation_token(","));
  punctuation_only.tokens.push_back(make_mask_token());
  const SemanticVector v = provider.embed(punctuation_only);
  for (double x : v) EXPECT_EQ(x, 0.0);
}

TEST(ReferenceEmbedder, DeterministicBitwise) {
  const ReferenceHashEmbedder provider;
  const Sentence s = tokenize_sentence("the quick brown fox.");
  EXPECT_EQ(provider.embed(s), provider.embed(s));
}

TEST(ReferenceEmbedder, MatchesIndependentOracle) {
  const ReferenceHashEmbedder provider(384);
  std::mt19937_64 rng(17);
  const Text text = oracle::random_text(rng, 20);
  for (const Sentence& s : text.sentences) {
    const SemanticVector got = provider.embed(s);
    const std::vector<double> want = oracle::embed_dense(s, 384);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i)
      EXPECT_NEAR(got[i], want[i], 1e-12);
  }
}

TEST(ReferenceEmbedder, RepeatedWordDiffersByItsBigram) {
  // "hello hello" adds a bigram bucket that "hello" lacks, so the two
  // directions differ; the oracle confirms both vectors.
  const ReferenceHashEmbedder provider(384);
  const Sentence once = tokenize_sentence("hello");
  const Sentence twice = tokenize_sentence("hello hello");
  const SemanticVector v1 = provider.embed(once);
  const SemanticVector v2 = provider.embed(twice);
  for (std::size_t i = 0; i < v1.size(); ++i) {
    EXPECT_NEAR(v1[i], oracle::embed_dense(once, 384)[i], 1e-12);
    EXPECT_NEAR(v2[i], oracle::embed_dense(twice, 384)[i], 1e-12);
  }
  EXPECT_LT(cosine_similarity(v1, v2), 1.0);
  EXPECT_GT(cosine_similarity(v1, v2), 0.9);  // unigram bucket dominates
}

TEST(ReferenceEmbedder, MaskBreaksBigramAdjacency) {
  const ReferenceHashEmbedder provider(384);
  const Sentence masked = tokenize_sentence("alpha # gamma");
  Sentence no_middle;
  no_middle.tokens.push_back(make_word_token("alpha"));
  no_middle.tokens.push_back(make_word_token("gamma"));
  // With the mask splitting the stream there is no (alpha, gamma) bigram,
  // so the masked variant differs from plain adjacency.
  EXPECT_LT(cosine_similarity(provider.embed(masked), provider.embed(no_middle)),
            1.0);
}

TEST(ReferenceEmbedder, SeedPermutationPreservesPairwiseCosine) {
  const ReferenceHashEmbedder base(128, 0);
  const ReferenceHashEmbedder permuted(128, 12345);
  std::mt19937_64 rng(29);
  const Text text = oracle::random_text(rng, 10);
  bool any_value_changed = false;
  for (std::size_t i = 0; i < text.sentences.size(); ++i) {
    const SemanticVector a0 = base.embed(text.sentences[i]);
    const SemanticVector a1 = permuted.embed(text.sentences[i]);
    if (a0 != a1) any_value_changed = true;
    for (std::size_t j = i + 1; j < text.sentences.size(); ++j) {
      const double sim0 =
          cosine_similarity(a0, base.embed(text.sentences[j]));
      const double sim1 =
          cosine_similarity(a1, permuted.embed(text.sentences[j]));
      EXPECT_NEAR(sim0, sim1, 1e-12);
    }
  }
  EXPECT_TRUE(any_value_changed);
}

TEST(ReferenceEmbedder, ConcurrentCallsAgree) {
  const ReferenceHashEmbedder provider;
  std::mt19937_64 rng(43);
  const Text text = oracle::random_text(rng, 40);
  std::vector<SemanticVector> expected;
  for (const Sentence& s : text.sentences) expected.push_back(provider.embed(s));

  std::vector<std::thread> workers;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 4; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = 0; i < text.sentences.size(); ++i) {
        if (provider.embed(text.sentences[i]) != expected[i]) ++mismatches;
      }
    });
  }
  for (std::thread& w : workers) w.join();
  EXPECT_EQ(mismatches.load(), 0);
}

TEST(CosineSimilarity, IdentityOrthogonalAntipodal) {
  const SemanticVector a = {1.0, 0.0, 0.0};
  const SemanticVector b = {0.0, 1.0, 0.0};
  SemanticVector neg = a;
  for (double& x : neg) x = -x;
  EXPECT_EQ(cosine_similarity(a, a), 1.0);
  EXPECT_EQ(cosine_similarity(a, b), 0.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(a, neg), -1.0);
}

TEST(CosineSimilarity, ZeroVectorConventions) {
  const SemanticVector zero(4, 0.0);
  const SemanticVector x = {1.0, 2.0, 3.0, 4.0};
  EXPECT_EQ(cosine_similarity(zero, x), 0.0);
  EXPECT_EQ(cosine_similarity(x, zero), 0.0);
  EXPECT_EQ(cosine_similarity(zero, zero), 1.0);
}

TEST(CosineSimilarity, DimensionMismatchThrows) {
  EXPECT_THROW(cosine_similarity({1.0, 2.0}, {1.0, 2.0, 3.0}),
               DimensionMismatch);
}

TEST(CosineSimilarity, SymmetricAndScaleInvariant) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const SemanticVector a = random_vector(rng, 16);
    const SemanticVector b = random_vector(rng, 16);
    const double sim = cosine_similarity(a, b);
    EXPECT_DOUBLE_EQ(sim, cosine_similarity(b, a));
    EXPECT_GE(sim, -1.0 - 1e-12);
    EXPECT_LE(sim, 1.0 + 1e-12);
    SemanticVector scaled = a;
    for (double& x : scaled) x *= 7.25;
    EXPECT_NEAR(sim, cosine_similarity(scaled, b), 1e-12);
    EXPECT_NEAR(sim, oracle::cosine(a, b), 1e-12);
  }
}

TEST(CosineDistance, PinnedValues) {
  const SemanticVector a = {3.0, 0.0};
  const SemanticVector b = {0.0, 5.0};
  SemanticVector neg = a;
  for (double& x : neg) x = -x;
  EXPECT_EQ(cosine_distance(a, a), 0.0);
  EXPECT_DOUBLE_EQ(cosine_distance(a, b), 1.0);
  EXPECT_DOUBLE_EQ(cosine_distance(a, neg), 2.0);
}

// Fixed vectors per sentence index; lets distortion tests pin distances.
class FixedProvider final : public EmbeddingProvider {
public:
  explicit FixedProvider(std::vector<SemanticVector> by_word_count)
      : vectors_(std::move(by_word_count)) {}

  std::size_t dimension() const override { return vectors_.front().size(); }
  ProviderKind kind() const override { return ProviderKind::reference_hash; }
  SemanticVector embed(const Sentence& s) const override {
    return vectors_.at(s.word_count() % vectors_.size());
  }

private:
  std::vector<SemanticVector> vectors_;
};

TEST(TextDistortion, IdenticalTextsHaveZeroDistortion) {
  const ReferenceHashEmbedder provider(64);
  std::mt19937_64 rng(37);
  const Text text = oracle::random_text(rng, 8);
  EXPECT_EQ(text_distortion(provider, text, text), 0.0);
}

TEST(TextDistortion, SingleSentenceArithmetic) {
  // One 5-word sentence at cosine distance 0.2 must cost exactly 1.0.
  const double c = 0.8;
  const double s = std::sqrt(1.0 - c * c);
  FixedProvider provider({{1.0, 0.0}, {c, s}});
  Text original, recovered;
  original.sentences.push_back(
      tokenize_sentence("alpha bravo charlie delta echo"));   // 5 words -> {1,0}
  recovered.sentences.push_back(tokenize_sentence("one two")); // 2 words -> {c,s}
  ASSERT_EQ(original.sentences[0].word_count() % 2, 1u);
  ASSERT_EQ(recovered.sentences[0].word_count() % 2, 0u);
  EXPECT_NEAR(text_distortion(provider, original, recovered), 5.0 * 0.2, 1e-12);
}

TEST(TextDistortion, MatchesBruteForceSum) {
  const ReferenceHashEmbedder provider(96);
  std::mt19937_64 rng(41);
  const Text original = oracle::random_text(rng, 10);
  Text recovered = original;
  // Perturb a few sentences.
  recovered.sentences[2] = tokenize_sentence("unrelated words here.");
  recovered.sentences[7] = tokenize_sentence("other content entirely.");

  double expected = 0.0;
  for (std::size_t i = 0; i < original.sentences.size(); ++i) {
    const double d =
        1.0 - oracle::cosine(oracle::embed_dense(original.sentences[i], 96),
                             oracle::embed_dense(recovered.sentences[i], 96));
    expected += static_cast<double>(original.sentences[i].word_count()) * d;
  }
  EXPECT_NEAR(text_distortion(provider, original, recovered), expected, 1e-9);
  EXPECT_GE(text_distortion(provider, original, recovered), 0.0);
}

TEST(TextDistortion, SentenceCountMismatchThrows) {
  const ReferenceHashEmbedder provider(32);
  const Text a = segment_text("One. Two.");
  const Text b = segment_text("One.");
  EXPECT_THROW(text_distortion(provider, a, b), SentenceCountMismatch);
}

}  // namespace
