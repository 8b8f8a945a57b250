#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "crossword/corpus.hpp"
#include "crossword/errors.hpp"

namespace crossword {

using SemanticVector = std::vector<double>;

inline constexpr std::size_t kDefaultEmbeddingDim = 384;

enum class ProviderKind : std::uint8_t { reference_hash, external_service };

class EmbeddingProvider {
public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dimension() const = 0;
  virtual ProviderKind kind() const = 0;
  virtual SemanticVector embed(const Sentence& sentence) const = 0;

  // Batched variant; external providers override this with one round trip.
  virtual std::vector<SemanticVector> embed_many(
      const std::vector<Sentence>& sentences) const {
    std::vector<SemanticVector> out;
    out.reserve(sentences.size());
    for (const Sentence& s : sentences) out.push_back(embed(s));
    return out;
  }
};

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Deterministic stand-in for a neural sentence embedder: hashed unigrams
/// (weight 1.0) plus hashed adjacent-word bigrams (weight 0.5), then L2
/// normalization. Punctuation is invisible; a mask token contributes
/// nothing and breaks bigram adjacency. It makes pipelines reproducible
/// and is not claimed to be semantically faithful.
class ReferenceHashEmbedder final : public EmbeddingProvider {
public:
  explicit ReferenceHashEmbedder(std::size_t dimension = kDefaultEmbeddingDim,
                                 std::uint64_t bucket_seed = 0)
      : dim_(dimension), bucket_perm_(dimension) {
    for (std::size_t i = 0; i < dimension; ++i) bucket_perm_[i] = i;
    if (bucket_seed != 0) {
      // A seeded bucket permutation: rearranges coordinates without
      // changing any pairwise cosine between same-seed embeddings.
      std::mt19937_64 rng(bucket_seed);
      for (std::size_t i = dimension - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(bucket_perm_[i], bucket_perm_[j]);
      }
    }
  }

  std::size_t dimension() const override { return dim_; }
  ProviderKind kind() const override { return ProviderKind::reference_hash; }

  SemanticVector embed(const Sentence& sentence) const override {
    SemanticVector v(dim_, 0.0);
    const std::string* prev = nullptr;
    for (const Token& t : sentence.tokens) {
      if (t.kind == TokenKind::punctuation) continue;
      if (t.kind == TokenKind::mask) {
        prev = nullptr;  // a masked slot separates its neighbours
        continue;
      }
      v[bucket(t.normalized)] += 1.0;
      if (prev != nullptr) {
        v[bucket(*prev + kBigramJoiner + t.normalized)] += 0.5;
      }
      prev = &t.normalized;
    }

    double norm_sq = 0.0;
    for (double x : v) norm_sq += x * x;
    if (norm_sq > 0.0) {
      const double inv = 1.0 / std::sqrt(norm_sq);
      for (double& x : v) x *= inv;
    }
    return v;
  }

  static constexpr char kBigramJoiner = '\x1f';

private:
  std::size_t bucket(std::string_view key) const {
    return bucket_perm_[fnv1a64(key) % dim_];
  }

  std::size_t dim_;
  std::vector<std::size_t> bucket_perm_;
};

/// Cosine similarity with pinned degenerate cases: two zero vectors are
/// deemed identical (1), exactly one zero vector yields 0.
inline double cosine_similarity(const SemanticVector& a,
                                const SemanticVector& b) {
  if (a.size() != b.size())
    throw DimensionMismatch("cosine: " + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()));
  if (a == b) {
    for (double x : a)
      if (x != 0.0) return 1.0;
    return 1.0;  // both zero
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 && nb == 0.0) return 1.0;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline double cosine_distance(const SemanticVector& a,
                              const SemanticVector& b) {
  return 1.0 - cosine_similarity(a, b);
}

/// Length-weighted distortion between aligned texts:
/// sum over sentences of N_i * cosine_distance, N_i from the original.
inline double text_distortion(const EmbeddingProvider& provider,
                              const Text& original, const Text& recovered) {
  if (original.sentences.size() != recovered.sentences.size())
    throw SentenceCountMismatch(
        std::to_string(original.sentences.size()) + " vs " +
        std::to_string(recovered.sentences.size()));
  double total = 0.0;
  for (std::size_t i = 0; i < original.sentences.size(); ++i) {
    const double dist =
        cosine_distance(provider.embed(original.sentences[i]),
                        provider.embed(recovered.sentences[i]));
    total += static_cast<double>(original.sentences[i].word_count()) * dist;
  }
  return total;
}

}  // namespace crossword
