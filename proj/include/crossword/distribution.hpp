#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>

#include "crossword/errors.hpp"

namespace crossword {

inline constexpr char kMergedSymbol[] = "#";

// Probabilities over symbols; the map keeps iteration deterministic.
struct FiniteDistribution {
  std::map<std::string, double> probs;

  std::size_t size() const { return probs.size(); }
};

inline void validate_distribution(const FiniteDistribution& dist,
                                  double tolerance = 1e-9) {
  double sum = 0.0;
  for (const auto& [symbol, p] : dist.probs) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw InvalidDistribution("probability of '" + symbol +
                                "' is negative or not finite");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tolerance)
    throw InvalidDistribution("probabilities sum to " + std::to_string(sum));
}

inline FiniteDistribution make_distribution(
    std::map<std::string, double> probs) {
  FiniteDistribution dist{std::move(probs)};
  validate_distribution(dist);
  return dist;
}

template <typename Counts>
inline FiniteDistribution distribution_from_counts(const Counts& counts) {
  double total = 0.0;
  for (const auto& [_, c] : counts) total += static_cast<double>(c);
  if (total <= 0.0) throw InvalidDistribution("no counts");
  FiniteDistribution dist;
  for (const auto& [symbol, c] : counts)
    dist.probs[symbol] = static_cast<double>(c) / total;
  return dist;
}

/// Shannon entropy in bits, with 0 log 0 = 0.
inline double entropy(const FiniteDistribution& dist) {
  double h = 0.0;
  for (const auto& [_, p] : dist.probs) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

/// Replace two symbols by the shared mask symbol carrying their combined
/// probability (the word-merging abstraction of masking).
inline FiniteDistribution merge_pair(const FiniteDistribution& dist,
                                     const std::string& a,
                                     const std::string& b) {
  if (a == b) throw UnknownSymbol("cannot merge '" + a + "' with itself");
  const auto ia = dist.probs.find(a);
  const auto ib = dist.probs.find(b);
  if (ia == dist.probs.end()) throw UnknownSymbol("'" + a + "' not in distribution");
  if (ib == dist.probs.end()) throw UnknownSymbol("'" + b + "' not in distribution");

  FiniteDistribution merged;
  merged.probs = dist.probs;
  merged.probs.erase(a);
  merged.probs.erase(b);
  merged.probs[kMergedSymbol] += ia->second + ib->second;
  return merged;
}

}  // namespace crossword
