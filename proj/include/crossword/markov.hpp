#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "crossword/distribution.hpp"
#include "crossword/errors.hpp"

namespace crossword {

struct MarkovChain {
  std::vector<std::string> states;
  std::vector<std::vector<double>> transitions;  // row-stochastic
};

inline void validate_chain(const MarkovChain& chain, double tolerance = 1e-9) {
  const std::size_t n = chain.states.size();
  if (n == 0) throw InvalidDistribution("chain has no states");
  if (chain.transitions.size() != n)
    throw InvalidDistribution("transition matrix is not square");
  for (const auto& row : chain.transitions) {
    if (row.size() != n)
      throw InvalidDistribution("transition matrix is not square");
    double sum = 0.0;
    for (double p : row) {
      if (!(p >= 0.0) || !std::isfinite(p))
        throw InvalidDistribution("negative or non-finite transition");
      sum += p;
    }
    if (std::abs(sum - 1.0) > tolerance)
      throw InvalidDistribution("transition row sums to " + std::to_string(sum));
  }
}

namespace markov_detail {

// Reachability over positive-probability edges, optionally reversed.
inline std::vector<int> bfs_levels(const MarkovChain& chain, bool reversed) {
  const std::size_t n = chain.states.size();
  std::vector<int> level(n, -1);
  std::vector<std::size_t> queue{0};
  level[0] = 0;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const std::size_t u = queue[qi];
    for (std::size_t v = 0; v < n; ++v) {
      const double p = reversed ? chain.transitions[v][u] : chain.transitions[u][v];
      if (p > 0.0 && level[v] < 0) {
        level[v] = level[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return level;
}

}  // namespace markov_detail

/// Strong connectivity of the positive-transition digraph.
inline bool is_irreducible(const MarkovChain& chain) {
  for (bool reversed : {false, true}) {
    for (int l : markov_detail::bfs_levels(chain, reversed)) {
      if (l < 0) return false;
    }
  }
  return true;
}

/// Period via BFS levels: for a strongly connected graph the period is
/// gcd over edges (u,v) of level(u) + 1 - level(v). Aperiodic iff 1.
inline bool is_aperiodic(const MarkovChain& chain) {
  const std::vector<int> level = markov_detail::bfs_levels(chain, false);
  const std::size_t n = chain.states.size();
  long long g = 0;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (chain.transitions[u][v] > 0.0)
        g = std::gcd(g, static_cast<long long>(level[u]) + 1 - level[v]);
    }
  }
  return g == 1;
}

/// Unique invariant law of an ergodic chain, by power iteration from the
/// uniform start until the L1 residual of pi*P - pi drops below tol.
inline FiniteDistribution stationary_distribution(const MarkovChain& chain,
                                                  double residual_tol = 1e-12,
                                                  std::size_t max_iterations = 100000) {
  validate_chain(chain);
  if (!is_irreducible(chain) || !is_aperiodic(chain))
    throw NotErgodic("chain is not irreducible and aperiodic");

  const std::size_t n = chain.states.size();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n, 0.0);
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    for (double& x : next) x = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j)
        next[j] += pi[i] * chain.transitions[i][j];
    }
    double sum = 0.0;
    for (double x : next) sum += x;
    for (double& x : next) x /= sum;

    double residual = 0.0;
    for (std::size_t j = 0; j < n; ++j) residual += std::abs(next[j] - pi[j]);
    pi.swap(next);
    if (residual < residual_tol) {
      FiniteDistribution dist;
      for (std::size_t j = 0; j < n; ++j) dist.probs[chain.states[j]] = pi[j];
      return dist;
    }
  }
  throw NoConvergence("power iteration did not reach residual " +
                      std::to_string(residual_tol));
}

}  // namespace crossword
