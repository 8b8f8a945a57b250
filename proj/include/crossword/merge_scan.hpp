#pragma once

#include <string>
#include <vector>

#include "crossword/distribution.hpp"
#include "crossword/errors.hpp"
#include "crossword/huffman.hpp"

namespace crossword {

struct MergeScanRow {
  std::string first, second;
  double merged_entropy = 0.0;
  double entropy_reduction = 0.0;       // base entropy minus merged entropy
  double merged_huffman_length = 0.0;   // expected codeword length after merge
};

struct MergeScanReport {
  double base_entropy = 0.0;
  double base_huffman_length = 0.0;
  std::vector<MergeScanRow> rows;  // all pairs, lexicographic order
  std::size_t min_merged_entropy_index = 0;
  std::size_t min_reduction_index = 0;
};

/// Exhaustive word-merging scan: for every pair of symbols, the entropy
/// of the merged distribution, the entropy given up by merging, and the
/// Huffman expected length afterwards. Reports both the pair that
/// minimizes the merged entropy and the pair that loses the least
/// entropy; the two are generally different.
inline MergeScanReport pair_merge_scan(const FiniteDistribution& dist) {
  validate_distribution(dist);
  if (dist.size() < 3)
    throw InvalidDistribution("pair scan needs at least 3 symbols");

  std::vector<std::string> symbols;
  symbols.reserve(dist.size());
  for (const auto& [symbol, _] : dist.probs) symbols.push_back(symbol);

  MergeScanReport report;
  report.base_entropy = entropy(dist);
  report.base_huffman_length = huffman_build(dist).expected_length();

  for (std::size_t i = 0; i < symbols.size(); ++i) {
    for (std::size_t j = i + 1; j < symbols.size(); ++j) {
      const FiniteDistribution merged = merge_pair(dist, symbols[i], symbols[j]);
      MergeScanRow row;
      row.first = symbols[i];
      row.second = symbols[j];
      row.merged_entropy = entropy(merged);
      row.entropy_reduction = report.base_entropy - row.merged_entropy;
      row.merged_huffman_length = huffman_build(merged).expected_length();
      report.rows.push_back(std::move(row));
    }
  }

  for (std::size_t r = 1; r < report.rows.size(); ++r) {
    if (report.rows[r].merged_entropy <
        report.rows[report.min_merged_entropy_index].merged_entropy)
      report.min_merged_entropy_index = r;
    if (report.rows[r].entropy_reduction <
        report.rows[report.min_reduction_index].entropy_reduction)
      report.min_reduction_index = r;
  }
  return report;
}

}  // namespace crossword
