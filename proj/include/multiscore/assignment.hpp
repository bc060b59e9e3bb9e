// Copyright 2026 The Multi-Score Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

namespace multiscore {

/// Dense rows x cols grid of pair scores: rows are outputs, columns are
/// references. Every weight is finite and within [0, 100].
class ScoreMatrix {
 public:
  ScoreMatrix(std::size_t rows, std::size_t cols, std::vector<double> weights);

  static ScoreMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t row, std::size_t col) const { return weights_[row * cols_ + col]; }
  const std::vector<double>& weights() const { return weights_; }

  bool operator==(const ScoreMatrix&) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> weights_;
};

struct Edge {
  std::size_t row;
  std::size_t col;

  auto operator<=>(const Edge&) const = default;
};

/// One-to-one assignment of size min(rows, cols). Edges are sorted by row and
/// `total` is the sum of `edge_weights` taken in that order.
struct Matching {
  std::vector<Edge> edges;
  std::vector<double> edge_weights;
  double total = 0.0;
};

/// Maximum-weight assignment via the Hungarian algorithm in O(n^3), with
/// n = max(rows, cols). Rectangular inputs are padded with zero-weight cells
/// and padded edges are dropped from the result. Among optimal assignments
/// the one with the lexicographically smallest edge list is returned.
Matching max_weight_matching(const ScoreMatrix& matrix);

/// Exhaustive enumeration of injective assignments; same tie-break as
/// max_weight_matching. Refuses min(rows, cols) > kBruteForceLimit.
Matching brute_force_matching(const ScoreMatrix& matrix);

inline constexpr std::size_t kBruteForceLimit = 8;

}  // namespace multiscore
