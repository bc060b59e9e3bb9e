// Copyright 2026 The Multi-Score Authors
// SPDX-License-Identifier: Apache-2.0

#include "multiscore/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "multiscore/error.hpp"

namespace multiscore {

ScoreMatrix::ScoreMatrix(std::size_t rows, std::size_t cols, std::vector<double> weights)
    : rows_(rows), cols_(cols), weights_(std::move(weights)) {
  if (rows_ == 0 || cols_ == 0) throw ValidationError("score matrix must be at least 1x1");
  if (weights_.size() != rows_ * cols_) {
    throw ValidationError("score matrix has " + std::to_string(weights_.size()) +
                          " weights, expected " + std::to_string(rows_ * cols_));
  }
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    const double w = weights_[k];
    if (!std::isfinite(w)) {
      throw ValidationError("non-finite weight at (" + std::to_string(k / cols_) + ", " +
                            std::to_string(k % cols_) + ")");
    }
    if (w < 0.0 || w > 100.0) {
      throw ValidationError("weight at (" + std::to_string(k / cols_) + ", " +
                            std::to_string(k % cols_) + ") is outside [0, 100]");
    }
  }
}

ScoreMatrix ScoreMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ValidationError("score matrix must be at least 1x1");
  const std::size_t cols = rows.front().size();
  std::vector<double> weights;
  weights.reserve(rows.size() * cols);
  for (const auto& row : rows) {
    if (row.size() != cols) throw ValidationError("score matrix rows have unequal lengths");
    weights.insert(weights.end(), row.begin(), row.end());
  }
  return ScoreMatrix(rows.size(), cols, std::move(weights));
}

namespace {

Matching collect(const ScoreMatrix& matrix, const std::vector<std::size_t>& assign) {
  Matching result;
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    const std::size_t c = assign[r];
    if (c >= matrix.cols()) continue;
    result.edges.push_back({r, c});
    result.edge_weights.push_back(matrix(r, c));
    result.total += matrix(r, c);
  }
  return result;
}

// Square assignment solver over padded costs. Tracks the dual potentials so
// the set of all optimal assignments (the tight-edge subgraph) is known after
// solving.
class HungarianSolver {
 public:
  explicit HungarianSolver(const ScoreMatrix& matrix)
      : matrix_(matrix), n_(std::max(matrix.rows(), matrix.cols())) {
    top_ = *std::max_element(matrix.weights().begin(), matrix.weights().end());
    cost_.assign(n_ * n_, top_);
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
      for (std::size_t c = 0; c < matrix.cols(); ++c) cost_[r * n_ + c] = top_ - matrix(r, c);
    }
    tolerance_ = 1e-12 * std::max(1.0, top_) * static_cast<double>(n_ + 1);
  }

  Matching solve() {
    minimize();
    make_lexicographic();
    return collect(matrix_, assign_);
  }

 private:
  double cost(std::size_t r, std::size_t c) const { return cost_[r * n_ + c]; }

  // Shortest augmenting path formulation with potentials, 1-based internally.
  void minimize() {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    u_.assign(n_ + 1, 0.0);
    v_.assign(n_ + 1, 0.0);
    std::vector<std::size_t> owner(n_ + 1, 0);
    std::vector<std::size_t> way(n_ + 1, 0);
    std::vector<double> min_slack(n_ + 1);
    std::vector<char> used(n_ + 1);

    for (std::size_t row = 1; row <= n_; ++row) {
      owner[0] = row;
      std::size_t col0 = 0;
      std::fill(min_slack.begin(), min_slack.end(), kInf);
      std::fill(used.begin(), used.end(), 0);
      do {
        used[col0] = 1;
        const std::size_t row0 = owner[col0];
        double delta = kInf;
        std::size_t col1 = 0;
        for (std::size_t col = 1; col <= n_; ++col) {
          if (used[col]) continue;
          const double slack = cost(row0 - 1, col - 1) - u_[row0] - v_[col];
          if (slack < min_slack[col]) {
            min_slack[col] = slack;
            way[col] = col0;
          }
          if (min_slack[col] < delta) {
            delta = min_slack[col];
            col1 = col;
          }
        }
        for (std::size_t col = 0; col <= n_; ++col) {
          if (used[col]) {
            u_[owner[col]] += delta;
            v_[col] -= delta;
          } else {
            min_slack[col] -= delta;
          }
        }
        col0 = col1;
      } while (owner[col0] != 0);
      do {
        const std::size_t col1 = way[col0];
        owner[col0] = owner[col1];
        col0 = col1;
      } while (col0 != 0);
    }

    assign_.assign(n_, 0);
    owner_.assign(n_, 0);
    for (std::size_t col = 1; col <= n_; ++col) {
      assign_[owner[col] - 1] = col - 1;
      owner_[col - 1] = owner[col] - 1;
    }
    tight_.assign(n_ * n_, 0);
    for (std::size_t r = 0; r < n_; ++r) {
      for (std::size_t c = 0; c < n_; ++c) {
        const double reduced = cost(r, c) - u_[r + 1] - v_[c + 1];
        tight_[r * n_ + c] = std::abs(reduced) <= tolerance_ ? 1 : 0;
      }
    }
  }

  bool tight(std::size_t r, std::size_t c) const { return tight_[r * n_ + c] != 0; }

  // Every perfect matching inside the tight subgraph is optimal. Walk rows in
  // order and move each to its smallest feasible tight column, re-routing the
  // not-yet-fixed rows along an alternating path.
  void make_lexicographic() {
    std::vector<std::size_t> via_col(n_);
    std::vector<std::size_t> from_row(n_);
    std::vector<char> row_seen(n_);
    std::vector<char> col_seen(n_);
    std::vector<std::size_t> queue;
    queue.reserve(n_);

    for (std::size_t i = 0; i < matrix_.rows(); ++i) {
      const std::size_t target = assign_[i];
      for (std::size_t j = 0; j < target; ++j) {
        if (!tight(i, j)) continue;
        const std::size_t start = owner_[j];
        if (start < i) continue;

        std::fill(row_seen.begin(), row_seen.end(), 0);
        std::fill(col_seen.begin(), col_seen.end(), 0);
        queue.clear();
        queue.push_back(start);
        row_seen[start] = 1;
        col_seen[j] = 1;
        std::size_t end_row = n_;
        for (std::size_t head = 0; head < queue.size() && end_row == n_; ++head) {
          const std::size_t x = queue[head];
          for (std::size_t c = 0; c < n_; ++c) {
            if (col_seen[c] || !tight(x, c)) continue;
            col_seen[c] = 1;
            if (c == target) {
              end_row = x;
              break;
            }
            const std::size_t y = owner_[c];
            if (y < i || row_seen[y]) continue;
            row_seen[y] = 1;
            via_col[y] = c;
            from_row[y] = x;
            queue.push_back(y);
          }
        }
        if (end_row == n_) continue;

        std::size_t x = end_row;
        std::size_t c = target;
        while (true) {
          const std::size_t previous = assign_[x];
          assign_[x] = c;
          owner_[c] = x;
          if (x == start) break;
          c = previous;
          x = from_row[x];
        }
        assign_[i] = j;
        owner_[j] = i;
        break;
      }
    }
  }

  const ScoreMatrix& matrix_;
  std::size_t n_;
  double top_ = 0.0;
  double tolerance_ = 0.0;
  std::vector<double> cost_;
  std::vector<double> u_;
  std::vector<double> v_;
  std::vector<std::size_t> assign_;
  std::vector<std::size_t> owner_;
  std::vector<char> tight_;
};

class BruteForce {
 public:
  explicit BruteForce(const ScoreMatrix& matrix)
      : matrix_(matrix),
        skips_allowed_(matrix.rows() > matrix.cols() ? matrix.rows() - matrix.cols() : 0),
        current_(matrix.rows(), kUnmatched),
        col_used_(matrix.cols(), 0) {}

  Matching solve() {
    search(0, 0, 0.0);
    return collect(matrix_, best_);
  }

 private:
  static constexpr std::size_t kUnmatched = std::numeric_limits<std::size_t>::max();

  // Columns are tried in ascending order with "unmatched" last, so the first
  // maximum met is the lexicographically smallest edge list.
  void search(std::size_t row, std::size_t skips, double partial) {
    if (row == matrix_.rows()) {
      if (!found_ || partial > best_total_) {
        found_ = true;
        best_total_ = partial;
        best_ = current_;
      }
      return;
    }
    for (std::size_t c = 0; c < matrix_.cols(); ++c) {
      if (col_used_[c]) continue;
      col_used_[c] = 1;
      current_[row] = c;
      search(row + 1, skips, partial + matrix_(row, c));
      col_used_[c] = 0;
    }
    if (skips < skips_allowed_) {
      current_[row] = kUnmatched;
      search(row + 1, skips + 1, partial);
    }
  }

  const ScoreMatrix& matrix_;
  std::size_t skips_allowed_;
  std::vector<std::size_t> current_;
  std::vector<char> col_used_;
  std::vector<std::size_t> best_;
  double best_total_ = 0.0;
  bool found_ = false;
};

}  // namespace

Matching max_weight_matching(const ScoreMatrix& matrix) {
  return HungarianSolver(matrix).solve();
}

Matching brute_force_matching(const ScoreMatrix& matrix) {
  if (std::min(matrix.rows(), matrix.cols()) > kBruteForceLimit) {
    throw ValidationError("brute-force matching refuses dimension above " +
                          std::to_string(kBruteForceLimit));
  }
  return BruteForce(matrix).solve();
}

}  // namespace multiscore
