// Copyright 2026 The Multi-Score Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "multiscore/assignment.hpp"
#include "multiscore/metrics.hpp"
#include "multiscore/text.hpp"

namespace multiscore {

/// One input: its reference set and one system's output set.
struct EvalInstance {
  std::string id;
  std::optional<std::string> category;
  std::vector<Sentence> references;
  std::vector<Sentence> outputs;

  bool operator==(const EvalInstance&) const = default;
};

struct MultiScoreOptions {
  /// Match min(outputs, references) pairs instead of rejecting unequal sets.
  bool allow_unequal = false;
};

struct MultiScoreResult {
  std::string instance_id;
  ScoreMatrix matrix;
  Matching matching;
  /// Mean matched edge weight.
  double score = 0.0;
  std::vector<std::string> warnings;
};

/// weights(i, j) = metric(outputs[i], references[j]) with a single reference
/// per call.
ScoreMatrix score_matrix(std::span<const Sentence> outputs, std::span<const Sentence> references,
                         const SentenceMetric& metric);

MultiScoreResult multi_score(std::span<const Sentence> outputs,
                             std::span<const Sentence> references, const SentenceMetric& metric,
                             const MultiScoreOptions& options = {});

MultiScoreResult multi_score(const EvalInstance& instance, const SentenceMetric& metric,
                             const MultiScoreOptions& options = {});

struct CorpusMultiScore {
  /// Unweighted mean of the per-instance scores.
  double score = 0.0;
  std::vector<MultiScoreResult> instances;
};

/// Instances are scored independently on up to `threads` workers (0 picks the
/// default); the result does not depend on the thread count.
CorpusMultiScore corpus_multi_score(std::span<const EvalInstance> instances,
                                    const SentenceMetric& metric,
                                    const MultiScoreOptions& options = {},
                                    unsigned threads = 1);

/// Looks pair scores up in a table keyed by the raw output and reference
/// text. Used to replay precomputed score matrices through the full
/// Multi-Score path.
class PrecomputedMetric final : public SentenceMetric {
 public:
  explicit PrecomputedMetric(std::string name = "precomputed") : name_(std::move(name)) {}

  void set(const std::string& hypothesis, const std::string& reference, double score);

  std::string name() const override { return name_; }
  /// Best score over `references`; throws ValidationError on unknown pairs.
  double score(const Sentence& hypothesis, std::span<const Sentence> references) const override;
  using SentenceMetric::score;

 private:
  std::string name_;
  std::map<std::pair<std::string, std::string>, double> table_;
};

}  // namespace multiscore
