// Copyright 2026 The Multi-Score Authors
// SPDX-License-Identifier: Apache-2.0

#include "multiscore/multiscore.hpp"

#include <algorithm>
#include <optional>

#include "multiscore/error.hpp"
#include "multiscore/parallel.hpp"

namespace multiscore {

ScoreMatrix score_matrix(std::span<const Sentence> outputs, std::span<const Sentence> references,
                         const SentenceMetric& metric) {
  if (outputs.empty()) throw ValidationError("output set is empty");
  if (references.empty()) throw ValidationError("reference set is empty");
  std::vector<double> weights;
  weights.reserve(outputs.size() * references.size());
  for (const auto& output : outputs) {
    for (const auto& reference : references) weights.push_back(metric.score(output, reference));
  }
  return ScoreMatrix(outputs.size(), references.size(), std::move(weights));
}

MultiScoreResult multi_score(std::span<const Sentence> outputs,
                             std::span<const Sentence> references, const SentenceMetric& metric,
                             const MultiScoreOptions& options) {
  if (outputs.empty()) throw ValidationError("output set is empty");
  if (references.empty()) throw ValidationError("reference set is empty");
  std::vector<std::string> warnings;
  if (outputs.size() != references.size()) {
    const std::string sizes = std::to_string(outputs.size()) + " outputs vs " +
                              std::to_string(references.size()) + " references";
    if (!options.allow_unequal) {
      throw ValidationError("unequal set sizes (" + sizes + "); pass allow_unequal to match " +
                            "min(outputs, references) pairs");
    }
    warnings.push_back("unequal set sizes (" + sizes + "); averaged over " +
                       std::to_string(std::min(outputs.size(), references.size())) +
                       " matched pairs");
  }

  ScoreMatrix matrix = score_matrix(outputs, references, metric);
  Matching matching = max_weight_matching(matrix);
  // Summing in sorted order keeps the score exact under output/reference
  // permutations.
  std::vector<double> matched = matching.edge_weights;
  std::sort(matched.begin(), matched.end());
  double sum = 0.0;
  for (double w : matched) sum += w;
  const double score = sum / static_cast<double>(matching.edges.size());
  return MultiScoreResult{"", std::move(matrix), std::move(matching), score, std::move(warnings)};
}

MultiScoreResult multi_score(const EvalInstance& instance, const SentenceMetric& metric,
                             const MultiScoreOptions& options) {
  try {
    MultiScoreResult result = multi_score(instance.outputs, instance.references, metric, options);
    result.instance_id = instance.id;
    for (auto& warning : result.warnings) warning = "instance '" + instance.id + "': " + warning;
    return result;
  } catch (const ValidationError& e) {
    throw ValidationError("instance '" + instance.id + "': " + e.what());
  }
}

CorpusMultiScore corpus_multi_score(std::span<const EvalInstance> instances,
                                    const SentenceMetric& metric,
                                    const MultiScoreOptions& options, unsigned threads) {
  if (instances.empty()) throw ValidationError("corpus has no instances");
  if (threads == 0) threads = default_thread_count();

  std::vector<std::optional<MultiScoreResult>> slots(instances.size());
  parallel_for(instances.size(), threads, [&](std::size_t i) {
    slots[i] = multi_score(instances[i], metric, options);
  });

  CorpusMultiScore corpus;
  corpus.instances.reserve(slots.size());
  double sum = 0.0;
  for (auto& slot : slots) {
    sum += slot->score;
    corpus.instances.push_back(std::move(*slot));
  }
  corpus.score = sum / static_cast<double>(corpus.instances.size());
  return corpus;
}

void PrecomputedMetric::set(const std::string& hypothesis, const std::string& reference,
                            double score) {
  if (!(score >= 0.0 && score <= 100.0)) {
    throw ValidationError("precomputed score must be within [0, 100]");
  }
  table_[{hypothesis, reference}] = score;
}

double PrecomputedMetric::score(const Sentence& hypothesis,
                                std::span<const Sentence> references) const {
  if (references.empty()) throw ValidationError("precomputed metric needs a reference");
  double best = 0.0;
  for (const auto& reference : references) {
    auto it = table_.find({hypothesis.raw(), reference.raw()});
    if (it == table_.end()) {
      throw ValidationError("no precomputed score for output '" + hypothesis.raw() +
                            "' against reference '" + reference.raw() + "'");
    }
    best = std::max(best, it->second);
  }
  return best;
}

}  // namespace multiscore
