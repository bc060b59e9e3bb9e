// Copyright 2026 The Multi-Score Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "multiscore/text.hpp"

namespace multiscore {

enum class BleuSmoothing {
  kNone,
  /// +1 on both matched and total counts for orders n >= 2.
  kAddOneHigherOrders,
};

struct BleuConfig {
  int max_order = 4;
  BleuSmoothing smoothing = BleuSmoothing::kAddOneHigherOrders;

  static BleuConfig sentence_default() { return {}; }
  static BleuConfig corpus_default() { return {4, BleuSmoothing::kNone}; }

  void validate() const;
  bool operator==(const BleuConfig&) const = default;
};

struct ChrfConfig {
  int char_order = 6;
  int word_order = 2;
  double beta = 2.0;

  void validate() const;
  bool operator==(const ChrfConfig&) const = default;
};

const char* to_string(BleuSmoothing smoothing);

/// Sufficient statistics for BLEU; sums of these give corpus-level BLEU.
struct BleuStats {
  std::vector<std::uint64_t> matched;
  std::vector<std::uint64_t> totals;
  std::uint64_t hyp_length = 0;
  std::uint64_t ref_length = 0;

  BleuStats& operator+=(const BleuStats& other);
};

/// Closest reference length to `hyp_length`; ties go to the shorter one.
std::size_t effective_reference_length(std::size_t hyp_length,
                                       std::span<const std::size_t> ref_lengths);

BleuStats bleu_stats(std::span<const std::string> hyp_tokens,
                     std::span<const std::vector<std::string>> refs_tokens, int max_order);
BleuStats bleu_stats(const Sentence& hyp, std::span<const Sentence> refs, int max_order);
double bleu_from_stats(const BleuStats& stats, const BleuConfig& config);

/// Token-level form; an empty hypothesis scores 0.
double sentence_bleu(std::span<const std::string> hyp_tokens,
                     std::span<const std::vector<std::string>> refs_tokens,
                     const BleuConfig& config = BleuConfig::sentence_default());
double sentence_bleu(const Sentence& hyp, std::span<const Sentence> refs,
                     const BleuConfig& config = BleuConfig::sentence_default());

struct BleuSegment {
  Sentence hypothesis;
  std::vector<Sentence> references;
};

/// Micro-averaged BLEU: statistics are summed over segments before scoring.
double corpus_bleu(std::span<const BleuSegment> segments,
                   const BleuConfig& config = BleuConfig::corpus_default());

/// Per-order chrF++ counts. Character orders come first, then word orders.
struct ChrfStats {
  struct Order {
    std::uint64_t matched = 0;
    std::uint64_t hyp_total = 0;
    std::uint64_t ref_total = 0;
  };
  std::vector<Order> orders;

  ChrfStats& operator+=(const ChrfStats& other);
};

ChrfStats chrf_stats(const Sentence& hyp, const Sentence& ref, const ChrfConfig& config = {});
double chrf_from_stats(const ChrfStats& stats, const ChrfConfig& config = {});

double sentence_chrfpp(const Sentence& hyp, const Sentence& ref, const ChrfConfig& config = {});

/// Multi-reference chrF++: the statistics of the best-scoring reference
/// (first one on ties).
ChrfStats best_reference_chrf_stats(const Sentence& hyp, std::span<const Sentence> refs,
                                    const ChrfConfig& config = {});

struct ChrfSegment {
  Sentence hypothesis;
  std::vector<Sentence> references;
};

double corpus_chrfpp(std::span<const ChrfSegment> segments, const ChrfConfig& config = {});

/// Mean over outputs of BLEU of each output against the remaining ones.
/// Higher means less diverse. Needs at least two outputs.
double self_bleu(std::span<const Sentence> outputs,
                 const BleuConfig& config = BleuConfig::sentence_default());

/// Pairwise sentence scorer in [0, 100] used to weight the Multi-Score graph.
class SentenceMetric {
 public:
  virtual ~SentenceMetric() = default;

  virtual std::string name() const = 0;
  virtual double score(const Sentence& hypothesis, std::span<const Sentence> references) const = 0;

  double score(const Sentence& hypothesis, const Sentence& reference) const {
    return score(hypothesis, std::span<const Sentence>(&reference, 1));
  }
};

class BleuMetric final : public SentenceMetric {
 public:
  explicit BleuMetric(BleuConfig config = BleuConfig::sentence_default());

  std::string name() const override { return "bleu"; }
  double score(const Sentence& hypothesis, std::span<const Sentence> references) const override;
  using SentenceMetric::score;

  const BleuConfig& config() const { return config_; }

 private:
  BleuConfig config_;
};

class ChrfMetric final : public SentenceMetric {
 public:
  explicit ChrfMetric(ChrfConfig config = {});

  std::string name() const override { return "chrf"; }
  double score(const Sentence& hypothesis, std::span<const Sentence> references) const override;
  using SentenceMetric::score;

  const ChrfConfig& config() const { return config_; }

 private:
  ChrfConfig config_;
};

}  // namespace multiscore
