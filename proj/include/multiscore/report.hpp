// Copyright 2026 The Multi-Score Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "multiscore/corpus.hpp"
#include "multiscore/metrics.hpp"
#include "multiscore/multiscore.hpp"

namespace multiscore {

struct EvaluationConfig {
  TokenizerOptions tokenizer{};
  BleuConfig sentence_bleu = BleuConfig::sentence_default();
  BleuConfig corpus_bleu = BleuConfig::corpus_default();
  ChrfConfig chrf{};
  MultiScoreOptions multiscore{};
  /// Worker threads; 0 reads MULTISCORE_THREADS. Never affects results.
  unsigned threads = 1;
};

struct InstanceSummary {
  std::string id;
  std::optional<std::string> category;
  MultiScoreResult ms_bleu;
  MultiScoreResult ms_chrf;
  /// Absent for instances with fewer than two outputs.
  std::optional<double> self_bleu;
};

struct EvaluationReport {
  /// Mean over output slots of multi-reference corpus BLEU / chrF++.
  double bleu = 0.0;
  double chrfpp = 0.0;
  std::vector<double> slot_bleu;
  std::vector<double> slot_chrfpp;
  /// Macro-mean of per-instance Self-BLEU; absent when no instance has two
  /// or more outputs.
  std::optional<double> self_bleu;
  double ms_bleu = 0.0;
  double ms_chrf = 0.0;
  std::vector<InstanceSummary> per_instance;
  EvaluationConfig config;
  std::vector<std::string> warnings;
};

/// Runs the full quality and diversity battery. Every instance must carry
/// outputs; unequal output/reference set sizes need
/// config.multiscore.allow_unequal.
EvaluationReport evaluate_all(const Dataset& dataset, const EvaluationConfig& config = {});

enum class ReportFormat { kJson, kTsv, kTable };

ReportFormat parse_report_format(std::string_view name);

/// Half-up rounding of the exact binary value to two decimals, e.g.
/// 54.666... -> "54.67".
std::string format_fixed2(double value);

/// Deterministic rendering. JSON has sorted keys and two-decimal numbers;
/// TSV has the header BLEU, CHRF++, Self-B, MS-B, MS-C with "-" for a missing
/// value.
std::string render(const EvaluationReport& report, ReportFormat format,
                   bool include_per_instance = true);

/// Canonical JSON for one Multi-Score result: matrix, matched edges and score.
std::string multiscore_result_json(const MultiScoreResult& result);

}  // namespace multiscore
