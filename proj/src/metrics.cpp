// Copyright 2026 The Multi-Score Authors
// SPDX-License-Identifier: Apache-2.0

#include "multiscore/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "multiscore/error.hpp"

namespace multiscore {

namespace {

double clamp_score(double value) { return std::clamp(value, 0.0, 100.0); }

std::u32string stripped_chars(const Sentence& sentence) {
  std::u32string chars = decode_utf8(sentence.normalized());
  std::erase_if(chars, [](char32_t cp) { return is_unicode_space(cp); });
  return chars;
}

}  // namespace

void BleuConfig::validate() const {
  if (max_order < 1 || max_order > 9) {
    throw ValidationError("BLEU max_order must be in [1, 9], got " + std::to_string(max_order));
  }
}

void ChrfConfig::validate() const {
  if (char_order < 1) throw ValidationError("chrF char_order must be at least 1");
  if (word_order < 0) throw ValidationError("chrF word_order must be non-negative");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError("chrF beta must be positive");
}

const char* to_string(BleuSmoothing smoothing) {
  switch (smoothing) {
    case BleuSmoothing::kNone:
      return "none";
    case BleuSmoothing::kAddOneHigherOrders:
      return "add_one_for_orders_ge_2";
  }
  return "unknown";
}

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  if (matched.empty()) {
    matched.assign(other.matched.size(), 0);
    totals.assign(other.totals.size(), 0);
  }
  if (matched.size() != other.matched.size()) {
    throw ValidationError("cannot add BLEU statistics of different orders");
  }
  for (std::size_t n = 0; n < matched.size(); ++n) {
    matched[n] += other.matched[n];
    totals[n] += other.totals[n];
  }
  hyp_length += other.hyp_length;
  ref_length += other.ref_length;
  return *this;
}

std::size_t effective_reference_length(std::size_t hyp_length,
                                       std::span<const std::size_t> ref_lengths) {
  if (ref_lengths.empty()) throw ValidationError("BLEU needs at least one reference");
  std::size_t best = ref_lengths.front();
  auto distance = [hyp_length](std::size_t len) {
    return len > hyp_length ? len - hyp_length : hyp_length - len;
  };
  for (std::size_t len : ref_lengths.subspan(1)) {
    const auto d = distance(len);
    const auto best_d = distance(best);
    if (d < best_d || (d == best_d && len < best)) best = len;
  }
  return best;
}

BleuStats bleu_stats(std::span<const std::string> hyp_tokens,
                     std::span<const std::vector<std::string>> refs_tokens, int max_order) {
  if (refs_tokens.empty()) throw ValidationError("BLEU needs at least one reference");
  BleuStats stats;
  stats.matched.resize(static_cast<std::size_t>(max_order));
  stats.totals.resize(static_cast<std::size_t>(max_order));
  stats.hyp_length = hyp_tokens.size();

  std::vector<std::size_t> ref_lengths;
  ref_lengths.reserve(refs_tokens.size());
  for (const auto& ref : refs_tokens) {
    if (ref.empty()) throw ValidationError("BLEU reference is empty");
    ref_lengths.push_back(ref.size());
  }
  stats.ref_length = effective_reference_length(hyp_tokens.size(), ref_lengths);

  for (int order = 1; order <= max_order; ++order) {
    const auto n = static_cast<std::size_t>(order);
    const NGramMultiset hyp = word_ngrams(hyp_tokens, n);
    // Clip against the per-n-gram maximum over references.
    NGramMultiset ref_max;
    ref_max.order = n;
    for (const auto& ref : refs_tokens) {
      for (const auto& [key, c] : word_ngrams(ref, n).counts) {
        auto& slot = ref_max.counts[key];
        slot = std::max(slot, c);
      }
    }
    stats.matched[n - 1] = clipped_overlap(hyp, ref_max);
    stats.totals[n - 1] = hyp_tokens.size() >= n ? hyp_tokens.size() - n + 1 : 0;
  }
  return stats;
}

BleuStats bleu_stats(const Sentence& hyp, std::span<const Sentence> refs, int max_order) {
  std::vector<std::vector<std::string>> refs_tokens;
  refs_tokens.reserve(refs.size());
  for (const auto& ref : refs) refs_tokens.push_back(ref.tokens());
  return bleu_stats(hyp.tokens(), refs_tokens, max_order);
}

double bleu_from_stats(const BleuStats& stats, const BleuConfig& config) {
  config.validate();
  const auto orders = static_cast<std::size_t>(config.max_order);
  if (stats.matched.size() != orders || stats.totals.size() != orders) {
    throw ValidationError("BLEU statistics do not match configured max_order");
  }
  if (stats.hyp_length == 0 || stats.matched[0] == 0) return 0.0;

  double log_sum = 0.0;
  for (std::size_t n = 0; n < orders; ++n) {
    auto matched = stats.matched[n];
    auto total = stats.totals[n];
    if (config.smoothing == BleuSmoothing::kAddOneHigherOrders && n >= 1) {
      ++matched;
      ++total;
    }
    if (matched == 0 || total == 0) return 0.0;
    log_sum += std::log(static_cast<double>(matched) / static_cast<double>(total));
  }
  const double c = static_cast<double>(stats.hyp_length);
  const double r = static_cast<double>(stats.ref_length);
  const double brevity = stats.hyp_length >= stats.ref_length ? 1.0 : std::exp(1.0 - r / c);
  return clamp_score(brevity * std::exp(log_sum / static_cast<double>(orders)) * 100.0);
}

double sentence_bleu(std::span<const std::string> hyp_tokens,
                     std::span<const std::vector<std::string>> refs_tokens,
                     const BleuConfig& config) {
  config.validate();
  return bleu_from_stats(bleu_stats(hyp_tokens, refs_tokens, config.max_order), config);
}

double sentence_bleu(const Sentence& hyp, std::span<const Sentence> refs,
                     const BleuConfig& config) {
  config.validate();
  return bleu_from_stats(bleu_stats(hyp, refs, config.max_order), config);
}

double corpus_bleu(std::span<const BleuSegment> segments, const BleuConfig& config) {
  config.validate();
  if (segments.empty()) throw ValidationError("corpus BLEU needs at least one segment");
  BleuStats total;
  for (const auto& segment : segments) {
    total += bleu_stats(segment.hypothesis, segment.references, config.max_order);
  }
  return bleu_from_stats(total, config);
}

ChrfStats& ChrfStats::operator+=(const ChrfStats& other) {
  if (orders.empty()) orders.resize(other.orders.size());
  if (orders.size() != other.orders.size()) {
    throw ValidationError("cannot add chrF statistics of different orders");
  }
  for (std::size_t k = 0; k < orders.size(); ++k) {
    orders[k].matched += other.orders[k].matched;
    orders[k].hyp_total += other.orders[k].hyp_total;
    orders[k].ref_total += other.orders[k].ref_total;
  }
  return *this;
}

ChrfStats chrf_stats(const Sentence& hyp, const Sentence& ref, const ChrfConfig& config) {
  config.validate();
  ChrfStats stats;
  stats.orders.reserve(static_cast<std::size_t>(config.char_order + config.word_order));

  const std::u32string hyp_chars = stripped_chars(hyp);
  const std::u32string ref_chars = stripped_chars(ref);
  for (int n = 1; n <= config.char_order; ++n) {
    const auto h = char_ngrams(std::u32string_view(hyp_chars), static_cast<std::size_t>(n));
    const auto r = char_ngrams(std::u32string_view(ref_chars), static_cast<std::size_t>(n));
    stats.orders.push_back({clipped_overlap(h, r), h.total(), r.total()});
  }
  for (int n = 1; n <= config.word_order; ++n) {
    const auto h = word_ngrams(hyp.tokens(), static_cast<std::size_t>(n));
    const auto r = word_ngrams(ref.tokens(), static_cast<std::size_t>(n));
    stats.orders.push_back({clipped_overlap(h, r), h.total(), r.total()});
  }
  return stats;
}

double chrf_from_stats(const ChrfStats& stats, const ChrfConfig& config) {
  config.validate();
  double precision_sum = 0.0;
  double recall_sum = 0.0;
  std::size_t effective = 0;
  for (const auto& order : stats.orders) {
    if (order.hyp_total == 0 && order.ref_total == 0) continue;
    const auto m = static_cast<double>(order.matched);
    precision_sum += order.hyp_total > 0 ? m / static_cast<double>(order.hyp_total) : 0.0;
    recall_sum += order.ref_total > 0 ? m / static_cast<double>(order.ref_total) : 0.0;
    ++effective;
  }
  if (effective == 0) return 0.0;
  const double precision = precision_sum / static_cast<double>(effective);
  const double recall = recall_sum / static_cast<double>(effective);
  if (precision + recall == 0.0) return 0.0;
  const double beta2 = config.beta * config.beta;
  const double f = (1.0 + beta2) * precision * recall / (beta2 * precision + recall);
  return clamp_score(f * 100.0);
}

double sentence_chrfpp(const Sentence& hyp, const Sentence& ref, const ChrfConfig& config) {
  return chrf_from_stats(chrf_stats(hyp, ref, config), config);
}

ChrfStats best_reference_chrf_stats(const Sentence& hyp, std::span<const Sentence> refs,
                                    const ChrfConfig& config) {
  if (refs.empty()) throw ValidationError("chrF++ needs at least one reference");
  ChrfStats best = chrf_stats(hyp, refs.front(), config);
  double best_score = chrf_from_stats(best, config);
  for (const auto& ref : refs.subspan(1)) {
    ChrfStats candidate = chrf_stats(hyp, ref, config);
    const double score = chrf_from_stats(candidate, config);
    if (score > best_score) {
      best_score = score;
      best = std::move(candidate);
    }
  }
  return best;
}

double corpus_chrfpp(std::span<const ChrfSegment> segments, const ChrfConfig& config) {
  config.validate();
  if (segments.empty()) throw ValidationError("corpus chrF++ needs at least one segment");
  ChrfStats total;
  for (const auto& segment : segments) {
    total += best_reference_chrf_stats(segment.hypothesis, segment.references, config);
  }
  return chrf_from_stats(total, config);
}

double self_bleu(std::span<const Sentence> outputs, const BleuConfig& config) {
  config.validate();
  if (outputs.size() < 2) {
    throw ValidationError("Self-BLEU needs at least 2 outputs, got " +
                          std::to_string(outputs.size()));
  }
  double sum = 0.0;
  std::vector<Sentence> others;
  others.reserve(outputs.size() - 1);
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    others.clear();
    for (std::size_t j = 0; j < outputs.size(); ++j) {
      if (j != i) others.push_back(outputs[j]);
    }
    sum += sentence_bleu(outputs[i], others, config);
  }
  return sum / static_cast<double>(outputs.size());
}

BleuMetric::BleuMetric(BleuConfig config) : config_(config) { config_.validate(); }

double BleuMetric::score(const Sentence& hypothesis, std::span<const Sentence> references) const {
  return sentence_bleu(hypothesis, references, config_);
}

ChrfMetric::ChrfMetric(ChrfConfig config) : config_(config) { config_.validate(); }

double ChrfMetric::score(const Sentence& hypothesis, std::span<const Sentence> references) const {
  if (references.size() == 1) return sentence_chrfpp(hypothesis, references.front(), config_);
  return chrf_from_stats(best_reference_chrf_stats(hypothesis, references, config_), config_);
}

}  // namespace multiscore
