// Copyright 2026 The Multi-Score Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "multiscore/corpus.hpp"
#include "multiscore/random.hpp"

namespace multiscore {

using TokenId = std::uint32_t;

inline constexpr std::string_view kEosToken = "</s>";

/// Left-to-right next-token model over a fixed vocabulary that contains a
/// distinguished end-of-sequence token.
class SequenceModel {
 public:
  virtual ~SequenceModel() = default;

  virtual const std::vector<std::string>& vocabulary() const = 0;
  virtual TokenId eos() const = 0;
  /// Probabilities indexed by TokenId; non-negative and summing to 1.
  virtual std::vector<double> next_distribution(std::span<const TokenId> context) const = 0;
};

/// Count-based n-gram model with add-k smoothing:
///   P(t | ctx) = (count(ctx, t) + k) / (count(ctx, .) + k * |V|)
/// where ctx is the last (order - 1) tokens, left-padded with a begin marker.
/// A context with no mass at all (unseen and k == 0) falls back to uniform.
class NGramLM final : public SequenceModel {
 public:
  /// `vocabulary` must end with kEosToken and hold no duplicates.
  NGramLM(int order, double add_k, std::vector<std::string> vocabulary);

  const std::vector<std::string>& vocabulary() const override { return vocabulary_; }
  TokenId eos() const override { return static_cast<TokenId>(vocabulary_.size() - 1); }
  std::vector<double> next_distribution(std::span<const TokenId> context) const override;

  int order() const { return order_; }
  double add_k() const { return add_k_; }
  std::optional<TokenId> token_id(std::string_view token) const;

  /// Adds one observation of `token` after `context` (full history; only the
  /// last order - 1 tokens are kept).
  void observe(std::span<const TokenId> context, TokenId token);
  std::uint64_t count(std::span<const TokenId> context, TokenId token) const;

  /// Versioned text format; deserialize(serialize()) compares equal.
  std::string serialize() const;
  static NGramLM deserialize(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static NGramLM load(const std::filesystem::path& path);

  bool operator==(const NGramLM& other) const {
    return order_ == other.order_ && add_k_ == other.add_k_ && vocabulary_ == other.vocabulary_ &&
           table_ == other.table_;
  }

 private:
  static constexpr TokenId kBegin = 0xFFFFFFFFu;
  using Context = std::vector<TokenId>;
  struct Row {
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;
    bool operator==(const Row&) const = default;
  };

  Context context_key(std::span<const TokenId> history) const;

  int order_;
  double add_k_;
  std::vector<std::string> vocabulary_;
  std::map<std::string, TokenId, std::less<>> index_;
  std::map<Context, Row> table_;
};

/// Vocabulary is the sorted set of corpus tokens followed by kEosToken.
/// Throws ValidationError for an empty corpus, empty sequences, order < 1 or
/// negative add_k.
NGramLM train_ngram(std::span<const std::vector<std::string>> corpus, int order,
                    double add_k = 0.1);

/// ((5 + length) / 6)^alpha
double length_penalty(std::size_t length, double alpha);

struct Hypothesis {
  /// Emitted tokens, without the end-of-sequence token.
  std::vector<TokenId> tokens;
  double log_prob = 0.0;
  /// log_prob / length_penalty(|Y|, alpha), |Y| counting the end token when
  /// finished.
  double score = 0.0;
  bool finished = false;
};

/// Strict ordering: higher score first, then lexicographically smaller tokens.
bool ranks_before(const Hypothesis& a, const Hypothesis& b);
void rank_hypotheses(std::vector<Hypothesis>& hypotheses);

struct BeamSearchOptions {
  std::size_t beam_width = 3;
  /// Maximum number of decoding steps, the end token included.
  std::size_t max_len = 64;
  double alpha = 0.6;
  /// The end token is disallowed before this many tokens were emitted.
  std::size_t min_len = 1;
};

struct BeamSearchResult {
  /// Up to beam_width finished hypotheses, ranked.
  std::vector<Hypothesis> finished;
  /// Hypotheses still live when max_len was reached, ranked.
  std::vector<Hypothesis> unfinished;
};

/// Each step expands every live hypothesis by every token with non-zero
/// probability and keeps the (beam_width - finished) best by summed
/// log-probability (ties: lexicographic token order). Expansions that end
/// the sequence move to the finished list, so width 1 is greedy decoding.
BeamSearchResult beam_search(const SequenceModel& model, const BeamSearchOptions& options);

/// Argmax decoding (ties: smallest token id); `truncated` set when no end
/// token was produced within max_len steps.
std::vector<TokenId> greedy_decode(const SequenceModel& model, std::size_t max_len,
                                   std::size_t min_len, bool* truncated = nullptr);

/// Ancestral sample; top_k == 0 samples from the full distribution, otherwise
/// from the renormalized top_k tokens (ties: smaller id first).
std::vector<TokenId> sample_sequence(const SequenceModel& model, Rng& rng, std::size_t top_k,
                                     std::size_t max_len, std::size_t min_len,
                                     bool* truncated = nullptr);

std::string detokenize(const SequenceModel& model, std::span<const TokenId> tokens);

enum class Strategy { kBeamTop3, kTotalRandom, kTopKRandom, kEnsemble };

const char* to_string(Strategy strategy);
/// Accepts the CLI names beam3, random, topk3, ensemble.
Strategy parse_strategy(std::string_view name);

inline constexpr std::size_t kSetSize = 3;

struct GenerationSet {
  std::string instance_id;
  Strategy strategy = Strategy::kBeamTop3;
  std::vector<std::string> sentences;
  std::uint64_t seed = 0;
  /// Some sentence hit max_len without an end token.
  bool truncated = false;
  /// Fewer than three hypotheses finished; the set was completed with
  /// unfinished prefixes and then repeats of the best one.
  bool filled = false;

  bool operator==(const GenerationSet&) const = default;
};

GenerationSet generate_top3_beam(const SequenceModel& model, const BeamSearchOptions& options,
                                 std::string instance_id = {});

/// Three independent samples; sample i draws from the substream
/// derive_seed(seed, instance_id, i).
GenerationSet generate_random(const SequenceModel& model, std::uint64_t seed, std::size_t max_len,
                              std::string instance_id = {}, std::size_t min_len = 1);

GenerationSet generate_topk_random(const SequenceModel& model, std::size_t k, std::uint64_t seed,
                                   std::size_t max_len, std::string instance_id = {},
                                   std::size_t min_len = 1);

/// Sentence i is the best beam-search output of models[i]. Exactly three
/// models are required.
GenerationSet generate_ensemble(std::span<const SequenceModel* const> models,
                                const BeamSearchOptions& options, std::string instance_id = {});

struct GenerateOptions {
  Strategy strategy = Strategy::kBeamTop3;
  int order = 3;
  double add_k = 0.1;
  std::uint64_t seed = 0;
  std::size_t top_k = 3;
  BeamSearchOptions beam{};
};

/// Trains one model per instance on that instance's references and decodes
/// a three-sentence set with the chosen strategy. For the ensemble, reference
/// j goes to shard j mod 3; a shard left empty (fewer than three references)
/// reuses reference (shard mod count).
std::vector<GenerationSet> generate_for_dataset(const Dataset& dataset,
                                                const GenerateOptions& options,
                                                unsigned threads = 1);

/// One JSON object per set: id, outputs, strategy, seed, truncated, filled.
std::string generation_to_jsonl(std::span<const GenerationSet> sets);

}  // namespace multiscore
