// Copyright 2026 The Multi-Score Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "multiscore/corpus.hpp"
#include "multiscore/decoding.hpp"
#include "multiscore/error.hpp"
#include "multiscore/metrics.hpp"
#include "multiscore/random.hpp"
#include "multiscore/report.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace multiscore;

namespace {

using Corpus = std::vector<std::vector<std::string>>;

// Same distribution after every prefix.
class FixedModel final : public SequenceModel {
 public:
  explicit FixedModel(std::vector<double> p) : p_(std::move(p)) {
    for (std::size_t i = 0; i + 1 < p_.size(); ++i) vocab_.push_back("t" + std::to_string(i));
    vocab_.emplace_back(kEosToken);
  }
  const std::vector<std::string>& vocabulary() const override { return vocab_; }
  TokenId eos() const override { return static_cast<TokenId>(vocab_.size() - 1); }
  std::vector<double> next_distribution(std::span<const TokenId>) const override { return p_; }

 private:
  std::vector<double> p_;
  std::vector<std::string> vocab_;
};

// Explicit prefix -> distribution table; unknown prefixes end the sequence.
class TableModel final : public SequenceModel {
 public:
  TableModel(std::size_t vocab_size, std::map<std::vector<TokenId>, std::vector<double>> table)
      : table_(std::move(table)) {
    for (std::size_t i = 0; i + 1 < vocab_size; ++i) vocab_.push_back("t" + std::to_string(i));
    vocab_.emplace_back(kEosToken);
  }
  const std::vector<std::string>& vocabulary() const override { return vocab_; }
  TokenId eos() const override { return static_cast<TokenId>(vocab_.size() - 1); }
  std::vector<double> next_distribution(std::span<const TokenId> context) const override {
    const auto it = table_.find(std::vector<TokenId>(context.begin(), context.end()));
    if (it != table_.end()) return it->second;
    std::vector<double> p(vocab_.size(), 0.0);
    p.back() = 1.0;
    return p;
  }

 private:
  std::map<std::vector<TokenId>, std::vector<double>> table_;
  std::vector<std::string> vocab_;
};

TokenId id_of(const NGramLM& lm, const std::string& token) { return *lm.token_id(token); }

TEST(NGram, UnsmoothedSingleContinuation) {
  const NGramLM lm = train_ngram(Corpus{{"a", "b"}}, 2, 0.0);
  const std::vector<TokenId> ctx{id_of(lm, "a")};
  EXPECT_EQ(lm.next_distribution(ctx)[id_of(lm, "b")], 1.0);
}

TEST(NGram, UnsmoothedSymmetricCounts) {
  const NGramLM lm = train_ngram(Corpus{{"a", "b"}, {"a", "c"}}, 2, 0.0);
  const std::vector<TokenId> ctx{id_of(lm, "a")};
  const auto p = lm.next_distribution(ctx);
  EXPECT_EQ(p[id_of(lm, "b")], 0.5);
  EXPECT_EQ(p[id_of(lm, "c")], 0.5);
}

TEST(NGram, AddKFormula) {
  const NGramLM lm = train_ngram(Corpus{{"a", "b"}}, 2, 0.1);
  ASSERT_EQ(lm.vocabulary(), (std::vector<std::string>{"a", "b", "</s>"}));
  const std::vector<TokenId> ctx{id_of(lm, "a")};
  EXPECT_NEAR(lm.next_distribution(ctx)[id_of(lm, "b")], 1.1 / 1.3, 1e-15);
  EXPECT_NEAR(lm.next_distribution(ctx)[lm.eos()], 0.1 / 1.3, 1e-15);
}

TEST(NGram, BeginPaddingAndEndCounts) {
  const NGramLM lm = train_ngram(Corpus{{"a", "b"}, {"a"}}, 2, 0.0);
  EXPECT_EQ(lm.next_distribution({})[id_of(lm, "a")], 1.0);
  const std::vector<TokenId> ctx{id_of(lm, "a")};
  EXPECT_EQ(lm.next_distribution(ctx)[lm.eos()], 0.5);
  EXPECT_EQ(lm.count(ctx, lm.eos()), 1u);
}

TEST(NGram, UsesOnlyTheLastOrderMinusOneTokens) {
  const NGramLM lm = train_ngram(Corpus{{"x", "a", "b"}, {"y", "a", "c"}}, 2, 0.1);
  const std::vector<TokenId> one{id_of(lm, "x"), id_of(lm, "a")};
  const std::vector<TokenId> two{id_of(lm, "y"), id_of(lm, "a")};
  EXPECT_EQ(lm.next_distribution(one), lm.next_distribution(two));
  const NGramLM tri = train_ngram(Corpus{{"x", "a", "b"}, {"y", "a", "c"}}, 3, 0.1);
  const std::vector<TokenId> t1{id_of(tri, "x"), id_of(tri, "a")};
  const std::vector<TokenId> t2{id_of(tri, "y"), id_of(tri, "a")};
  EXPECT_NE(tri.next_distribution(t1), tri.next_distribution(t2));
}

TEST(NGram, UnseenContextWithoutSmoothingIsUniform) {
  const NGramLM lm = train_ngram(Corpus{{"a", "b"}}, 2, 0.0);
  const std::vector<TokenId> ctx{lm.eos()};
  for (double p : lm.next_distribution(ctx)) EXPECT_DOUBLE_EQ(p, 1.0 / 3.0);
}

TEST(NGram, DistributionsSumToOneAndArePositive) {
  std::mt19937_64 rng(41);
  Corpus corpus;
  for (int i = 0; i < 20; ++i) {
    std::vector<std::string> tokens;
    for (int k = 0; k < 6; ++k) tokens.push_back(testkit::word_pool()[rng() % 12]);
    corpus.push_back(tokens);
  }
  for (int order = 1; order <= 4; ++order) {
    const NGramLM lm = train_ngram(corpus, order, 0.05);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<TokenId> ctx(rng() % 6);
      for (auto& t : ctx) t = static_cast<TokenId>(rng() % lm.vocabulary().size());
      const auto p = lm.next_distribution(ctx);
      EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
      for (double x : p) EXPECT_GT(x, 0.0);
    }
  }
}

TEST(NGram, Validation) {
  EXPECT_THROW(train_ngram(Corpus{}, 2), ValidationError);
  EXPECT_THROW(train_ngram(Corpus{{}}, 2), ValidationError);
  EXPECT_THROW(train_ngram(Corpus{{"a"}}, 0), ValidationError);
  EXPECT_THROW(train_ngram(Corpus{{"a"}}, 2, -1.0), ValidationError);
  EXPECT_THROW(NGramLM(2, 0.1, {"a", "b"}), ValidationError);
  EXPECT_THROW(NGramLM(2, 0.1, {"a", "a", std::string(kEosToken)}), ValidationError);
}

TEST(NGram, SerializationRoundTripsExactly) {
  std::mt19937_64 rng(42);
  Corpus corpus;
  for (int i = 0; i < 30; ++i) {
    std::vector<std::string> tokens;
    for (int k = 0; k < 1 + static_cast<int>(rng() % 8); ++k) {
      tokens.push_back(testkit::word_pool()[rng() % testkit::word_pool().size()]);
    }
    corpus.push_back(tokens);
  }
  for (double add_k : {0.0, 0.1, 1.0 / 3.0}) {
    const NGramLM lm = train_ngram(corpus, 3, add_k);
    const std::string text = lm.serialize();
    const NGramLM back = NGramLM::deserialize(text);
    EXPECT_EQ(back, lm);
    EXPECT_EQ(back.serialize(), text);
    EXPECT_EQ(back.add_k(), add_k);
  }
  const fs::path file = fs::temp_directory_path() /
                        ("multiscore_lm_" + std::to_string(::getpid()) + ".txt");
  const NGramLM lm = train_ngram(corpus, 2);
  lm.save(file);
  EXPECT_EQ(NGramLM::load(file), lm);
  fs::remove(file);
  EXPECT_THROW(NGramLM::deserialize("not a model"), ValidationError);
  EXPECT_THROW(NGramLM::load(file), IoError);
}

TEST(LengthPenalty, FormulaAndRanking) {
  EXPECT_EQ(length_penalty(1, 0.6), 1.0);
  EXPECT_DOUBLE_EQ(length_penalty(7, 1.0), 2.0);
  EXPECT_EQ(length_penalty(8, 0.0), 1.0);
  // With alpha = 1, a length-8 hypothesis at logP -3.5 outranks a length-2
  // one at logP -2.0: -3.5 / (13/6) = -1.615 versus -2.0 / (7/6) = -1.714.
  Hypothesis short_h{{0}, -2.0, -2.0 / length_penalty(2, 1.0), true};
  Hypothesis long_h{{0, 0, 0, 0, 0, 0, 0}, -3.5, -3.5 / length_penalty(8, 1.0), true};
  std::vector<Hypothesis> ranked{short_h, long_h};
  rank_hypotheses(ranked);
  EXPECT_EQ(ranked[0].tokens.size(), 7u);
  EXPECT_NEAR(ranked[0].score, -21.0 / 13.0, 1e-15);
  EXPECT_NEAR(ranked[1].score, -12.0 / 7.0, 1e-15);
}

TEST(BeamSearch, ThreeTokenModelMatchesEnumerationWithoutPenalty) {
  // Tokens t0, t1 and the end token, uniform-ish and prefix independent.
  const FixedModel model({0.5, 0.3, 0.2});
  BeamSearchOptions options;
  options.beam_width = 100;
  options.max_len = 3;
  options.alpha = 0.0;
  options.min_len = 0;
  const BeamSearchResult r = beam_search(model, options);
  // Finished: "", t0, t1, t0t0, t0t1, t1t0, t1t1 -> 7 sequences.
  ASSERT_EQ(r.finished.size(), 7u);
  ASSERT_EQ(r.unfinished.size(), 8u);
  for (std::size_t i = 1; i < r.finished.size(); ++i) {
    EXPECT_TRUE(ranks_before(r.finished[i - 1], r.finished[i]));
  }
  EXPECT_TRUE(r.finished[0].tokens.empty());
  EXPECT_DOUBLE_EQ(r.finished[0].log_prob, std::log(0.2));
  EXPECT_EQ(r.finished[1].tokens, (std::vector<TokenId>{0}));
}

TEST(BeamSearch, WidthOneIsGreedy) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const testkit::HashedModel model(5, seed);
    BeamSearchOptions options;
    options.beam_width = 1;
    options.max_len = 8;
    const BeamSearchResult r = beam_search(model, options);
    bool truncated = false;
    const auto greedy = greedy_decode(model, 8, 1, &truncated);
    const auto& top = r.finished.empty() ? r.unfinished : r.finished;
    ASSERT_EQ(top.front().tokens, greedy) << "seed " << seed;
    EXPECT_EQ(r.finished.empty(), truncated);
  }
}

TEST(BeamSearch, MinimumLengthBansEarlyEnd) {
  const FixedModel model({0.1, 0.9});
  BeamSearchOptions options;
  options.max_len = 5;
  const BeamSearchResult r = beam_search(model, options);
  for (const auto& h : r.finished) EXPECT_FALSE(h.tokens.empty());
}

TEST(BeamSearch, Validation) {
  const FixedModel model({0.5, 0.5});
  BeamSearchOptions options;
  options.beam_width = 0;
  EXPECT_THROW(beam_search(model, options), ValidationError);
  options.beam_width = 2;
  options.max_len = 0;
  EXPECT_THROW(beam_search(model, options), ValidationError);
}

TEST(BeamSearch, WiderBeamsOnSmallModelsDoNotLowerTheTopScore) {
  std::size_t violations = 0;
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const testkit::HashedModel model(4, seed + 1000);
    double previous = -INFINITY;
    for (std::size_t width = 1; width <= 6; ++width) {
      BeamSearchOptions options;
      options.beam_width = width;
      options.max_len = 5;
      const BeamSearchResult r = beam_search(model, options);
      if (r.finished.empty()) continue;
      const double top = r.finished.front().score;
      if (top < previous) ++violations;
      previous = std::max(previous, top);
      ++checked;
    }
  }
  RecordProperty("widths_checked", static_cast<int>(checked));
  EXPECT_EQ(violations, 0u);
}

TEST(Top3Beam, ExactlyThreeSequencesHaveMass) {
  // t0 </s> (0.5), t1 </s> (0.3), t0 t1 </s> (0.2 overall).
  const TableModel model(3, {{{}, {0.6, 0.3, 0.1}},
                             {{0}, {0.0, 1.0 / 6.0, 5.0 / 6.0}},
                             {{1}, {0.0, 0.0, 1.0}},
                             {{0, 1}, {0.0, 0.0, 1.0}}});
  BeamSearchOptions options;
  options.max_len = 5;
  options.alpha = 0.0;
  options.min_len = 1;
  const GenerationSet set = generate_top3_beam(model, options);
  EXPECT_EQ(set.sentences, (std::vector<std::string>{"t0", "t1", "t0 t1"}));
  EXPECT_FALSE(set.filled);
  EXPECT_FALSE(set.truncated);
  EXPECT_EQ(generate_top3_beam(model, options), set);
}

TEST(Top3Beam, SingleSequenceFillsTheSet) {
  const TableModel model(2, {{{}, {1.0, 0.0}}, {{0}, {0.0, 1.0}}});
  BeamSearchOptions options;
  options.max_len = 4;
  const GenerationSet set = generate_top3_beam(model, options);
  EXPECT_EQ(set.sentences, (std::vector<std::string>{"t0", "t0", "t0"}));
  EXPECT_TRUE(set.filled);
  options.beam_width = 2;
  EXPECT_THROW(generate_top3_beam(model, options), ValidationError);
}

TEST(Sampling, DeterministicDistributionRepeats) {
  const TableModel model(2, {{{}, {1.0, 0.0}}, {{0}, {0.0, 1.0}}});
  const GenerationSet set = generate_random(model, 5, 10);
  EXPECT_EQ(set.sentences, (std::vector<std::string>{"t0", "t0", "t0"}));
  EXPECT_EQ(set.strategy, Strategy::kTotalRandom);
}

TEST(Sampling, FixedSeedReproduces) {
  const testkit::HashedModel model(6, 9);
  EXPECT_EQ(generate_random(model, 3, 12, "x"), generate_random(model, 3, 12, "x"));
  EXPECT_NE(generate_random(model, 3, 12, "x").sentences,
            generate_random(model, 4, 12, "x").sentences);
  EXPECT_EQ(generate_topk_random(model, 2, 3, 12, "x"), generate_topk_random(model, 2, 3, 12, "x"));
}

TEST(Sampling, FullTopKEqualsTotalRandom) {
  const testkit::HashedModel model(5, 17);
  const GenerationSet all = generate_random(model, 11, 10, "q");
  const GenerationSet k5 = generate_topk_random(model, 5, 11, 10, "q");
  EXPECT_EQ(all.sentences, k5.sentences);
}

TEST(Sampling, TopOneIsGreedy) {
  const testkit::HashedModel model(5, 23);
  const GenerationSet set = generate_topk_random(model, 1, 99, 10);
  const auto greedy = greedy_decode(model, 10, 1);
  EXPECT_EQ(set.sentences[0], detokenize(model, greedy));
  EXPECT_EQ(set.sentences[1], set.sentences[0]);
  EXPECT_EQ(set.sentences[2], set.sentences[0]);
}

// Empirical first-token frequencies over n draws stay within 3 sigma of the
// target probabilities.
void expect_frequencies(std::size_t top_k, const std::vector<double>& p,
                        const std::vector<double>& target) {
  const FixedModel model(p);
  const int n = 10000;
  std::vector<int> counts(p.size(), 0);
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(2024, "freq", static_cast<std::uint64_t>(i)));
    const auto tokens = sample_sequence(model, rng, top_k, 1, 0);
    ++counts[tokens.empty() ? model.eos() : tokens[0]];
  }
  for (std::size_t t = 0; t < p.size(); ++t) {
    const double sigma = std::sqrt(n * target[t] * (1.0 - target[t]));
    EXPECT_LE(std::abs(counts[t] - n * target[t]), 3.0 * sigma + 1e-9)
        << "token " << t << " count " << counts[t];
  }
}

TEST(Sampling, FrequenciesMatchFullDistribution) {
  expect_frequencies(0, {0.5, 0.3, 0.15, 0.05}, {0.5, 0.3, 0.15, 0.05});
}

TEST(Sampling, FrequenciesMatchRenormalizedTopTwo) {
  expect_frequencies(2, {0.2, 0.5, 0.3}, {0.0, 0.625, 0.375});
}

TEST(Sampling, TopKTiesPreferSmallerIds) {
  const FixedModel model({0.25, 0.25, 0.25, 0.25});
  for (int i = 0; i < 200; ++i) {
    Rng rng(static_cast<std::uint64_t>(i));
    const auto tokens = sample_sequence(model, rng, 1, 3, 0);
    for (TokenId t : tokens) EXPECT_EQ(t, 0u);
  }
}

TEST(Sampling, MaxLengthTruncates) {
  const FixedModel model({1.0, 0.0});
  Rng rng(1);
  bool truncated = false;
  const auto tokens = sample_sequence(model, rng, 0, 6, 1, &truncated);
  EXPECT_EQ(tokens.size(), 6u);
  EXPECT_TRUE(truncated);
  EXPECT_TRUE(generate_random(model, 0, 6).truncated);
}

TEST(Random, SeedDerivationIsStable) {
  EXPECT_EQ(derive_seed(7, "a", 0), derive_seed(7, "a", 0));
  EXPECT_NE(derive_seed(7, "a", 0), derive_seed(7, "a", 1));
  EXPECT_NE(derive_seed(7, "a", 0), derive_seed(7, "b", 0));
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  Rng a(123);
  Rng b(123);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Ensemble, IdenticalModelsGiveIdenticalSentences) {
  const NGramLM lm = train_ngram(Corpus{{"a", "b", "c"}, {"a", "c"}}, 2, 0.1);
  const std::vector<const SequenceModel*> models{&lm, &lm, &lm};
  const GenerationSet set = generate_ensemble(models, {});
  EXPECT_EQ(set.sentences[0], set.sentences[1]);
  EXPECT_EQ(set.sentences[1], set.sentences[2]);
  EXPECT_EQ(set.strategy, Strategy::kEnsemble);
}

TEST(Ensemble, EachSentenceIsItsModelsBestOutput) {
  const NGramLM a = train_ngram(Corpus{{"red", "apple"}}, 2, 0.0);
  const NGramLM b = train_ngram(Corpus{{"green", "pear"}}, 2, 0.0);
  const NGramLM c = train_ngram(Corpus{{"blue", "plum", "tree"}}, 2, 0.0);
  const std::vector<const SequenceModel*> models{&a, &b, &c};
  const GenerationSet set = generate_ensemble(models, {});
  EXPECT_EQ(set.sentences, (std::vector<std::string>{"red apple", "green pear", "blue plum tree"}));
  const std::vector<const SequenceModel*> two{&a, &b};
  EXPECT_THROW(generate_ensemble(two, {}), ValidationError);
}

TEST(Strategy, NamesRoundTrip) {
  for (Strategy s : {Strategy::kBeamTop3, Strategy::kTotalRandom, Strategy::kTopKRandom,
                     Strategy::kEnsemble}) {
    EXPECT_EQ(parse_strategy(to_string(s)), s);
  }
  EXPECT_THROW(parse_strategy("nucleus"), ValidationError);
}

class DemoCorpus : public ::testing::Test {
 protected:
  static EvaluationReport run(Strategy strategy, unsigned threads = 1) {
    const Dataset refs = load_jsonl(fs::path(MULTISCORE_DATA_DIR) / "demo" / "demo_refs.jsonl");
    GenerateOptions options;
    options.strategy = strategy;
    options.seed = 7;
    const auto sets = generate_for_dataset(refs, options, threads);
    OutputSets outputs;
    for (const auto& s : sets) {
      EXPECT_EQ(s.sentences.size(), kSetSize);
      outputs.entries.emplace_back(s.instance_id, s.sentences);
    }
    return evaluate_all(bind_outputs(refs, outputs));
  }
};

// Golden values measured on the shipped demo corpus (order 3, add_k 0.1,
// seed 7) and frozen before the ordering checks were written.
TEST_F(DemoCorpus, GoldenValues) {
  const EvaluationReport beam = run(Strategy::kBeamTop3);
  const EvaluationReport topk = run(Strategy::kTopKRandom);
  const EvaluationReport random = run(Strategy::kTotalRandom);
  const EvaluationReport ensemble = run(Strategy::kEnsemble);
  EXPECT_EQ(format_fixed2(*beam.self_bleu), "64.99");
  EXPECT_EQ(format_fixed2(beam.bleu), "47.96");
  EXPECT_EQ(format_fixed2(*topk.self_bleu), "40.55");
  EXPECT_EQ(format_fixed2(*random.self_bleu), "10.64");
  EXPECT_EQ(format_fixed2(random.bleu), "9.29");
  EXPECT_EQ(format_fixed2(*ensemble.self_bleu), "41.72");
  EXPECT_LE(*ensemble.self_bleu, *beam.self_bleu);
}

TEST_F(DemoCorpus, ThreadsDoNotChangeGeneration) {
  const Dataset refs = load_jsonl(fs::path(MULTISCORE_DATA_DIR) / "demo" / "demo_refs.jsonl");
  for (Strategy s : {Strategy::kBeamTop3, Strategy::kTopKRandom, Strategy::kEnsemble}) {
    GenerateOptions options;
    options.strategy = s;
    options.seed = 3;
    EXPECT_EQ(generate_for_dataset(refs, options, 1), generate_for_dataset(refs, options, 4));
  }
}

TEST(Generation, JsonlCarriesMetadata) {
  GenerationSet set;
  set.instance_id = "i1";
  set.strategy = Strategy::kTopKRandom;
  set.sentences = {"a", "b", "c"};
  set.seed = 7;
  const std::vector<GenerationSet> sets{set};
  EXPECT_EQ(generation_to_jsonl(sets),
            "{\"filled\":false,\"id\":\"i1\",\"outputs\":[\"a\",\"b\",\"c\"],\"seed\":7,"
            "\"strategy\":\"topk3\",\"truncated\":false}\n");
}

TEST(Generation, EnsembleOnSingleInstanceGivesThreeSentences) {
  const Dataset d = parse_jsonl(
      "{\"id\":\"one\",\"references\":[\"the cat sat\",\"a dog ran\",\"birds sing\"]}\n");
  GenerateOptions options;
  options.strategy = Strategy::kEnsemble;
  const auto sets = generate_for_dataset(d, options);
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_EQ(sets[0].sentences, (std::vector<std::string>{"the cat sat", "a dog ran", "birds sing"}));
}

}  // namespace
