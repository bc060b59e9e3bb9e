// Copyright 2026 The Multi-Score Authors
// SPDX-License-Identifier: Apache-2.0

#include "multiscore/decoding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "multiscore/error.hpp"
#include "multiscore/parallel.hpp"

namespace multiscore {

namespace {

constexpr std::string_view kModelMagic = "multiscore-ngram 1";

bool valid_token(std::string_view token) {
  if (token.empty()) return false;
  return std::none_of(token.begin(), token.end(), [](char ch) {
    const auto byte = static_cast<unsigned char>(ch);
    return byte <= 0x20 || byte == 0x7F;
  });
}

std::string format_double(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

template <typename T>
T parse_number(std::string_view text, const char* what) {
  T value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ValidationError(std::string("n-gram model: bad ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto pos = text.find(sep);
    parts.push_back(text.substr(0, pos));
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return parts;
}

// Line reader that names the line in errors.
class LineCursor {
 public:
  explicit LineCursor(std::string_view text) : text_(text) {}

  std::string_view next() {
    if (text_.empty()) throw ValidationError("n-gram model: unexpected end of data");
    const auto end = text_.find('\n');
    std::string_view line = text_.substr(0, end);
    text_ = end == std::string_view::npos ? std::string_view{} : text_.substr(end + 1);
    return line;
  }

  std::string_view expect_field(std::string_view name) {
    std::string_view line = next();
    if (line.substr(0, name.size()) != name || line.size() <= name.size() ||
        line[name.size()] != ' ') {
      throw ValidationError("n-gram model: expected '" + std::string(name) + "' line");
    }
    return line.substr(name.size() + 1);
  }

 private:
  std::string_view text_;
};

void validate_beam_options(const BeamSearchOptions& options) {
  if (options.beam_width < 1) throw ValidationError("beam_width must be at least 1");
  if (options.max_len < 1) throw ValidationError("max_len must be at least 1");
  if (!std::isfinite(options.alpha)) throw ValidationError("alpha must be finite");
}

std::vector<double> allowed_distribution(const SequenceModel& model,
                                         std::span<const TokenId> prefix, std::size_t min_len) {
  std::vector<double> dist = model.next_distribution(prefix);
  if (dist.size() != model.vocabulary().size()) {
    throw ValidationError("model returned a distribution of the wrong size");
  }
  if (prefix.size() < min_len) dist[model.eos()] = 0.0;
  return dist;
}

}  // namespace

NGramLM::NGramLM(int order, double add_k, std::vector<std::string> vocabulary)
    : order_(order), add_k_(add_k), vocabulary_(std::move(vocabulary)) {
  if (order_ < 1) throw ValidationError("n-gram order must be at least 1");
  if (!(add_k_ >= 0.0) || !std::isfinite(add_k_)) {
    throw ValidationError("add_k must be a finite non-negative number");
  }
  if (vocabulary_.empty() || vocabulary_.back() != kEosToken) {
    throw ValidationError("vocabulary must end with the end-of-sequence token");
  }
  for (std::size_t k = 0; k < vocabulary_.size(); ++k) {
    if (!valid_token(vocabulary_[k])) {
      throw ValidationError("vocabulary token " + std::to_string(k) + " is empty or has whitespace");
    }
    if (!index_.emplace(vocabulary_[k], static_cast<TokenId>(k)).second) {
      throw ValidationError("duplicate vocabulary token '" + vocabulary_[k] + "'");
    }
  }
}

NGramLM::Context NGramLM::context_key(std::span<const TokenId> history) const {
  const auto width = static_cast<std::size_t>(order_ - 1);
  Context key(width, kBegin);
  const std::size_t take = std::min(width, history.size());
  std::copy(history.end() - static_cast<std::ptrdiff_t>(take), history.end(),
            key.end() - static_cast<std::ptrdiff_t>(take));
  return key;
}

std::optional<TokenId> NGramLM::token_id(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void NGramLM::observe(std::span<const TokenId> context, TokenId token) {
  if (token >= vocabulary_.size()) throw ValidationError("token id out of range");
  Row& row = table_[context_key(context)];
  if (row.counts.empty()) row.counts.assign(vocabulary_.size(), 0);
  ++row.counts[token];
  ++row.total;
}

std::uint64_t NGramLM::count(std::span<const TokenId> context, TokenId token) const {
  auto it = table_.find(context_key(context));
  if (it == table_.end() || token >= it->second.counts.size()) return 0;
  return it->second.counts[token];
}

std::vector<double> NGramLM::next_distribution(std::span<const TokenId> context) const {
  const std::size_t size = vocabulary_.size();
  std::vector<double> dist(size);
  auto it = table_.find(context_key(context));
  const std::uint64_t total = it == table_.end() ? 0 : it->second.total;
  const double denominator = static_cast<double>(total) + add_k_ * static_cast<double>(size);
  if (denominator <= 0.0) {
    std::fill(dist.begin(), dist.end(), 1.0 / static_cast<double>(size));
    return dist;
  }
  for (std::size_t t = 0; t < size; ++t) {
    const double c = it == table_.end() ? 0.0 : static_cast<double>(it->second.counts[t]);
    dist[t] = (c + add_k_) / denominator;
  }
  return dist;
}

std::string NGramLM::serialize() const {
  std::string out;
  out += kModelMagic;
  out += "\norder " + std::to_string(order_);
  out += "\nadd_k " + format_double(add_k_);
  out += "\nvocab " + std::to_string(vocabulary_.size()) + "\n";
  for (const auto& token : vocabulary_) out += token + "\n";
  out += "contexts " + std::to_string(table_.size()) + "\n";
  for (const auto& [context, row] : table_) {
    for (std::size_t k = 0; k < context.size(); ++k) {
      if (k > 0) out += ' ';
      out += context[k] == kBegin ? std::string("^") : std::to_string(context[k]);
    }
    out += '\t';
    bool first = true;
    for (std::size_t t = 0; t < row.counts.size(); ++t) {
      if (row.counts[t] == 0) continue;
      if (!first) out += ' ';
      first = false;
      out += std::to_string(t) + ":" + std::to_string(row.counts[t]);
    }
    out += '\n';
  }
  return out;
}

NGramLM NGramLM::deserialize(std::string_view text) {
  LineCursor cursor(text);
  if (cursor.next() != kModelMagic) throw ValidationError("n-gram model: unknown format header");
  const int order = parse_number<int>(cursor.expect_field("order"), "order");
  const double add_k = parse_number<double>(cursor.expect_field("add_k"), "add_k");
  const auto vocab_size = parse_number<std::size_t>(cursor.expect_field("vocab"), "vocab size");
  std::vector<std::string> vocabulary;
  vocabulary.reserve(vocab_size);
  for (std::size_t k = 0; k < vocab_size; ++k) vocabulary.emplace_back(cursor.next());
  NGramLM model(order, add_k, std::move(vocabulary));

  const auto contexts = parse_number<std::size_t>(cursor.expect_field("contexts"), "contexts");
  const auto width = static_cast<std::size_t>(order - 1);
  for (std::size_t c = 0; c < contexts; ++c) {
    const std::string_view line = cursor.next();
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ValidationError("n-gram model: malformed context row");
    Context key;
    if (width > 0) {
      for (std::string_view id : split(line.substr(0, tab), ' ')) {
        key.push_back(id == "^" ? kBegin : parse_number<TokenId>(id, "context token"));
      }
    }
    if (key.size() != width) throw ValidationError("n-gram model: context of wrong length");
    Row row;
    row.counts.assign(model.vocabulary_.size(), 0);
    const std::string_view cells = line.substr(tab + 1);
    if (!cells.empty()) {
      for (std::string_view cell : split(cells, ' ')) {
        const auto colon = cell.find(':');
        if (colon == std::string_view::npos) throw ValidationError("n-gram model: malformed count");
        const auto token = parse_number<TokenId>(cell.substr(0, colon), "token id");
        const auto value = parse_number<std::uint64_t>(cell.substr(colon + 1), "count");
        if (token >= row.counts.size()) throw ValidationError("n-gram model: token id out of range");
        row.counts[token] = value;
        row.total += value;
      }
    }
    model.table_.emplace(std::move(key), std::move(row));
  }
  return model;
}

void NGramLM::save(const std::filesystem::path& path) const {
  write_file_atomic(path, serialize());
}

NGramLM NGramLM::load(const std::filesystem::path& path) { return deserialize(read_file(path)); }

NGramLM train_ngram(std::span<const std::vector<std::string>> corpus, int order, double add_k) {
  if (corpus.empty()) throw ValidationError("cannot train an n-gram model on an empty corpus");
  std::set<std::string> tokens;
  for (const auto& sequence : corpus) {
    if (sequence.empty()) throw ValidationError("training sequences must be non-empty");
    for (const auto& token : sequence) {
      if (token == kEosToken) throw ValidationError("training data contains the reserved token </s>");
      tokens.insert(token);
    }
  }
  std::vector<std::string> vocabulary(tokens.begin(), tokens.end());
  vocabulary.emplace_back(kEosToken);
  NGramLM model(order, add_k, std::move(vocabulary));

  std::vector<TokenId> history;
  for (const auto& sequence : corpus) {
    history.clear();
    for (const auto& token : sequence) {
      const TokenId id = *model.token_id(token);
      model.observe(history, id);
      history.push_back(id);
    }
    model.observe(history, model.eos());
  }
  return model;
}

double length_penalty(std::size_t length, double alpha) {
  return std::pow((5.0 + static_cast<double>(length)) / 6.0, alpha);
}

bool ranks_before(const Hypothesis& a, const Hypothesis& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.tokens < b.tokens;
}

void rank_hypotheses(std::vector<Hypothesis>& hypotheses) {
  std::sort(hypotheses.begin(), hypotheses.end(), ranks_before);
}

BeamSearchResult beam_search(const SequenceModel& model, const BeamSearchOptions& options) {
  validate_beam_options(options);
  const TokenId eos = model.eos();

  struct Candidate {
    std::size_t parent;
    TokenId token;
    double log_prob;
  };

  std::vector<Hypothesis> live(1);
  BeamSearchResult result;
  std::vector<Candidate> candidates;
  for (std::size_t step = 0; step < options.max_len && !live.empty(); ++step) {
    const std::size_t slots = options.beam_width - result.finished.size();
    if (slots == 0) {
      live.clear();
      break;
    }
    candidates.clear();
    for (std::size_t p = 0; p < live.size(); ++p) {
      const auto dist = allowed_distribution(model, live[p].tokens, options.min_len);
      for (TokenId t = 0; t < dist.size(); ++t) {
        if (dist[t] > 0.0) candidates.push_back({p, t, live[p].log_prob + std::log(dist[t])});
      }
    }
    // Live prefixes all have the same length, so comparing (parent tokens,
    // token) is the lexicographic order of the extended sequences.
    auto better = [&](const Candidate& a, const Candidate& b) {
      if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
      if (a.parent != b.parent && live[a.parent].tokens != live[b.parent].tokens) {
        return live[a.parent].tokens < live[b.parent].tokens;
      }
      return a.token < b.token;
    };
    const std::size_t keep = std::min(slots, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                      candidates.end(), better);

    std::vector<Hypothesis> next;
    for (std::size_t k = 0; k < keep; ++k) {
      const Candidate& c = candidates[k];
      Hypothesis h{live[c.parent].tokens, c.log_prob, 0.0, c.token == eos};
      if (h.finished) {
        h.score = h.log_prob / length_penalty(h.tokens.size() + 1, options.alpha);
        result.finished.push_back(std::move(h));
      } else {
        h.tokens.push_back(c.token);
        next.push_back(std::move(h));
      }
    }
    live = std::move(next);
  }
  for (auto& h : live) {
    h.score = h.log_prob / length_penalty(h.tokens.size(), options.alpha);
    result.unfinished.push_back(std::move(h));
  }
  rank_hypotheses(result.finished);
  rank_hypotheses(result.unfinished);
  return result;
}

std::vector<TokenId> greedy_decode(const SequenceModel& model, std::size_t max_len,
                                   std::size_t min_len, bool* truncated) {
  std::vector<TokenId> tokens;
  double log_prob = 0.0;
  for (std::size_t step = 0; step < max_len; ++step) {
    const auto dist = allowed_distribution(model, tokens, min_len);
    std::optional<TokenId> best;
    double best_log_prob = 0.0;
    for (TokenId t = 0; t < dist.size(); ++t) {
      if (dist[t] <= 0.0) continue;
      const double candidate = log_prob + std::log(dist[t]);
      if (!best || candidate > best_log_prob) {
        best = t;
        best_log_prob = candidate;
      }
    }
    if (!best) throw ValidationError("model assigns no probability to any allowed token");
    if (*best == model.eos()) {
      if (truncated) *truncated = false;
      return tokens;
    }
    tokens.push_back(*best);
    log_prob = best_log_prob;
  }
  if (truncated) *truncated = true;
  return tokens;
}

std::vector<TokenId> sample_sequence(const SequenceModel& model, Rng& rng, std::size_t top_k,
                                     std::size_t max_len, std::size_t min_len, bool* truncated) {
  std::vector<TokenId> tokens;
  std::vector<TokenId> order;
  for (std::size_t step = 0; step < max_len; ++step) {
    auto dist = allowed_distribution(model, tokens, min_len);
    if (top_k > 0 && top_k < dist.size()) {
      order.resize(dist.size());
      std::iota(order.begin(), order.end(), TokenId{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](TokenId a, TokenId b) { return dist[a] > dist[b]; });
      for (std::size_t r = top_k; r < order.size(); ++r) dist[order[r]] = 0.0;
    }
    double total = 0.0;
    for (double p : dist) total += p;
    if (!(total > 0.0)) throw ValidationError("model assigns no probability to any allowed token");

    // If rounding leaves u past the last bucket, the last non-zero token wins.
    const double u = rng.uniform() * total;
    double cumulative = 0.0;
    TokenId chosen = 0;
    for (TokenId t = 0; t < dist.size(); ++t) {
      if (dist[t] <= 0.0) continue;
      chosen = t;
      cumulative += dist[t];
      if (u < cumulative) break;
    }
    if (chosen == model.eos()) {
      if (truncated) *truncated = false;
      return tokens;
    }
    tokens.push_back(chosen);
  }
  if (truncated) *truncated = true;
  return tokens;
}

std::string detokenize(const SequenceModel& model, std::span<const TokenId> tokens) {
  std::string out;
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    if (k > 0) out += ' ';
    out += model.vocabulary().at(tokens[k]);
  }
  return out;
}

const char* to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::kBeamTop3:
      return "beam3";
    case Strategy::kTotalRandom:
      return "random";
    case Strategy::kTopKRandom:
      return "topk3";
    case Strategy::kEnsemble:
      return "ensemble";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : {Strategy::kBeamTop3, Strategy::kTotalRandom, Strategy::kTopKRandom,
                     Strategy::kEnsemble}) {
    if (name == to_string(s)) return s;
  }
  throw ValidationError("unknown strategy '" + std::string(name) +
                        "' (expected beam3, random, topk3 or ensemble)");
}

GenerationSet generate_top3_beam(const SequenceModel& model, const BeamSearchOptions& options,
                                 std::string instance_id) {
  if (options.beam_width < kSetSize) throw ValidationError("top-3 beam search needs beam_width >= 3");
  const BeamSearchResult beams = beam_search(model, options);
  GenerationSet set;
  set.instance_id = std::move(instance_id);
  set.strategy = Strategy::kBeamTop3;

  std::vector<const Hypothesis*> picked;
  for (const auto& h : beams.finished) {
    if (picked.size() == kSetSize) break;
    picked.push_back(&h);
  }
  set.filled = picked.size() < kSetSize;
  for (const auto& h : beams.unfinished) {
    if (picked.size() == kSetSize) break;
    picked.push_back(&h);
    set.truncated = true;
  }
  if (picked.empty()) throw ValidationError("beam search produced no hypotheses");
  for (std::size_t k = 0; picked.size() < kSetSize; ++k) picked.push_back(picked[k]);
  for (const Hypothesis* h : picked) set.sentences.push_back(detokenize(model, h->tokens));
  return set;
}

GenerationSet generate_random(const SequenceModel& model, std::uint64_t seed, std::size_t max_len,
                              std::string instance_id, std::size_t min_len) {
  // Total random sampling is top-k with no truncation.
  GenerationSet set = generate_topk_random(model, 0, seed, max_len, std::move(instance_id), min_len);
  set.strategy = Strategy::kTotalRandom;
  return set;
}

GenerationSet generate_topk_random(const SequenceModel& model, std::size_t k, std::uint64_t seed,
                                   std::size_t max_len, std::string instance_id,
                                   std::size_t min_len) {
  if (max_len < 1) throw ValidationError("max_len must be at least 1");
  GenerationSet set;
  set.instance_id = std::move(instance_id);
  set.strategy = Strategy::kTopKRandom;
  set.seed = seed;
  for (std::size_t i = 0; i < kSetSize; ++i) {
    Rng rng(derive_seed(seed, set.instance_id, i));
    bool truncated = false;
    const auto tokens = sample_sequence(model, rng, k, max_len, min_len, &truncated);
    set.truncated = set.truncated || truncated;
    set.sentences.push_back(detokenize(model, tokens));
  }
  return set;
}

GenerationSet generate_ensemble(std::span<const SequenceModel* const> models,
                                const BeamSearchOptions& options, std::string instance_id) {
  if (models.size() != kSetSize) {
    throw ValidationError("ensemble needs exactly 3 models, got " + std::to_string(models.size()));
  }
  GenerationSet set;
  set.instance_id = std::move(instance_id);
  set.strategy = Strategy::kEnsemble;
  for (const SequenceModel* model : models) {
    const BeamSearchResult beams = beam_search(*model, options);
    const Hypothesis* best = nullptr;
    if (!beams.finished.empty()) {
      best = &beams.finished.front();
    } else if (!beams.unfinished.empty()) {
      best = &beams.unfinished.front();
      set.truncated = true;
    } else {
      throw ValidationError("beam search produced no hypotheses");
    }
    set.sentences.push_back(detokenize(*model, best->tokens));
  }
  return set;
}

std::vector<GenerationSet> generate_for_dataset(const Dataset& dataset,
                                                const GenerateOptions& options, unsigned threads) {
  if (dataset.size() == 0) throw ValidationError("training data has no instances");
  if (threads == 0) threads = default_thread_count();
  std::vector<std::optional<GenerationSet>> slots(dataset.size());

  parallel_for(dataset.size(), threads, [&](std::size_t i) {
    const EvalInstance& instance = dataset.instances()[i];
    std::vector<std::vector<std::string>> corpus;
    for (const auto& ref : instance.references) corpus.push_back(ref.tokens());

    GenerationSet set;
    switch (options.strategy) {
      case Strategy::kBeamTop3: {
        const NGramLM model = train_ngram(corpus, options.order, options.add_k);
        BeamSearchOptions beam = options.beam;
        beam.beam_width = std::max(beam.beam_width, kSetSize);
        set = generate_top3_beam(model, beam, instance.id);
        break;
      }
      case Strategy::kTotalRandom: {
        const NGramLM model = train_ngram(corpus, options.order, options.add_k);
        set = generate_random(model, options.seed, options.beam.max_len, instance.id,
                              options.beam.min_len);
        break;
      }
      case Strategy::kTopKRandom: {
        const NGramLM model = train_ngram(corpus, options.order, options.add_k);
        set = generate_topk_random(model, options.top_k, options.seed, options.beam.max_len,
                                   instance.id, options.beam.min_len);
        break;
      }
      case Strategy::kEnsemble: {
        std::vector<NGramLM> members;
        for (std::size_t shard = 0; shard < kSetSize; ++shard) {
          std::vector<std::vector<std::string>> part;
          for (std::size_t j = shard; j < corpus.size(); j += kSetSize) part.push_back(corpus[j]);
          if (part.empty()) part.push_back(corpus[shard % corpus.size()]);
          members.push_back(train_ngram(part, options.order, options.add_k));
        }
        const std::vector<const SequenceModel*> pointers{&members[0], &members[1], &members[2]};
        set = generate_ensemble(pointers, options.beam, instance.id);
        break;
      }
    }
    set.seed = options.seed;
    slots[i] = std::move(set);
  });

  std::vector<GenerationSet> sets;
  sets.reserve(slots.size());
  for (auto& slot : slots) sets.push_back(std::move(*slot));
  return sets;
}

std::string generation_to_jsonl(std::span<const GenerationSet> sets) {
  std::string out;
  for (const auto& set : sets) {
    nlohmann::json object;
    object["id"] = set.instance_id;
    object["outputs"] = set.sentences;
    object["strategy"] = to_string(set.strategy);
    object["seed"] = set.seed;
    object["truncated"] = set.truncated;
    object["filled"] = set.filled;
    out += object.dump();
    out += '\n';
  }
  return out;
}

}  // namespace multiscore
