// Copyright 2026 The Multi-Score Authors
// SPDX-License-Identifier: Apache-2.0

#include "multiscore/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "multiscore/corpus.hpp"
#include "multiscore/decoding.hpp"
#include "multiscore/error.hpp"
#include "multiscore/parallel.hpp"
#include "multiscore/report.hpp"

namespace multiscore {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonFlags {
  std::string data;
  std::string outputs;
  std::string out;
  std::string format = "json";
  bool allow_unequal = false;
  bool cased = false;
  unsigned threads = 0;
};

void require_readable(const std::string& path, const char* flag) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw IoError(std::string(flag) + ": cannot read '" + path + "'");
  }
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError(std::string(flag) + ": cannot read '" + path + "'");
}

void require_writable_parent(const std::string& path) {
  if (path.empty()) return;
  const fs::path parent = fs::absolute(path).parent_path();
  std::error_code ec;
  if (!fs::is_directory(parent, ec)) {
    throw IoError("--out: directory '" + parent.string() + "' does not exist");
  }
}

void emit(const std::string& payload, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << payload;
    out.flush();
  } else {
    write_file_atomic(out_path, payload);
  }
}

TokenizerOptions tokenizer_options(const CommonFlags& flags) {
  TokenizerOptions options;
  options.lowercase = !flags.cased;
  return options;
}

Dataset load_evaluable(const CommonFlags& flags, std::ostream& err) {
  const TokenizerOptions options = tokenizer_options(flags);
  Dataset dataset = load_jsonl(flags.data, options);
  if (!flags.outputs.empty()) {
    dataset = bind_outputs(dataset, load_outputs_jsonl(flags.outputs), options);
  }
  err << "loaded " << dataset.size() << " instances from " << flags.data << "\n";
  return dataset;
}

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--outputs", flags.outputs,
                  "JSONL file of {id, outputs}; omit when outputs are inline in --data");
  cmd->add_option("--out", flags.out, "Write the report here instead of stdout");
  cmd->add_flag("--allow-unequal", flags.allow_unequal,
                "Match min(outputs, references) pairs when set sizes differ");
  cmd->add_flag("--cased", flags.cased, "Disable lowercasing before scoring");
  cmd->add_option("--threads", flags.threads,
                  std::string("Worker threads (default: $") + kThreadsEnvVar + " or 1)")
      ->check(CLI::PositiveNumber);
}

int cmd_evaluate(const CommonFlags& flags, bool summary_only, std::ostream& out,
                 std::ostream& err) {
  const ReportFormat format = parse_report_format(flags.format);
  require_readable(flags.data, "--data");
  if (!flags.outputs.empty()) require_readable(flags.outputs, "--outputs");
  require_writable_parent(flags.out);

  const Dataset dataset = load_evaluable(flags, err);
  EvaluationConfig config;
  config.tokenizer = tokenizer_options(flags);
  config.multiscore.allow_unequal = flags.allow_unequal;
  config.threads = flags.threads;
  const EvaluationReport report = evaluate_all(dataset, config);
  for (const auto& warning : report.warnings) err << "warning: " << warning << "\n";
  emit(render(report, format, !summary_only), flags.out, out);
  return kExitOk;
}

struct MultiScoreFlags {
  std::string metric = "bleu";
  std::string matrix;
  bool per_instance = false;
};

// Replays JSONL lines {id, outputs, references, scores} through the
// Multi-Score path with a lookup metric.
std::vector<MultiScoreResult> score_precomputed(const std::string& path,
                                                const MultiScoreOptions& options,
                                                const TokenizerOptions& tokenizer) {
  std::vector<MultiScoreResult> results;
  const std::string text = read_file(path);
  std::size_t line_number = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    ++line_number;
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_number);
    json object;
    try {
      object = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError(where + ": malformed JSON: " + e.what());
    }
    try {
      const auto id = object.at("id").get<std::string>();
      const auto outputs = object.at("outputs").get<std::vector<std::string>>();
      const auto references = object.at("references").get<std::vector<std::string>>();
      const auto scores = object.at("scores").get<std::vector<std::vector<double>>>();
      if (scores.size() != outputs.size()) {
        throw ValidationError("\"scores\" needs one row per output");
      }
      PrecomputedMetric metric;
      for (std::size_t i = 0; i < outputs.size(); ++i) {
        if (scores[i].size() != references.size()) {
          throw ValidationError("\"scores\" row " + std::to_string(i) +
                                " needs one entry per reference");
        }
        for (std::size_t j = 0; j < references.size(); ++j) {
          metric.set(outputs[i], references[j], scores[i][j]);
        }
      }
      EvalInstance instance{id, std::nullopt, make_sentences(references, tokenizer),
                            make_sentences(outputs, tokenizer)};
      results.push_back(multi_score(instance, metric, options));
    } catch (const json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  if (results.empty()) throw ValidationError(path + ": no instances");
  return results;
}

int cmd_multiscore(const CommonFlags& flags, const MultiScoreFlags& ms, std::ostream& out,
                   std::ostream& err) {
  if (flags.format != "json" && flags.format != "text") {
    throw ValidationError("--format must be json or text for multiscore");
  }
  if (ms.metric != "bleu" && ms.metric != "chrf") {
    throw ValidationError("--metric must be bleu or chrf");
  }
  if (ms.matrix.empty() == flags.data.empty()) {
    throw ValidationError("give exactly one of --data or --matrix");
  }
  if (!ms.matrix.empty() && !flags.outputs.empty()) {
    throw ValidationError("--outputs cannot be combined with --matrix");
  }
  if (!ms.matrix.empty()) {
    require_readable(ms.matrix, "--matrix");
  } else {
    require_readable(flags.data, "--data");
    if (!flags.outputs.empty()) require_readable(flags.outputs, "--outputs");
  }
  require_writable_parent(flags.out);

  MultiScoreOptions options;
  options.allow_unequal = flags.allow_unequal;
  const unsigned threads = flags.threads == 0 ? default_thread_count() : flags.threads;

  CorpusMultiScore corpus;
  std::string metric_name;
  if (!ms.matrix.empty()) {
    corpus.instances = score_precomputed(ms.matrix, options, tokenizer_options(flags));
    double sum = 0.0;
    for (const auto& r : corpus.instances) sum += r.score;
    corpus.score = sum / static_cast<double>(corpus.instances.size());
    metric_name = "precomputed";
  } else {
    const Dataset dataset = load_evaluable(flags, err);
    for (const auto& instance : dataset.instances()) {
      if (instance.outputs.empty()) {
        throw ValidationError("instance '" + instance.id + "' has no outputs");
      }
    }
    if (ms.metric == "bleu") {
      corpus = corpus_multi_score(dataset.instances(), BleuMetric(), options, threads);
    } else {
      corpus = corpus_multi_score(dataset.instances(), ChrfMetric(), options, threads);
    }
    metric_name = ms.metric;
  }
  for (const auto& r : corpus.instances) {
    for (const auto& w : r.warnings) err << "warning: " << w << "\n";
  }

  std::string payload;
  const std::string label = metric_name == "chrf" ? "MS-C" : metric_name == "bleu" ? "MS-B" : "MS";
  if (flags.format == "json") {
    payload = "{\"allow_unequal\":" + std::string(flags.allow_unequal ? "true" : "false") +
              ",\"instance_count\":" + std::to_string(corpus.instances.size());
    if (ms.per_instance) {
      payload += ",\"instances\":[";
      for (std::size_t k = 0; k < corpus.instances.size(); ++k) {
        if (k > 0) payload += ',';
        payload += multiscore_result_json(corpus.instances[k]);
      }
      payload += "]";
    }
    payload += ",\"lowercase\":" + std::string(flags.cased ? "false" : "true") +
               ",\"metric\":" + json(metric_name).dump() + ",\"multi_score\":" +
               format_fixed2(corpus.score) + "}\n";
  } else {
    payload = label + "\t" + format_fixed2(corpus.score) + "\n";
    if (ms.per_instance) {
      for (const auto& r : corpus.instances) {
        payload += r.instance_id + "\t" + format_fixed2(r.score) + "\t";
        for (std::size_t k = 0; k < r.matching.edges.size(); ++k) {
          const Edge& e = r.matching.edges[k];
          if (k > 0) payload += ' ';
          payload += "o" + std::to_string(e.row + 1) + "->r" + std::to_string(e.col + 1) + ":" +
                     format_fixed2(r.matching.edge_weights[k]);
        }
        payload += "\n";
      }
    }
  }
  emit(payload, flags.out, out);
  return kExitOk;
}

struct GenerateFlags {
  std::string train;
  std::string strategy;
  std::string out;
  int order = 3;
  double add_k = 0.1;
  std::uint64_t seed = 0;
  std::size_t beam_width = 3;
  std::size_t max_len = 64;
  double alpha = 0.6;
  unsigned threads = 0;
  bool cased = false;
};

int cmd_generate(const GenerateFlags& flags, std::ostream& out, std::ostream& err) {
  GenerateOptions options;
  options.strategy = parse_strategy(flags.strategy);
  options.order = flags.order;
  options.add_k = flags.add_k;
  options.seed = flags.seed;
  options.beam.beam_width = flags.beam_width;
  options.beam.max_len = flags.max_len;
  options.beam.alpha = flags.alpha;
  if (options.strategy == Strategy::kBeamTop3 && flags.beam_width < kSetSize) {
    throw ValidationError("--beam-width must be at least 3 for beam3");
  }
  require_readable(flags.train, "--train");
  require_writable_parent(flags.out);

  TokenizerOptions tokenizer;
  tokenizer.lowercase = !flags.cased;
  const Dataset dataset = load_jsonl(flags.train, tokenizer);
  err << "generating " << to_string(options.strategy) << " sets for " << dataset.size()
      << " instances\n";
  const auto sets = generate_for_dataset(dataset, options, flags.threads);
  emit(generation_to_jsonl(sets), flags.out, out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-reference quality and diversity evaluation (BLEU, chrF++, Self-BLEU, "
               "Multi-Score)"};
  app.name("multiscore");
  app.require_subcommand(1);

  CommonFlags eval_flags;
  bool summary_only = false;
  auto* evaluate = app.add_subcommand("evaluate", "Full quality and diversity report");
  evaluate->add_option("--data", eval_flags.data, "JSONL references (and optional outputs)")
      ->required();
  evaluate->add_option("--format", eval_flags.format, "json | tsv | table")
      ->capture_default_str();
  evaluate->add_flag("--summary-only", summary_only, "Omit per-instance details");
  add_common(evaluate, eval_flags);

  CommonFlags ms_common;
  MultiScoreFlags ms_flags;
  auto* ms = app.add_subcommand("multiscore", "Multi-Score only");
  ms->add_option("--data", ms_common.data, "JSONL references (and optional outputs)");
  ms->add_option("--matrix", ms_flags.matrix,
                 "JSONL of {id, outputs, references, scores} with precomputed pair scores");
  ms->add_option("--metric", ms_flags.metric, "bleu | chrf")->capture_default_str();
  ms->add_flag("--per-instance", ms_flags.per_instance,
               "Emit each instance's matrix, matching and score");
  ms->add_option("--format", ms_common.format, "json | text")->capture_default_str();
  add_common(ms, ms_common);

  GenerateFlags gen;
  auto* generate = app.add_subcommand("generate", "Decode three-sentence output sets");
  generate->add_option("--train", gen.train, "JSONL references to train per-instance models")
      ->required();
  generate->add_option("--strategy", gen.strategy, "beam3 | random | topk3 | ensemble")
      ->required();
  generate->add_option("--order", gen.order, "n-gram order")->capture_default_str()
      ->check(CLI::PositiveNumber);
  generate->add_option("--add-k", gen.add_k, "add-k smoothing constant")->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  generate->add_option("--seed", gen.seed, "Sampling seed")->capture_default_str();
  generate->add_option("--beam-width", gen.beam_width, "Beam width")->capture_default_str()
      ->check(CLI::PositiveNumber);
  generate->add_option("--max-len", gen.max_len, "Maximum decoding steps")->capture_default_str()
      ->check(CLI::PositiveNumber);
  generate->add_option("--alpha", gen.alpha, "Length-penalty exponent")->capture_default_str();
  generate->add_option("--out", gen.out, "Write the outputs JSONL here instead of stdout");
  generate->add_option("--threads", gen.threads, "Worker threads")->check(CLI::PositiveNumber);
  generate->add_flag("--cased", gen.cased, "Disable lowercasing of training text");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (app.exit(e, out, err) == 0) return kExitOk;
    return kExitValidation;
  }

  try {
    if (evaluate->parsed()) return cmd_evaluate(eval_flags, summary_only, out, err);
    if (ms->parsed()) return cmd_multiscore(ms_common, ms_flags, out, err);
    if (generate->parsed()) return cmd_generate(gen, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace multiscore
