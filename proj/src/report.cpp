// Copyright 2026 The Multi-Score Authors
// SPDX-License-Identifier: Apache-2.0

#include "multiscore/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "multiscore/error.hpp"
#include "multiscore/parallel.hpp"

namespace multiscore {

using nlohmann::json;

namespace {

std::string shortest_double(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

// Canonical writer: keys come out sorted (json objects are std::map backed),
// floats are fixed to two decimals unless `exact_floats` is set, which is
// used for the config echo so it round-trips.
void write_canonical(const json& value, bool exact_floats, std::string& out) {
  switch (value.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, item] : value.items()) {
        if (!first) out += ',';
        first = false;
        out += json(key).dump();
        out += ':';
        write_canonical(item, exact_floats || key == "config", out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& item : value) {
        if (!first) out += ',';
        first = false;
        write_canonical(item, exact_floats, out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float: {
      const double number = value.get<double>();
      out += exact_floats ? shortest_double(number) : format_fixed2(number);
      break;
    }
    default:
      out += value.dump();
      break;
  }
}

json matching_json(const MultiScoreResult& result) {
  json matrix = json::array();
  for (std::size_t r = 0; r < result.matrix.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < result.matrix.cols(); ++c) row.push_back(result.matrix(r, c));
    matrix.push_back(std::move(row));
  }
  json edges = json::array();
  for (std::size_t k = 0; k < result.matching.edges.size(); ++k) {
    const Edge& e = result.matching.edges[k];
    edges.push_back({{"output", e.row}, {"reference", e.col},
                     {"weight", result.matching.edge_weights[k]}});
  }
  return {{"matrix", std::move(matrix)}, {"matching", std::move(edges)}, {"score", result.score}};
}

json config_json(const EvaluationConfig& config) {
  return {
      {"aggregation", "macro"},
      {"allow_unequal", config.multiscore.allow_unequal},
      {"bleu_corpus",
       {{"max_order", config.corpus_bleu.max_order},
        {"smoothing", to_string(config.corpus_bleu.smoothing)}}},
      {"bleu_sentence",
       {{"max_order", config.sentence_bleu.max_order},
        {"smoothing", to_string(config.sentence_bleu.smoothing)}}},
      {"chrf",
       {{"beta", config.chrf.beta},
        {"char_order", config.chrf.char_order},
        {"word_order", config.chrf.word_order}}},
      {"lowercase", config.tokenizer.lowercase},
      {"matching", "hungarian-lexicographic"},
      {"quality_averaging", "per-output-slot"},
  };
}

json report_json(const EvaluationReport& report, bool include_per_instance) {
  json quality = {{"bleu", report.bleu},
                  {"chrfpp", report.chrfpp},
                  {"slot_bleu", report.slot_bleu},
                  {"slot_chrfpp", report.slot_chrfpp}};
  json diversity = {{"ms_bleu", report.ms_bleu}, {"ms_chrf", report.ms_chrf}};
  if (report.self_bleu) diversity["self_bleu"] = *report.self_bleu;
  json root = {{"config", config_json(report.config)},
               {"quality", std::move(quality)},
               {"diversity", std::move(diversity)},
               {"instance_count", report.per_instance.size()},
               {"warnings", report.warnings}};
  if (include_per_instance) {
    json instances = json::array();
    for (const auto& summary : report.per_instance) {
      json item = {{"id", summary.id},
                   {"ms_bleu", matching_json(summary.ms_bleu)},
                   {"ms_chrf", matching_json(summary.ms_chrf)}};
      if (summary.category) item["category"] = *summary.category;
      if (summary.self_bleu) item["self_bleu"] = *summary.self_bleu;
      instances.push_back(std::move(item));
    }
    root["instances"] = std::move(instances);
  }
  return root;
}

std::string optional_cell(const std::optional<double>& value) {
  return value ? format_fixed2(*value) : std::string("-");
}

std::string aligned_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) line += "  ";
      line += row[c];
      if (c + 1 < row.size()) line.append(widths[c] - row[c].size(), ' ');
    }
    out += line + "\n";
  }
  return out;
}

}  // namespace

std::string format_fixed2(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  // glibc prints the exact binary expansion, so the third decimal decides.
  char buffer[512];
  std::snprintf(buffer, sizeof(buffer), "%.60f", std::fabs(value));
  const std::string text(buffer);
  const auto dot = text.find('.');
  std::string digits = text.substr(0, dot) + text.substr(dot + 1, 2);
  if (text[dot + 3] >= '5') {
    std::size_t k = digits.size();
    while (k > 0) {
      --k;
      if (digits[k] == '9') {
        digits[k] = '0';
      } else {
        ++digits[k];
        break;
      }
      if (k == 0) digits.insert(digits.begin(), '1');
    }
  }
  std::string out = digits.substr(0, digits.size() - 2) + "." + digits.substr(digits.size() - 2);
  const bool zero = std::all_of(digits.begin(), digits.end(), [](char ch) { return ch == '0'; });
  if (value < 0 && !zero) out.insert(out.begin(), '-');
  return out;
}

EvaluationReport evaluate_all(const Dataset& dataset, const EvaluationConfig& config) {
  config.sentence_bleu.validate();
  config.corpus_bleu.validate();
  config.chrf.validate();
  if (dataset.size() == 0) throw ValidationError("dataset has no instances");
  std::size_t slots = 0;
  for (const auto& instance : dataset.instances()) {
    if (instance.outputs.empty()) {
      throw ValidationError("instance '" + instance.id + "' has no outputs");
    }
    slots = std::max(slots, instance.outputs.size());
  }
  const unsigned threads = config.threads == 0 ? default_thread_count() : config.threads;

  EvaluationReport report;
  report.config = config;

  // Quality: corpus scores per output slot against the full reference sets.
  for (std::size_t k = 0; k < slots; ++k) {
    std::vector<BleuSegment> bleu_segments;
    std::vector<ChrfSegment> chrf_segments;
    for (const auto& instance : dataset.instances()) {
      if (instance.outputs.size() <= k) continue;
      bleu_segments.push_back({instance.outputs[k], instance.references});
      chrf_segments.push_back({instance.outputs[k], instance.references});
    }
    report.slot_bleu.push_back(corpus_bleu(bleu_segments, config.corpus_bleu));
    report.slot_chrfpp.push_back(corpus_chrfpp(chrf_segments, config.chrf));
  }
  for (std::size_t k = 0; k < slots; ++k) {
    report.bleu += report.slot_bleu[k];
    report.chrfpp += report.slot_chrfpp[k];
  }
  report.bleu /= static_cast<double>(slots);
  report.chrfpp /= static_cast<double>(slots);

  // Diversity: per-instance Multi-Score and Self-BLEU.
  const BleuMetric bleu_metric(config.sentence_bleu);
  const ChrfMetric chrf_metric(config.chrf);
  std::vector<std::optional<InstanceSummary>> summaries(dataset.size());
  parallel_for(dataset.size(), threads, [&](std::size_t i) {
    const EvalInstance& instance = dataset.instances()[i];
    InstanceSummary summary{instance.id, instance.category,
                            multi_score(instance, bleu_metric, config.multiscore),
                            multi_score(instance, chrf_metric, config.multiscore), std::nullopt};
    if (instance.outputs.size() >= 2) {
      summary.self_bleu = self_bleu(instance.outputs, config.sentence_bleu);
    }
    summaries[i] = std::move(summary);
  });

  double ms_bleu_sum = 0.0;
  double ms_chrf_sum = 0.0;
  double self_bleu_sum = 0.0;
  std::size_t self_bleu_count = 0;
  for (auto& slot : summaries) {
    InstanceSummary& summary = *slot;
    ms_bleu_sum += summary.ms_bleu.score;
    ms_chrf_sum += summary.ms_chrf.score;
    for (const auto& w : summary.ms_bleu.warnings) report.warnings.push_back(w);
    if (summary.self_bleu) {
      self_bleu_sum += *summary.self_bleu;
      ++self_bleu_count;
    } else {
      report.warnings.push_back("instance '" + summary.id +
                                "': fewer than two outputs, excluded from Self-BLEU");
    }
    report.per_instance.push_back(std::move(summary));
  }
  const auto n = static_cast<double>(report.per_instance.size());
  report.ms_bleu = ms_bleu_sum / n;
  report.ms_chrf = ms_chrf_sum / n;
  if (self_bleu_count > 0) {
    report.self_bleu = self_bleu_sum / static_cast<double>(self_bleu_count);
  } else {
    report.warnings.push_back("no instance has two or more outputs; Self-BLEU omitted");
  }
  return report;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "tsv") return ReportFormat::kTsv;
  if (name == "table" || name == "text" || name == "text-table") return ReportFormat::kTable;
  throw ValidationError("unknown report format '" + std::string(name) +
                        "' (expected json, tsv or table)");
}

std::string render(const EvaluationReport& report, ReportFormat format,
                   bool include_per_instance) {
  switch (format) {
    case ReportFormat::kJson: {
      std::string out;
      write_canonical(report_json(report, include_per_instance), false, out);
      out += '\n';
      return out;
    }
    case ReportFormat::kTsv: {
      std::string out = "BLEU\tCHRF++\tSelf-B\tMS-B\tMS-C\n";
      out += format_fixed2(report.bleu) + "\t" + format_fixed2(report.chrfpp) + "\t" +
             optional_cell(report.self_bleu) + "\t" + format_fixed2(report.ms_bleu) + "\t" +
             format_fixed2(report.ms_chrf) + "\n";
      return out;
    }
    case ReportFormat::kTable: {
      std::string out = aligned_table({{"BLEU", "CHRF++", "Self-B", "MS-B", "MS-C"},
                                       {format_fixed2(report.bleu), format_fixed2(report.chrfpp),
                                        optional_cell(report.self_bleu),
                                        format_fixed2(report.ms_bleu),
                                        format_fixed2(report.ms_chrf)}});
      if (include_per_instance && !report.per_instance.empty()) {
        std::vector<std::vector<std::string>> rows{{"id", "MS-B", "MS-C", "Self-B"}};
        for (const auto& s : report.per_instance) {
          rows.push_back({s.id, format_fixed2(s.ms_bleu.score), format_fixed2(s.ms_chrf.score),
                          optional_cell(s.self_bleu)});
        }
        out += "\n" + aligned_table(rows);
      }
      return out;
    }
  }
  return {};
}

std::string multiscore_result_json(const MultiScoreResult& result) {
  json item = matching_json(result);
  item["id"] = result.instance_id;
  std::string out;
  write_canonical(item, false, out);
  return out;
}

}  // namespace multiscore
