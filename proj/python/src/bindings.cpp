// Copyright 2026 The Multi-Score Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "multiscore/assignment.hpp"
#include "multiscore/corpus.hpp"
#include "multiscore/decoding.hpp"
#include "multiscore/error.hpp"
#include "multiscore/metrics.hpp"
#include "multiscore/multiscore.hpp"
#include "multiscore/report.hpp"

namespace py = pybind11;
using namespace multiscore;

namespace {

TokenizerOptions tokenizer(bool lowercase) {
  TokenizerOptions options;
  options.lowercase = lowercase;
  return options;
}

BleuConfig bleu_config(int max_order, bool smoothing) {
  return {max_order, smoothing ? BleuSmoothing::kAddOneHigherOrders : BleuSmoothing::kNone};
}

std::vector<std::vector<double>> matrix_rows(const ScoreMatrix& matrix) {
  std::vector<std::vector<double>> rows(matrix.rows(), std::vector<double>(matrix.cols()));
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t c = 0; c < matrix.cols(); ++c) rows[r][c] = matrix(r, c);
  }
  return rows;
}

std::vector<std::pair<std::size_t, std::size_t>> edge_pairs(const Matching& matching) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const Edge& e : matching.edges) pairs.emplace_back(e.row, e.col);
  return pairs;
}

Dataset load_for_python(const std::string& data, const std::optional<std::string>& outputs,
                        bool lowercase) {
  Dataset dataset = load_jsonl(data, tokenizer(lowercase));
  if (outputs) dataset = bind_outputs(dataset, load_outputs_jsonl(*outputs), tokenizer(lowercase));
  return dataset;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "C++ core of the multiscore evaluation toolkit";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("tokenize_words",
        [](const std::string& text, bool lowercase) { return tokenize_words(text, tokenizer(lowercase)); },
        py::arg("text"), py::arg("lowercase") = true);

  m.def("format_fixed2", &format_fixed2, py::arg("value"),
        "Half-up rounding to two decimals, as used in reports.");

  m.def("sentence_bleu",
        [](const std::string& hyp, const std::vector<std::string>& refs, int max_order,
           bool smoothing, bool lowercase) {
          const auto options = tokenizer(lowercase);
          return sentence_bleu(Sentence(hyp, options), make_sentences(refs, options),
                               bleu_config(max_order, smoothing));
        },
        py::arg("hypothesis"), py::arg("references"), py::arg("max_order") = 4,
        py::arg("smoothing") = true, py::arg("lowercase") = true);

  m.def("corpus_bleu",
        [](const std::vector<std::string>& hyps, const std::vector<std::vector<std::string>>& refs,
           int max_order, bool smoothing, bool lowercase) {
          if (hyps.size() != refs.size()) throw ValidationError("need one reference list per hypothesis");
          const auto options = tokenizer(lowercase);
          std::vector<BleuSegment> segments;
          for (std::size_t k = 0; k < hyps.size(); ++k) {
            segments.push_back({Sentence(hyps[k], options), make_sentences(refs[k], options)});
          }
          return corpus_bleu(segments, bleu_config(max_order, smoothing));
        },
        py::arg("hypotheses"), py::arg("references"), py::arg("max_order") = 4,
        py::arg("smoothing") = false, py::arg("lowercase") = true);

  m.def("sentence_chrfpp",
        [](const std::string& hyp, const std::string& ref, int char_order, int word_order,
           double beta, bool lowercase) {
          const auto options = tokenizer(lowercase);
          return sentence_chrfpp(Sentence(hyp, options), Sentence(ref, options),
                                 {char_order, word_order, beta});
        },
        py::arg("hypothesis"), py::arg("reference"), py::arg("char_order") = 6,
        py::arg("word_order") = 2, py::arg("beta") = 2.0, py::arg("lowercase") = true);

  m.def("corpus_chrfpp",
        [](const std::vector<std::string>& hyps, const std::vector<std::vector<std::string>>& refs,
           bool lowercase) {
          if (hyps.size() != refs.size()) throw ValidationError("need one reference list per hypothesis");
          const auto options = tokenizer(lowercase);
          std::vector<ChrfSegment> segments;
          for (std::size_t k = 0; k < hyps.size(); ++k) {
            segments.push_back({Sentence(hyps[k], options), make_sentences(refs[k], options)});
          }
          return corpus_chrfpp(segments);
        },
        py::arg("hypotheses"), py::arg("references"), py::arg("lowercase") = true);

  m.def("self_bleu",
        [](const std::vector<std::string>& outputs, bool lowercase) {
          return self_bleu(make_sentences(outputs, tokenizer(lowercase)));
        },
        py::arg("outputs"), py::arg("lowercase") = true);

  py::class_<Matching>(m, "Matching")
      .def_property_readonly("edges", &edge_pairs)
      .def_readonly("edge_weights", &Matching::edge_weights)
      .def_readonly("total", &Matching::total)
      .def("__repr__", [](const Matching& self) {
        return "<Matching edges=" + std::to_string(self.edges.size()) +
               " total=" + std::to_string(self.total) + ">";
      });

  m.def("max_weight_matching",
        [](const std::vector<std::vector<double>>& rows) {
          return max_weight_matching(ScoreMatrix::from_rows(rows));
        },
        py::arg("matrix"), "Hungarian maximum-weight assignment with lexicographic tie-break.");
  m.def("brute_force_matching",
        [](const std::vector<std::vector<double>>& rows) {
          return brute_force_matching(ScoreMatrix::from_rows(rows));
        },
        py::arg("matrix"));

  py::class_<MultiScoreResult>(m, "MultiScoreResult")
      .def_readonly("instance_id", &MultiScoreResult::instance_id)
      .def_property_readonly("matrix", [](const MultiScoreResult& r) { return matrix_rows(r.matrix); })
      .def_readonly("matching", &MultiScoreResult::matching)
      .def_readonly("score", &MultiScoreResult::score)
      .def_readonly("warnings", &MultiScoreResult::warnings);

  m.def("multi_score",
        [](const std::vector<std::string>& outputs, const std::vector<std::string>& references,
           const std::string& metric, bool allow_unequal, bool lowercase) {
          const auto options = tokenizer(lowercase);
          const auto outs = make_sentences(outputs, options);
          const auto refs = make_sentences(references, options);
          MultiScoreOptions ms;
          ms.allow_unequal = allow_unequal;
          if (metric == "bleu") return multi_score(outs, refs, BleuMetric(), ms);
          if (metric == "chrf") return multi_score(outs, refs, ChrfMetric(), ms);
          throw ValidationError("metric must be 'bleu' or 'chrf'");
        },
        py::arg("outputs"), py::arg("references"), py::arg("metric") = "bleu",
        py::arg("allow_unequal") = false, py::arg("lowercase") = true);

  m.def("evaluate",
        [](const std::string& data, const std::optional<std::string>& outputs,
           const std::string& format, bool allow_unequal, bool lowercase, bool per_instance) {
          EvaluationConfig config;
          config.tokenizer = tokenizer(lowercase);
          config.multiscore.allow_unequal = allow_unequal;
          const auto report = evaluate_all(load_for_python(data, outputs, lowercase), config);
          return render(report, parse_report_format(format), per_instance);
        },
        py::arg("data"), py::arg("outputs") = std::nullopt, py::arg("format") = "json",
        py::arg("allow_unequal") = false, py::arg("lowercase") = true,
        py::arg("per_instance") = true,
        "Evaluate a JSONL dataset and return the rendered report.");

  m.def("generate",
        [](const std::string& train, const std::string& strategy, std::uint64_t seed, int order,
           double add_k, std::size_t beam_width, std::size_t max_len, double alpha) {
          GenerateOptions options;
          options.strategy = parse_strategy(strategy);
          options.seed = seed;
          options.order = order;
          options.add_k = add_k;
          options.beam.beam_width = beam_width;
          options.beam.max_len = max_len;
          options.beam.alpha = alpha;
          const auto sets = generate_for_dataset(load_jsonl(train), options);
          return generation_to_jsonl(sets);
        },
        py::arg("train"), py::arg("strategy"), py::arg("seed") = 0, py::arg("order") = 3,
        py::arg("add_k") = 0.1, py::arg("beam_width") = 3, py::arg("max_len") = 64,
        py::arg("alpha") = 0.6, "Decode three-sentence sets; returns outputs JSONL text.");

  py::class_<NGramLM>(m, "NGramLM")
      .def_property_readonly("order", &NGramLM::order)
      .def_property_readonly("add_k", &NGramLM::add_k)
      .def_property_readonly("vocabulary", &NGramLM::vocabulary)
      .def("next_distribution",
           [](const NGramLM& self, const std::vector<std::string>& context) {
             std::vector<TokenId> ids;
             for (const auto& token : context) {
               auto id = self.token_id(token);
               if (!id) throw ValidationError("unknown token '" + token + "'");
               ids.push_back(*id);
             }
             return self.next_distribution(ids);
           },
           py::arg("context"))
      .def("serialize", &NGramLM::serialize)
      .def_static("deserialize", [](const std::string& text) { return NGramLM::deserialize(text); })
      .def("__eq__", [](const NGramLM& a, const NGramLM& b) { return a == b; });

  m.def("train_ngram",
        [](const std::vector<std::vector<std::string>>& corpus, int order, double add_k) {
          return train_ngram(corpus, order, add_k);
        },
        py::arg("corpus"), py::arg("order") = 2, py::arg("add_k") = 0.1);
}
