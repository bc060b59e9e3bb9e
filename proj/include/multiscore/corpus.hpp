// Copyright 2026 The Multi-Score Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "multiscore/multiscore.hpp"
#include "multiscore/text.hpp"

namespace multiscore {

struct DatasetStats {
  std::size_t instances = 0;
  /// set size -> number of instances with that many references / outputs.
  std::map<std::size_t, std::size_t> references_per_instance;
  std::map<std::size_t, std::size_t> outputs_per_instance;

  bool operator==(const DatasetStats&) const = default;
};

/// Ordered, id-unique collection of evaluation instances.
class Dataset {
 public:
  Dataset() = default;
  /// Throws ValidationError on duplicate ids or empty reference sets.
  Dataset(std::vector<EvalInstance> instances, std::string source_path = {});

  const std::vector<EvalInstance>& instances() const { return instances_; }
  const DatasetStats& stats() const { return stats_; }
  const std::string& source_path() const { return source_path_; }
  std::size_t size() const { return instances_.size(); }

  /// Index of the instance with `id`, or size() when absent.
  std::size_t find(std::string_view id) const;

  /// Content equality; the source path is not compared.
  bool operator==(const Dataset& other) const { return instances_ == other.instances_; }

 private:
  std::vector<EvalInstance> instances_;
  std::string source_path_;
  DatasetStats stats_;
};

/// Parses JSON Lines text: one object per line with fields `id` (string),
/// optional `category` (string), `references` (non-empty string array) and
/// optional `outputs` (string array). Blank lines are skipped and a leading
/// UTF-8 byte-order mark is ignored. Errors name the offending line.
Dataset parse_jsonl(std::string_view text, const TokenizerOptions& options = {},
                    const std::string& source_name = "<memory>");
Dataset load_jsonl(const std::filesystem::path& path, const TokenizerOptions& options = {});

/// Canonical JSONL serialization; parse_jsonl(to_jsonl(d)) == d.
std::string to_jsonl(const Dataset& dataset);

/// Shared-task plain-text layout: refs_dir/ref0.txt, ref1.txt, ... and
/// optionally outputs_dir/out0.txt, out1.txt, ...; line k of every file forms
/// instance k (id "k"). Empty lines mark missing slots and are dropped.
Dataset load_parallel_text(const std::filesystem::path& refs_dir,
                           const std::filesystem::path& outputs_dir = {},
                           const TokenizerOptions& options = {});

/// Output sets keyed by instance id, in file order.
struct OutputSets {
  std::vector<std::pair<std::string, std::vector<std::string>>> entries;
};

/// Parses an outputs JSONL file: objects with `id` and `outputs`; any other
/// fields (generation metadata) are ignored.
OutputSets parse_outputs_jsonl(std::string_view text, const std::string& source_name = "<memory>");
OutputSets load_outputs_jsonl(const std::filesystem::path& path);

/// Returns a copy of `dataset` with every instance's outputs replaced. Every
/// dataset id must be bound exactly once, to a non-empty list.
Dataset bind_outputs(const Dataset& dataset, const OutputSets& outputs,
                     const TokenizerOptions& options = {});

/// Reads a whole file; throws IoError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary sibling file and renames it into place, so a
/// failed write never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace multiscore
