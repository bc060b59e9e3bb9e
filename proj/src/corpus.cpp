// Copyright 2026 The Multi-Score Authors
// SPDX-License-Identifier: Apache-2.0

#include "multiscore/corpus.hpp"

#include <fstream>
#include <sstream>
#include <system_error>
#include <unordered_map>

#include "json.hpp"
#include "multiscore/error.hpp"

namespace multiscore {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kBom = "\xEF\xBB\xBF";

std::string_view strip_bom(std::string_view text) {
  if (text.substr(0, kBom.size()) == kBom) text.remove_prefix(kBom.size());
  return text;
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

// Calls fn(line_number, line) for every non-blank line; accepts LF or CRLF.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  text = strip_bom(text);
  std::size_t line_number = 0;
  while (!text.empty()) {
    ++line_number;
    const auto end = text.find('\n');
    std::string_view line = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!is_blank(line)) fn(line_number, line);
  }
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

json parse_object(std::string_view line, const std::string& source, std::size_t line_number) {
  json object;
  try {
    object = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ValidationError(where(source, line_number) + ": malformed JSON: " + e.what());
  }
  if (!object.is_object()) {
    throw ValidationError(where(source, line_number) + ": expected a JSON object");
  }
  return object;
}

std::string require_id(const json& object, const std::string& source, std::size_t line_number) {
  auto it = object.find("id");
  if (it == object.end()) {
    throw ValidationError(where(source, line_number) + ": missing required field \"id\"");
  }
  if (!it->is_string()) {
    throw ValidationError(where(source, line_number) + ": field \"id\" must be a string");
  }
  return it->get<std::string>();
}

std::vector<std::string> string_array(const json& value, const char* field,
                                      const std::string& source, std::size_t line_number) {
  if (!value.is_array()) {
    throw ValidationError(where(source, line_number) + ": field \"" + field +
                          "\" must be an array of strings");
  }
  std::vector<std::string> out;
  out.reserve(value.size());
  for (const auto& item : value) {
    if (!item.is_string()) {
      throw ValidationError(where(source, line_number) + ": field \"" + field +
                            "\" must contain only strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::vector<Sentence> sentences_or_throw(const std::vector<std::string>& raws,
                                         const TokenizerOptions& options,
                                         const std::string& context, const char* field) {
  std::vector<Sentence> out;
  out.reserve(raws.size());
  for (std::size_t k = 0; k < raws.size(); ++k) {
    try {
      out.emplace_back(raws[k], options);
    } catch (const ValidationError&) {
      throw ValidationError(context + ": " + field + "[" + std::to_string(k) + "] is empty");
    }
  }
  return out;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::vector<std::string> lines;
  std::string text = read_file(path);
  std::string_view view = strip_bom(text);
  while (!view.empty()) {
    const auto end = view.find('\n');
    std::string line(view.substr(0, end));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    view = end == std::string_view::npos ? std::string_view{} : view.substr(end + 1);
  }
  return lines;
}

// Collects dir/<prefix>0.txt, dir/<prefix>1.txt, ... until the first gap.
std::vector<fs::path> numbered_files(const fs::path& dir, const std::string& prefix) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("not a readable directory: " + dir.string());
  std::vector<fs::path> files;
  for (std::size_t k = 0;; ++k) {
    fs::path candidate = dir / (prefix + std::to_string(k) + ".txt");
    if (!fs::exists(candidate, ec)) break;
    files.push_back(std::move(candidate));
  }
  if (files.empty()) {
    throw ValidationError("no " + prefix + "0.txt found in " + dir.string());
  }
  return files;
}

}  // namespace

Dataset::Dataset(std::vector<EvalInstance> instances, std::string source_path)
    : instances_(std::move(instances)), source_path_(std::move(source_path)) {
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t k = 0; k < instances_.size(); ++k) {
    const auto& instance = instances_[k];
    if (!seen.emplace(instance.id, k).second) {
      throw ValidationError("duplicate instance id '" + instance.id + "'");
    }
    if (instance.references.empty()) {
      throw ValidationError("instance '" + instance.id + "' has no references");
    }
    ++stats_.references_per_instance[instance.references.size()];
    ++stats_.outputs_per_instance[instance.outputs.size()];
  }
  stats_.instances = instances_.size();
}

std::size_t Dataset::find(std::string_view id) const {
  for (std::size_t k = 0; k < instances_.size(); ++k) {
    if (instances_[k].id == id) return k;
  }
  return instances_.size();
}

Dataset parse_jsonl(std::string_view text, const TokenizerOptions& options,
                    const std::string& source_name) {
  std::vector<EvalInstance> instances;
  std::unordered_map<std::string, std::size_t> id_lines;
  for_each_line(text, [&](std::size_t line_number, std::string_view line) {
    const json object = parse_object(line, source_name, line_number);
    EvalInstance instance;
    instance.id = require_id(object, source_name, line_number);
    if (auto [it, inserted] = id_lines.emplace(instance.id, line_number); !inserted) {
      throw ValidationError(source_name + ": duplicate id '" + instance.id + "' on lines " +
                            std::to_string(it->second) + " and " + std::to_string(line_number));
    }
    if (auto it = object.find("category"); it != object.end() && !it->is_null()) {
      if (!it->is_string()) {
        throw ValidationError(where(source_name, line_number) +
                              ": field \"category\" must be a string");
      }
      instance.category = it->get<std::string>();
    }
    auto refs = object.find("references");
    if (refs == object.end()) {
      throw ValidationError(where(source_name, line_number) +
                            ": missing required field \"references\"");
    }
    const auto ref_strings = string_array(*refs, "references", source_name, line_number);
    if (ref_strings.empty()) {
      throw ValidationError(where(source_name, line_number) + ": \"references\" is empty");
    }
    const std::string context = where(source_name, line_number);
    instance.references = sentences_or_throw(ref_strings, options, context, "references");
    if (auto outs = object.find("outputs"); outs != object.end() && !outs->is_null()) {
      instance.outputs = sentences_or_throw(
          string_array(*outs, "outputs", source_name, line_number), options, context, "outputs");
    }
    instances.push_back(std::move(instance));
  });
  return Dataset(std::move(instances), source_name);
}

Dataset load_jsonl(const fs::path& path, const TokenizerOptions& options) {
  return parse_jsonl(read_file(path), options, path.string());
}

std::string to_jsonl(const Dataset& dataset) {
  std::string out;
  for (const auto& instance : dataset.instances()) {
    json object;
    object["id"] = instance.id;
    if (instance.category) object["category"] = *instance.category;
    json refs = json::array();
    for (const auto& ref : instance.references) refs.push_back(ref.raw());
    object["references"] = std::move(refs);
    if (!instance.outputs.empty()) {
      json outs = json::array();
      for (const auto& output : instance.outputs) outs.push_back(output.raw());
      object["outputs"] = std::move(outs);
    }
    out += object.dump();
    out += '\n';
  }
  return out;
}

Dataset load_parallel_text(const fs::path& refs_dir, const fs::path& outputs_dir,
                           const TokenizerOptions& options) {
  const auto ref_files = numbered_files(refs_dir, "ref");
  std::vector<std::vector<std::string>> ref_lines;
  for (const auto& file : ref_files) ref_lines.push_back(read_lines(file));

  std::vector<fs::path> out_files;
  std::vector<std::vector<std::string>> out_lines;
  if (!outputs_dir.empty()) {
    out_files = numbered_files(outputs_dir, "out");
    for (const auto& file : out_files) out_lines.push_back(read_lines(file));
  }

  const std::size_t count = ref_lines.front().size();
  auto check = [count](const fs::path& file, std::size_t lines) {
    if (lines != count) {
      throw ValidationError(file.string() + " has " + std::to_string(lines) + " lines, expected " +
                            std::to_string(count));
    }
  };
  for (std::size_t f = 0; f < ref_files.size(); ++f) check(ref_files[f], ref_lines[f].size());
  for (std::size_t f = 0; f < out_files.size(); ++f) check(out_files[f], out_lines[f].size());

  std::vector<EvalInstance> instances;
  instances.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    EvalInstance instance;
    instance.id = std::to_string(k);
    for (const auto& lines : ref_lines) {
      if (!is_blank(lines[k])) instance.references.emplace_back(lines[k], options);
    }
    for (const auto& lines : out_lines) {
      if (!is_blank(lines[k])) instance.outputs.emplace_back(lines[k], options);
    }
    if (instance.references.empty()) {
      throw ValidationError("line " + std::to_string(k + 1) + " is empty in every reference file");
    }
    instances.push_back(std::move(instance));
  }
  return Dataset(std::move(instances), refs_dir.string());
}

OutputSets parse_outputs_jsonl(std::string_view text, const std::string& source_name) {
  OutputSets sets;
  std::unordered_map<std::string, std::size_t> id_lines;
  for_each_line(text, [&](std::size_t line_number, std::string_view line) {
    const json object = parse_object(line, source_name, line_number);
    std::string id = require_id(object, source_name, line_number);
    if (auto [it, inserted] = id_lines.emplace(id, line_number); !inserted) {
      throw ValidationError(source_name + ": duplicate id '" + id + "' on lines " +
                            std::to_string(it->second) + " and " + std::to_string(line_number));
    }
    auto outs = object.find("outputs");
    if (outs == object.end()) {
      throw ValidationError(where(source_name, line_number) + ": missing required field \"outputs\"");
    }
    sets.entries.emplace_back(std::move(id), string_array(*outs, "outputs", source_name, line_number));
  });
  return sets;
}

OutputSets load_outputs_jsonl(const fs::path& path) {
  return parse_outputs_jsonl(read_file(path), path.string());
}

Dataset bind_outputs(const Dataset& dataset, const OutputSets& outputs,
                     const TokenizerOptions& options) {
  std::vector<EvalInstance> instances = dataset.instances();
  std::vector<char> bound(instances.size(), 0);
  for (const auto& [id, raws] : outputs.entries) {
    const std::size_t k = dataset.find(id);
    if (k == dataset.size()) throw ValidationError("outputs given for unknown id '" + id + "'");
    if (bound[k]) throw ValidationError("outputs bound twice for id '" + id + "'");
    if (raws.empty()) throw ValidationError("empty output list for id '" + id + "'");
    instances[k].outputs = sentences_or_throw(raws, options, "id '" + id + "'", "outputs");
    bound[k] = 1;
  }
  for (std::size_t k = 0; k < instances.size(); ++k) {
    if (!bound[k]) throw ValidationError("no outputs for id '" + instances[k].id + "'");
  }
  return Dataset(std::move(instances), dataset.source_path());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path.string());
  return std::move(buffer).str();
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  fs::path temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + temp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(temp, ignored);
      throw IoError("error while writing " + temp.string());
    }
  }
  std::error_code ec;
  fs::rename(temp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(temp, ignored);
    throw IoError("cannot move " + temp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace multiscore
