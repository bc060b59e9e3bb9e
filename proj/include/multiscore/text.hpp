// Copyright 2026 The Multi-Score Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace multiscore {

struct TokenizerOptions {
  /// Case-fold Latin, Greek and Cyrillic letters before splitting.
  bool lowercase = true;

  bool operator==(const TokenizerOptions&) const = default;
};

/// Decodes UTF-8 into Unicode scalar values. Malformed sequences decode to
/// U+FFFD one byte at a time.
std::u32string decode_utf8(std::string_view text);
std::string encode_utf8(std::u32string_view text);

bool is_unicode_space(char32_t cp);
bool is_punctuation(char32_t cp);
char32_t simple_lowercase(char32_t cp);

/// Lowercases (per options) and returns the text re-encoded as UTF-8.
std::string normalize_case(std::string_view raw, const TokenizerOptions& options);

/// Splits on Unicode whitespace and detaches every punctuation character into
/// its own token. Control characters count as whitespace.
std::vector<std::string> tokenize_words(std::string_view raw,
                                        const TokenizerOptions& options = {});

/// A non-empty piece of text together with its cached tokenization.
class Sentence {
 public:
  /// Throws ValidationError when `raw` is empty after trimming whitespace.
  explicit Sentence(std::string raw, const TokenizerOptions& options = {});

  const std::string& raw() const { return raw_; }
  /// `raw` after case folding; character n-grams are taken from this.
  const std::string& normalized() const { return normalized_; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const TokenizerOptions& options() const { return options_; }

  bool operator==(const Sentence& other) const {
    return raw_ == other.raw_ && options_ == other.options_;
  }

 private:
  std::string raw_;
  std::string normalized_;
  std::vector<std::string> tokens_;
  TokenizerOptions options_;
};

std::vector<Sentence> make_sentences(std::span<const std::string> raws,
                                     const TokenizerOptions& options = {});

/// Counts of contiguous n-unit windows. Keys are the UTF-8 encoding of the
/// window; word windows join tokens with U+001F, which tokenization never
/// produces inside a token.
struct NGramMultiset {
  std::size_t order = 1;
  std::unordered_map<std::string, std::uint32_t> counts;

  std::size_t total() const;
  std::uint32_t count(const std::string& key) const;
};

inline constexpr char kWordJoiner = '\x1f';

/// Throws ValidationError when n == 0.
NGramMultiset word_ngrams(std::span<const std::string> tokens, std::size_t n);
NGramMultiset char_ngrams(std::string_view raw, std::size_t n, bool strip_whitespace);
NGramMultiset char_ngrams(std::u32string_view chars, std::size_t n);

/// Sum over keys of min(hyp count, ref count).
std::size_t clipped_overlap(const NGramMultiset& hyp, const NGramMultiset& ref);

}  // namespace multiscore
