// Copyright 2026 The Multi-Score Authors
// SPDX-License-Identifier: Apache-2.0

#include "multiscore/text.hpp"

#include <algorithm>

#include "multiscore/error.hpp"

namespace multiscore {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_control(char32_t cp) { return cp < 0x20 || (cp >= 0x7F && cp < 0xA0); }

bool is_separator(char32_t cp) { return is_unicode_space(cp) || is_control(cp); }

}  // namespace

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
      len = 1;
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      len = 2;
      cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
      len = 3;
      cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
      len = 4;
      cp = lead & 0x07;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    if (i + len > text.size()) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cont = static_cast<unsigned char>(text[i + k]);
      if ((cont & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cont & 0x3F);
    }
    // Reject overlong forms, surrogates and out-of-range values.
    static constexpr char32_t kMinForLength[] = {0, 0, 0x80, 0x800, 0x10000};
    if (!ok || cp < kMinForLength[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) append_utf8(out, cp);
  return out;
}

bool is_unicode_space(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool is_punctuation(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
  }
  // Latin-1 punctuation and symbols, general punctuation, CJK and fullwidth forms.
  return (cp >= 0xA1 && cp <= 0xBF && cp != 0xAA && cp != 0xB2 && cp != 0xB3 &&
          cp != 0xB5 && cp != 0xB9 && cp != 0xBA && cp != 0xBC && cp != 0xBD && cp != 0xBE) ||
         cp == 0xD7 || cp == 0xF7 || (cp >= 0x2010 && cp <= 0x2027) ||
         (cp >= 0x2030 && cp <= 0x205E) || (cp >= 0x3001 && cp <= 0x3003) ||
         (cp >= 0x3008 && cp <= 0x3011) || (cp >= 0xFF01 && cp <= 0xFF0F) ||
         (cp >= 0xFF1A && cp <= 0xFF20);
}

char32_t simple_lowercase(char32_t cp) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 0x20 : cp;
  // Latin-1 Supplement
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  // Latin Extended-A
  if ((cp >= 0x100 && cp <= 0x12F) || (cp >= 0x132 && cp <= 0x137) ||
      (cp >= 0x14A && cp <= 0x177)) {
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) {
    return (cp % 2 == 1) ? cp + 1 : cp;
  }
  if (cp == 0x178) return 0xFF;
  // Greek
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
  if (cp == 0x386) return 0x3AC;
  if (cp >= 0x388 && cp <= 0x38A) return cp + 37;
  if (cp == 0x38C) return 0x3CC;
  if (cp == 0x38E || cp == 0x38F) return cp + 63;
  // Cyrillic
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  if ((cp >= 0x460 && cp <= 0x481) || (cp >= 0x48A && cp <= 0x4BF)) {
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  return cp;
}

std::string normalize_case(std::string_view raw, const TokenizerOptions& options) {
  if (!options.lowercase) return std::string(raw);
  std::u32string chars = decode_utf8(raw);
  for (char32_t& cp : chars) cp = simple_lowercase(cp);
  return encode_utf8(chars);
}

std::vector<std::string> tokenize_words(std::string_view raw, const TokenizerOptions& options) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  };
  for (char32_t cp : decode_utf8(raw)) {
    if (is_separator(cp)) {
      flush();
    } else if (is_punctuation(cp)) {
      flush();
      append_utf8(current, cp);
      flush();
    } else {
      append_utf8(current, options.lowercase ? simple_lowercase(cp) : cp);
    }
  }
  flush();
  return tokens;
}

Sentence::Sentence(std::string raw, const TokenizerOptions& options)
    : raw_(std::move(raw)), options_(options) {
  if (raw_.size() >= 3 && raw_.compare(0, 3, "\xEF\xBB\xBF") == 0) raw_.erase(0, 3);
  normalized_ = normalize_case(raw_, options_);
  tokens_ = tokenize_words(raw_, options_);
  if (tokens_.empty()) {
    throw ValidationError("sentence is empty after trimming whitespace");
  }
}

std::vector<Sentence> make_sentences(std::span<const std::string> raws,
                                     const TokenizerOptions& options) {
  std::vector<Sentence> out;
  out.reserve(raws.size());
  for (const auto& raw : raws) out.emplace_back(raw, options);
  return out;
}

std::size_t NGramMultiset::total() const {
  std::size_t sum = 0;
  for (const auto& [key, c] : counts) sum += c;
  return sum;
}

std::uint32_t NGramMultiset::count(const std::string& key) const {
  auto it = counts.find(key);
  return it == counts.end() ? 0 : it->second;
}

NGramMultiset word_ngrams(std::span<const std::string> tokens, std::size_t n) {
  if (n == 0) throw ValidationError("n-gram order must be at least 1");
  NGramMultiset out;
  out.order = n;
  if (tokens.size() < n) return out;
  std::string key;
  for (std::size_t start = 0; start + n <= tokens.size(); ++start) {
    key.clear();
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0) key.push_back(kWordJoiner);
      key += tokens[start + k];
    }
    ++out.counts[key];
  }
  return out;
}

NGramMultiset char_ngrams(std::u32string_view chars, std::size_t n) {
  if (n == 0) throw ValidationError("n-gram order must be at least 1");
  NGramMultiset out;
  out.order = n;
  if (chars.size() < n) return out;
  for (std::size_t start = 0; start + n <= chars.size(); ++start) {
    ++out.counts[encode_utf8(chars.substr(start, n))];
  }
  return out;
}

NGramMultiset char_ngrams(std::string_view raw, std::size_t n, bool strip_whitespace) {
  std::u32string chars = decode_utf8(raw);
  if (strip_whitespace) {
    std::erase_if(chars, [](char32_t cp) { return is_unicode_space(cp); });
  }
  return char_ngrams(std::u32string_view(chars), n);
}

std::size_t clipped_overlap(const NGramMultiset& hyp, const NGramMultiset& ref) {
  const auto& small = hyp.counts.size() <= ref.counts.size() ? hyp : ref;
  const auto& large = &small == &hyp ? ref : hyp;
  std::size_t matched = 0;
  for (const auto& [key, c] : small.counts) {
    matched += std::min(c, large.count(key));
  }
  return matched;
}

}  // namespace multiscore
