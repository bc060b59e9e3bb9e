// Copyright 2026 The Multi-Score Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "multiscore/error.hpp"
#include "multiscore/text.hpp"
#include "test_support.hpp"

using namespace multiscore;

namespace {

using Tokens = std::vector<std::string>;

TEST(Tokenize, SplitsWhitespaceAndDetachesPunctuation) {
  EXPECT_EQ(tokenize_words("The cat, it sat."), (Tokens{"the", "cat", ",", "it", "sat", "."}));
  EXPECT_EQ(tokenize_words("  a\tb\n c  "), (Tokens{"a", "b", "c"}));
  EXPECT_EQ(tokenize_words("516,000"), (Tokens{"516", ",", "000"}));
}

TEST(Tokenize, CasedModeKeepsCase) {
  TokenizerOptions cased;
  cased.lowercase = false;
  EXPECT_EQ(tokenize_words("The Cat", cased), (Tokens{"The", "Cat"}));
  EXPECT_EQ(tokenize_words("The Cat"), (Tokens{"the", "cat"}));
}

TEST(Tokenize, UnicodeLettersFoldAndSpacesSplit) {
  EXPECT_EQ(tokenize_words("Über Café"), (Tokens{"über", "café"}));
  EXPECT_EQ(tokenize_words("ΑΘΗΝΑ Москва"), (Tokens{"αθηνα", "москва"}));
  // NO-BREAK SPACE and IDEOGRAPHIC SPACE separate tokens.
  EXPECT_EQ(tokenize_words("a b　c"), (Tokens{"a", "b", "c"}));
  EXPECT_EQ(tokenize_words("«quoted»"), (Tokens{"«", "quoted", "»"}));
}

TEST(Tokenize, ControlCharactersActAsSpaces) {
  EXPECT_EQ(tokenize_words(std::string("a\x01" "b")), (Tokens{"a", "b"}));
}

TEST(Utf8, MalformedBytesBecomeReplacementCharacters) {
  const std::u32string decoded = decode_utf8("a\xff" "b");
  ASSERT_EQ(decoded.size(), 3u);
  EXPECT_EQ(decoded[1], U'�');
  EXPECT_EQ(encode_utf8(decode_utf8("héllo ✓")), "héllo ✓");
}

TEST(Utf8, RoundTripRandomText) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const std::string s = testkit::random_sentence(rng);
    EXPECT_EQ(encode_utf8(decode_utf8(s)), s);
  }
}

TEST(Sentence, RejectsBlankText) {
  EXPECT_THROW(Sentence(""), ValidationError);
  EXPECT_THROW(Sentence("   \t\n"), ValidationError);
  EXPECT_NO_THROW(Sentence("."));
}

TEST(Sentence, StripsByteOrderMark) {
  const Sentence s("\xEF\xBB\xBFHello");
  EXPECT_EQ(s.raw(), "Hello");
  EXPECT_EQ(s.normalized(), "hello");
  EXPECT_EQ(s.tokens(), (Tokens{"hello"}));
}

TEST(Sentence, EqualityIncludesOptions) {
  TokenizerOptions cased;
  cased.lowercase = false;
  EXPECT_EQ(Sentence("A b"), Sentence("A b"));
  EXPECT_NE(Sentence("A b"), Sentence("A b", cased));
}

TEST(NGrams, WordWindows) {
  const Tokens tokens{"a", "b", "a", "b"};
  const NGramMultiset bigrams = word_ngrams(tokens, 2);
  EXPECT_EQ(bigrams.total(), 3u);
  EXPECT_EQ(bigrams.count(std::string("a") + kWordJoiner + "b"), 2u);
  EXPECT_EQ(bigrams.count(std::string("b") + kWordJoiner + "a"), 1u);
  EXPECT_EQ(word_ngrams(tokens, 5).total(), 0u);
  EXPECT_THROW(word_ngrams(tokens, 0), ValidationError);
}

TEST(NGrams, CharacterWindowsIgnoreWhitespaceWhenAsked) {
  const NGramMultiset stripped = char_ngrams("ab c", 2, true);
  EXPECT_EQ(stripped.total(), 2u);
  EXPECT_EQ(stripped.count("bc"), 1u);
  const NGramMultiset kept = char_ngrams("ab c", 2, false);
  EXPECT_EQ(kept.total(), 3u);
  EXPECT_EQ(kept.count("b "), 1u);
  // Windows are over code points, not bytes.
  EXPECT_EQ(char_ngrams("éé", 1, true).count("é"), 2u);
}

TEST(NGrams, ClippedOverlap) {
  const Tokens h{"the", "the", "the"};
  const Tokens r{"the", "cat", "the"};
  EXPECT_EQ(clipped_overlap(word_ngrams(h, 1), word_ngrams(r, 1)), 2u);
  EXPECT_EQ(clipped_overlap(word_ngrams(r, 1), word_ngrams(h, 1)), 2u);
}

}  // namespace
