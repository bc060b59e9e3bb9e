# Copyright 2026 The Multi-Score Authors
# SPDX-License-Identifier: Apache-2.0
"""Multi-reference quality and diversity evaluation.

BLEU, chrF++, Self-BLEU and Multi-Score (maximum-weight matching between an
output set and a reference set under a sentence-level metric), plus a toy
n-gram decoding harness.
"""

from ._core import (
    IoError,
    Matching,
    MultiScoreResult,
    NGramLM,
    ValidationError,
    brute_force_matching,
    corpus_bleu,
    corpus_chrfpp,
    evaluate,
    format_fixed2,
    generate,
    max_weight_matching,
    multi_score,
    self_bleu,
    sentence_bleu,
    sentence_chrfpp,
    tokenize_words,
    train_ngram,
)

__all__ = [
    "IoError",
    "Matching",
    "MultiScoreResult",
    "NGramLM",
    "ValidationError",
    "brute_force_matching",
    "corpus_bleu",
    "corpus_chrfpp",
    "evaluate",
    "format_fixed2",
    "generate",
    "max_weight_matching",
    "multi_score",
    "self_bleu",
    "sentence_bleu",
    "sentence_chrfpp",
    "tokenize_words",
    "train_ngram",
]
