# Copyright 2026 The Multi-Score Authors
# SPDX-License-Identifier: Apache-2.0

import json
import os
import pathlib

import pytest

import multiscore

DATA = pathlib.Path(
    os.environ.get("MULTISCORE_DATA_DIR", pathlib.Path(__file__).resolve().parents[2] / "data")
)
FIXTURES = DATA / "fixtures"


def test_frozen_metric_values():
    assert multiscore.sentence_bleu("the cat sat on the mat", ["the cat is on the mat"]) == pytest.approx(
        48.54917717073234, abs=1e-9
    )
    assert multiscore.sentence_chrfpp("abc", "abd") == pytest.approx(700.0 / 24.0, abs=1e-9)
    assert multiscore.self_bleu(["a b c d", "a b c e", "x y z w"]) == pytest.approx(
        43.869133765083085, abs=1e-9
    )
    assert multiscore.format_fixed2(164.0 / 3.0) == "54.67"


def test_matching_walkthrough():
    rows = [[31, 56, 22], [40, 18, 50], [58, 27, 35]]
    m = multiscore.max_weight_matching(rows)
    assert m.edges == [(0, 1), (1, 2), (2, 0)]
    assert m.total == 164.0
    assert multiscore.brute_force_matching(rows).edges == m.edges


def test_multi_score_identity_and_errors():
    refs = ["a cat sits on the mat", "the river runs", "blue sky"]
    r = multiscore.multi_score(list(reversed(refs)), refs, metric="chrf")
    assert r.score == 100.0
    assert len(r.matrix) == 3
    with pytest.raises(multiscore.ValidationError):
        multiscore.multi_score(refs[:2], refs)
    with pytest.raises(ValueError):
        multiscore.multi_score(refs, refs, metric="meteor")


def test_evaluate_toy_fixtures():
    text = multiscore.evaluate(str(FIXTURES / "toy_refs.jsonl"), str(FIXTURES / "toy_outputs.jsonl"))
    doc = json.loads(text)
    assert doc["instance_count"] == 2
    assert set(doc["diversity"]) >= {"ms_bleu", "ms_chrf", "self_bleu"}
    tsv = multiscore.evaluate(str(FIXTURES / "identity.jsonl"), format="tsv")
    assert tsv.splitlines()[0] == "BLEU\tCHRF++\tSelf-B\tMS-B\tMS-C"


def test_evaluate_errors():
    with pytest.raises(multiscore.ValidationError, match="t9"):
        multiscore.evaluate(str(FIXTURES / "toy_refs.jsonl"), str(FIXTURES / "toy_outputs_bad_id.jsonl"))
    with pytest.raises(OSError):
        multiscore.evaluate(str(FIXTURES / "absent.jsonl"))


def test_generate_is_deterministic():
    train = str(FIXTURES / "toy_refs.jsonl")
    a = multiscore.generate(train, "topk3", seed=7)
    assert a == multiscore.generate(train, "topk3", seed=7)
    lines = [json.loads(line) for line in a.splitlines()]
    assert [len(line["outputs"]) for line in lines] == [3, 3]


def test_ngram_round_trip():
    lm = multiscore.train_ngram([["a", "b"], ["a", "c"]], order=2, add_k=0.5)
    again = multiscore.NGramLM.deserialize(lm.serialize())
    assert again == lm
    dist = lm.next_distribution(["a"])
    assert len(dist) == len(lm.vocabulary)
    assert sum(dist) == pytest.approx(1.0)


def test_exception_hierarchy():
    assert issubclass(multiscore.ValidationError, ValueError)
    assert issubclass(multiscore.IoError, OSError)
