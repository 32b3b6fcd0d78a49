"""Unit tests for data_manager: S-ring files and report writing"""
import json
import os
import tempfile

import pytest

from abelian_core import make_group, trivial_subgroup, whole_group
from ci_engine import babai_ci_check, ci_via_star
from data_manager import (dumps, load_partition, partition_from_dict, partition_to_dict,
                          save_partition, verdict_to_dict, write_jsonl, write_refutations,
                          write_report)
from errors import InvalidSpecError
from schur_core import SchurPartition, rank_two_partition


def test_save_and_load_partition():
    """A saved partition loads back with the same blocks"""
    P = SchurPartition.from_blocks(make_group([2, 2, 2]), [[0], [1], [2, 3], [4, 5, 6, 7]])
    with tempfile.NamedTemporaryFile(delete=True, suffix='.json') as f:
        temp_file = f.name

    try:
        save_partition(temp_file, P)
        assert load_partition(temp_file) == P
        with open(temp_file, 'r', encoding='utf-8') as f:
            data = json.load(f)
        assert data == {"group": "Z2^3", "blocks": [[0], [1], [2, 3], [4, 5, 6, 7]]}
    finally:
        if os.path.exists(temp_file):
            os.remove(temp_file)


def test_corrupted_json_handling():
    """Invalid JSON is an input error naming the file"""
    with tempfile.NamedTemporaryFile(mode='w', delete=False, suffix='.json') as f:
        temp_file = f.name
        f.write("{ invalid json content }")

    try:
        with pytest.raises(InvalidSpecError) as info:
            load_partition(temp_file)
        assert temp_file in str(info.value)
    finally:
        if os.path.exists(temp_file):
            os.remove(temp_file)


def test_missing_file():
    with pytest.raises(InvalidSpecError):
        load_partition("/nonexistent/sring.json")


@pytest.mark.parametrize("data", [
    {"blocks": [[0], [1]]},
    {"group": "Z2", "blocks": "0 1"},
    {"group": "Z2", "blocks": [[0]]},
    {"group": "Q8", "blocks": [[0]]},
    {"group": "Z3", "blocks": [[0], [1, 2, 2], [5]]},
])
def test_malformed_partition_data(data):
    with pytest.raises(InvalidSpecError):
        partition_from_dict(data)


def test_partition_dict_is_canonical():
    P = partition_from_dict({"group": "Z5", "blocks": [[3, 2], [4, 1], [0]]})
    assert partition_to_dict(P) == {"group": "Z5", "blocks": [[0], [1, 4], [2, 3]]}


def test_dumps_is_deterministic():
    text = dumps({"b": 1, "a": [1, 2]})
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')
    assert dumps({"a": [1, 2], "b": 1}) == text


def test_verdict_to_dict_handles_refusals():
    G = make_group([2, 3])
    P = rank_two_partition(G)
    verdict = verdict_to_dict(babai_ci_check(P))
    assert verdict["verdict"] == "CI"
    refusal = verdict_to_dict(ci_via_star(P, trivial_subgroup(G), whole_group(G)))
    assert refusal["method"] == "star"
    assert refusal["refused"] == "star decomposition is trivial"


def test_report_writers():
    with tempfile.TemporaryDirectory() as out_dir:
        path = write_report(os.path.join(out_dir, "nested"), "validate", {"ok": True})
        assert path.endswith("validate.json")
        with open(path, 'r', encoding='utf-8') as f:
            assert json.load(f) == {"ok": True}

        rows_path = os.path.join(out_dir, "rows.jsonl")
        assert write_jsonl(rows_path, [{"rank": 2}, {"rank": 3}]) == 2
        with open(rows_path, 'r', encoding='utf-8') as f:
            assert f.read().splitlines() == ['{"rank":2}', '{"rank":3}']

        paths = write_refutations(out_dir, [{"reason": "x"}, {"reason": "y"}])
        assert [os.path.basename(p) for p in paths] == ["refutation-000.json",
                                                        "refutation-001.json"]
        assert write_refutations(out_dir, []) == []
