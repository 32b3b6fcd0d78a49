"""
data_manager.py - JSON persistence

S-ring files are {"group": "<spec>", "blocks": [[rank, ...], ...]}. Reports
are written deterministically (sorted keys, two-space indent, trailing
newline) so that two runs with the same seed produce identical files.
"""

import json
import logging
import os
from typing import Iterable, List, Optional, Union

from abelian_core import parse_group_spec
from ci_engine import CiVerdict, HypothesisRefusal
from errors import InvalidSpecError
from schur_core import SchurPartition

logger = logging.getLogger(__name__)


# ========== Partitions ==========

def partition_to_dict(P: SchurPartition) -> dict:
    return {"group": P.group.label, "blocks": [list(b) for b in P.blocks]}


def partition_from_dict(data: dict) -> SchurPartition:
    """Build a partition; InvalidSpecError on any malformed field."""
    try:
        G = parse_group_spec(data["group"])
        blocks = data["blocks"]
        if not isinstance(blocks, list) or not all(isinstance(b, list) for b in blocks):
            raise InvalidSpecError("blocks must be a list of lists")
        return SchurPartition.from_blocks(G, blocks)
    except (KeyError, TypeError) as e:
        raise InvalidSpecError(f"malformed S-ring data: {e}") from e


def load_partition(path: str) -> SchurPartition:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
        return partition_from_dict(data)
    except InvalidSpecError as e:
        raise InvalidSpecError(f"{path}: {e}") from e
    except (json.JSONDecodeError, OSError, KeyError, TypeError, ValueError) as e:
        raise InvalidSpecError(f"{path}: cannot load S-ring: {e}") from e


def save_partition(path: str, P: SchurPartition) -> None:
    _write_json(path, partition_to_dict(P))


# ========== Reports ==========

def verdict_to_dict(verdict: Union[CiVerdict, HypothesisRefusal],
                    max_rows: Optional[int] = None) -> dict:
    if isinstance(verdict, CiVerdict):
        return verdict.to_dict(max_rows)
    return verdict.to_dict()


def dumps(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _write_json(path: str, payload) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(dumps(payload))


def write_report(out_dir: str, name: str, payload) -> str:
    path = os.path.join(out_dir, f"{name}.json")
    _write_json(path, payload)
    logger.info("[Report] wrote %s", path)
    return path


def write_jsonl(path: str, rows: Iterable[dict]) -> int:
    """One compact JSON object per line; returns the line count."""
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    count = 0
    with open(path, 'w', encoding='utf-8') as f:
        for row in rows:
            f.write(json.dumps(row, sort_keys=True, separators=(",", ":")) + "\n")
            count += 1
    return count


def write_refutations(out_dir: str, artifacts: List[dict]) -> List[str]:
    """One file per refutation artifact, numbered in report order."""
    paths = []
    for i, artifact in enumerate(artifacts):
        paths.append(write_report(out_dir, f"refutation-{i:03d}", artifact))
    if paths:
        logger.warning("[Report] %d refutation artifacts in %s", len(paths), out_dir)
    return paths


__all__ = [
    'partition_to_dict', 'partition_from_dict', 'load_partition', 'save_partition',
    'verdict_to_dict', 'dumps', 'write_report', 'write_jsonl', 'write_refutations',
]
