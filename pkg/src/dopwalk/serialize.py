"""JSON and CSV encodings for operators, states and distributions.

Block dumps are lists of ``{"ket": [j, k], "bra": [l, m], "block": [[{"re": x, "im": y}, ...], ...]}``
in storage order.  Floats go through :func:`repr`, the shortest string that
round-trips exactly, so repeated runs produce identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Mapping, Sequence

import numpy as np

from .blocks import BlockOperator
from .density import DensityOperator, purity, trace
from .errors import ConfigParseError
from .graph import PairBasis
from .measurement import VertexDistribution

__all__ = [
    "dump_blocks",
    "load_blocks",
    "state_record",
    "distribution_record",
    "distributions_to_csv",
    "to_json",
]


def _complex(z) -> dict[str, float]:
    return {"re": float(z.real), "im": float(z.imag)}


def dump_blocks(op: BlockOperator) -> list[dict]:
    return [
        {
            "ket": list(ket),
            "bra": list(bra),
            "block": [[_complex(z) for z in row] for row in block],
        }
        for ket, bra, block in op.pair_items()
    ]


def load_blocks(
    entries: Iterable[Mapping], basis: PairBasis, coin_dim: int, cls=DensityOperator
) -> BlockOperator:
    """Inverse of :func:`dump_blocks`."""
    pair_blocks = {}
    try:
        for entry in entries:
            ket = (int(entry["ket"][0]), int(entry["ket"][1]))
            bra = (int(entry["bra"][0]), int(entry["bra"][1]))
            block = np.array(
                [[complex(z["re"], z.get("im", 0.0)) for z in row] for row in entry["block"]]
            )
            key = (ket, bra)
            pair_blocks[key] = pair_blocks.get(key, 0) + block
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise ConfigParseError(f"malformed block entry: {exc!r}") from exc
    return cls.from_pair_blocks(basis, coin_dim, pair_blocks)


def state_record(t: int, rho: BlockOperator) -> dict:
    return {"t": t, "trace": trace(rho), "purity": purity(rho), "blocks": dump_blocks(rho)}


def distribution_record(t: int, dist: VertexDistribution, outcome: Sequence[int] | None = None) -> dict:
    record = {"t": t, "P": dist.to_json()}
    if outcome is not None:
        record["outcome"] = list(outcome)
    return record


def distributions_to_csv(records: Sequence[Mapping]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "vertex", "probability"])
    for rec in records:
        for vertex, p in rec["P"].items():
            writer.writerow([rec["t"], vertex, repr(float(p))])
    return buf.getvalue()


def to_json(obj) -> str:
    return json.dumps(obj, indent=1) + "\n"
