"""Report documents: JSON, the nested-list legacy text layout, and CSV.

A document is one column of the classification table for one degree::

    {"d": 6, "column": "N=2", "items": [
        {"d": [1, 2], "s": [1, 2], "m": [1, 1], "codims": [5, 7, 8, 9],
         "pairs": [[1, -10], ...]},
        ...]}

``pairs`` is the fifth legacy item: NT pairs for the NT column, pairs with
a smooth N-jet for an ``N=k`` column, absent for General / Inclusion.  The
legacy text carries only the items, so parsing it back needs ``d`` and
``column`` from the caller.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from typing import Any

__all__ = ["ReportItem", "ReportDoc", "to_legacy", "from_legacy", "to_csv", "dumps", "loads"]


@dataclass
class ReportItem:
    d12: tuple[int, int]
    s12: tuple[int, int]
    m12: tuple[int, int]
    codims: tuple[int, int, int, int]
    pairs: list[tuple[int, int]] | None = None

    @property
    def params(self) -> tuple[int, ...]:
        return self.d12 + self.s12 + self.m12

    def to_json(self) -> dict:
        out: dict[str, Any] = {
            "d": list(self.d12),
            "s": list(self.s12),
            "m": list(self.m12),
            "codims": list(self.codims),
        }
        if self.pairs is not None:
            out["pairs"] = [list(p) for p in self.pairs]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ReportItem":
        pairs = data.get("pairs")
        return cls(
            tuple(data["d"]),
            tuple(data["s"]),
            tuple(data["m"]),
            tuple(data["codims"]),
            None if pairs is None else [tuple(p) for p in pairs],
        )


@dataclass
class ReportDoc:
    d: int
    column: str
    items: list[ReportItem] = field(default_factory=list)

    def sorted(self) -> "ReportDoc":
        return ReportDoc(self.d, self.column, sorted(self.items, key=lambda it: it.params))

    def to_json(self) -> dict:
        return {"d": self.d, "column": self.column, "items": [it.to_json() for it in self.items]}

    @classmethod
    def from_json(cls, data: dict) -> "ReportDoc":
        return cls(int(data["d"]), str(data["column"]), [ReportItem.from_json(x) for x in data["items"]])


def dumps(doc: ReportDoc) -> str:
    """Byte-stable JSON."""
    return json.dumps(doc.to_json(), sort_keys=True, indent=1) + "\n"


def loads(text: str) -> ReportDoc:
    return ReportDoc.from_json(json.loads(text))


def _csv_ints(xs) -> str:
    return ",".join(str(x) for x in xs)


def to_legacy(doc: ReportDoc) -> str:
    lines = []
    for k, it in enumerate(doc.items, 1):
        lines.append(f" [{k}]:")
        for tag, vals in ((1, it.d12), (2, it.s12), (3, it.m12), (4, it.codims)):
            lines.append(f"   [{tag}]:")
            lines.append(f"      {_csv_ints(vals)}")
        if it.pairs is not None:
            lines.append("   [5]:")
            for j, pr in enumerate(it.pairs, 1):
                lines.append(f"      [{j}]:")
                lines.append(f"         {_csv_ints(pr)}")
    return "\n".join(lines) + ("\n" if lines else "")


_TAG = re.compile(r"^(\s*)\[(\d+)\]:\s*$")


def from_legacy(text: str, d: int, column: str) -> ReportDoc:
    """Parse the nested-list layout; indentation decides the nesting level."""
    items: list[ReportItem] = []
    cur: dict[int, Any] | None = None
    slot: int | None = None
    in_pairs = False

    def flush():
        if cur is not None:
            items.append(
                ReportItem(cur[1], cur[2], cur[3], cur[4], cur.get(5))
            )

    for raw in text.splitlines():
        if not raw.strip():
            continue
        m = _TAG.match(raw)
        if m:
            indent = len(m.group(1))
            tag = int(m.group(2))
            if indent <= 1:
                flush()
                cur, slot, in_pairs = {}, None, False
            elif cur is None:
                raise ValueError(f"field before any item: {raw!r}")
            elif in_pairs and indent > 3:
                pass  # [j]: inside [5]; value on the next line
            else:
                slot = tag
                in_pairs = tag == 5
                if in_pairs:
                    cur[5] = []
            continue
        if cur is None or slot is None:
            raise ValueError(f"value outside a field: {raw!r}")
        vals = tuple(int(x) for x in raw.strip().split(","))
        if in_pairs:
            cur[5].append(vals)
        else:
            cur[slot] = vals
    flush()
    return ReportDoc(d, column, items)


CSV_HEADER = ["d", "column", "d1", "d2", "s1", "s2", "m1", "m2", "a1", "a2", "a3", "a4", "pairs"]


def to_csv(doc: ReportDoc) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for it in doc.items:
        pairs = "" if it.pairs is None else ";".join(f"{a}:{b}" for a, b in it.pairs)
        w.writerow([doc.d, doc.column, *it.params, *it.codims, pairs])
    return buf.getvalue()
