"""Binary input coding for the benchmark attributes.

Ordered attributes are discretized into fixed-width intervals and thermometer
coded: within an attribute's input range the bit at position i is 1 exactly
when the value reaches that position's threshold, thresholds decreasing with
the input index.  Categorical attributes are one-hot coded.  Input 87 is a
constant-one bias input.  Single-bit conditions invert back to attribute
predicates, which is what makes extracted rules readable.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .datagen import CLASSES, Tuple
from .errors import EncodingError

INPUT_COUNT = 87
BIAS_INDEX = 87  # 1-based; constant 1


@dataclass(frozen=True)
class ThermometerCoding:
    """Thresholded coding of an ordered attribute.

    thresholds are strictly decreasing; the bit for input `start + i` is
    1 iff value >= thresholds[i].  A threshold at the domain minimum yields
    an always-on bit; a lowest threshold above the minimum yields an all-zero
    code for values below it (the zero-commission case).
    """

    attr: str
    start: int
    thresholds: tuple[float, ...]
    domain: tuple[float, float]
    integer: bool = False

    def __post_init__(self):
        if len(self.thresholds) < 2:
            raise EncodingError(f"{self.attr}: thermometer needs >= 2 intervals")
        if any(a <= b for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise EncodingError(f"{self.attr}: thresholds must strictly decrease")

    @property
    def width(self) -> int:
        return len(self.thresholds)

    def indices(self) -> range:
        return range(self.start, self.start + self.width)


@dataclass(frozen=True)
class OneHotCoding:
    attr: str
    start: int
    categories: tuple[int, ...]

    @property
    def width(self) -> int:
        return len(self.categories)

    def indices(self) -> range:
        return range(self.start, self.start + self.width)


AttributeCoding = ThermometerCoding | OneHotCoding


@dataclass(frozen=True)
class EncodingScheme:
    codings: tuple[AttributeCoding, ...]

    def __post_init__(self):
        covered = []
        for c in self.codings:
            covered.extend(c.indices())
        if sorted(covered) != list(range(1, BIAS_INDEX)):
            raise EncodingError(
                "attribute input ranges must partition indices "
                f"1..{BIAS_INDEX - 1}, got {len(covered)} indices"
            )

    def coding_for_index(self, index: int) -> AttributeCoding:
        if not 1 <= index < BIAS_INDEX:
            raise EncodingError(f"input index {index} has no attribute coding")
        for c in self.codings:
            if index in c.indices():
                return c
        raise EncodingError(f"input index {index} not covered")  # unreachable

    def coding_for_attr(self, attr: str) -> AttributeCoding:
        for c in self.codings:
            if c.attr == attr:
                return c
        raise EncodingError(f"no coding for attribute {attr!r}")


def default_scheme() -> EncodingScheme:
    """The 86-input coding of the benchmark attributes."""
    def therm(attr, start, width, step, top, domain, integer=False):
        # Threshold at `start` is the largest; they decrease by `step`.
        thresholds = tuple(float(top - i * step) for i in range(width))
        return ThermometerCoding(attr, start, thresholds, domain, integer)

    return EncodingScheme((
        # salary: intervals of 25000 over [20000, 150000]; lowest bit is
        # always on, so salary < 25000 codes as 000001.
        ThermometerCoding("salary", 1,
                          (125000.0, 100000.0, 75000.0, 50000.0, 25000.0, 20000.0),
                          (20000.0, 150000.0)),
        # commission: width 10000 over [10000, 75000]; zero codes as 0000000.
        therm("commission", 7, 7, 10000, 70000, (0.0, 75000.0)),
        # age: width 10 over [20, 80]; lowest bit always on.
        therm("age", 14, 6, 10, 70, (20.0, 80.0)),
        # elevel: ordinal 0..4 in four bits (>=1, >=2, >=3, >=4); level 0
        # codes as 0000.
        therm("elevel", 20, 4, 1, 4, (0.0, 4.0), integer=True),
        OneHotCoding("car", 24, tuple(range(1, 21))),
        OneHotCoding("zipcode", 44, tuple(range(1, 10))),
        # hvalue: width 100000; lowest bit always on.
        therm("hvalue", 53, 14, 100000, 1300000, (0.0, 1350000.0)),
        # hyears: width 3 over [1, 30]; lowest bit always on.
        therm("hyears", 67, 10, 3, 28, (1.0, 30.0), integer=True),
        # loan: width 50000; lowest bit always on.
        therm("loan", 77, 10, 50000, 450000, (0.0, 500000.0)),
    ))


# ---------------------------------------------------------------------------
# Encoding
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EncodedVector:
    bits: np.ndarray  # 87 values in {0, 1}; bits[86] == 1
    label: str
    clamped: tuple[str, ...] = ()


@dataclass
class EncodedDataset:
    """Bit matrix plus integer class labels for a list of records."""

    X: np.ndarray  # (k, 87) float64 in {0.0, 1.0}
    labels: np.ndarray  # (k,) int
    class_names: tuple[str, ...] = CLASSES

    def __len__(self) -> int:
        return self.X.shape[0]

    def targets(self, outputs: int | None = None) -> np.ndarray:
        o = outputs if outputs is not None else len(self.class_names)
        return np.eye(o)[self.labels]


def _checked_value(t: Tuple, coding: AttributeCoding, lenient: bool):
    value = getattr(t, coding.attr)
    clamped = False
    if isinstance(coding, ThermometerCoding):
        lo, hi = coding.domain
        if not lo <= value <= hi:
            if not lenient:
                raise EncodingError(
                    f"{coding.attr}={value} outside encodable domain [{lo}, {hi}]"
                )
            value = min(max(value, lo), hi)
            clamped = True
    else:
        if value not in coding.categories:
            raise EncodingError(
                f"{coding.attr}={value} is not a known category"
            )
    return value, clamped


def encode(t: Tuple, scheme: EncodingScheme, lenient: bool = False) -> EncodedVector:
    bits = np.zeros(INPUT_COUNT, dtype=np.uint8)
    clamped = []
    for coding in scheme.codings:
        value, was_clamped = _checked_value(t, coding, lenient)
        if was_clamped:
            clamped.append(coding.attr)
        if isinstance(coding, ThermometerCoding):
            for i, thr in enumerate(coding.thresholds):
                if value >= thr:
                    bits[coding.start - 1 + i] = 1
        else:
            bits[coding.start - 1 + coding.categories.index(value)] = 1
    bits[BIAS_INDEX - 1] = 1
    return EncodedVector(bits=bits, label=t.label, clamped=tuple(clamped))


def encode_dataset(tuples: Sequence[Tuple], scheme: EncodingScheme,
                   lenient: bool = False) -> EncodedDataset:
    """Vectorized `encode` over a list of records."""
    k = len(tuples)
    X = np.zeros((k, INPUT_COUNT))
    for coding in scheme.codings:
        vals = np.array([getattr(t, coding.attr) for t in tuples], dtype=float)
        if isinstance(coding, ThermometerCoding):
            lo, hi = coding.domain
            bad = (vals < lo) | (vals > hi)
            if bad.any():
                if not lenient:
                    i = int(np.argmax(bad))
                    raise EncodingError(
                        f"{coding.attr}={vals[i]} outside encodable domain "
                        f"[{lo}, {hi}] (row {i})"
                    )
                vals = np.clip(vals, lo, hi)
            thr = np.asarray(coding.thresholds)
            X[:, coding.start - 1:coding.start - 1 + coding.width] = (
                vals[:, None] >= thr[None, :]
            )
        else:
            cat_pos = {c: i for i, c in enumerate(coding.categories)}
            for row, v in enumerate(vals):
                try:
                    X[row, coding.start - 1 + cat_pos[int(v)]] = 1.0
                except KeyError:
                    raise EncodingError(
                        f"{coding.attr}={v} is not a known category (row {row})"
                    ) from None
    X[:, BIAS_INDEX - 1] = 1.0
    labels = np.array([CLASSES.index(t.label) for t in tuples], dtype=int)
    return EncodedDataset(X=X, labels=labels)


# ---------------------------------------------------------------------------
# Decoding and feasibility
# ---------------------------------------------------------------------------

def decode_bit_condition(index: int, value: int, scheme: EncodingScheme):
    """Invert a single bit condition to an attribute predicate.

    Returns (attr, op, constant) with op one of '>=', '<', '==', '!='.
    """
    if index == BIAS_INDEX:
        raise EncodingError("bias input has no attribute predicate")
    coding = scheme.coding_for_index(index)
    pos = index - coding.start
    if isinstance(coding, ThermometerCoding):
        thr = coding.thresholds[pos]
        return (coding.attr, ">=" if value else "<", thr)
    cat = coding.categories[pos]
    return (coding.attr, "==" if value else "!=", cat)


def feasible(conditions: Iterable[tuple[int, int]], scheme: EncodingScheme) -> bool:
    """True iff some per-attribute assignment satisfies every bit condition.

    Attributes are treated independently: thermometer bits induce an interval
    which must intersect the attribute domain; one-hot bits must leave at
    least one category admissible.
    """
    lo: dict[str, float] = {}
    hi: dict[str, float] = {}
    eq: dict[str, set[int]] = {}
    ne: dict[str, set[int]] = {}
    for index, value in conditions:
        if index == BIAS_INDEX:
            if value != 1:
                return False
            continue
        coding = scheme.coding_for_index(index)
        pos = index - coding.start
        if isinstance(coding, ThermometerCoding):
            thr = coding.thresholds[pos]
            if value:
                lo[coding.attr] = max(lo.get(coding.attr, -np.inf), thr)
            else:
                hi[coding.attr] = min(hi.get(coding.attr, np.inf), thr)
        else:
            cat = coding.categories[pos]
            if value:
                eq.setdefault(coding.attr, set()).add(cat)
            else:
                ne.setdefault(coding.attr, set()).add(cat)

    for attr in set(lo) | set(hi):
        coding = scheme.coding_for_attr(attr)
        dlo, dhi = coding.domain
        low = max(lo.get(attr, -np.inf), dlo)
        high = hi.get(attr, np.inf)
        if low > dhi or high <= dlo or low >= high:
            return False
    for attr in set(eq) | set(ne):
        coding = scheme.coding_for_attr(attr)
        wanted = eq.get(attr, set())
        if len(wanted) > 1:
            return False
        if wanted and wanted & ne.get(attr, set()):
            return False
        if not wanted and set(coding.categories) <= ne.get(attr, set()):
            return False
    return True


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

def save_encoded(data: EncodedDataset, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"I{i}" for i in range(1, INPUT_COUNT + 1)] + ["label"])
        for row, lbl in zip(data.X, data.labels):
            writer.writerow([str(int(v)) for v in row] + [data.class_names[lbl]])


def load_encoded(path: str | Path) -> EncodedDataset:
    path = Path(path)
    rows, labels = [], []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for parts in reader:
            rows.append([float(v) for v in parts[:-1]])
            labels.append(CLASSES.index(parts[-1]))
    return EncodedDataset(X=np.array(rows), labels=np.array(labels, dtype=int))


def scheme_to_json(scheme: EncodingScheme) -> str:
    entries = []
    for c in scheme.codings:
        if isinstance(c, ThermometerCoding):
            entries.append({
                "attr": c.attr, "kind": "thermometer", "start": c.start,
                "thresholds": list(c.thresholds), "domain": list(c.domain),
                "integer": c.integer,
            })
        else:
            entries.append({
                "attr": c.attr, "kind": "onehot", "start": c.start,
                "categories": list(c.categories),
            })
    return json.dumps(
        {"inputs": INPUT_COUNT, "bias_index": BIAS_INDEX, "attributes": entries},
        indent=2, sort_keys=True,
    ) + "\n"


def scheme_from_json(text: str) -> EncodingScheme:
    raw = json.loads(text)
    codings: list[AttributeCoding] = []
    for e in raw["attributes"]:
        if e["kind"] == "thermometer":
            codings.append(ThermometerCoding(
                e["attr"], e["start"], tuple(e["thresholds"]),
                tuple(e["domain"]), e.get("integer", False)))
        else:
            codings.append(OneHotCoding(e["attr"], e["start"],
                                        tuple(e["categories"])))
    codings.sort(key=lambda c: c.start)
    return EncodingScheme(tuple(codings))
