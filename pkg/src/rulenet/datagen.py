"""Synthetic nine-attribute benchmark generator with pluggable label functions.

Records carry demographic/financial attributes drawn from fixed distributions;
a label function assigns class A or B and an optional perturbation flips each
label independently to simulate noise.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .errors import ConfigError

CLASS_A = "A"
CLASS_B = "B"
CLASSES = (CLASS_A, CLASS_B)

RNG_NAME = "numpy-pcg64"

# Attribute draw order is fixed (columnar) so datasets are reproducible.
ATTRIBUTE_NAMES = (
    "salary",
    "commission",
    "age",
    "elevel",
    "car",
    "zipcode",
    "hvalue",
    "hyears",
    "loan",
)


@dataclass(frozen=True)
class Tuple:
    """One benchmark record plus its class label."""

    salary: float
    commission: float
    age: float
    elevel: int
    car: int
    zipcode: int
    hvalue: float
    hyears: int
    loan: float
    label: str


@dataclass(frozen=True)
class GeneratorConfig:
    count: int
    seed: int
    perturbation: float = 0.0
    function_id: str = "F2"

    def __post_init__(self):
        if self.count <= 0:
            raise ConfigError(f"count must be positive, got {self.count}")
        if not 0.0 <= self.perturbation < 0.5:
            raise ConfigError(
                f"perturbation must be in [0, 0.5), got {self.perturbation}"
            )
        if self.function_id not in FUNCTIONS:
            raise ConfigError(
                f"unknown function_id {self.function_id!r}; "
                f"registered: {sorted(FUNCTIONS)}"
            )


# ---------------------------------------------------------------------------
# Label functions
# ---------------------------------------------------------------------------

def label_function1(t: Tuple) -> str:
    return CLASS_A if (t.age < 40 or t.age >= 60) else CLASS_B


def label_function2(t: Tuple) -> str:
    if t.age < 40:
        hit = 50000 <= t.salary <= 100000
    elif t.age < 60:
        hit = 75000 <= t.salary <= 125000
    else:
        hit = 25000 <= t.salary <= 75000
    return CLASS_A if hit else CLASS_B


def label_function3(t: Tuple) -> str:
    if t.age < 40:
        hit = t.elevel in (0, 1)
    elif t.age < 60:
        hit = t.elevel in (1, 2, 3)
    else:
        hit = t.elevel in (2, 3, 4)
    return CLASS_A if hit else CLASS_B


def label_function4(t: Tuple) -> str:
    if t.age < 40:
        if t.elevel in (0, 1):
            hit = 25000 <= t.salary <= 75000
        else:
            hit = 50000 <= t.salary <= 100000
    elif t.age < 60:
        if t.elevel in (1, 2, 3):
            hit = 50000 <= t.salary <= 100000
        else:
            hit = 75000 <= t.salary <= 125000
    else:
        if t.elevel in (2, 3, 4):
            hit = 50000 <= t.salary <= 100000
        else:
            hit = 25000 <= t.salary <= 75000
    return CLASS_A if hit else CLASS_B


def label_function5(t: Tuple) -> str:
    if t.age < 40:
        if 50000 <= t.salary <= 100000:
            hit = 100000 <= t.loan <= 300000
        else:
            hit = 200000 <= t.loan <= 400000
    elif t.age < 60:
        if 75000 <= t.salary <= 125000:
            hit = 200000 <= t.loan <= 400000
        else:
            hit = 300000 <= t.loan <= 500000
    else:
        if 25000 <= t.salary <= 75000:
            hit = 300000 <= t.loan <= 500000
        else:
            hit = 100000 <= t.loan <= 300000
    return CLASS_A if hit else CLASS_B


def label_function6(t: Tuple) -> str:
    total = t.salary + t.commission
    if t.age < 40:
        hit = 50000 <= total <= 100000
    elif t.age < 60:
        hit = 75000 <= total <= 125000
    else:
        hit = 25000 <= total <= 75000
    return CLASS_A if hit else CLASS_B


def label_function7(t: Tuple) -> str:
    disposable = 0.67 * (t.salary + t.commission) - 0.2 * t.loan - 20000
    return CLASS_A if disposable > 0 else CLASS_B


def label_function9(t: Tuple) -> str:
    disposable = (
        0.67 * (t.salary + t.commission)
        - 5000 * t.elevel
        - 0.2 * t.loan
        - 10000
    )
    return CLASS_A if disposable > 0 else CLASS_B


FUNCTIONS: dict[str, Callable[[Tuple], str]] = {
    "F1": label_function1,
    "F2": label_function2,
    "F3": label_function3,
    "F4": label_function4,
    "F5": label_function5,
    "F6": label_function6,
    "F7": label_function7,
    "F9": label_function9,
}


def register_function(function_id: str, predicate: Callable[[Tuple], str]) -> None:
    """Add or replace a label predicate in the registry."""
    FUNCTIONS[function_id] = predicate


def label_other(t: Tuple, function_id: str) -> str:
    """Label a record with any registered predicate."""
    try:
        fn = FUNCTIONS[function_id]
    except KeyError:
        raise ConfigError(
            f"unknown function_id {function_id!r}; registered: {sorted(FUNCTIONS)}"
        ) from None
    return fn(t)


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------

def generate_tuples(config: GeneratorConfig) -> list[Tuple]:
    """Draw `config.count` records, label them, then flip labels with
    probability `config.perturbation`.

    Draws are columnar in ATTRIBUTE_NAMES order followed by one flip draw per
    record, so the attribute values for a given (count, seed) never depend on
    the perturbation or the label function.
    """
    rng = np.random.default_rng(config.seed)
    k = config.count

    salary = rng.uniform(20000, 150000, size=k)
    commission_raw = rng.uniform(10000, 75000, size=k)
    commission = np.where(salary >= 75000, 0.0, commission_raw)
    age = rng.uniform(20, 80, size=k)
    elevel = rng.integers(0, 5, size=k)
    car = rng.integers(1, 21, size=k)
    zipcode = rng.integers(1, 10, size=k)
    # House value scales with the zipcode-indexed factor k in {1..9}.
    hv_lo = 0.5 * zipcode * 100000
    hv_hi = 1.5 * zipcode * 100000
    hvalue = hv_lo + rng.uniform(0.0, 1.0, size=k) * (hv_hi - hv_lo)
    hyears = rng.integers(1, 31, size=k)
    loan = rng.uniform(1, 500000, size=k)
    flips = rng.uniform(0.0, 1.0, size=k)

    predicate = FUNCTIONS[config.function_id]
    out = []
    for i in range(k):
        t = Tuple(
            salary=float(salary[i]),
            commission=float(commission[i]),
            age=float(age[i]),
            elevel=int(elevel[i]),
            car=int(car[i]),
            zipcode=int(zipcode[i]),
            hvalue=float(hvalue[i]),
            hyears=int(hyears[i]),
            loan=float(loan[i]),
            label=CLASS_A,
        )
        label = predicate(t)
        if flips[i] < config.perturbation:
            label = CLASS_B if label == CLASS_A else CLASS_A
        out.append(Tuple(**{**t.__dict__, "label": label}))
    return out


# ---------------------------------------------------------------------------
# CSV persistence
# ---------------------------------------------------------------------------

_INT_FIELDS = {"elevel", "car", "zipcode", "hyears"}


def save_tuples(tuples: Iterable[Tuple], path: str | Path,
                config: GeneratorConfig | None = None) -> None:
    """Write records as CSV; if a config is given, write a metadata sidecar
    (<path>.meta.json) recording it for provenance."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(ATTRIBUTE_NAMES) + ["label"])
        for t in tuples:
            row = [
                repr(getattr(t, name)) if name not in _INT_FIELDS
                else str(getattr(t, name))
                for name in ATTRIBUTE_NAMES
            ]
            writer.writerow(row + [t.label])
    if config is not None:
        meta = {
            "rng": RNG_NAME,
            "draw_order": list(ATTRIBUTE_NAMES) + ["flip"],
            "count": config.count,
            "seed": config.seed,
            "perturbation": config.perturbation,
            "function_id": config.function_id,
        }
        meta_path = path.with_suffix(path.suffix + ".meta.json")
        meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def load_tuples(path: str | Path) -> list[Tuple]:
    path = Path(path)
    field_names = {f.name for f in fields(Tuple)}
    out = []
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(ATTRIBUTE_NAMES) - set(reader.fieldnames or [])
        if missing or "label" not in (reader.fieldnames or []):
            raise ConfigError(f"dataset {path} missing columns: {sorted(missing)}")
        for row in reader:
            kwargs = {}
            for name in field_names - {"label"}:
                kwargs[name] = int(row[name]) if name in _INT_FIELDS else float(row[name])
            kwargs["label"] = row["label"]
            out.append(Tuple(**kwargs))
    return out
