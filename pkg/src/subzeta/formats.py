"""Text formats for algebras, series and run configurations.

Algebra file::

    name: heisenberg
    dim: 3
    prime: 2
    weights: 1 1 2
    lie: yes
    nilpotent_class: 2
    1 2 3 1
    2 1 3 -1

Product lines are ``i j k value`` with 1-based indices, meaning
``e_i * e_j`` has ``value`` on ``e_k``.  Declared properties are
re-verified when the file is loaded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from pathlib import Path

from .algebra import StructureAlgebra, is_lie, is_residually_nilpotent, nilpotency_class, verify_grading


class FormatError(ValueError):
    pass


_BOOL = {"yes": True, "true": True, "1": True, "no": False, "false": False, "0": False}


def parse_algebra(text: str) -> StructureAlgebra:
    header: dict[str, str] = {}
    consts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" in line:
            key, _, val = line.partition(":")
            header[key.strip().lower()] = val.strip()
            continue
        parts = line.split()
        if len(parts) != 4:
            raise FormatError(f"line {lineno}: expected 'i j k value', got {line!r}")
        try:
            i, j, k, c = (int(x) for x in parts)
        except ValueError:
            raise FormatError(f"line {lineno}: non-integer entry in {line!r}") from None
        consts.append((i - 1, j - 1, k - 1, c))
    for key in ("dim", "prime"):
        if key not in header:
            raise FormatError(f"missing header field {key!r}")
    n, p = int(header["dim"]), int(header["prime"])
    for i, j, k, _ in consts:
        if not all(0 <= x < n for x in (i, j, k)):
            raise FormatError(f"index out of range 1..{n} in ({i + 1}, {j + 1}, {k + 1})")
    weights = None
    if header.get("weights"):
        weights = tuple(int(x) for x in header["weights"].replace(",", " ").split())
    try:
        A = StructureAlgebra(header.get("name", "unnamed"), n, p, tuple(consts), weights)
    except ValueError as e:
        raise FormatError(str(e)) from None
    _verify_declared(A, header)
    return A


def _flag(header, key):
    val = header[key].lower()
    if val not in _BOOL:
        raise FormatError(f"{key} must be yes/no, got {header[key]!r}")
    return _BOOL[val]


def _verify_declared(A: StructureAlgebra, header: dict[str, str]) -> None:
    if A.weights is not None and not verify_grading(A):
        raise FormatError(f"weights {A.weights} are not a grading")
    if "lie" in header and _flag(header, "lie") != is_lie(A):
        raise FormatError(f"declared lie: {header['lie']} does not hold")
    if "nilpotent_class" in header:
        declared = header["nilpotent_class"].lower()
        actual = nilpotency_class(A)
        want = None if declared in ("none", "no") else int(declared)
        if want != actual:
            raise FormatError(f"declared nilpotent_class {declared} but computed {actual}")
    if "residually_nilpotent" in header:
        verdict = is_residually_nilpotent(A, precision=8)
        declared = _flag(header, "residually_nilpotent")
        if verdict.status == "inconclusive" or declared != bool(verdict):
            raise FormatError(f"declared residually_nilpotent: {header['residually_nilpotent']} but check says {verdict.status}")


def format_algebra(A: StructureAlgebra) -> str:
    lines = [f"name: {A.name}", f"dim: {A.n}", f"prime: {A.p}"]
    if A.weights:
        lines.append("weights: " + " ".join(map(str, A.weights)))
    lines += [f"{i + 1} {j + 1} {k + 1} {c}" for i, j, k, c in A.constants]
    return "\n".join(lines) + "\n"


def load_algebra(path: str | Path) -> StructureAlgebra:
    return parse_algebra(Path(path).read_text(encoding="utf-8"))


def parse_series(text: str) -> list[Fraction]:
    """Coefficients separated by whitespace or commas, or ``i: value`` rows."""
    vals = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" in line:
            line = line.partition(":")[2]
        vals += [Fraction(tok) for tok in line.replace(",", " ").split()]
    if not vals:
        raise FormatError("empty series")
    return vals


@dataclass(frozen=True)
class RunConfig:
    i_max: int = 4
    k_max: int = 8
    budget: int = 4
    precision: int = 8
    workers: int = 1
    out: str | None = None

    def __post_init__(self):
        for f in ("i_max", "k_max", "precision", "workers"):
            if getattr(self, f) < (0 if f == "i_max" else 1):
                raise ValueError(f"{f} out of range")
        if self.budget < 1:
            raise ValueError("budget must be positive")

    def updated(self, mapping: dict) -> "RunConfig":
        known = {f.name for f in fields(self)}
        unknown = set(mapping) - known
        if unknown:
            raise FormatError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return replace(self, **mapping)


def load_config(path: str | Path, base: RunConfig | None = None) -> RunConfig:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise FormatError("config must be a JSON object")
    return (base or RunConfig()).updated(data)
