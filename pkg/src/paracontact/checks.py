"""Identity checking and the structured pass/fail records verifiers return."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Iterable, Sequence

import numpy as np

from .symexpr import (
    DEFAULT_POINTS,
    DEFAULT_SEED,
    DEFAULT_TOL,
    DomainBox,
    DomainError,
    Expr,
    as_expr,
    eval_expr,
    relative_residual,
    sample_points,
)
from .symexpr.sampling import symbolic_difference

# roles that decide whether a report passes
COUNTED_ROLES = ("check", "precondition", "discrepancy", "expectation")


@dataclass(frozen=True)
class CheckConfig:
    seed: int = DEFAULT_SEED
    points: int = DEFAULT_POINTS
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.points < 1:
            raise ValueError("points must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


@dataclass
class Entry:
    """One verified identity.

    ``passed`` is None for informational rows.  ``role`` says how the row
    counts: checks, preconditions, expectations and discrepancy rows decide
    the verdict; ``property`` rows report a truth value that classifies the
    input rather than validating it.
    """

    name: str
    passed: bool | None
    max_residual: float | None = None
    witness: dict | None = None
    theorem: str | None = None
    role: str = "check"
    note: str = ""
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"check": self.name, "theorem": self.theorem, "pass": self.passed, "role": self.role}
        out["max_residual"] = _json_float(self.max_residual)
        out["witness"] = self.witness
        if self.note:
            out["note"] = self.note
        if self.detail:
            out["detail"] = self.detail
        return out


def _json_float(v):
    if v is None:
        return None
    if math.isinf(v):
        return "inf"
    return float(f"{v:.6g}")


@dataclass
class StructureReport:
    title: str
    entries: list[Entry] = field(default_factory=list)

    def add(self, entry: Entry) -> Entry:
        self.entries.append(entry)
        return entry

    def extend(self, other: StructureReport, prefix: str = "") -> None:
        for e in other.entries:
            if prefix:
                e = Entry(**{**e.__dict__, "name": f"{prefix}{e.name}"})
            self.entries.append(e)

    @property
    def ok(self) -> bool:
        return all(e.passed for e in self.entries if e.role in COUNTED_ROLES and e.passed is not None)

    def entry(self, name: str) -> Entry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def by_theorem(self, label: str) -> Entry:
        for e in self.entries:
            if e.theorem == label:
                return e
        raise KeyError(label)

    def failures(self) -> list[Entry]:
        return [e for e in self.entries if e.role in COUNTED_ROLES and e.passed is False]

    def to_json(self) -> dict:
        return {"title": self.title, "ok": self.ok, "entries": [e.to_json() for e in self.entries]}


@dataclass
class Comparison:
    passed: bool
    max_residual: float
    witness: dict | None
    index: tuple | None
    symbolic: bool


def _flat(x) -> tuple[list[tuple], list[Expr]]:
    if isinstance(x, np.ndarray):
        idx = list(np.ndindex(*x.shape))
        return idx, [as_expr(x[i]) for i in idx]
    if hasattr(x, "comps"):
        return _flat(x.comps)
    if isinstance(x, (list, tuple)):
        arr = np.empty(np.shape(np.array(x, dtype=object)), dtype=object)
        for i in np.ndindex(*arr.shape):
            v = x
            for k in i:
                v = v[k]
            arr[i] = v
        return _flat(arr)
    return [()], [as_expr(x)]


def compare(
    lhs,
    rhs,
    coords: Sequence[str],
    domain: DomainBox,
    cfg: CheckConfig,
) -> Comparison:
    """Symbolic-then-sampled comparison of two equally shaped component arrays."""
    li, lv = _flat(lhs)
    ri, rv = _flat(rhs)
    if li != ri:
        raise ValueError(f"shape mismatch: {len(li)} vs {len(ri)} components")
    pending = []
    for idx, a, b in zip(li, lv, rv):
        if not symbolic_difference(a, b).is_zero:
            pending.append((idx, a, b))
    if not pending:
        return Comparison(True, 0.0, None, None, True)
    guard = [e for _, a, b in pending for e in (a, b)]
    try:
        points = sample_points(guard, coords, domain, cfg.points, cfg.seed)
    except DomainError as exc:
        return Comparison(False, math.inf, {"error": str(exc)}, pending[0][0], False)
    worst, witness, where = 0.0, None, None
    for p in points:
        for idx, a, b in pending:
            r = relative_residual(eval_expr(a, p), eval_expr(b, p))
            if r > worst or where is None:
                worst, witness, where = r, p, idx
    return Comparison(worst <= cfg.tol, worst, _round_point(witness) if worst > cfg.tol else None, where, False)


def _round_point(p: dict | None) -> dict | None:
    if p is None:
        return None
    return {k: float(f"{v:.12g}") for k, v in p.items()}


def check(
    report: StructureReport,
    name: str,
    lhs,
    rhs,
    coords: Sequence[str],
    domain: DomainBox,
    cfg: CheckConfig,
    theorem: str | None = None,
    role: str = "check",
    note: str = "",
    describe=None,
) -> Entry:
    """Compare and append an :class:`Entry`; ``describe(index)`` labels a failing slot."""
    c = compare(lhs, rhs, coords, domain, cfg)
    detail = {}
    if not c.passed and c.index is not None:
        detail["component"] = describe(c.index) if describe else list(c.index)
        li, lv = _flat(lhs)
        ri, rv = _flat(rhs)
        k = li.index(c.index)
        detail["lhs"] = str(lv[k])
        detail["rhs"] = str(rv[k])
    return report.add(
        Entry(name, c.passed, c.max_residual, c.witness, theorem=theorem, role=role, note=note, detail=detail)
    )


def all_index(n: int, rank: int) -> Iterable[tuple]:
    return product(range(n), repeat=rank)
