"""Seeded sampling of points and tolerance-based equivalence testing."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .nodes import DomainError, Expr, add, eval_expr, expand, neg

SamplePoint = dict  # coordinate name -> float

DEFAULT_INTERVAL = (-1.0, 1.0)
DEFAULT_POINTS = 20
DEFAULT_TOL = 1e-9
DEFAULT_SEED = 42
MAX_REDRAWS = 200


@dataclass(frozen=True)
class DomainBox:
    """Per-coordinate open intervals; unlisted coordinates use (-1, 1)."""

    intervals: Mapping[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for name, (lo, hi) in dict(self.intervals).items():
            lo, hi = float(lo), float(hi)
            if not lo < hi:
                raise ValueError(f"empty interval for {name}: ({lo}, {hi})")
            clean[name] = (lo, hi)
        object.__setattr__(self, "intervals", clean)

    def interval(self, name: str) -> tuple[float, float]:
        return self.intervals.get(name, DEFAULT_INTERVAL)

    def draw(self, rng: np.random.Generator, names: Sequence[str]) -> SamplePoint:
        point = {}
        for name in names:
            lo, hi = self.interval(name)
            # stay strictly inside the open interval
            pad = 1e-3 * (hi - lo)
            point[name] = float(rng.uniform(lo + pad, hi - pad))
        return point

    def center(self, names: Sequence[str]) -> SamplePoint:
        return {n: 0.5 * sum(self.interval(n)) for n in names}

    def to_json(self) -> dict:
        return {k: list(v) for k, v in sorted(self.intervals.items())}


def sample_points(
    exprs: Iterable[Expr],
    names: Sequence[str],
    dom: DomainBox,
    n_points: int = DEFAULT_POINTS,
    seed: int = DEFAULT_SEED,
) -> list[SamplePoint]:
    """Draw ``n_points`` seeded points at which every expression evaluates.

    A point that leaves some function domain is redrawn; after
    ``MAX_REDRAWS`` consecutive failures the last DomainError propagates.
    """
    exprs = list(exprs)
    rng = np.random.default_rng(seed)
    points: list[SamplePoint] = []
    failures = 0
    while len(points) < n_points:
        p = dom.draw(rng, names)
        try:
            for e in exprs:
                eval_expr(e, p)
        except DomainError:
            failures += 1
            if failures > MAX_REDRAWS:
                raise
            continue
        failures = 0
        points.append(p)
    return points


def relative_residual(a: float, b: float) -> float:
    return abs(a - b) / (1.0 + max(abs(a), abs(b)))


def symbolic_difference(a: Expr, b: Expr) -> Expr:
    return expand(add(a, neg(b)))


def exprs_equivalent(
    a: Expr,
    b: Expr,
    dom: DomainBox | None = None,
    n_points: int = DEFAULT_POINTS,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> bool:
    """True iff ``a`` and ``b`` agree after simplification or at every sample.

    Agreement at a point means ``|a-b| <= tol*(1+max(|a|,|b|))``.
    """
    return max_residual(a, b, dom, n_points, tol, seed)[0] <= tol


def max_residual(
    a: Expr,
    b: Expr,
    dom: DomainBox | None = None,
    n_points: int = DEFAULT_POINTS,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> tuple[float, SamplePoint | None]:
    """Largest relative residual over the sample and the worst point."""
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if symbolic_difference(a, b).is_zero:
        return 0.0, None
    dom = dom or DomainBox()
    names = sorted(a.free_symbols() | b.free_symbols())
    worst, witness = 0.0, None
    for p in sample_points((a, b), names, dom, n_points, seed):
        r = relative_residual(eval_expr(a, p), eval_expr(b, p))
        if r > worst or witness is None:
            worst, witness = r, p
    if not math.isfinite(worst):
        worst = math.inf
    return worst, witness
