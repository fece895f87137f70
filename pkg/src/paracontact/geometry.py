"""Charts, tensor fields and the coordinate differential operators.

Conventions (they matter; textbooks differ):

* (1,1)-tensors are stored as matrices ``T[i, j]`` with ``T(d_j) = sum_i T[i, j] d_i``,
  i.e. column ``j`` is the image of the ``j``-th coordinate field.
* Connection coefficients ``Gamma[k, i, j]`` mean ``nabla_{d_i} d_j = Gamma[k, i, j] d_k``.
* A (1,2)-tensor ``S[k, i, j]`` is the ``k``-th component of ``S(d_i, d_j)``.
* ``d eta`` and the wedge product carry no factor 1/2:
  ``(d eta)[i, j] = d_i eta_j - d_j eta_i`` and ``(b ^ c)[i, j] = b_i c_j - b_j c_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Sequence

import numpy as np

from . import linalg
from .symexpr import (
    ONE,
    ZERO,
    DomainBox,
    Expr,
    add,
    as_expr,
    diff_expr,
    eval_expr,
    mul,
    neg,
    sample_points,
    subs,
)


class ChartMismatchError(ValueError):
    pass


class SignatureError(ValueError):
    pass


class SingularMetricError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Chart:
    coords: tuple[str, ...]
    domain: DomainBox = field(default_factory=DomainBox)

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if len(set(self.coords)) != len(self.coords):
            raise ValueError(f"coordinate names must be distinct: {self.coords}")
        if len(self.coords) < 2:
            raise ValueError("a chart needs at least two coordinates")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def index(self, name: str) -> int:
        return self.coords.index(name)

    def points(self, exprs, n_points: int, seed: int) -> list[dict]:
        return sample_points(exprs, self.coords, self.domain, n_points, seed)


def _obj_array(values, shape) -> np.ndarray:
    arr = np.empty(shape, dtype=object)
    flat = list(values)
    if len(flat) != int(np.prod(shape, dtype=int)):
        raise SignatureError(f"expected {int(np.prod(shape))} components, got {len(flat)}")
    for idx, v in zip(np.ndindex(*shape), flat):
        arr[idx] = as_expr(v)
    arr.flags.writeable = False
    return arr


class TensorField:
    """Dense (r,s)-tensor with Expr components; contravariant indices first."""

    __slots__ = ("chart", "r", "s", "comps")

    def __init__(self, chart: Chart, r: int, s: int, comps):
        n = chart.dim
        shape = (n,) * (r + s)
        if isinstance(comps, np.ndarray) and comps.shape == shape:
            values = comps.flat if shape else [comps[()]]
        else:
            a = np.array(comps, dtype=object)
            if a.shape != shape:
                raise SignatureError(f"({r},{s}) field on a {n}-dim chart needs shape {shape}, got {a.shape}")
            values = a.flat if shape else [a[()]]
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "comps", _obj_array(values, shape))

    def __setattr__(self, name, value):
        raise AttributeError("TensorField is immutable")

    @property
    def signature(self) -> tuple[int, int]:
        return (self.r, self.s)

    @property
    def dim(self) -> int:
        return self.chart.dim

    def __getitem__(self, idx):
        return self.comps[idx]

    def __eq__(self, other):
        return (
            isinstance(other, TensorField)
            and self.chart.coords == other.chart.coords
            and self.signature == other.signature
            and all(a == b for a, b in zip(self.comps.flat, other.comps.flat))
        )

    def __hash__(self):
        return hash((self.chart.coords, self.signature, tuple(self.comps.flat)))

    def __repr__(self):
        return f"TensorField({self.r},{self.s}; {self.tolist_str()})"

    def tolist_str(self):
        return np.vectorize(str, otypes=[object])(self.comps).tolist()

    def map(self, fn) -> TensorField:
        return TensorField(self.chart, self.r, self.s, np.vectorize(fn, otypes=[object])(self.comps))

    def __add__(self, other: TensorField) -> TensorField:
        _same(self, other)
        if self.signature != other.signature:
            raise SignatureError("cannot add tensors of different type")
        out = np.empty(self.comps.shape, dtype=object)
        for idx in np.ndindex(*out.shape):
            out[idx] = add(self.comps[idx], other.comps[idx])
        return TensorField(self.chart, self.r, self.s, out)

    def __neg__(self) -> TensorField:
        return self.map(neg)

    def __sub__(self, other: TensorField) -> TensorField:
        return self + (-other)

    def scale(self, f) -> TensorField:
        f = as_expr(f)
        return self.map(lambda c: mul(f, c))

    def evaluate(self, point: dict) -> np.ndarray:
        return np.vectorize(lambda e: eval_expr(e, point), otypes=[float])(self.comps)

    def with_chart(self, chart: Chart) -> TensorField:
        return TensorField(chart, self.r, self.s, self.comps)


def _same(*fields: TensorField) -> Chart:
    chart = fields[0].chart
    for f in fields[1:]:
        if f.chart.coords != chart.coords:
            raise ChartMismatchError(f"chart mismatch: {chart.coords} vs {f.chart.coords}")
    return chart


def _need(t: TensorField, *sigs) -> None:
    if t.signature not in sigs:
        raise SignatureError(f"unsupported signature {t.signature}; expected one of {sigs}")


# ---------------------------------------------------------------------------
# constructors


def vector_field(chart: Chart, comps: Sequence) -> TensorField:
    return TensorField(chart, 1, 0, list(comps))


def one_form(chart: Chart, comps: Sequence) -> TensorField:
    return TensorField(chart, 0, 1, list(comps))


def tensor11(chart: Chart, matrix) -> TensorField:
    return TensorField(chart, 1, 1, matrix)


def coordinate_field(chart: Chart, i: int) -> TensorField:
    return vector_field(chart, [ONE if k == i else ZERO for k in range(chart.dim)])


def identity11(chart: Chart) -> TensorField:
    n = chart.dim
    return tensor11(chart, [[ONE if i == j else ZERO for j in range(n)] for i in range(n)])


def zero_tensor(chart: Chart, r: int, s: int) -> TensorField:
    return TensorField(chart, r, s, np.full((chart.dim,) * (r + s), ZERO, dtype=object))


# ---------------------------------------------------------------------------
# algebra


def apply11(T: TensorField, X: TensorField) -> TensorField:
    """T(X) for a (1,1)-tensor T and a vector field X."""
    _need(T, (1, 1))
    _need(X, (1, 0))
    _same(T, X)
    n = T.dim
    return vector_field(T.chart, [add(*(mul(T[i, j], X[j]) for j in range(n))) for i in range(n)])


def pair(beta: TensorField, X: TensorField) -> Expr:
    """beta(X) for a 1-form and a vector field."""
    _need(beta, (0, 1))
    _need(X, (1, 0))
    return add(*(mul(beta[i], X[i]) for i in range(beta.dim)))


def bilinear(B: TensorField, X: TensorField, Y: TensorField) -> Expr:
    """B(X, Y) for a (0,2)-tensor."""
    _need(B, (0, 2))
    n = B.dim
    return add(*(mul(B[i, j], X[i], Y[j]) for i in range(n) for j in range(n)))


def apply12(S: TensorField, X: TensorField, Y: TensorField) -> TensorField:
    _need(S, (1, 2))
    n = S.dim
    return vector_field(
        S.chart, [add(*(mul(S[k, i, j], X[i], Y[j]) for i in range(n) for j in range(n))) for k in range(n)]
    )


def compose11(A: TensorField, B: TensorField) -> TensorField:
    """(A o B) as a (1,1)-tensor."""
    _need(A, (1, 1))
    _need(B, (1, 1))
    _same(A, B)
    n = A.dim
    return tensor11(A.chart, [[add(*(mul(A[i, k], B[k, j]) for k in range(n))) for j in range(n)] for i in range(n)])


def form_after11(beta: TensorField, T: TensorField) -> TensorField:
    """The 1-form beta o T."""
    _need(beta, (0, 1))
    _need(T, (1, 1))
    n = T.dim
    return one_form(T.chart, [add(*(mul(beta[i], T[i, j]) for i in range(n))) for j in range(n)])


def outer_form_vector(beta: TensorField, X: TensorField) -> TensorField:
    """beta (x) X as the (1,1)-tensor Y -> beta(Y) X."""
    _need(beta, (0, 1))
    _need(X, (1, 0))
    n = X.dim
    return tensor11(X.chart, [[mul(X[i], beta[j]) for j in range(n)] for i in range(n)])


def tensor_forms(beta: TensorField, gamma: TensorField) -> TensorField:
    n = beta.dim
    return TensorField(beta.chart, 0, 2, [[mul(beta[i], gamma[j]) for j in range(n)] for i in range(n)])


def wedge_1forms(beta: TensorField, gamma: TensorField) -> TensorField:
    """(beta ^ gamma)(X, Y) = beta(X) gamma(Y) - beta(Y) gamma(X)."""
    _need(beta, (0, 1))
    _need(gamma, (0, 1))
    _same(beta, gamma)
    n = beta.dim
    return TensorField(
        beta.chart,
        0,
        2,
        [[add(mul(beta[i], gamma[j]), neg(mul(beta[j], gamma[i]))) for j in range(n)] for i in range(n)],
    )


def lower_index(g: TensorField, X: TensorField) -> TensorField:
    """The 1-form g(X, .)."""
    n = g.dim
    return one_form(g.chart, [add(*(mul(g[i, j], X[i]) for i in range(n))) for j in range(n)])


# ---------------------------------------------------------------------------
# differential operators


def directional(X: TensorField, f: Expr) -> Expr:
    """X(f) = X^i d_i f."""
    return add(*(mul(X[i], diff_expr(f, c)) for i, c in enumerate(X.chart.coords)))


def lie_bracket(X: TensorField, Y: TensorField) -> TensorField:
    """[X, Y]^k = X^i d_i Y^k - Y^i d_i X^k."""
    _need(X, (1, 0))
    _need(Y, (1, 0))
    chart = _same(X, Y)
    return vector_field(chart, [add(directional(X, Y[k]), neg(directional(Y, X[k]))) for k in range(chart.dim)])


def exterior_derivative_1form(eta: TensorField) -> TensorField:
    """(d eta)[i, j] = d_i eta_j - d_j eta_i (no 1/2)."""
    _need(eta, (0, 1))
    c = eta.chart.coords
    n = len(c)
    return TensorField(
        eta.chart,
        0,
        2,
        [[add(diff_expr(eta[j], c[i]), neg(diff_expr(eta[i], c[j]))) for j in range(n)] for i in range(n)],
    )


def exterior_derivative_on(eta: TensorField, X: TensorField, Y: TensorField) -> Expr:
    """d eta(X, Y) = X(eta(Y)) - Y(eta(X)) - eta([X, Y])."""
    return add(directional(X, pair(eta, Y)), neg(directional(Y, pair(eta, X))), neg(pair(eta, lie_bracket(X, Y))))


def lie_derivative(xi: TensorField, T: TensorField) -> TensorField:
    """Coordinate Lie derivative along ``xi`` of a vector field, 1-form or (1,1)-tensor."""
    _need(xi, (1, 0))
    _need(T, (1, 0), (0, 1), (1, 1))
    chart = _same(xi, T)
    c = chart.coords
    n = chart.dim
    dxi = [[diff_expr(xi[i], c[j]) for j in range(n)] for i in range(n)]  # dxi[i][j] = d_j xi^i
    if T.signature == (1, 0):
        return lie_bracket(xi, T)
    if T.signature == (0, 1):
        return one_form(
            chart,
            [add(directional(xi, T[j]), *(mul(T[k], dxi[k][j]) for k in range(n))) for j in range(n)],
        )
    return tensor11(
        chart,
        [
            [
                add(
                    directional(xi, T[i, j]),
                    *(neg(mul(T[k, j], dxi[i][k])) for k in range(n)),
                    *(mul(T[i, k], dxi[k][j]) for k in range(n)),
                )
                for j in range(n)
            ]
            for i in range(n)
        ],
    )


class MetricField:
    """Symmetric (0,2) field with a lazily computed symbolic inverse."""

    def __init__(self, g: TensorField, n_points: int = 3, seed: int = 0):
        _need(g, (0, 2))
        n = g.dim
        for i in range(n):
            for j in range(i + 1, n):
                if not (g[i, j] - g[j, i]).is_zero:
                    raise ValueError(f"metric is not symmetric in slots ({i}, {j})")
        self.g = g
        self.chart = g.chart
        self._ref_seed = seed
        self._ref_n = n_points

    def __eq__(self, other):
        return isinstance(other, MetricField) and self.g == other.g

    def __hash__(self):
        return hash(self.g)

    def __getitem__(self, idx):
        return self.g[idx]

    @property
    def dim(self) -> int:
        return self.g.dim

    @cached_property
    def ref_points(self) -> list[dict]:
        return self.chart.points(self.g.comps.flat, max(self._ref_n, 3), self._ref_seed)

    @cached_property
    def inverse(self) -> TensorField:
        n = self.dim
        try:
            inv = linalg.inverse([[self.g[i, j] for j in range(n)] for i in range(n)], self.ref_points)
        except linalg.SingularMatrixError as exc:
            raise SingularMetricError(str(exc)) from None
        return TensorField(self.chart, 2, 0, inv)

    def signature_at(self, point: dict | None = None) -> tuple[int, int]:
        """(number of negative, number of positive) eigenvalues at ``point``."""
        point = point or self.ref_points[0]
        ev = np.linalg.eigvalsh(self.g.evaluate(point))
        scale = max(1.0, float(np.max(np.abs(ev))))
        if np.any(np.abs(ev) <= 1e-9 * scale):
            raise SingularMetricError(f"metric is degenerate at {point}")
        return int(np.sum(ev < 0)), int(np.sum(ev > 0))

    @property
    def signature_tag(self) -> str:
        neg_count, _ = self.signature_at()
        return {0: "riemannian", 1: "lorentzian"}.get(neg_count, f"index-{neg_count}")

    def __call__(self, X: TensorField, Y: TensorField) -> Expr:
        return bilinear(self.g, X, Y)


class Connection:
    """Affine connection given by its coefficients ``Gamma[k, i, j]``."""

    def __init__(self, chart: Chart, gamma, torsion_free: bool | None = None):
        self.chart = chart
        self.gamma = TensorField(chart, 1, 2, gamma).comps
        n = chart.dim
        symmetric = all(
            (self.gamma[k, i, j] - self.gamma[k, j, i]).is_zero
            for k in range(n)
            for i in range(n)
            for j in range(i + 1, n)
        )
        if torsion_free and not symmetric:
            raise ValueError("connection flagged torsion-free but coefficients are not symmetric")
        self.torsion_free = symmetric if torsion_free is None else torsion_free

    def __getitem__(self, idx):
        return self.gamma[idx]

    def __eq__(self, other):
        return isinstance(other, Connection) and TensorField(self.chart, 1, 2, self.gamma) == TensorField(
            other.chart, 1, 2, other.gamma
        )

    @classmethod
    def zero(cls, chart: Chart) -> Connection:
        return cls(chart, np.full((chart.dim,) * 3, ZERO, dtype=object), torsion_free=True)

    def as_tensor(self) -> TensorField:
        return TensorField(self.chart, 1, 2, self.gamma)


def levi_civita(g: MetricField) -> Connection:
    """Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij)."""
    c = g.chart.coords
    n = g.dim
    ginv = g.inverse
    dg = [[[diff_expr(g[i, j], c[l]) for l in range(n)] for j in range(n)] for i in range(n)]  # dg[i][j][l] = d_l g_ij
    half = as_expr("1/2")
    gamma = np.empty((n, n, n), dtype=object)
    for i in range(n):
        for j in range(i, n):
            lowered = [add(dg[j][l][i], dg[i][l][j], neg(dg[i][j][l])) for l in range(n)]
            for k in range(n):
                v = mul(half, add(*(mul(ginv[k, l], lowered[l]) for l in range(n))))
                gamma[k, i, j] = v
                gamma[k, j, i] = v
    return Connection(g.chart, gamma, torsion_free=True)


def full_covariant_derivative(conn: Connection, T: TensorField) -> TensorField:
    """All components of nabla T, with the derivative index appended last."""
    _need(T, (1, 0), (0, 1), (0, 2), (1, 1))
    chart = _same(T, conn.as_tensor())
    c = chart.coords
    n = chart.dim
    G = conn.gamma
    r, s = T.signature
    out = np.empty((n,) * (r + s + 1), dtype=object)
    for idx in product(range(n), repeat=r + s):
        for m in range(n):
            terms = [diff_expr(T[idx], c[m])]
            for slot in range(r + s):
                a = idx[slot]
                for k in range(n):
                    moved = idx[:slot] + (k,) + idx[slot + 1 :]
                    if slot < r:
                        terms.append(mul(G[a, m, k], T[moved]))
                    else:
                        terms.append(neg(mul(G[k, m, a], T[moved])))
            out[idx + (m,)] = add(*terms)
    return TensorField(chart, r, s + 1, out)


def covariant_derivative(conn: Connection, T: TensorField, X: TensorField) -> TensorField:
    """nabla_X T for T of type (1,0), (0,1), (0,2) or (1,1)."""
    _need(X, (1, 0))
    _same(T, X)
    full = full_covariant_derivative(conn, T)
    n = T.dim
    rank = T.r + T.s
    out = np.empty((n,) * rank, dtype=object)
    for idx in product(range(n), repeat=rank):
        out[idx] = add(*(mul(X[m], full[idx + (m,)]) for m in range(n)))
    return TensorField(T.chart, T.r, T.s, out)


def numerical_rank(T: TensorField, point: dict, tol: float = 1e-9) -> int:
    """Rank of the evaluated component matrix, relative singular-value cutoff."""
    _need(T, (1, 1))
    sv = np.linalg.svd(T.evaluate(point), compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def pullback_expr(e: Expr, mapping: dict) -> Expr:
    return subs(e, mapping)
