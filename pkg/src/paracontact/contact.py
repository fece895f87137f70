"""Almost contact type structures and their verifiers.

An :class:`AcStructure` is a tensor triple (phi, xi, eta) with signs
(e1, e2) and one characteristic field.  A :class:`LapStructure` adds a
Lorentzian metric and forces e1 = e2 = 1.  Verifiers never raise on a
failed identity; they return a :class:`StructureReport` with one entry per
identity and restate violated preconditions in the report.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .checks import CheckConfig, Entry, StructureReport, check
from .geometry import (
    Chart,
    Connection,
    MetricField,
    SingularMetricError,
    TensorField,
    apply11,
    bilinear,
    compose11,
    coordinate_field,
    exterior_derivative_1form,
    form_after11,
    full_covariant_derivative,
    identity11,
    levi_civita,
    lie_bracket,
    lie_derivative,
    numerical_rank,
    outer_form_vector,
    pair,
    zero_tensor,
)
from .symexpr import ONE, ZERO, DomainError, add, as_expr, mul, neg


class DimensionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class AcStructure:
    chart: Chart
    phi: TensorField
    xi: TensorField
    eta: TensorField
    e1: int = 1
    e2: int = 1

    def __post_init__(self):
        n = self.chart.dim
        for name, t, sig in (("phi", self.phi, (1, 1)), ("xi", self.xi, (1, 0)), ("eta", self.eta, (0, 1))):
            if t.signature != sig:
                raise DimensionError(f"{name} must be a {sig} tensor, got {t.signature}")
            if t.dim != n or t.chart.coords != self.chart.coords:
                raise DimensionError(f"{name} lives on {t.chart.coords}, expected {self.chart.coords}")
        if self.e1 not in (1, -1) or self.e2 not in (1, -1):
            raise ValueError("e1 and e2 must be +1 or -1")

    def __eq__(self, other):
        return (
            isinstance(other, AcStructure)
            and self.chart == other.chart
            and (self.phi, self.xi, self.eta, self.e1, self.e2) == (other.phi, other.xi, other.eta, other.e1, other.e2)
        )

    def __hash__(self):
        return hash((self.chart.coords, self.phi, self.xi, self.eta))

    @property
    def dim(self) -> int:
        return self.chart.dim


@dataclass(frozen=True, eq=False)
class LapStructure:
    ac: AcStructure
    metric: MetricField

    def __post_init__(self):
        if (self.ac.e1, self.ac.e2) != (1, 1):
            raise ValueError("a Lorentzian almost paracontact structure needs e1 = e2 = 1")
        if self.metric.chart.coords != self.ac.chart.coords:
            raise DimensionError("metric and structure live on different charts")

    def __eq__(self, other):
        return isinstance(other, LapStructure) and self.ac == other.ac and self.metric == other.metric

    def __hash__(self):
        return hash((self.ac, self.metric))

    @property
    def chart(self) -> Chart:
        return self.ac.chart

    @property
    def phi(self):
        return self.ac.phi

    @property
    def xi(self):
        return self.ac.xi

    @property
    def eta(self):
        return self.ac.eta

    @cached_property
    def connection(self) -> Connection:
        return levi_civita(self.metric)

    @cached_property
    def fundamental_form(self) -> TensorField:
        """Phi(X, Y) = g(X, phi Y)."""
        g, phi = self.metric.g, self.phi
        n = self.chart.dim
        return TensorField(
            self.chart, 0, 2, [[add(*(mul(g[i, k], phi[k, j]) for k in range(n))) for j in range(n)] for i in range(n)]
        )


def _labels(chart: Chart):
    c = chart.coords

    def describe(idx):
        return ",".join(c[i] for i in idx)

    return describe


def _check(report, s, name, lhs, rhs, cfg, theorem=None, role="check", note=""):
    return check(
        report, name, lhs, rhs, s.chart.coords, s.chart.domain, cfg, theorem=theorem, role=role, note=note,
        describe=_labels(s.chart),
    )


def verify_ac(s: AcStructure, cfg: CheckConfig = CheckConfig()) -> StructureReport:
    """Check the defining identities of an (e1, e2, 1) ac structure."""
    rep = StructureReport("ac structure")
    n = s.dim
    zero_v = zero_tensor(s.chart, 1, 0)
    _check(rep, s, "phi(xi)=0", apply11(s.phi, s.xi), zero_v, cfg, theorem="eq2.1")
    phi2 = compose11(s.phi, s.phi)
    target = identity11(s.chart).scale(s.e1) + outer_form_vector(s.eta, s.xi).scale(s.e2)
    _check(rep, s, "phi^2=e1*I+e2*eta(x)xi", phi2, target, cfg, theorem="eq2.2")
    _check(rep, s, "eta(phi)=0", form_after11(s.eta, s.phi), zero_tensor(s.chart, 0, 1), cfg, theorem="eq2.3")
    _check(rep, s, "eta(xi)=-e1*e2", pair(s.eta, s.xi), as_expr(-s.e1 * s.e2), cfg, theorem="eq2.4")
    rep.add(_rank_entry(s.phi, n - 1, cfg))
    return rep


def _rank_entry(phi: TensorField, expected: int, cfg: CheckConfig, name: str = "rank(phi)=n-1") -> Entry:
    try:
        points = phi.chart.points(phi.comps.flat, cfg.points, cfg.seed)
    except DomainError as exc:
        return Entry(name, False, None, {"error": str(exc)}, theorem="eq2.5")
    ranks = [numerical_rank(phi, p, cfg.tol) for p in points]
    bad = [(p, r) for p, r in zip(points, ranks) if r != expected]
    if bad:
        p, r = bad[0]
        return Entry(name, False, None, p, theorem="eq2.5", detail={"rank": r, "expected": expected})
    return Entry(name, True, None, None, theorem="eq2.5", detail={"rank": expected})


def _precondition(rep: StructureReport, name: str, sub: StructureReport) -> bool:
    failed = [e.name for e in sub.failures()]
    note = "" if not failed else "violated: " + ", ".join(failed)
    rep.add(Entry(f"precondition: {name}", not failed, role="precondition", note=note))
    return not failed


def verify_lap(s: LapStructure, cfg: CheckConfig = CheckConfig()) -> StructureReport:
    """Metric compatibility identities of a Lorentzian almost paracontact structure."""
    rep = StructureReport("Lorentzian almost paracontact")
    _precondition(rep, "ac structure", verify_ac(s.ac, cfg))
    n = s.chart.dim
    g = s.metric
    try:
        tag = g.signature_tag
        rep.add(Entry("metric is Lorentzian", tag == "lorentzian", note=f"signature: {tag}"))
    except SingularMetricError as exc:
        rep.add(Entry("metric is Lorentzian", False, note=str(exc)))
    E = [coordinate_field(s.chart, i) for i in range(n)]
    phiE = [apply11(s.phi, e) for e in E]
    _check(rep, s, "eta(X)=g(X,xi)", s.eta.comps, [g(e, s.xi) for e in E], cfg, theorem="eq2.6")
    lhs = [[g(phiE[i], phiE[j]) for j in range(n)] for i in range(n)]
    rhs = [[add(g[i, j], mul(s.eta[i], s.eta[j])) for j in range(n)] for i in range(n)]
    _check(rep, s, "g(phiX,phiY)=g(X,Y)+eta(X)eta(Y)", lhs, rhs, cfg, theorem="eq2.7")
    Phi = s.fundamental_form
    _check(rep, s, "Phi(X,Y)=Phi(Y,X)", Phi.comps, Phi.comps.T, cfg, theorem="eq2.8")
    _check(rep, s, "g(xi,xi)=-1", g(s.xi, s.xi), as_expr(-1), cfg)
    return rep


def verify_lp_contact(s: LapStructure, cfg: CheckConfig = CheckConfig()) -> StructureReport:
    """Phi(X,Y) = 1/2((nabla_X eta)Y + (nabla_Y eta)X)."""
    rep = StructureReport("Lorentzian paracontact")
    _precondition(rep, "Lorentzian almost paracontact", verify_lap(s, cfg))
    n = s.chart.dim
    try:
        Deta = full_covariant_derivative(s.connection, s.eta)  # Deta[j, i] = (nabla_i eta)_j
    except SingularMetricError as exc:
        rep.add(Entry("Phi=sym(nabla eta)", False, note=str(exc), theorem="eq2.10"))
        return rep
    half = as_expr("1/2")
    rhs = [[mul(half, add(Deta[j, i], Deta[i, j])) for j in range(n)] for i in range(n)]
    _check(rep, s, "Phi=sym(nabla eta)", s.fundamental_form.comps, rhs, cfg, theorem="eq2.10")
    return rep


def verify_lp_sasakian(s: LapStructure, cfg: CheckConfig = CheckConfig()) -> StructureReport:
    """(nabla_X phi)Y = eta(Y)X + g(X,Y)xi + 2 eta(X)eta(Y)xi, plus d eta = 0 and nabla xi = phi."""
    rep = StructureReport("Lorentzian para-Sasakian")
    _precondition(rep, "Lorentzian almost paracontact", verify_lap(s, cfg))
    n = s.chart.dim
    try:
        Dphi = full_covariant_derivative(s.connection, s.phi)  # Dphi[k, j, i] = ((nabla_i phi) d_j)^k
    except SingularMetricError as exc:
        rep.add(Entry("(nabla_X phi)Y", False, note=str(exc), theorem="eq2.11"))
        return rep
    eta, xi, g = s.eta, s.xi, s.metric
    lhs = np.empty((n, n, n), dtype=object)
    rhs = np.empty((n, n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                lhs[i, j, k] = Dphi[k, j, i]
                rhs[i, j, k] = add(
                    eta[j] if i == k else ZERO,
                    mul(g[i, j], xi[k]),
                    mul(as_expr(2), eta[i], eta[j], xi[k]),
                )
    _check(rep, s, "(nabla_X phi)Y=eta(Y)X+g(X,Y)xi+2eta(X)eta(Y)xi", lhs, rhs, cfg, theorem="eq2.11")
    _check(rep, s, "d eta=0", exterior_derivative_1form(eta), zero_tensor(s.chart, 0, 2), cfg)
    Dxi = full_covariant_derivative(s.connection, xi)  # Dxi[k, j] = (nabla_j xi)^k
    _check(rep, s, "nabla xi=phi", Dxi.comps, s.phi.comps, cfg)
    return rep


def nijenhuis_on(phi: TensorField, X: TensorField, Y: TensorField) -> TensorField:
    """[phi,phi](X,Y) = [phiX,phiY] - phi[phiX,Y] - phi[X,phiY] + phi^2[X,Y]."""
    pX, pY = apply11(phi, X), apply11(phi, Y)
    return (
        lie_bracket(pX, pY)
        - apply11(phi, lie_bracket(pX, Y))
        - apply11(phi, lie_bracket(X, pY))
        + apply11(compose11(phi, phi), lie_bracket(X, Y))
    )


def nijenhuis(phi: TensorField) -> TensorField:
    """Components [phi,phi][k, i, j] on the coordinate frame."""
    n = phi.dim
    E = [coordinate_field(phi.chart, i) for i in range(n)]
    out = np.empty((n, n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            if j < i:
                continue
            v = nijenhuis_on(phi, E[i], E[j])
            for k in range(n):
                out[k, i, j] = v[k]
                out[k, j, i] = neg(v[k])
    return TensorField(phi.chart, 1, 2, out)


def normality_tensor(s: AcStructure) -> TensorField:
    """S = [phi,phi] + d eta (x) xi."""
    N = nijenhuis(s.phi)
    d = exterior_derivative_1form(s.eta)
    n = s.dim
    out = np.empty((n, n, n), dtype=object)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                out[k, i, j] = add(N[k, i, j], mul(d[i, j], s.xi[k]))
    return TensorField(s.chart, 1, 2, out)


def normality_tensor_from_connection(s: AcStructure, conn: Connection) -> TensorField:
    """The same S written with a torsion-free connection:

    (nabla_{phiX} phi)Y - (nabla_{phiY} phi)X + phi(nabla_Y phi)X - phi(nabla_X phi)Y
    + ((nabla_X eta)Y - (nabla_Y eta)X) xi
    """
    n = s.dim
    phi, xi = s.phi, s.xi
    Dphi = full_covariant_derivative(conn, phi)  # Dphi[k, j, m] = ((nabla_m phi) d_j)^k
    Deta = full_covariant_derivative(conn, s.eta)  # Deta[j, m] = (nabla_m eta)_j

    def dphi(dirn, j):
        # ((nabla_V phi) d_j)^k for a direction vector V (list of comps)
        return [add(*(mul(dirn[m], Dphi[k, j, m]) for m in range(n))) for k in range(n)]

    def phi_of(v):
        return [add(*(mul(phi[k, l], v[l]) for l in range(n))) for k in range(n)]

    out = np.empty((n, n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            phiX = [phi[m, i] for m in range(n)]
            phiY = [phi[m, j] for m in range(n)]
            eX = [ONE if m == i else ZERO for m in range(n)]
            eY = [ONE if m == j else ZERO for m in range(n)]
            a = dphi(phiX, j)
            b = dphi(phiY, i)
            c = phi_of(dphi(eY, i))
            d = phi_of(dphi(eX, j))
            coef = add(Deta[j, i], neg(Deta[i, j]))
            for k in range(n):
                out[k, i, j] = add(a[k], neg(b[k]), c[k], neg(d[k]), mul(coef, xi[k]))
    return TensorField(s.chart, 1, 2, out)


def check_normal(s: AcStructure, cfg: CheckConfig = CheckConfig(), theorem: str = "eq2.13") -> StructureReport:
    rep = StructureReport("normality")
    S = normality_tensor(s)
    _check(rep, s, "[phi,phi]+d eta(x)xi=0", S, zero_tensor(s.chart, 1, 2), cfg, theorem=theorem)
    return rep


def is_normal(s: AcStructure, cfg: CheckConfig = CheckConfig()) -> bool:
    return check_normal(s, cfg).ok


def verify_affinely_cosymplectic(
    s: AcStructure, conn: Connection, cfg: CheckConfig = CheckConfig()
) -> StructureReport:
    """nabla phi = 0 and nabla eta = 0 for a symmetric connection, with consequences."""
    rep = StructureReport("affinely cosymplectic")
    rep.add(Entry("precondition: connection torsion-free", bool(conn.torsion_free), role="precondition"))
    n = s.dim
    Dphi = full_covariant_derivative(conn, s.phi)
    Deta = full_covariant_derivative(conn, s.eta)
    a = _check(rep, s, "nabla phi=0", Dphi, zero_tensor(s.chart, 1, 2), cfg, theorem="eq4.5")
    b = _check(rep, s, "nabla eta=0", Deta, zero_tensor(s.chart, 0, 2), cfg, theorem="eq4.5")
    if a.passed and b.passed:
        Dxi = full_covariant_derivative(conn, s.xi)
        _check(rep, s, "implied: nabla xi=0", Dxi, zero_tensor(s.chart, 1, 1), cfg)
        S = normality_tensor(s)
        _check(rep, s, "implied: normal", S, zero_tensor(s.chart, 1, 2), cfg)
    else:
        rep.add(Entry("implied: nabla xi=0, normal", None, role="info", note="hypothesis fails; consequences not asserted"))
    return rep


def xi_automorphism_check(s: AcStructure, cfg: CheckConfig = CheckConfig()) -> StructureReport:
    """Report whether L_xi phi = 0 and L_xi eta = 0."""
    rep = StructureReport("xi infinitesimal automorphism")
    _check(rep, s, "L_xi phi=0", lie_derivative(s.xi, s.phi), zero_tensor(s.chart, 1, 1), cfg, role="property")
    _check(rep, s, "L_xi eta=0", lie_derivative(s.xi, s.eta), zero_tensor(s.chart, 0, 1), cfg, role="property")
    return rep
