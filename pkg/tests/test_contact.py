from __future__ import annotations

import numpy as np
import pytest

from helpers import same
from paracontact.checks import CheckConfig
from paracontact.contact import (
    AcStructure,
    DimensionError,
    LapStructure,
    check_normal,
    nijenhuis,
    nijenhuis_on,
    normality_tensor,
    normality_tensor_from_connection,
    verify_ac,
    verify_affinely_cosymplectic,
    verify_lap,
    verify_lp_contact,
    verify_lp_sasakian,
    xi_automorphism_check,
)
from paracontact.geometry import (
    Chart,
    Connection,
    MetricField,
    TensorField,
    compose11,
    one_form,
    tensor11,
    vector_field,
)
from paracontact.harness.registry import load_example
from paracontact.symexpr import ZERO, as_expr, parse_expr as P

XYZ = Chart(("x", "y", "z"))
MONOMIALS = ["1", "x", "y", "z", "x*y", "y*z", "x^2", "z^2"]


def _poly(rng, terms=3) -> str:
    picks = rng.choice(len(MONOMIALS), size=terms, replace=False)
    return " + ".join(f"({int(rng.integers(-3, 4))})*{MONOMIALS[i]}" for i in picks)


def _conjugated(rng, e1: int):
    """A constant (1,1,1)-type structure conjugated by a random unimodular matrix."""
    while True:
        Pm = rng.integers(-2, 3, size=(3, 3))
        if round(abs(np.linalg.det(Pm))) == 1:
            break
    Pinv = np.rint(np.linalg.inv(Pm)).astype(int)
    if e1 == 1:
        phi0 = np.diag([1, -1, 0])
        xi0, eta0 = np.array([0, 0, -1]), np.array([0, 0, 1])
    else:
        phi0 = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0]])
        xi0, eta0 = np.array([0, 0, 1]), np.array([0, 0, 1])
    phi = Pm @ phi0 @ Pinv
    xi = Pm @ xi0
    eta = eta0 @ Pinv
    return AcStructure(
        XYZ,
        tensor11(XYZ, [[str(int(v)) for v in r] for r in phi]),
        vector_field(XYZ, [str(int(v)) for v in xi]),
        one_form(XYZ, [str(int(v)) for v in eta]),
        e1,
        1,
    )


@pytest.mark.parametrize("sid", ["6.1", "6.2", "6.3", "6.4"])
def test_registry_structures_are_ac(sid):
    p = load_example(sid)
    assert verify_ac(p.structure).ok


@pytest.mark.parametrize("sid", ["6.1", "6.2", "6.3", "6.4"])
def test_phi_cubed_is_e1_phi(sid):
    s = load_example(sid).structure
    phi3 = compose11(s.phi, compose11(s.phi, s.phi))
    assert same(phi3.comps, s.phi.scale(s.e1).comps, s.chart.coords)


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("e1", [1, -1])
def test_random_conjugated_structures(seed, e1):
    s = _conjugated(np.random.default_rng(seed), e1)
    assert verify_ac(s).ok
    phi3 = compose11(s.phi, compose11(s.phi, s.phi))
    assert same(phi3.comps, s.phi.scale(e1).comps, XYZ.coords)
    assert check_normal(s).ok  # constant coefficients


def test_broken_structure_fails_with_witness():
    s = load_example("6.4").structure
    bad = AcStructure(s.chart, s.phi, s.xi.scale(2), s.eta)
    rep = verify_ac(bad)
    assert not rep.ok
    failed = {e.theorem for e in rep.failures()}
    assert "eq2.4" in failed and "eq2.2" in failed


def test_dimension_mismatch():
    s = load_example("6.4").structure
    with pytest.raises(DimensionError):
        AcStructure(s.chart, s.phi, s.eta, s.eta)


def test_lap_and_lp_verdicts():
    p3, p4 = load_example("6.3"), load_example("6.4")
    assert verify_lap(p3.lap).ok and verify_lap(p4.lap).ok
    assert verify_lp_sasakian(p4.lap).ok and verify_lp_contact(p4.lap).ok
    r = verify_lp_sasakian(p3.lap)
    assert not r.ok and r.by_theorem("eq2.11").passed is False
    assert r.by_theorem("eq2.11").witness is not None


def test_lap_precondition_reported_not_thrown():
    s = load_example("6.4")
    g = MetricField(TensorField(s.chart, 0, 2, [["1", "1/2", "0"], ["1/2", "1", "0"], ["0", "0", "-1"]]))
    rep = verify_lap(LapStructure(s.structure, g))
    assert not rep.ok
    assert rep.by_theorem("eq2.8").passed is False
    assert rep.entry("precondition: ac structure").passed is True


@pytest.mark.parametrize("seed", range(8))
def test_normality_tensor_two_forms_agree(seed):
    rng = np.random.default_rng(100 + seed)
    n = 3
    phi = tensor11(XYZ, [[_poly(rng, 2) for _ in range(n)] for _ in range(n)])
    xi = vector_field(XYZ, [_poly(rng, 2) for _ in range(n)])
    eta = one_form(XYZ, [_poly(rng, 2) for _ in range(n)])
    gamma = np.empty((n, n, n), dtype=object)
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                gamma[k, i, j] = gamma[k, j, i] = P(_poly(rng, 2))
    conn = Connection(XYZ, gamma)
    assert conn.torsion_free
    s = AcStructure(XYZ, phi, xi, eta)
    cfg = CheckConfig(seed=seed)
    assert same(normality_tensor(s).comps, normality_tensor_from_connection(s, conn).comps, XYZ.coords, cfg=cfg)


def test_nijenhuis_components_match_vector_form():
    rng = np.random.default_rng(3)
    phi = tensor11(XYZ, [[_poly(rng, 2) for _ in range(3)] for _ in range(3)])
    X = vector_field(XYZ, ["y", "1", "x*z"])
    Y = vector_field(XYZ, ["z^2", "x", "0"])
    N = nijenhuis(phi)
    bil = [sum((N[k, i, j] * X[i] * Y[j] for i in range(3) for j in range(3)), ZERO) for k in range(3)]
    assert same(bil, nijenhuis_on(phi, X, Y).comps, XYZ.coords)
    assert same(N.comps, (-np.transpose(N.comps, (0, 2, 1))).tolist(), XYZ.coords)


def test_affinely_cosymplectic_and_automorphism():
    p = load_example("6.1")
    rep = verify_affinely_cosymplectic(p.structure, p.connection)
    assert rep.ok and rep.entry("implied: normal").passed
    assert xi_automorphism_check(p.structure).ok
    p4 = load_example("6.4")
    rep = verify_affinely_cosymplectic(p4.structure, p4.connection)
    assert rep.entry("nabla phi=0").passed is False
    assert rep.entry("implied: nabla xi=0, normal").role == "info"


def test_fundamental_form_symmetric_for_lap():
    lap = load_example("6.4").lap
    Phi = lap.fundamental_form
    assert same(Phi.comps, Phi.comps.T, lap.chart.coords)
    assert as_expr(0) == ZERO
