from __future__ import annotations

import numpy as np
import pytest

from helpers import same
from paracontact.checks import CheckConfig
from paracontact.geometry import Chart
from paracontact.harness.registry import EXAMPLE_IDS, example_hypersurface, load_example
from paracontact.hypersurface import (
    DegenerateMetricError,
    Immersion,
    PreconditionError,
    RankDeficiencyError,
    TransversalityError,
    almost_product_metric,
    check_involution,
    classify_invariance,
    find_invariant_hypersurfaces,
    gauss_weingarten,
    induced_data,
    induced_invariant_structure,
    induced_metric,
    metric_normal,
    phi_decompose,
    resolve_transversal,
    tangent_frame,
    verify_affine_case,
    verify_invariant_lps,
    verify_noninvariant_lps,
)
from paracontact.symexpr import DomainBox, parse_expr as P

CLASSES = {
    "6.1/M1": "noninvariant-transversal-xi",
    "6.1/M2": "invariant-tangent-xi",
    "6.2": "invariant-transversal-xi",
    "6.3": "invariant-tangent-xi",
    "6.4/M1": "noninvariant-transversal-xi",
    "6.4/M2": "noninvariant-tangent-xi",
}


def _example(ident):
    p = load_example(ident)
    h = p.hypersurface(example_hypersurface(ident))
    return p, h.immersion, (p.lap or p.structure)


@pytest.mark.parametrize("ident", EXAMPLE_IDS)
def test_classification_matrix(ident):
    _, imm, s = _example(ident)
    assert classify_invariance(imm, s).tag == CLASSES[ident]


def test_decomposition_6_1_m1():
    _, imm, s = _example("6.1/M1")
    T = resolve_transversal(imm, s, "xi")
    dec = phi_decompose(imm, s, T)
    assert same(dec.J.comps, (-np.eye(4, dtype=int)).tolist(), imm.params.coords)
    assert same(dec.alpha.comps, [0, 0, 1, 0], imm.params.coords)
    assert dec.residual.passed and dec.residual.max_residual == 0.0


def test_decomposition_6_4_m1_and_normal():
    _, imm, s = _example("6.4/M1")
    dec = phi_decompose(imm, s, resolve_transversal(imm, s, "xi"))
    assert same(dec.J.comps, [[1, 0], [0, -1]], imm.params.coords)
    assert same(dec.alpha.comps, [1, -1], imm.params.coords)
    assert dec.residual.max_residual == 0.0
    N = metric_normal(imm, s.metric)
    assert same(N, [P("exp(2*(x+y))"), P("exp(-2*(x+y))"), P("1")], imm.params.coords)


def test_normal_6_4_m2_is_proportional_to_printed():
    _, imm, s = _example("6.4/M2")
    N = metric_normal(imm, s.metric)
    printed = [P("exp(2*z)"), P("-exp(-2*z)/(1+y^2)"), P("0")]
    minors = [N[i] * printed[j] - N[j] * printed[i] for i in range(3) for j in range(i + 1, 3)]
    assert same(minors, [0, 0, 0], imm.params.coords)


def test_reparametrization_invariance():
    _, imm, s = _example("6.4/M1")
    new = imm.reparametrize(Chart(("u", "v")), {"x": P("u + v"), "y": P("u - v")})
    assert classify_invariance(new, s).tag == "noninvariant-transversal-xi"
    data = induced_data(new, s, s.connection, "xi")
    # J d_u = d_v and alpha = (0, 2) in the new frame
    assert same(data.J.comps, [[0, 1], [1, 0]], new.params.coords)
    assert same(data.alpha.comps, [0, 2], new.params.coords)
    rep = verify_noninvariant_lps(new, s, data=data)
    assert rep.ok
    assert rep.by_theorem("eq5.9").passed is False


def test_gauss_weingarten_symmetry_and_involution():
    _, imm, s = _example("6.4/M1")
    data = induced_data(imm, s, s.connection, "xi")
    assert data.report.ok
    assert same(data.h.comps, data.h.comps.T, imm.params.coords)
    assert check_involution(data).passed


def test_flat_plane_is_totally_geodesic():
    p = load_example("6.3")
    imm = Immersion(Chart(("x", "y")), p.chart, (P("x"), P("y"), P("x/2 + y/3")))
    T = resolve_transversal(imm, p.lap, "normal")
    gw = gauss_weingarten(imm, p.connection, T)
    assert same(gw.h.comps, [[0, 0], [0, 0]], ("x", "y"))
    assert same(gw.A.comps, [[0, 0], [0, 0]], ("x", "y"))
    assert same(gw.w.comps, [0, 0], ("x", "y"))


@pytest.mark.parametrize("seed", range(50))
def test_random_graphs_of_6_1_have_involutive_J(seed):
    rng = np.random.default_rng(seed)
    p = load_example("6.1")
    terms = ["x", "y", "z", "t", "x*y", "z^2", "sin(t)", "exp(x)"]
    picks = rng.choice(len(terms), size=3, replace=False)
    f = " + ".join(f"({int(rng.integers(-3, 4)) or 1})*{terms[i]}" for i in picks)
    imm = Immersion(Chart(("x", "y", "z", "t")), p.chart, (P("x"), P("y"), P("z"), P("t"), P(f)))
    cfg = CheckConfig(seed=seed, points=8)
    data = induced_data(imm, p.structure, p.connection, "xi", cfg)
    J = data.J
    JJ = [[sum((J[i, k] * J[k, j] for k in range(4)), P("0")) for j in range(4)] for i in range(4)]
    assert same(JJ, np.eye(4, dtype=int).tolist(), imm.params.coords, cfg=cfg)
    assert check_involution(data, cfg).passed


def test_almost_product_metric_values():
    _, imm, s = _example("6.4/M1")
    dec = phi_decompose(imm, s, resolve_transversal(imm, s, "xi"))
    ap = almost_product_metric(imm, s, dec)
    assert same(ap.G[0, 0], P("exp(-2*(x+y))"), imm.params.coords)
    assert ap.report.by_theorem("lemma5.4").passed
    assert ap.report.by_theorem("eq3.3").passed
    assert ap.report.by_theorem("prop5.1").passed
    assert ap.report.by_theorem("prop5.1-printed").passed is False


def test_almost_product_metric_degenerates_when_alpha_vanishes():
    _, imm, s = _example("6.2")
    dec = phi_decompose(imm, s, resolve_transversal(imm, s, "xi"))
    ap = almost_product_metric(imm, s, dec)
    assert ap.report.entry("alpha = 0").role == "info"
    assert ap.report.ok
    assert same(ap.G.comps, induced_metric(imm, s.metric).comps, imm.params.coords)


def test_noninvariant_lps_battery():
    _, imm, s = _example("6.4/M1")
    rep = verify_noninvariant_lps(imm, s)
    for label in ("3.1", "5.5a", "5.5b", "5.6a", "5.6b", "cor5.7", "3.2", "eq3.9"):
        assert rep.by_theorem(label).passed, label
    e = rep.by_theorem("eq5.9")
    assert e.passed is False and e.role == "property"
    assert e.detail["witness_pair"]["X"] == "u1" and e.detail["witness_pair"]["Y"] == "u2"
    assert e.detail["witness_pair"]["alpha(Y)JX"] == ["-1", "0"]
    assert e.detail["witness_pair"]["alpha(JY)X"] == ["1", "0"]
    assert rep.by_theorem("5.6a-printed").passed is False


def test_noninvariant_lps_on_invariant_hypersurface_is_degenerate():
    p = load_example("6.4")
    imm = Immersion(Chart(("x", "y")), p.chart, (P("x"), P("y"), P("1/3")))
    assert classify_invariance(imm, p.lap).tag == "invariant-transversal-xi"
    rep = verify_noninvariant_lps(imm, p.lap)
    e = rep.entry("precondition: alpha != 0")
    assert e.passed is False and "vacuous" in e.note


def test_invariant_structure_6_3_and_6_1_m2():
    _, imm, s = _example("6.3")
    inv = induced_invariant_structure(imm, s)
    assert inv.report.ok
    assert same(inv.psi.comps, [[-1, 0], [0, 0]], imm.params.coords, imm.params.domain)
    assert same(inv.xi_star.comps, [0, -1], imm.params.coords, imm.params.domain)
    assert inv.report.by_theorem("5.9").passed
    _, imm, s = _example("6.1/M2")
    inv = induced_invariant_structure(imm, s)
    assert inv.report.ok and inv.report.by_theorem("5.8").passed
    assert same(inv.eta_star.comps, [-1, -1, 0, 1], imm.params.coords)


def test_invariant_structure_requires_tangent_xi():
    _, imm, s = _example("6.2")
    with pytest.raises(PreconditionError, match="xi transversal"):
        induced_invariant_structure(imm, s)


def test_invariant_hypersurface_of_lp_sasakian_is_lp_sasakian():
    p = load_example("6.4")
    found = find_invariant_hypersurfaces(p.lap)
    assert found
    rep = verify_invariant_lps(found[0], p.lap)
    assert rep.ok
    assert rep.entry("nabla_X xi*=psi X").passed


def test_affine_cases_on_6_1():
    _, imm, s = _example("6.1/M1")
    p = load_example("6.1")
    rep = verify_affine_case(imm, p.structure, p.connection)
    assert rep.ok
    assert {e.theorem for e in rep.entries if e.theorem} == {"prop4.1"}
    _, imm2, _ = _example("6.1/M2")
    rep = verify_affine_case(imm2, p.structure, p.connection)
    assert rep.entry("h=0").passed and rep.entry("h=0").theorem == "cor4.2"


def test_rank_deficiency_and_transversality_errors():
    p = load_example("6.3")
    flat = Immersion(Chart(("x", "y")), p.chart, (P("x"), P("x"), P("0")))
    with pytest.raises(RankDeficiencyError):
        tangent_frame(flat)
    _, imm, s = _example("6.3")
    with pytest.raises(TransversalityError):
        resolve_transversal(imm, s, "xi")


def test_null_hypersurface_has_no_metric_normal():
    p = load_example("6.3")
    null = Immersion(Chart(("x", "y")), p.chart, (P("x"), P("y"), P("x")))
    with pytest.raises(DegenerateMetricError):
        metric_normal(null, p.metric)


def test_domain_respected():
    _, imm, _ = _example("6.3")
    assert imm.params.domain == DomainBox({"y": (-0.9, 0.9)})
