"""Pipelines behind the CLI verbs: structure checks, hypersurface analysis, the full registry run."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

from ..checks import Entry, StructureReport, check, compare
from ..contact import (
    check_normal,
    verify_ac,
    verify_affinely_cosymplectic,
    verify_lap,
    verify_lp_contact,
    verify_lp_sasakian,
    xi_automorphism_check,
)
from ..geometry import TensorField
from ..hypersurface import (
    DegenerateMetricError,
    PreconditionError,
    RankDeficiencyError,
    TransversalityError,
    _combine,
    _field_along,
    _phi_images,
    almost_product_metric,
    check_involution,
    classify_invariance,
    induced_data,
    induced_invariant_structure,
    metric_normal,
    phi_decompose,
    proportional,
    resolve_transversal,
    tangent_frame,
    verify_affine_case,
    verify_invariant_lps,
    verify_noninvariant_lps,
)
from ..symexpr import ZERO, add, mul, parse_expr
from .config import ConfigError, HypersurfaceSpec, Problem, load_config
from .registry import EXAMPLE_IDS, STRUCTURES, example_hypersurface, is_registry_id, load_example
from .report import Report

_INPUT_ERRORS = (RankDeficiencyError, TransversalityError, DegenerateMetricError, PreconditionError)


def load_problem(ident: str, run_overrides: dict | None = None) -> Problem:
    """Registry id ('6.4', '6.4/M1') or path to a JSON configuration."""
    if is_registry_id(ident):
        return load_example(ident, run_overrides)
    if "/" not in ident and not ident.endswith(".json") and ident.replace(".", "").isdigit():
        raise ConfigError(f"unknown example id {ident!r}; known: {', '.join(EXAMPLE_IDS)}")
    return load_config(ident, run_overrides)


def _strs(T: TensorField) -> list:
    return [str(c) for c in T.comps.reshape(-1)] if T.r + T.s == 1 else [[str(T[i, j]) for j in range(T.dim)] for i in range(T.dim)]


def _expectation(rep: StructureReport, imm, name: str, computed, expected_strs, cfg) -> Entry:
    exp = _parse_nested(expected_strs)
    c = compare(computed, exp, imm.params.coords, imm.params.domain, cfg)
    detail = {} if c.passed else {"expected": expected_strs, "component": list(c.index) if c.index else None}
    return rep.add(Entry(f"expected {name}", c.passed, c.max_residual, c.witness, role="expectation", detail=detail))


def _parse_nested(x):
    if isinstance(x, list):
        return [_parse_nested(v) for v in x]
    return parse_expr(x)


# ---------------------------------------------------------------------------
# structure


def check_structure(problem: Problem) -> Report:
    run = problem.run
    cfg = run.check
    report = Report("check-structure", problem.id, run)
    s, lap, conn = problem.structure, problem.lap, problem.connection
    expected = problem.expected_structure
    report.data["dimension"] = s.chart.dim
    report.data["coords"] = list(s.chart.coords)
    if lap is not None:
        report.data["signature"] = lap.metric.signature_tag
    results: dict[str, bool] = {}

    def suite(name, fn, counted):
        if not (run.wants(name) or name in expected):
            return
        rep = fn()
        if expected.get(name) is False:
            counted = False
        report.attach(rep, counted or run.explicit(name))
        results[name] = rep.ok

    suite("ac", lambda: _titled(verify_ac(s, cfg), "ac"), True)
    if lap is not None:
        suite("lap", lambda: _titled(verify_lap(lap, cfg), "lap"), True)
        suite("lp_contact", lambda: _titled(verify_lp_contact(lap, cfg), "lp_contact"), False)
        suite("lp_sasakian", lambda: _titled(verify_lp_sasakian(lap, cfg), "lp_sasakian"), False)
    suite("normal", lambda: _titled(check_normal(s, cfg), "normal"), False)
    if conn is not None:
        suite("affinely_cosymplectic",
              lambda: _titled(verify_affinely_cosymplectic(s, conn, cfg), "affinely_cosymplectic"), False)
    suite("automorphism", lambda: _titled(xi_automorphism_check(s, cfg), "automorphism"), False)
    if expected:
        rep = report.section("expected structure")
        for name in expected:
            got = results.get(name)
            if got is None:
                rep.add(Entry(f"{name} = {str(expected[name]).lower()}", False, role="expectation",
                              note="suite not applicable to this configuration"))
            else:
                rep.add(Entry(f"{name} = {str(expected[name]).lower()}", got == expected[name], role="expectation",
                              detail={} if got == expected[name] else {"computed": got}))
    report.data["suites"] = results
    return report


def _titled(rep: StructureReport, title: str) -> StructureReport:
    rep.title = title
    return rep


# ---------------------------------------------------------------------------
# hypersurface analysis


def _pick(problem: Problem, name: str | None) -> HypersurfaceSpec:
    if name is not None:
        try:
            return problem.hypersurface(name)
        except KeyError:
            raise ConfigError(f"no hypersurface named {name!r}; have {[h.name for h in problem.hypersurfaces]}") from None
    if len(problem.hypersurfaces) == 1:
        return problem.hypersurfaces[0]
    if not problem.hypersurfaces:
        raise ConfigError("configuration defines no hypersurfaces")
    raise ConfigError(f"several hypersurfaces; choose one of {[h.name for h in problem.hypersurfaces]}")


def _transversal_choice(raw):
    if isinstance(raw, list):
        return [parse_expr(c) for c in raw]
    return raw


def analyze(problem: Problem, name: str | None = None, transversal=None) -> Report:
    """Classification, decomposition, Gauss-Weingarten data and every applicable theorem battery."""
    spec = _pick(problem, name)
    run = problem.run
    cfg = run.check
    imm = spec.immersion
    ac, lap, conn = problem.structure, problem.lap, problem.connection
    s = lap if lap is not None else ac
    ident = problem.id if problem.id.endswith("/" + spec.name) or len(problem.hypersurfaces) == 1 else f"{problem.id}/{spec.name}"
    report = Report("analyze", ident, run)
    report.data["hypersurface"] = spec.name
    report.data["map"] = [str(e) for e in imm.map]

    frame_rep = report.section("frame")
    try:
        tangent_frame(imm, cfg)
    except RankDeficiencyError as exc:
        frame_rep.add(Entry("precondition: immersion has rank n-1", False, role="precondition", note=str(exc)))
        return report
    frame_rep.add(Entry("precondition: immersion has rank n-1", True, role="precondition"))
    report.data["frame"] = [[str(c) for c in u] for u in imm.frame]

    cls = classify_invariance(imm, s, cfg)
    report.data["classification"] = cls.to_json()
    if run.wants("classification"):
        rep = report.section("classification")
        rep.add(Entry(f"xi {cls.xi_position}", None, role="info"))
        rep.add(Entry(f"phi(TM) in TM: {cls.phi_tangent}", None, role="info"))
        if "classification" in spec.expected:
            want = spec.expected["classification"]
            rep.add(Entry(f"classification = {want}", cls.tag == want, role="expectation",
                          detail={} if cls.tag == want else {"computed": cls.tag}))

    choice = _transversal_choice(transversal if transversal is not None else spec.transversal)
    use_expectations = transversal is None or transversal == spec.transversal
    T = data = None
    dec_rep = report.section("decomposition") if run.wants("decomposition") else StructureReport("decomposition")
    try:
        T = resolve_transversal(imm, s, choice, cfg)
    except _INPUT_ERRORS + (ValueError,) as exc:
        dec_rep.add(Entry("precondition: transversal field", False, role="precondition", note=str(exc)))
    if T is not None:
        report.data["transversal"] = T.to_json()
        if conn is not None:
            data = induced_data(imm, s, conn, T, cfg)
            J, alpha = data.J, data.alpha
            dec_rep.add(data.report.entries[0])
        else:
            dec = phi_decompose(imm, s, T, cfg)
            J, alpha = dec.J, dec.alpha
            dec_rep.add(dec.residual)
        report.data["J"] = _strs(J)
        report.data["alpha"] = _strs(alpha)
        for key, val in (("J", J), ("alpha", alpha)):
            if key in spec.expected:
                if use_expectations:
                    _expectation(dec_rep, imm, key, val.comps, spec.expected[key], cfg)
                else:
                    dec_rep.add(Entry(f"expected {key}", None, role="info", note="transversal overridden"))

    if run.wants("gauss_weingarten"):
        rep = report.section("gauss_weingarten")
        if data is None:
            rep.add(Entry("Gauss-Weingarten data", None, role="info",
                          note="no connection" if conn is None else "no transversal"))
        else:
            for e in data.report.entries[1:]:
                rep.add(e)
            report.data["h"] = _strs(data.h)
            report.data["A"] = _strs(data.A)
            report.data["w"] = _strs(data.w)

    N = None
    if lap is not None:
        try:
            N = metric_normal(imm, lap.metric, cfg)
            report.data["normal"] = [str(c) for c in N]
        except DegenerateMetricError as exc:
            report.data["normal"] = None
            if run.wants("normal_field"):
                report.section("normal_field").add(Entry("metric normal", None, role="info", note=str(exc)))
        if N is not None and run.wants("normal_field"):
            rep = report.section("normal_field")
            gN = [_g_pair(imm, lap.metric, N, u) for u in imm.frame]
            check(rep, "g(N,u_a)=0", gN, [ZERO] * len(gN), imm.params.coords, imm.params.domain, cfg)
            if "normal" in spec.expected:
                exp = [parse_expr(c) for c in spec.expected["normal"]]
                ok = proportional(N, exp, imm, cfg)
                rep.add(Entry("expected normal (up to scale)", ok, role="expectation",
                              detail={} if ok else {"computed": [str(c) for c in N], "expected": spec.expected["normal"]}))
    elif "normal" in spec.expected:
        raise ConfigError("metric required for the expected normal")

    if lap is not None and cls.xi_position == "transversal" and run.wants("almost_product"):
        # defined through the decomposition along xi, whatever transversal was chosen above
        T_xi = T if T is not None and T.tag == "xi" else resolve_transversal(imm, s, "xi", cfg)
        dec = phi_decompose(imm, s, T_xi, cfg)
        ap = almost_product_metric(imm, lap, dec, cfg)
        rep = report.attach(_titled(ap.report, "almost_product"))
        if data is not None and data.transversal.tag == "xi":
            rep.add(check_involution(data, cfg))
        report.data["G"] = _strs(ap.G)

    lps = lap is not None and verify_lp_sasakian(lap, cfg).ok
    if run.wants("noninvariant_lps") and lap is not None:
        applicable = lps and cls.tag == "noninvariant-transversal-xi"
        if applicable or run.explicit("noninvariant_lps"):
            reuse = data if data is not None and data.transversal.tag == "xi" else None
            report.attach(_titled(verify_noninvariant_lps(imm, lap, cfg, reuse), "noninvariant_lps"))

    if run.wants("invariant"):
        if cls.tag == "invariant-tangent-xi":
            inv = induced_invariant_structure(imm, s, cfg)
            rep = report.attach(_titled(inv.report, "invariant"))
            report.data["psi"] = _strs(inv.psi)
            report.data["xi_star"] = _strs(inv.xi_star)
            report.data["eta_star"] = _strs(inv.eta_star)
            for key, val in (("psi", inv.psi), ("xi_star", inv.xi_star), ("eta_star", inv.eta_star)):
                if key in spec.expected:
                    _expectation(rep, imm, key, val.comps, spec.expected[key], cfg)
        elif run.explicit("invariant"):
            rep = report.section("invariant")
            rep.add(Entry("precondition: invariant with xi tangent", False, role="precondition",
                          note=f"classified {cls.tag}; invariant-structure extraction requires xi tangent"))

    if run.wants("invariant_lps") and lap is not None:
        if (lps and cls.tag == "invariant-tangent-xi") or run.explicit("invariant_lps"):
            report.attach(_titled(verify_invariant_lps(imm, lap, cfg), "invariant_lps"))

    if run.wants("affine") and conn is not None:
        try:
            rep = verify_affine_case(imm, ac, conn, cfg, choice)
        except _INPUT_ERRORS as exc:
            rep = StructureReport("affine")
            rep.add(Entry("affine case", None, role="info", note=str(exc)))
        report.attach(_titled(rep, "affine"), counted=True)

    if spec.discrepancies and run.wants("discrepancies"):
        rep = report.section("discrepancies")
        for d in spec.discrepancies:
            rep.add(_discrepancy(report, imm, s, N, d, cfg, restricted=run.suites is not None))
    return report


def _g_pair(imm, g, V, W):
    G = imm.pull_array(g.g.comps)
    n = imm.n
    return add(*(mul(G[i, j], V[i], W[j]) for i in range(n) for j in range(n)))


def _along(imm, s, N, along):
    if along == "xi":
        return _field_along(imm, s.xi if hasattr(s, "xi") else s.ac.xi)
    if along == "normal":
        if N is None:
            raise ConfigError("discrepancy 'along: normal' needs a metric normal")
        return list(N)
    return [imm.pull(parse_expr(c)) for c in along]


def _discrepancy(report: Report, imm, s, N, d: dict, cfg, restricted: bool = False) -> Entry:
    kind = d["kind"]
    expected = d["expected_discrepancy"]
    detail: dict = {"kind": kind, "expected_discrepancy": expected}
    if kind == "normal":
        printed = [parse_expr(c) for c in d["printed"]]
        if N is None:
            return Entry("normal: printed vs computed", False, role="discrepancy", note="no metric normal available",
                         detail=detail)
        detected = not proportional(printed, N, imm, cfg)
        detail.update(printed=d["printed"], computed=[str(c) for c in N])
        name = "normal: printed vs computed"
    elif kind in ("xi_decomposition", "phi_image"):
        coeffs = [parse_expr(c) for c in d["frame_coeffs"]] + [parse_expr(d["transversal_coeff"])]
        V = _combine(imm, coeffs, _along(imm, s, N, d["along"]))
        if kind == "xi_decomposition":
            target = _field_along(imm, s.xi if hasattr(s, "xi") else s.ac.xi)
            name = "xi decomposition: printed vs computed"
        else:
            k = d["frame_index"] - 1
            target = _phi_images(imm, (s.phi if hasattr(s, "phi") else s.ac.phi))[k]
            name = f"phi(u{k + 1}): printed vs computed"
        c = compare(V, target, imm.params.coords, imm.params.domain, cfg)
        detected = not c.passed
        detail.update(printed=[str(v) for v in V], computed=[str(v) for v in target])
        if detected:
            detail["max_residual"] = float(f"{c.max_residual:.6g}")
            detail["witness"] = c.witness
    else:
        label = d["theorem"]
        name = f"entry {label}: printed form"
        try:
            e = report.by_theorem(label)
        except KeyError:
            if restricted:
                return Entry(name, None, role="info", note="entry not produced: suite not selected", detail=detail)
            return Entry(name, False, role="discrepancy", note="entry not produced by this run", detail=detail)
        detected = e.passed is False
        detail.update(entry=e.name, entry_pass=e.passed)
    detail["detected"] = detected
    note = d.get("note", "")
    return Entry(name, detected == expected, role="discrepancy", note=note, detail=detail)


# ---------------------------------------------------------------------------
# whole registry


def _example_job(ident: str, overrides: dict | None) -> Report:
    return analyze(load_example(ident, overrides), example_hypersurface(ident))


def _structure_job(sid: str, overrides: dict | None) -> Report:
    return check_structure(load_example(sid, overrides))


def verify_theorems(ids=None, overrides: dict | None = None, jobs: int = 1) -> Report:
    """Every registry structure and example; sections keep registry order whatever the completion order."""
    structure_ids = sorted({i.split("/")[0] for i in (ids or EXAMPLE_IDS)}, key=list(STRUCTURES).index)
    example_ids = list(ids or EXAMPLE_IDS)
    tasks = [(_structure_job, sid) for sid in structure_ids] + [(_example_job, eid) for eid in example_ids]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(fn, ident, overrides) for fn, ident in tasks]
            results = [f.result() for f in futures]
    else:
        results = [fn(ident, overrides) for fn, ident in tasks]
    first = results[0]
    out = Report("verify-theorems", "registry", first.run)
    summary = {}
    for (fn, ident), rep in zip(tasks, results):
        key = f"{'structure' if fn is _structure_job else 'hypersurface'} {ident}"
        summary[key] = {"ok": rep.ok, **rep.summary()}
        if "classification" in rep.data:
            summary[key]["classification"] = rep.data["classification"]["tag"]
        for sec in rep.sections:
            sec.report.title = f"{ident}: {sec.title}"
            out.sections.append(sec)
    out.data["runs"] = summary
    return out
