"""JSON configuration: schema, validation with line numbers, object construction.

A configuration describes one ambient structure and any number of
hypersurfaces of it.  ``phi`` is given row-major: ``phi[i][j]`` is the
``i``-th component of ``phi`` applied to the ``j``-th coordinate field.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import jsonschema

from ..checks import CheckConfig
from ..contact import AcStructure, DimensionError, LapStructure
from ..geometry import Chart, Connection, MetricField, TensorField, levi_civita
from ..hypersurface import Immersion
from ..symexpr import DomainBox, ExprError, ParseError, parse_expr

CONFIG_SCHEMA_ID = "paracontact.config/1"

STRUCTURE_SUITES = ("ac", "lap", "lp_contact", "lp_sasakian", "normal", "affinely_cosymplectic", "automorphism")
HYPERSURFACE_SUITES = (
    "classification",
    "decomposition",
    "gauss_weingarten",
    "normal_field",
    "almost_product",
    "noninvariant_lps",
    "invariant",
    "invariant_lps",
    "affine",
    "discrepancies",
)
METRIC_SUITES = ("lap", "lp_contact", "lp_sasakian", "normal_field", "almost_product", "noninvariant_lps", "invariant_lps")

_expr = {"type": "string", "minLength": 1}
_expr_list = {"type": "array", "items": _expr, "minItems": 1}
_matrix = {"type": "array", "items": _expr_list, "minItems": 1}
_domain = {
    "type": "object",
    "additionalProperties": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
}
_sign = {"enum": [1, -1]}
_along = {"oneOf": [{"enum": ["xi", "normal"]}, _expr_list]}

_discrepancy = {
    "type": "object",
    "required": ["kind", "expected_discrepancy"],
    "properties": {
        "kind": {"enum": ["normal", "xi_decomposition", "phi_image", "entry"]},
        "expected_discrepancy": {"type": "boolean"},
        "note": {"type": "string"},
        "printed": _expr_list,
        "frame_index": {"type": "integer", "minimum": 1},
        "frame_coeffs": _expr_list,
        "transversal_coeff": _expr,
        "along": _along,
        "theorem": {"type": "string"},
    },
    "additionalProperties": False,
}

_hypersurface = {
    "type": "object",
    "required": ["name", "params", "map"],
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "description": {"type": "string"},
        "params": {"type": "array", "items": {"type": "string", "minLength": 1}, "minItems": 1},
        "map": _expr_list,
        "domain": _domain,
        "transversal": {"oneOf": [{"enum": ["xi", "normal", "auto"]}, _expr_list]},
        "expected": {
            "type": "object",
            "properties": {
                "classification": {
                    "enum": [
                        "invariant-tangent-xi",
                        "invariant-transversal-xi",
                        "noninvariant-transversal-xi",
                        "noninvariant-tangent-xi",
                        "mixed",
                    ]
                },
                "J": _matrix,
                "alpha": _expr_list,
                "psi": _matrix,
                "xi_star": _expr_list,
                "eta_star": _expr_list,
                "normal": _expr_list,
            },
            "additionalProperties": False,
        },
        "discrepancies": {"type": "array", "items": _discrepancy},
    },
    "additionalProperties": False,
}

SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["coords", "phi", "xi", "eta"],
    "properties": {
        "schema": {"const": CONFIG_SCHEMA_ID},
        "id": {"type": "string"},
        "description": {"type": "string"},
        "coords": {"type": "array", "items": {"type": "string", "pattern": "^[A-Za-z_][A-Za-z0-9_]*$"}, "minItems": 2},
        "domain": _domain,
        "phi": _matrix,
        "xi": _expr_list,
        "eta": _expr_list,
        "e1": _sign,
        "e2": _sign,
        "metric": _matrix,
        "connection": {
            "oneOf": [
                {"enum": ["levi-civita", "zero"]},
                {
                    "type": "object",
                    "required": ["christoffel"],
                    "properties": {"christoffel": {"type": "array", "items": _matrix}},
                    "additionalProperties": False,
                },
            ]
        },
        "expected": {
            "type": "object",
            "properties": {
                "structure": {
                    "type": "object",
                    "propertyNames": {"enum": list(STRUCTURE_SUITES)},
                    "additionalProperties": {"type": "boolean"},
                }
            },
            "additionalProperties": False,
        },
        "hypersurfaces": {"type": "array", "items": _hypersurface},
        "run": {
            "type": "object",
            "properties": {
                "seed": {"type": "integer"},
                "points": {"type": "integer", "minimum": 1},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "suites": {
                    "type": "array",
                    "items": {"enum": list(STRUCTURE_SUITES + HYPERSURFACE_SUITES)},
                },
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}


class ConfigError(ValueError):
    """Invalid configuration; ``path`` and ``line`` locate the offending value when known."""

    def __init__(self, message: str, path: str = "", line: int | None = None):
        self.message = message
        self.path = path
        self.line = line
        where = []
        if path:
            where.append(f"at {path}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(message + (f" ({', '.join(where)})" if where else ""))


@dataclass
class RunConfig:
    seed: int = 42
    points: int = 20
    tol: float = 1e-9
    suites: tuple[str, ...] | None = None

    @property
    def check(self) -> CheckConfig:
        return CheckConfig(self.seed, self.points, self.tol)

    def wants(self, suite: str) -> bool:
        return self.suites is None or suite in self.suites

    def explicit(self, suite: str) -> bool:
        return self.suites is not None and suite in self.suites

    def to_json(self) -> dict:
        out: dict[str, Any] = {"seed": self.seed, "points": self.points, "tol": self.tol}
        if self.suites is not None:
            out["suites"] = list(self.suites)
        return out


@dataclass
class HypersurfaceSpec:
    name: str
    immersion: Immersion
    transversal: Any = "auto"
    expected: dict = field(default_factory=dict)
    discrepancies: list = field(default_factory=list)
    description: str = ""


@dataclass
class Problem:
    """A loaded configuration: structure, optional metric and connection, hypersurfaces."""

    id: str
    description: str
    structure: AcStructure
    lap: LapStructure | None
    connection: Connection | None
    hypersurfaces: list[HypersurfaceSpec]
    run: RunConfig
    expected_structure: dict
    source: dict = field(repr=False, compare=False, default_factory=dict)

    @property
    def chart(self) -> Chart:
        return self.structure.chart

    @property
    def metric(self) -> MetricField | None:
        return self.lap.metric if self.lap else None

    def hypersurface(self, name: str) -> HypersurfaceSpec:
        for h in self.hypersurfaces:
            if h.name == name:
                return h
        raise KeyError(name)

    def to_config(self) -> dict:
        return copy.deepcopy(self.source)


# ---------------------------------------------------------------------------
# line numbers for JSON paths


def json_line_index(text: str) -> dict[tuple, int]:
    """Map every JSON path (tuple of keys/indices) to the line where its value starts."""
    index: dict[tuple, int] = {}
    pos = 0
    line = 1
    n = len(text)

    def skip_ws():
        nonlocal pos, line
        while pos < n and text[pos] in " \t\r\n":
            if text[pos] == "\n":
                line += 1
            pos += 1

    def string() -> str:
        nonlocal pos
        start = pos
        pos += 1
        while pos < n and text[pos] != '"':
            pos += 2 if text[pos] == "\\" else 1
        pos += 1
        return json.loads(text[start:pos])

    def value(path: tuple):
        nonlocal pos
        skip_ws()
        index[path] = line
        if pos >= n:
            return
        ch = text[pos]
        if ch == "{":
            pos += 1
            skip_ws()
            if pos < n and text[pos] == "}":
                pos += 1
                return
            while pos < n:
                skip_ws()
                key = string()
                skip_ws()
                pos += 1  # ':'
                value(path + (key,))
                skip_ws()
                if pos < n and text[pos] == ",":
                    pos += 1
                    continue
                pos += 1  # '}'
                return
        elif ch == "[":
            pos += 1
            skip_ws()
            if pos < n and text[pos] == "]":
                pos += 1
                return
            i = 0
            while pos < n:
                value(path + (i,))
                i += 1
                skip_ws()
                if pos < n and text[pos] == ",":
                    pos += 1
                    continue
                pos += 1  # ']'
                return
        elif ch == '"':
            string()
        else:
            while pos < n and text[pos] not in ",]} \t\r\n":
                pos += 1

    value(())
    return index


def _path_str(path) -> str:
    out = "$"
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


# ---------------------------------------------------------------------------
# loading


def load_config(source, run_overrides: dict | None = None) -> Problem:
    """Load a configuration from a path, a JSON string or an already parsed dict."""
    text = None
    if isinstance(source, dict):
        data = copy.deepcopy(source)
    else:
        if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
            p = Path(source)
            try:
                text = p.read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc}") from None
        else:
            text = source
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    lines = json_line_index(text) if text is not None else {}
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        err = errors[0]
        path = tuple(err.absolute_path)
        raise ConfigError(f"schema violation: {err.message}", _path_str(path), _nearest_line(lines, path))
    return _build(data, lines, run_overrides or {})


def _nearest_line(lines: dict, path: tuple) -> int | None:
    while True:
        if path in lines:
            return lines[path]
        if not path:
            return None
        path = path[:-1]


def _parse(text: str, path: tuple, lines: dict):
    try:
        return parse_expr(text)
    except ParseError as exc:
        raise ConfigError(f"expression error: {exc}", _path_str(path), _nearest_line(lines, path)) from None


def _parse_list(items, path, lines, length=None, what="list"):
    if length is not None and len(items) != length:
        raise ConfigError(
            f"dimension mismatch: {what} has {len(items)} entries, expected {length}",
            _path_str(path),
            _nearest_line(lines, path),
        )
    return [_parse(t, path + (i,), lines) for i, t in enumerate(items)]


def _parse_matrix(rows, path, lines, n, what):
    if len(rows) != n:
        raise ConfigError(f"dimension mismatch: {what} has {len(rows)} rows, expected {n}", _path_str(path),
                          _nearest_line(lines, path))
    return [_parse_list(r, path + (i,), lines, n, f"{what} row {i}") for i, r in enumerate(rows)]


def _domain_box(d: dict | None, path, lines) -> DomainBox:
    try:
        return DomainBox({k: tuple(v) for k, v in (d or {}).items()})
    except ValueError as exc:
        raise ConfigError(str(exc), _path_str(path), _nearest_line(lines, path)) from None


def _check_symbols(exprs, allowed, path, lines):
    for i, e in enumerate(exprs):
        extra = e.free_symbols() - set(allowed)
        if extra:
            p = path + (i,)
            raise ConfigError(f"unknown symbols {sorted(extra)}; expected coordinates {list(allowed)}", _path_str(p),
                              _nearest_line(lines, p))


def _build(data: dict, lines: dict, overrides: dict) -> Problem:
    coords = tuple(data["coords"])
    n = len(coords)
    if len(set(coords)) != n:
        raise ConfigError("coordinate names must be distinct", "$.coords", _nearest_line(lines, ("coords",)))
    chart = Chart(coords, _domain_box(data.get("domain"), ("domain",), lines))
    phi = _parse_matrix(data["phi"], ("phi",), lines, n, "phi")
    xi = _parse_list(data["xi"], ("xi",), lines, n, "xi")
    eta = _parse_list(data["eta"], ("eta",), lines, n, "eta")
    for key, val in (("phi", [e for r in phi for e in r]), ("xi", xi), ("eta", eta)):
        _check_symbols(val, coords, (key,), lines)
    try:
        ac = AcStructure(
            chart,
            TensorField(chart, 1, 1, phi),
            TensorField(chart, 1, 0, xi),
            TensorField(chart, 0, 1, eta),
            data.get("e1", 1),
            data.get("e2", 1),
        )
    except (DimensionError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    run_data = dict(data.get("run", {}))
    run_data.update({k: v for k, v in overrides.items() if v is not None})
    suites = run_data.get("suites")
    run = RunConfig(
        int(run_data.get("seed", 42)),
        int(run_data.get("points", 20)),
        float(run_data.get("tol", 1e-9)),
        tuple(suites) if suites is not None else None,
    )
    if run.points < 1 or not run.tol > 0:
        raise ConfigError("points must be >= 1 and tol > 0", "$.run")
    lap = None
    if "metric" in data:
        g = _parse_matrix(data["metric"], ("metric",), lines, n, "metric")
        _check_symbols([e for r in g for e in r], coords, ("metric",), lines)
        try:
            metric = MetricField(TensorField(chart, 0, 2, g))
        except ValueError as exc:
            raise ConfigError(str(exc), "$.metric", _nearest_line(lines, ("metric",))) from None
        if (ac.e1, ac.e2) != (1, 1):
            raise ConfigError("a metric structure needs e1 = e2 = 1", "$.e1", _nearest_line(lines, ("e1",)))
        lap = LapStructure(ac, metric)
    elif run.suites is not None:
        needs = [s for s in run.suites if s in METRIC_SUITES]
        if needs:
            raise ConfigError(f"metric required by suites {needs}", "$.run.suites", _nearest_line(lines, ("run", "suites")))
    conn = _connection(data.get("connection"), chart, lap, lines)
    exp = data.get("expected", {}).get("structure", {})
    if lap is None:
        bad = [k for k, v in exp.items() if k in METRIC_SUITES and v is not None]
        if bad:
            raise ConfigError(f"metric required for expectations {bad}", "$.expected.structure")
    hyps = []
    names = set()
    for k, h in enumerate(data.get("hypersurfaces", [])):
        spec = _hypersurface(h, k, chart, lines)
        if spec.name in names:
            raise ConfigError(f"duplicate hypersurface name {spec.name!r}", f"$.hypersurfaces[{k}].name",
                              _nearest_line(lines, ("hypersurfaces", k, "name")))
        names.add(spec.name)
        if spec.transversal == "normal" and lap is None:
            raise ConfigError("metric required for a metric-normal transversal", f"$.hypersurfaces[{k}].transversal",
                              _nearest_line(lines, ("hypersurfaces", k, "transversal")))
        hyps.append(spec)
    source = copy.deepcopy(data)
    source.setdefault("schema", CONFIG_SCHEMA_ID)
    return Problem(
        data.get("id", "config"), data.get("description", ""), ac, lap, conn, hyps, run, dict(exp), source
    )


def _connection(spec, chart: Chart, lap, lines) -> Connection | None:
    if spec is None:
        return lap.connection if lap is not None else None
    if spec == "zero":
        return Connection.zero(chart)
    if spec == "levi-civita":
        if lap is None:
            raise ConfigError("metric required for the Levi-Civita connection", "$.connection",
                              _nearest_line(lines, ("connection",)))
        return lap.connection
    n = chart.dim
    gamma = spec["christoffel"]
    if len(gamma) != n:
        raise ConfigError(f"dimension mismatch: christoffel has {len(gamma)} blocks, expected {n}",
                          "$.connection.christoffel", _nearest_line(lines, ("connection", "christoffel")))
    comps = [_parse_matrix(gamma[k], ("connection", "christoffel", k), lines, n, f"christoffel[{k}]") for k in range(n)]
    try:
        return Connection(chart, comps)
    except ValueError as exc:
        raise ConfigError(str(exc), "$.connection") from None


def _hypersurface(h: dict, k: int, chart: Chart, lines) -> HypersurfaceSpec:
    base = ("hypersurfaces", k)
    n = chart.dim
    params = tuple(h["params"])
    if len(params) != n - 1:
        raise ConfigError(f"dimension mismatch: {len(params)} parameters, expected {n - 1}", _path_str(base + ("params",)),
                          _nearest_line(lines, base + ("params",)))
    try:
        pchart = Chart(params, _domain_box(h.get("domain"), base + ("domain",), lines))
    except ValueError as exc:
        raise ConfigError(str(exc), _path_str(base + ("params",)), _nearest_line(lines, base + ("params",))) from None
    exprs = _parse_list(h["map"], base + ("map",), lines, n, "map")
    _check_symbols(exprs, params, base + ("map",), lines)
    try:
        imm = Immersion(pchart, chart, tuple(exprs))
    except (ValueError, ExprError) as exc:
        raise ConfigError(str(exc), _path_str(base)) from None
    transversal = h.get("transversal", "auto")
    if isinstance(transversal, list):
        tv = _parse_list(transversal, base + ("transversal",), lines, n, "transversal")
        _check_symbols(tv, chart.coords, base + ("transversal",), lines)
    expected = dict(h.get("expected", {}))
    for key in ("J", "psi"):
        if key in expected:
            _parse_matrix(expected[key], base + ("expected", key), lines, n - 1, key)
    for key, length in (("alpha", n - 1), ("xi_star", n - 1), ("eta_star", n - 1), ("normal", n)):
        if key in expected:
            _parse_list(expected[key], base + ("expected", key), lines, length, key)
    for j, d in enumerate(h.get("discrepancies", [])):
        dp = base + ("discrepancies", j)
        required = {
            "normal": ("printed",),
            "xi_decomposition": ("frame_coeffs", "transversal_coeff", "along"),
            "phi_image": ("frame_index", "frame_coeffs", "transversal_coeff", "along"),
            "entry": ("theorem",),
        }[d["kind"]]
        missing = [r for r in required if r not in d]
        if missing:
            raise ConfigError(f"discrepancy of kind {d['kind']!r} needs {missing}", _path_str(dp), _nearest_line(lines, dp))
        if "printed" in d:
            _parse_list(d["printed"], dp + ("printed",), lines, n, "printed")
        if "frame_coeffs" in d:
            _parse_list(d["frame_coeffs"], dp + ("frame_coeffs",), lines, n - 1, "frame_coeffs")
        if "transversal_coeff" in d:
            _parse(d["transversal_coeff"], dp + ("transversal_coeff",), lines)
        if isinstance(d.get("along"), list):
            _parse_list(d["along"], dp + ("along",), lines, n, "along")
        if d["kind"] == "phi_image" and d["frame_index"] > n - 1:
            raise ConfigError("frame_index out of range", _path_str(dp + ("frame_index",)),
                              _nearest_line(lines, dp + ("frame_index",)))
    return HypersurfaceSpec(h["name"], imm, transversal, expected, list(h.get("discrepancies", [])),
                            h.get("description", ""))


def dump_config(problem_or_dict) -> str:
    data = problem_or_dict.to_config() if isinstance(problem_or_dict, Problem) else problem_or_dict
    return json.dumps(data, indent=2) + "\n"
