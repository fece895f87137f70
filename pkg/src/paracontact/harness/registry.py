"""Built-in worked examples, stored in the configuration format.

Printed values that turn out to be misprints are kept as discrepancy
records with ``expected_discrepancy: true``: the run then asserts that the
recomputed value differs from the printed one.
"""

from __future__ import annotations

import copy

from .config import CONFIG_SCHEMA_ID, Problem, load_config

_R5 = ["x", "y", "z", "t", "s"]

STRUCTURES: dict[str, dict] = {
    "6.1": {
        "schema": CONFIG_SCHEMA_ID,
        "id": "6.1",
        "description": "(1,1,1) ac structure on R^5 with constant coefficients",
        "coords": _R5,
        "phi": [
            ["-1", "0", "0", "0", "0"],
            ["0", "-1", "0", "0", "0"],
            ["0", "0", "-1", "0", "0"],
            ["0", "0", "0", "-1", "0"],
            ["-1", "0", "-1", "0", "0"],
        ],
        "xi": ["0", "0", "0", "0", "-1"],
        "eta": ["-1", "0", "-1", "0", "1"],
        "e1": 1,
        "e2": 1,
        "connection": "zero",
        "expected": {"structure": {"ac": True, "normal": True, "affinely_cosymplectic": True, "automorphism": True}},
        "hypersurfaces": [
            {
                "name": "M1",
                "description": "s = x",
                "params": ["x", "y", "z", "t"],
                "map": ["x", "y", "z", "t", "x"],
                "transversal": "xi",
                "expected": {
                    "classification": "noninvariant-transversal-xi",
                    "J": [
                        ["-1", "0", "0", "0"],
                        ["0", "-1", "0", "0"],
                        ["0", "0", "-1", "0"],
                        ["0", "0", "0", "-1"],
                    ],
                    "alpha": ["0", "0", "1", "0"],
                },
            },
            {
                "name": "M2",
                "description": "x = y",
                "params": ["x", "z", "t", "s"],
                "map": ["x", "x", "z", "t", "s"],
                "transversal": "auto",
                "expected": {
                    "classification": "invariant-tangent-xi",
                    "psi": [
                        ["-1", "0", "0", "0"],
                        ["0", "-1", "0", "0"],
                        ["0", "0", "-1", "0"],
                        ["-1", "-1", "0", "0"],
                    ],
                    "xi_star": ["0", "0", "0", "-1"],
                    "eta_star": ["-1", "-1", "0", "1"],
                },
                "discrepancies": [
                    {
                        "kind": "phi_image",
                        "frame_index": 1,
                        "frame_coeffs": ["-1", "0", "0", "0"],
                        "transversal_coeff": "1",
                        "along": "xi",
                        "expected_discrepancy": False,
                        "note": "printed image of v1: -h1 v1 + h1 xi",
                    },
                    {
                        "kind": "phi_image",
                        "frame_index": 2,
                        "frame_coeffs": ["0", "-1", "0", "0"],
                        "transversal_coeff": "1",
                        "along": "xi",
                        "expected_discrepancy": False,
                        "note": "printed image of v2: -h2 v2 + h2 xi",
                    },
                    {
                        "kind": "phi_image",
                        "frame_index": 3,
                        "frame_coeffs": ["0", "0", "-1", "0"],
                        "transversal_coeff": "0",
                        "along": "xi",
                        "expected_discrepancy": False,
                        "note": "printed 'f3 v3' read as 'h3 v3' (notation slip); the image of v3 is -v3",
                    },
                    {
                        "kind": "phi_image",
                        "frame_index": 4,
                        "frame_coeffs": ["0", "0", "0", "0"],
                        "transversal_coeff": "0",
                        "along": "xi",
                        "expected_discrepancy": False,
                        "note": "no h4 term is printed: v4 is mapped to 0",
                    },
                ],
            },
        ],
    },
    "6.2": {
        "schema": CONFIG_SCHEMA_ID,
        "id": "6.2",
        "description": "Lorentzian almost paracontact structure on R^5, g = dx^2+dy^2+dz^2+dt^2 - eta(x)eta",
        "coords": _R5,
        "phi": [
            ["1", "0", "0", "0", "0"],
            ["0", "1", "0", "0", "0"],
            ["0", "0", "1", "0", "0"],
            ["0", "0", "0", "1", "0"],
            ["1", "0", "0", "0", "0"],
        ],
        "xi": ["0", "0", "0", "0", "-1"],
        "eta": ["-1", "0", "0", "0", "1"],
        "e1": 1,
        "e2": 1,
        "metric": [
            ["0", "0", "0", "0", "1"],
            ["0", "1", "0", "0", "0"],
            ["0", "0", "1", "0", "0"],
            ["0", "0", "0", "1", "0"],
            ["1", "0", "0", "0", "-1"],
        ],
        "connection": "levi-civita",
        "expected": {"structure": {"ac": True, "lap": True, "normal": True}},
        "hypersurfaces": [
            {
                "name": "M",
                "description": "s = x",
                "params": ["x", "y", "z", "t"],
                "map": ["x", "y", "z", "t", "x"],
                "transversal": "xi",
                "expected": {
                    "classification": "invariant-transversal-xi",
                    "J": [
                        ["1", "0", "0", "0"],
                        ["0", "1", "0", "0"],
                        ["0", "0", "1", "0"],
                        ["0", "0", "0", "1"],
                    ],
                    "alpha": ["0", "0", "0", "0"],
                    "normal": ["0", "0", "0", "0", "1"],
                },
                "discrepancies": [
                    {
                        "kind": "xi_decomposition",
                        "frame_coeffs": ["1/2", "0", "0", "0"],
                        "transversal_coeff": "-1/2",
                        "along": ["1", "0", "0", "0", "-1"],
                        "expected_discrepancy": True,
                        "note": "printed xi = (u1 - N)/2 with N = (1,0,0,0,-1) equals +d/ds, but xi = -d/ds",
                    }
                ],
            }
        ],
    },
    "6.3": {
        "schema": CONFIG_SCHEMA_ID,
        "id": "6.3",
        "description": "Lorentzian almost paracontact structure on R^3 with flat metric dx^2+dy^2-dz^2",
        "coords": ["x", "y", "z"],
        "phi": [["-1", "0", "0"], ["0", "-1", "0"], ["0", "0", "0"]],
        "xi": ["0", "0", "-1"],
        "eta": ["0", "0", "1"],
        "e1": 1,
        "e2": 1,
        "metric": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "-1"]],
        "connection": "levi-civita",
        "expected": {"structure": {"ac": True, "lap": True, "lp_contact": False, "lp_sasakian": False, "normal": True}},
        "hypersurfaces": [
            {
                "name": "M",
                "description": "x = arcsin(y), parametrized by (y, z)",
                "params": ["y", "z"],
                "map": ["arcsin(y)", "y", "z"],
                "domain": {"y": [-0.9, 0.9]},
                "transversal": "auto",
                "expected": {
                    "classification": "invariant-tangent-xi",
                    "psi": [["-1", "0"], ["0", "0"]],
                    "xi_star": ["0", "-1"],
                    "eta_star": ["0", "1"],
                    "normal": ["-sqrt(1 - y^2)", "1", "0"],
                },
            }
        ],
    },
    "6.4": {
        "schema": CONFIG_SCHEMA_ID,
        "id": "6.4",
        "description": "LP-Sasakian structure on R^3, g = exp(-2z)dx^2 + exp(2z)dy^2 - dz^2",
        "coords": ["x", "y", "z"],
        "phi": [["1", "0", "0"], ["0", "-1", "0"], ["0", "0", "0"]],
        "xi": ["0", "0", "-1"],
        "eta": ["0", "0", "1"],
        "e1": 1,
        "e2": 1,
        "metric": [["exp(-2*z)", "0", "0"], ["0", "exp(2*z)", "0"], ["0", "0", "-1"]],
        "connection": "levi-civita",
        "expected": {
            "structure": {"ac": True, "lap": True, "lp_contact": True, "lp_sasakian": True, "normal": True}
        },
        "hypersurfaces": [
            {
                "name": "M1",
                "description": "z = x + y",
                "params": ["x", "y"],
                "map": ["x", "y", "x + y"],
                "transversal": "xi",
                "expected": {
                    "classification": "noninvariant-transversal-xi",
                    "J": [["1", "0"], ["0", "-1"]],
                    "alpha": ["1", "-1"],
                    "normal": ["exp(2*(x + y))", "exp(-2*(x + y))", "1"],
                },
                "discrepancies": [
                    {
                        "kind": "normal",
                        "printed": ["exp(2*(x + y))", "exp(2*(x + y))", "1"],
                        "expected_discrepancy": True,
                        "note": "printed normal has exp(2(x+y)) as second component; orthogonality forces exp(-2(x+y))",
                    },
                    {
                        "kind": "xi_decomposition",
                        "frame_coeffs": [
                            "-exp(2*(x + y))/(exp(2*(x + y)) + exp(-2*(x + y)) - 1)",
                            "-exp(-2*(x + y))/(exp(2*(x + y)) + exp(-2*(x + y)) - 1)",
                        ],
                        "transversal_coeff": "1/(exp(2*(x + y)) + exp(-2*(x + y)) - 1)",
                        "along": "normal",
                        "expected_discrepancy": False,
                        "note": "printed decomposition of xi holds with the recomputed normal",
                    },
                    {
                        "kind": "entry",
                        "theorem": "5.6a-printed",
                        "expected_discrepancy": True,
                        "note": "printed sign of (nabla_X J)Y = alpha(Y)JX - C alpha(Y)X is reversed",
                    },
                    {
                        "kind": "entry",
                        "theorem": "prop5.1-printed",
                        "expected_discrepancy": True,
                        "note": "J is symmetric for g - alpha (x) alpha, not for the printed G = g + alpha (x) alpha",
                    },
                ],
            },
            {
                "name": "M2",
                "description": "x = arctan(y), parametrized by (y, z)",
                "params": ["y", "z"],
                "map": ["arctan(y)", "y", "z"],
                "transversal": "auto",
                "expected": {
                    "classification": "noninvariant-tangent-xi",
                    "normal": ["exp(2*z)", "-exp(-2*z)/(1 + y^2)", "0"],
                },
                "discrepancies": [
                    {
                        "kind": "normal",
                        "printed": ["exp(2*z)", "-exp(-2*z)/(1 + y^2)", "0"],
                        "expected_discrepancy": False,
                        "note": "printed normal is correct",
                    },
                    {
                        "kind": "phi_image",
                        "frame_index": 1,
                        "frame_coeffs": ["-1", "0"],
                        "transversal_coeff": "2*(1 + y^2)/((1 + y^2)^2*exp(2*z) - exp(-2*z))",
                        "along": ["exp(2*z)", "-exp(-2*z)/(1 + y^2)", "0"],
                        "expected_discrepancy": True,
                        "note": "printed phi(v1) = -(v1 - c N) with a minus sign in the denominator of c",
                    },
                    {
                        "kind": "phi_image",
                        "frame_index": 1,
                        "frame_coeffs": [
                            "(exp(-2*z) - (1 + y^2)^2*exp(2*z))/((1 + y^2)^2*exp(2*z) + exp(-2*z))",
                            "0",
                        ],
                        "transversal_coeff": "2*(1 + y^2)/((1 + y^2)^2*exp(2*z) + exp(-2*z))",
                        "along": ["exp(2*z)", "-exp(-2*z)/(1 + y^2)", "0"],
                        "expected_discrepancy": False,
                        "note": "recomputed phi(v1): plus sign in the denominator, non-constant tangential coefficient",
                    },
                ],
            },
        ],
    },
}

EXAMPLE_IDS = ("6.1/M1", "6.1/M2", "6.2", "6.3", "6.4/M1", "6.4/M2")


def split_id(example_id: str) -> tuple[str, str | None]:
    """'6.4/M1' -> ('6.4', 'M1'); '6.2' -> ('6.2', None)."""
    if "/" in example_id:
        sid, name = example_id.split("/", 1)
        return sid, name
    return example_id, None


def is_registry_id(ident: str) -> bool:
    sid, name = split_id(ident)
    if sid not in STRUCTURES:
        return False
    return name is None or any(h["name"] == name for h in STRUCTURES[sid]["hypersurfaces"])


def example_config(ident: str) -> dict:
    """Configuration for a structure id or an example id (filtered to that hypersurface)."""
    sid, name = split_id(ident)
    if sid not in STRUCTURES:
        raise KeyError(f"unknown example id {ident!r}")
    cfg = copy.deepcopy(STRUCTURES[sid])
    if name is not None:
        hs = [h for h in cfg["hypersurfaces"] if h["name"] == name]
        if not hs:
            raise KeyError(f"unknown example id {ident!r}")
        cfg["hypersurfaces"] = hs
        cfg["id"] = ident
    return cfg


def example_hypersurface(ident: str) -> str | None:
    """Hypersurface name an example id refers to (single-hypersurface structures included)."""
    sid, name = split_id(ident)
    if name is None and len(STRUCTURES[sid]["hypersurfaces"]) == 1 and ident in EXAMPLE_IDS:
        return STRUCTURES[sid]["hypersurfaces"][0]["name"]
    return name


def load_example(ident: str, run_overrides: dict | None = None) -> Problem:
    return load_config(example_config(ident), run_overrides)


def list_examples() -> list[tuple[str, str]]:
    out = []
    for ident in EXAMPLE_IDS:
        sid, name = split_id(ident)
        s = STRUCTURES[sid]
        h = s["hypersurfaces"][0] if name is None else next(h for h in s["hypersurfaces"] if h["name"] == name)
        out.append((ident, f"{s['description']}; hypersurface {h['description']}"))
    return out
