from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paracontact.symexpr import (
    Const,
    DomainBox,
    DomainError,
    MissingCoordinateError,
    ParseError,
    add,
    as_expr,
    arctan,
    cos,
    diff_expr,
    eval_expr,
    exp,
    expand,
    exprs_equivalent,
    max_residual,
    mul,
    neg,
    parse_expr,
    power,
    sample_points,
    sin,
    subs,
    sym,
    to_string,
)

# expressions with their sampling boxes; every entry is used by the derivative check
CORPUS = [
    ("x^3 - 2*x*y + 5", {}),
    ("exp(-2*x) * y^2", {}),
    ("sin(x*y) + cos(x)^2", {}),
    ("tan(x/2)", {}),
    ("log(1 + x^2)", {}),
    ("sqrt(2 + x - y)", {}),
    ("arcsin(x)", {"x": (-0.9, 0.9)}),
    ("arctan(x*y + 1)", {}),
    ("1/(1 + y^2)", {}),
    ("exp(2*(x + y)) / (exp(2*(x + y)) + exp(-2*(x + y)) - 1)", {}),
    ("(x + y)^4 - x^-2", {"x": (0.5, 2.0)}),
    ("-exp(4*z)*(y^2 + 1)", {}),
    ("sqrt(1 - y^2) * arcsin(y)", {"y": (-0.9, 0.9)}),
    ("x^2 * 0 + 3/4*x", {}),
]


def test_parse_and_print_basic():
    assert to_string(parse_expr("2*x + 3*x")) == "5*x"
    assert parse_expr("x - x").is_zero
    assert parse_expr("0.5") == Const(Fraction(1, 2))
    assert eval_expr(parse_expr("2^-1"), {}) == 0.5


@pytest.mark.parametrize("bad", ["x +", "(x", "foo(x)", "x^y", "1..2", "", "x $ y"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_expr(bad)


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as exc:
        parse_expr("x + * y")
    assert "position" in str(exc.value)


def test_exact_arithmetic():
    e = add(as_expr("1/3"), as_expr("1/6"))
    assert e == Const(Fraction(1, 2))
    assert expand(parse_expr("(x+1)^2 - x^2 - 2*x")) == Const(1)


def test_subs_and_missing_coordinate():
    e = parse_expr("x*y")
    assert eval_expr(subs(e, {"y": parse_expr("2")}), {"x": 3.0}) == 6.0
    with pytest.raises(MissingCoordinateError):
        eval_expr(e, {"x": 1.0})


def test_domain_error():
    with pytest.raises(DomainError):
        eval_expr(parse_expr("log(x)"), {"x": -1.0})
    with pytest.raises(DomainError):
        eval_expr(parse_expr("arcsin(x)"), {"x": 2.0})


def test_sampling_is_seeded_and_inside_box():
    dom = DomainBox({"x": (0.0, 2.0)})
    a = sample_points([parse_expr("x")], ["x", "y"], dom, 5, 7)
    b = sample_points([parse_expr("x")], ["x", "y"], dom, 5, 7)
    assert a == b
    assert all(0.0 < p["x"] < 2.0 and -1.0 < p["y"] < 1.0 for p in a)


def test_sampling_redraws_outside_function_domain():
    pts = sample_points([parse_expr("log(x)")], ["x"], DomainBox(), 10, 1)
    assert all(p["x"] > 0 for p in pts)


def test_equivalence_symbolic_and_sampled():
    assert exprs_equivalent(parse_expr("sin(x)^2 + cos(x)^2"), parse_expr("1"))
    assert exprs_equivalent(parse_expr("exp(x)*exp(y)"), parse_expr("exp(x + y)"))
    assert not exprs_equivalent(parse_expr("x^2"), parse_expr("x^2 + 1e-6"))
    r, w = max_residual(parse_expr("x"), parse_expr("x + 1"))
    assert r > 0.3 and w is not None


def test_derivative_rules():
    x = "x"
    assert diff_expr(parse_expr("x^3"), x) == parse_expr("3*x^2")
    assert exprs_equivalent(diff_expr(parse_expr("arctan(x)"), x), parse_expr("1/(1+x^2)"))
    assert exprs_equivalent(diff_expr(parse_expr("exp(2*x)*sin(x)"), x), parse_expr("exp(2*x)*(2*sin(x)+cos(x))"))
    assert diff_expr(parse_expr("y"), x).is_zero


@pytest.mark.parametrize("text,box", CORPUS)
def test_derivatives_match_finite_differences(text, box):
    e = parse_expr(text)
    names = sorted(e.free_symbols() | {"x"})
    dom = DomainBox(box)
    for p in sample_points([e], names, dom, 10, 11):
        for v in names:
            d = diff_expr(e, v)
            h = 1e-5 * max(1.0, abs(p[v]))
            fp = eval_expr(e, {**p, v: p[v] + h})
            fm = eval_expr(e, {**p, v: p[v] - h})
            fd = (fp - fm) / (2 * h)
            exact = eval_expr(d, p)
            assert abs(exact - fd) <= 1e-6 * (1 + abs(exact)), (text, v, p)


_names = st.sampled_from(["x", "y", "z"])
_leaves = st.one_of(
    st.integers(-5, 5).map(as_expr),
    st.fractions(min_value=-3, max_value=3, max_denominator=7).map(as_expr),
    _names.map(sym),
)


def _extend(children):
    return st.one_of(
        st.tuples(children, children).map(lambda t: add(*t)),
        st.tuples(children, children).map(lambda t: mul(*t)),
        children.map(neg),
        st.tuples(children, st.integers(-2, 3)).map(lambda t: power(t[0], t[1]) if not t[0].is_zero else t[0]),
        children.map(exp),
        children.map(sin),
        children.map(cos),
        children.map(arctan),
    )


_exprs = st.recursive(_leaves, _extend, max_leaves=12)


@settings(max_examples=200, deadline=None)
@given(_exprs)
def test_print_parse_round_trip(e):
    back = parse_expr(to_string(e))
    assert back == e or exprs_equivalent(back, e)


@settings(max_examples=60, deadline=None)
@given(_exprs, st.integers(0, 1000))
def test_evaluation_is_deterministic(e, seed):
    names = ["x", "y", "z"]
    try:
        pts = sample_points([e], names, DomainBox(), 2, seed)
    except DomainError:
        return
    for p in pts:
        a, b = eval_expr(e, p), eval_expr(e, dict(p))
        assert a == b or (math.isnan(a) and math.isnan(b))
