"""Expression trees over real coordinates.

Every node is immutable and is built through the smart constructors
(:func:`add`, :func:`mul`, :func:`power`, :func:`func`), which keep trees in
a canonical form: sums and products are flat and sorted, like terms and like
factors are collected, constants are exact rationals, ``exp(a)*exp(b)`` is
fused into ``exp(a + b)``.  Negation and quotient are not separate node kinds
in canonical form; ``-a`` is ``(-1)*a`` and ``a/b`` is ``a*b^(-1)``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Mapping

FUNCTIONS = ("exp", "log", "sin", "cos", "tan", "arcsin", "arctan", "sqrt")

_CONST, _SYM, _POW, _FUNC, _MUL, _ADD = range(6)


class ExprError(Exception):
    pass


class DomainError(ExprError, ArithmeticError):
    """Evaluation left the real domain of a function (or divided by zero)."""


class MissingCoordinateError(ExprError, KeyError):
    def __str__(self) -> str:
        return f"no value for coordinate {self.args[0]!r}"


class Expr:
    __slots__ = ("_key", "_hash")
    rank: int

    def _make_key(self) -> tuple:
        raise NotImplementedError

    @property
    def key(self) -> tuple:
        try:
            return self._key
        except AttributeError:
            k = self._make_key()
            object.__setattr__(self, "_key", k)
            return k

    def __setattr__(self, name, value):
        raise AttributeError("Expr is immutable")

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr):
            if isinstance(other, (int, Fraction)):
                return isinstance(self, Const) and self.value == other
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            h = hash(self.key)
            object.__setattr__(self, "_hash", h)
            return h

    def __lt__(self, other: Expr) -> bool:
        return self.key < other.key

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if isinstance(n, Const) and n.value.denominator == 1:
            n = int(n.value)
        if not isinstance(n, int):
            raise ExprError("only integer exponents are supported")
        return power(self, n)

    def __repr__(self):
        return f"Expr({to_string(self)!r})"

    def __str__(self):
        return to_string(self)

    @property
    def is_zero(self) -> bool:
        return isinstance(self, Const) and self.value == 0

    @property
    def is_constant(self) -> bool:
        return not self.free_symbols()

    def free_symbols(self) -> frozenset[str]:
        return frozenset()

    def children(self) -> tuple[Expr, ...]:
        return ()


class Const(Expr):
    __slots__ = ("value",)
    rank = _CONST

    def __init__(self, value):
        object.__setattr__(self, "value", Fraction(value))

    def _make_key(self):
        return (_CONST, self.value)


class Sym(Expr):
    __slots__ = ("name",)
    rank = _SYM

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)

    def _make_key(self):
        return (_SYM, self.name)

    def free_symbols(self):
        return frozenset((self.name,))


class Add(Expr):
    __slots__ = ("terms", "_free")
    rank = _ADD

    def __init__(self, terms: tuple[Expr, ...]):
        object.__setattr__(self, "terms", terms)

    def _make_key(self):
        return (_ADD, tuple(t.key for t in self.terms))

    def children(self):
        return self.terms

    def free_symbols(self):
        return _union_free(self)


class Mul(Expr):
    __slots__ = ("factors", "_free")
    rank = _MUL

    def __init__(self, factors: tuple[Expr, ...]):
        object.__setattr__(self, "factors", factors)

    def _make_key(self):
        return (_MUL, tuple(f.key for f in self.factors))

    def children(self):
        return self.factors

    def free_symbols(self):
        return _union_free(self)


class Pow(Expr):
    __slots__ = ("base", "exp", "_free")
    rank = _POW

    def __init__(self, base: Expr, exp: int):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exp", exp)

    def _make_key(self):
        return (_POW, self.base.key, self.exp)

    def children(self):
        return (self.base,)

    def free_symbols(self):
        return self.base.free_symbols()


class Func(Expr):
    __slots__ = ("name", "arg", "_free")
    rank = _FUNC

    def __init__(self, name: str, arg: Expr):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "arg", arg)

    def _make_key(self):
        return (_FUNC, self.name, self.arg.key)

    def children(self):
        return (self.arg,)

    def free_symbols(self):
        return self.arg.free_symbols()


def _union_free(e: Expr) -> frozenset[str]:
    try:
        return e._free
    except AttributeError:
        s = frozenset().union(*(c.free_symbols() for c in e.children()))
        object.__setattr__(e, "_free", s)
        return s


ZERO = Const(0)
ONE = Const(1)
MINUS_ONE = Const(-1)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not an expression")
    if isinstance(value, (int, Rational)):
        return Const(Fraction(value))
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ExprError(f"non-finite constant {value}")
        return Const(Fraction(repr(value)))
    if isinstance(value, str):
        from .parser import parse_expr

        return parse_expr(value)
    raise TypeError(f"cannot convert {type(value).__name__} to Expr")


def sym(name: str) -> Sym:
    return Sym(name)


# ---------------------------------------------------------------------------
# canonicalising constructors


def _split_coeff(term: Expr) -> tuple[Fraction, Expr]:
    if isinstance(term, Mul) and isinstance(term.factors[0], Const):
        rest = term.factors[1:]
        return term.factors[0].value, rest[0] if len(rest) == 1 else Mul(rest)
    return Fraction(1), term


def _with_coeff(c: Fraction, rest: Expr) -> Expr:
    if c == 1:
        return rest
    if isinstance(rest, Mul):
        return Mul((Const(c),) + rest.factors)
    return Mul((Const(c), rest))


def add(*args: Expr) -> Expr:
    const = Fraction(0)
    coeffs: dict[Expr, Fraction] = {}
    stack = list(args)
    while stack:
        a = stack.pop()
        if isinstance(a, Add):
            stack.extend(a.terms)
        elif isinstance(a, Const):
            const += a.value
        else:
            c, rest = _split_coeff(a)
            coeffs[rest] = coeffs.get(rest, Fraction(0)) + c
    terms = sorted(_with_coeff(c, r) for r, c in coeffs.items() if c != 0)
    if const != 0:
        terms.insert(0, Const(const))
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    return Add(tuple(terms))


def _base_exp(f: Expr) -> tuple[Expr, int]:
    if isinstance(f, Pow):
        return f.base, f.exp
    return f, 1


def mul(*args: Expr) -> Expr:
    const = Fraction(1)
    exps: dict[Expr, int] = {}
    exp_args: list[Expr] = []
    stack = list(args)
    while stack:
        a = stack.pop()
        if isinstance(a, Mul):
            stack.extend(a.factors)
        elif isinstance(a, Const):
            const *= a.value
        elif isinstance(a, Func) and a.name == "exp":
            exp_args.append(a.arg)
        else:
            b, n = _base_exp(a)
            exps[b] = exps.get(b, 0) + n
    if const == 0:
        return ZERO
    if exp_args:
        e = func("exp", add(*exp_args)) if len(exp_args) > 1 else Func("exp", exp_args[0])
        if isinstance(e, Const):
            const *= e.value
        else:
            b, n = _base_exp(e)
            exps[b] = exps.get(b, 0) + n
    # sqrt(a)^2 -> a and friends; the rewritten factors need another pass
    reducible = [b for b, n in exps.items() if n not in (0, 1) and isinstance(b, Func) and b.name == "sqrt"]
    if reducible:
        extra = [power(b, exps.pop(b)) for b in reducible]
        rest = [Pow(b, n) if n != 1 else b for b, n in exps.items() if n != 0]
        return mul(Const(const), *rest, *extra)
    factors = sorted(Pow(b, n) if n != 1 else b for b, n in exps.items() if n != 0)
    if not factors:
        return Const(const)
    if len(factors) == 1:
        f = factors[0]
        if const == 1:
            return f
        if isinstance(f, Add):
            return add(*(_scale(const, t) for t in f.terms))
        return Mul((Const(const), f))
    if const != 1:
        factors.insert(0, Const(const))
    return Mul(tuple(factors))


def _scale(c: Fraction, term: Expr) -> Expr:
    if isinstance(term, Const):
        return Const(c * term.value)
    tc, rest = _split_coeff(term)
    return _with_coeff(c * tc, rest)


def neg(a: Expr) -> Expr:
    return mul(MINUS_ONE, a)


def div(a: Expr, b: Expr) -> Expr:
    return mul(a, power(b, -1))


def power(b: Expr, n: int) -> Expr:
    if n == 0:
        return ONE
    if n == 1:
        return b
    if isinstance(b, Const):
        if b.value == 0 and n < 0:
            raise DomainError("division by zero")
        return Const(b.value**n)
    if isinstance(b, Pow):
        return power(b.base, b.exp * n)
    if isinstance(b, Mul):
        return mul(*(power(f, n) for f in b.factors))
    if isinstance(b, Func):
        if b.name == "exp":
            return func("exp", mul(Const(n), b.arg))
        if b.name == "sqrt":
            q, r = divmod(n, 2)
            return mul(power(b.arg, q), b) if r else power(b.arg, q)
    return Pow(b, n)


def _exact_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def func(name: str, arg: Expr) -> Expr:
    if name not in FUNCTIONS:
        raise ExprError(f"unknown function {name!r}")
    if isinstance(arg, Const):
        v = arg.value
        if v == 0 and name in ("sin", "tan", "arcsin", "arctan", "sqrt"):
            return ZERO
        if v == 0 and name in ("exp", "cos"):
            return ONE
        if v == 1 and name == "log":
            return ZERO
        if name == "sqrt":
            r = _exact_sqrt(v)
            if r is not None:
                return Const(r)
    if name == "log" and isinstance(arg, Func) and arg.name == "exp":
        return arg.arg
    if name == "exp" and isinstance(arg, Func) and arg.name == "log":
        return arg.arg
    return Func(name, arg)


def exp(a) -> Expr:
    return func("exp", as_expr(a))


def log(a) -> Expr:
    return func("log", as_expr(a))


def sin(a) -> Expr:
    return func("sin", as_expr(a))


def cos(a) -> Expr:
    return func("cos", as_expr(a))


def tan(a) -> Expr:
    return func("tan", as_expr(a))


def arcsin(a) -> Expr:
    return func("arcsin", as_expr(a))


def arctan(a) -> Expr:
    return func("arctan", as_expr(a))


def sqrt(a) -> Expr:
    return func("sqrt", as_expr(a))


# ---------------------------------------------------------------------------
# structural transforms


def rebuild(e: Expr, leaf: Callable[[Expr], Expr] | None = None) -> Expr:
    """Re-run the canonical constructors bottom-up, optionally mapping leaves."""
    if isinstance(e, (Const, Sym)):
        return leaf(e) if leaf else e
    if isinstance(e, Add):
        return add(*(rebuild(t, leaf) for t in e.terms))
    if isinstance(e, Mul):
        return mul(*(rebuild(f, leaf) for f in e.factors))
    if isinstance(e, Pow):
        return power(rebuild(e.base, leaf), e.exp)
    if isinstance(e, Func):
        return func(e.name, rebuild(e.arg, leaf))
    raise TypeError(type(e))


def simplify(e: Expr) -> Expr:
    return rebuild(e)


def subs(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Simultaneous substitution of coordinate symbols."""
    if not mapping or not (e.free_symbols() & mapping.keys()):
        return e
    return rebuild(e, lambda leaf: mapping.get(leaf.name, leaf) if isinstance(leaf, Sym) else leaf)


def expand(e: Expr, max_terms: int = 4096) -> Expr:
    """Distribute products over sums and expand positive powers of sums.

    Gives up (returning the partially expanded form) once a single product
    would exceed ``max_terms`` terms.
    """
    if isinstance(e, (Const, Sym)):
        return e
    if isinstance(e, Add):
        return add(*(expand(t, max_terms) for t in e.terms))
    if isinstance(e, Func):
        return func(e.name, expand(e.arg, max_terms))
    if isinstance(e, Pow):
        b = expand(e.base, max_terms)
        if isinstance(b, Add) and e.exp > 1 and len(b.terms) ** e.exp <= max_terms:
            return _distribute([b] * e.exp)
        if isinstance(b, Add) and e.exp < -1 and len(b.terms) ** -e.exp <= max_terms:
            return power(_distribute([b] * -e.exp), -1)
        return power(b, e.exp)
    if isinstance(e, Mul):
        factors = [expand(f, max_terms) for f in e.factors]
        size = 1
        for f in factors:
            size *= len(f.terms) if isinstance(f, Add) else 1
        if size > max_terms:
            return mul(*factors)
        return _distribute(factors)
    raise TypeError(type(e))


def _distribute(factors: list[Expr]) -> Expr:
    parts: list[list[Expr]] = [[]]
    for f in factors:
        terms = f.terms if isinstance(f, Add) else (f,)
        parts = [p + [t] for p in parts for t in terms]
    return add(*(mul(*p) for p in parts))


def count_nodes(e: Expr) -> int:
    return 1 + sum(count_nodes(c) for c in e.children())


# ---------------------------------------------------------------------------
# differentiation


def diff_expr(e: Expr, coord: str) -> Expr:
    """Exact partial derivative of ``e`` with respect to ``coord``."""
    if coord not in e.free_symbols():
        return ZERO
    if isinstance(e, Sym):
        return ONE
    if isinstance(e, Add):
        return add(*(diff_expr(t, coord) for t in e.terms))
    if isinstance(e, Mul):
        fs = e.factors
        terms = []
        for i, f in enumerate(fs):
            df = diff_expr(f, coord)
            if not df.is_zero:
                terms.append(mul(*fs[:i], df, *fs[i + 1 :]))
        return add(*terms)
    if isinstance(e, Pow):
        return mul(Const(e.exp), power(e.base, e.exp - 1), diff_expr(e.base, coord))
    if isinstance(e, Func):
        u = e.arg
        du = diff_expr(u, coord)
        return mul(_outer_derivative(e.name, u, e), du)
    raise TypeError(type(e))


def _outer_derivative(name: str, u: Expr, whole: Expr) -> Expr:
    if name == "exp":
        return whole
    if name == "log":
        return power(u, -1)
    if name == "sin":
        return cos(u)
    if name == "cos":
        return neg(sin(u))
    if name == "tan":
        return add(ONE, power(whole, 2))
    if name == "arcsin":
        return power(sqrt(add(ONE, neg(power(u, 2)))), -1)
    if name == "arctan":
        return power(add(ONE, power(u, 2)), -1)
    if name == "sqrt":
        return mul(Const(Fraction(1, 2)), power(whole, -1))
    raise ExprError(f"unknown function {name!r}")


# ---------------------------------------------------------------------------
# numerical evaluation


def _checked(name: str, v: float) -> float:
    if name == "log":
        if v <= 0:
            raise DomainError(f"log of non-positive value {v:g}")
        return math.log(v)
    if name == "sqrt":
        if v < 0:
            raise DomainError(f"sqrt of negative value {v:g}")
        return math.sqrt(v)
    if name == "arcsin":
        if not -1.0 <= v <= 1.0:
            raise DomainError(f"arcsin argument {v:g} outside [-1, 1]")
        return math.asin(v)
    if name == "exp":
        try:
            return math.exp(v)
        except OverflowError:
            raise DomainError(f"exp overflow at {v:g}") from None
    if name == "tan":
        c = math.cos(v)
        if c == 0.0:
            raise DomainError("tan pole")
        return math.tan(v)
    return _PLAIN[name](v)


_PLAIN = {"sin": math.sin, "cos": math.cos, "arctan": math.atan}


def eval_expr(e: Expr, point: Mapping[str, float]) -> float:
    """Evaluate to a finite float; raises DomainError / MissingCoordinateError."""
    v = _eval(e, point)
    if not math.isfinite(v):
        raise DomainError(f"non-finite value while evaluating {e}")
    return v


def _eval(e: Expr, p: Mapping[str, float]) -> float:
    if isinstance(e, Const):
        return float(e.value)
    if isinstance(e, Sym):
        try:
            return float(p[e.name])
        except KeyError:
            raise MissingCoordinateError(e.name) from None
    if isinstance(e, Add):
        return math.fsum(_eval(t, p) for t in e.terms)
    if isinstance(e, Mul):
        r = 1.0
        for f in e.factors:
            r *= _eval(f, p)
        return r
    if isinstance(e, Pow):
        b = _eval(e.base, p)
        if b == 0.0 and e.exp < 0:
            raise DomainError("division by zero")
        try:
            return b**e.exp
        except OverflowError:
            raise DomainError("overflow") from None
    if isinstance(e, Func):
        return _checked(e.name, _eval(e.arg, p))
    raise TypeError(type(e))


# ---------------------------------------------------------------------------
# printing

_PREC_ADD, _PREC_MUL, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _prec(e: Expr) -> int:
    if isinstance(e, Add):
        return _PREC_ADD
    if isinstance(e, Mul):
        return _PREC_MUL
    if isinstance(e, Pow):
        return _PREC_MUL if e.exp < 0 else _PREC_POW
    if isinstance(e, Const):
        if e.value < 0:
            return _PREC_ADD
        return _PREC_MUL if e.value.denominator != 1 else _PREC_ATOM
    return _PREC_ATOM


def _wrap(e: Expr, min_prec: int) -> str:
    s = to_string(e)
    return f"({s})" if _prec(e) < min_prec else s


def _product_string(coeff: Fraction, factors: Iterable[Expr]) -> str:
    num: list[str] = []
    den: list[str] = []
    for f in factors:
        b, n = _base_exp(f)
        k = abs(n)
        piece = f"{_wrap(b, _PREC_ATOM)}^{k}" if k != 1 else _wrap(b, _PREC_POW)
        (num if n > 0 else den).append(piece)
    a = abs(coeff)
    if a != 1 or not num:
        num.insert(0, _frac_str(a))
    s = "*".join(num)
    if den:
        s += "/" + (den[0] if len(den) == 1 else "(" + "*".join(den) + ")")
    return ("-" if coeff < 0 else "") + s


def to_string(e: Expr) -> str:
    """Canonical infix form; ``parse_expr(to_string(e)) == e`` for canonical ``e``."""
    if isinstance(e, Const):
        return _frac_str(e.value)
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Func):
        return f"{e.name}({to_string(e.arg)})"
    if isinstance(e, Pow):
        return _product_string(Fraction(1), (e,))
    if isinstance(e, Mul):
        c, rest = _split_coeff(e)
        return _product_string(c, rest.factors if isinstance(rest, Mul) else (rest,))
    if isinstance(e, Add):
        terms = list(e.terms[1:]) + [e.terms[0]] if isinstance(e.terms[0], Const) else list(e.terms)
        out = []
        for i, t in enumerate(terms):
            c, rest = _split_coeff(t) if not isinstance(t, Const) else (t.value, None)
            negative = c < 0
            body = to_string(neg(t)) if negative else to_string(t)
            if i == 0:
                out.append(("-" if negative else "") + (body if not negative or _prec(neg(t)) > _PREC_ADD else f"({body})"))
            else:
                out.append((" - " if negative else " + ") + body)
        return "".join(out)
    raise TypeError(type(e))
