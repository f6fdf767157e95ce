"""Immutable symbolic expression trees over three spatial variables.

Nodes: exact Gaussian-rational constants, spatial variables x1..x3, named
real parameters, sums, products, rational powers, the elementary functions
exp/ln/arctan/sin/cos (sqrt is a rational power), and abstract function
applications F(u1,...,uk) together with their formal partial derivatives.

Construction applies only cheap local simplifications (flattening,
constant folding).  Canonical forms are produced by
:func:`pdmlab.symkernel.ratform.normalize`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .scalars import GRat, grat

ELEMENTARY = ("exp", "ln", "arctan", "sin", "cos")
VAR_NAMES = ("x1", "x2", "x3")
RESERVED = set(ELEMENTARY) | set(VAR_NAMES) | {"i", "sqrt", "gauss", "+", "*", "^"}


class ExprError(ValueError):
    pass


class Expr:
    """Base class; all instances are immutable and hashable."""

    __slots__ = ("_hash",)

    # subclasses set _fields for equality/ordering
    _fields: tuple = ()

    def _key(self):
        return (type(self).__name__,) + tuple(getattr(self, f) for f in self._fields)

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or self._hash != other._hash:
            return False
        return self._key() == other._key()

    def __hash__(self):
        return self._hash

    # -- python-operator sugar ---------------------------------------------
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, mul(NUM_MINUS_ONE, as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), mul(NUM_MINUS_ONE, self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return mul(self, pow_(as_expr(other), -1))

    def __rtruediv__(self, other):
        return mul(as_expr(other), pow_(self, -1))

    def __neg__(self):
        return mul(NUM_MINUS_ONE, self)

    def __pow__(self, e):
        return pow_(self, e)

    def __repr__(self):
        from .sexpr import to_sexpr

        return to_sexpr(self)


class Num(Expr):
    __slots__ = ("val",)
    _fields = ("val",)

    def __init__(self, val):
        object.__setattr__(self, "val", grat(val))
        object.__setattr__(self, "_hash", hash(("Num", self.val)))


class Var(Expr):
    """Spatial variable x1, x2 or x3."""

    __slots__ = ("name", "axis")
    _fields = ("name",)

    def __init__(self, name: str):
        if name not in VAR_NAMES:
            raise ExprError(f"unknown spatial variable {name!r}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "axis", int(name[1]))
        object.__setattr__(self, "_hash", hash(("Var", name)))


class Param(Expr):
    """Named real parameter (mu, nu, alpha, c, ...)."""

    __slots__ = ("name",)
    _fields = ("name",)

    def __init__(self, name: str):
        if not name.isidentifier() or name in RESERVED:
            raise ExprError(f"bad parameter name {name!r}")
        if name[0] == "x" and name[1:].isdigit():
            raise ExprError(f"{name!r} is reserved for spatial variables")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_hash", hash(("Param", name)))


class Add(Expr):
    __slots__ = ("terms",)
    _fields = ("terms",)

    def __init__(self, terms: tuple):
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "_hash", hash(("Add", terms)))


class Mul(Expr):
    __slots__ = ("factors",)
    _fields = ("factors",)

    def __init__(self, factors: tuple):
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "_hash", hash(("Mul", factors)))


class Pow(Expr):
    """base ** exponent with a rational (possibly negative) exponent."""

    __slots__ = ("base", "exponent")
    _fields = ("base", "exponent")

    def __init__(self, base: Expr, exponent: Fraction):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exponent", exponent)
        object.__setattr__(self, "_hash", hash(("Pow", base, exponent)))


class App(Expr):
    """Elementary function application exp/ln/arctan/sin/cos."""

    __slots__ = ("fn", "arg")
    _fields = ("fn", "arg")

    def __init__(self, fn: str, arg: Expr):
        if fn not in ELEMENTARY:
            raise ExprError(f"unknown function {fn!r}")
        object.__setattr__(self, "fn", fn)
        object.__setattr__(self, "arg", arg)
        object.__setattr__(self, "_hash", hash(("App", fn, arg)))


class AbsApp(Expr):
    """Abstract function application D^{dcounts} NAME(args).

    dcounts[k] is the number of formal derivatives taken with respect to
    argument slot k; mixed derivatives commute because only the counts are
    stored.
    """

    __slots__ = ("name", "dcounts", "args")
    _fields = ("name", "dcounts", "args")

    def __init__(self, name: str, dcounts: tuple, args: tuple):
        if not name.isidentifier() or name in RESERVED:
            raise ExprError(f"bad abstract function name {name!r}")
        if len(dcounts) != len(args) or not args:
            raise ExprError("argument/derivative-count arity mismatch")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "dcounts", dcounts)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "_hash", hash(("AbsApp", name, dcounts, args)))

    @property
    def symbol(self) -> str:
        """Sampling key, e.g. 'F', 'D1F', 'D1D2F'."""
        pre = "".join(f"D{k + 1}" * c for k, c in enumerate(self.dcounts))
        return pre + self.name


# ---------------------------------------------------------------------------
# smart constructors
# ---------------------------------------------------------------------------

NUM_ZERO = Num(0)
NUM_ONE = Num(1)
NUM_MINUS_ONE = Num(-1)
IMAG = Num(GRat(0, 1))

x1 = Var("x1")
x2 = Var("x2")
x3 = Var("x3")
XVARS = (x1, x2, x3)


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction, GRat)):
        return Num(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


def num(re, im=0) -> Num:
    return Num(GRat(Fraction(re), Fraction(im)))


def param(name: str) -> Param:
    return Param(name)


def add(*terms) -> Expr:
    flat = []
    const = GRat(0)
    for t in terms:
        t = as_expr(t)
        if isinstance(t, Add):
            for s in t.terms:
                if isinstance(s, Num):
                    const = const + s.val
                else:
                    flat.append(s)
        elif isinstance(t, Num):
            const = const + t.val
        else:
            flat.append(t)
    if not const.is_zero() or not flat:
        flat.append(Num(const))
    if len(flat) == 1:
        return flat[0]
    return Add(tuple(flat))


def mul(*factors) -> Expr:
    flat = []
    const = GRat(1)
    for f in factors:
        f = as_expr(f)
        if isinstance(f, Mul):
            for g in f.factors:
                if isinstance(g, Num):
                    const = const * g.val
                else:
                    flat.append(g)
        elif isinstance(f, Num):
            const = const * f.val
        else:
            flat.append(f)
    if const.is_zero():
        return NUM_ZERO
    if not const.is_one() or not flat:
        flat.insert(0, Num(const))
    if len(flat) == 1:
        return flat[0]
    return Mul(tuple(flat))


def pow_(base, exponent) -> Expr:
    base = as_expr(base)
    if isinstance(exponent, int):
        exponent = Fraction(exponent)
    if not isinstance(exponent, Fraction):
        raise ExprError("exponent must be an integer or Fraction")
    if exponent == 0:
        return NUM_ONE
    if exponent == 1:
        return base
    if isinstance(base, Num):
        if exponent.denominator == 1:
            return Num(base.val ** exponent.numerator)
        root = _exact_root(base.val, exponent.denominator)
        if root is not None:
            return Num(root ** exponent.numerator)
    if isinstance(base, Pow) and exponent.denominator == 1:
        # (b^q)^n == b^(q*n) is sound for integer n
        return pow_(base.base, base.exponent * exponent)
    if isinstance(base, Mul) and exponent.denominator == 1:
        return mul(*(pow_(f, exponent) for f in base.factors))
    return Pow(base, exponent)


def _exact_root(c: GRat, q: int):
    """Exact q-th root of a nonnegative rational, or None."""
    if not c.is_rational() or c.re < 0:
        return None
    fr = c.re
    rn = round(fr.numerator ** (1.0 / q))
    rd = round(fr.denominator ** (1.0 / q))
    for n in (rn - 1, rn, rn + 1):
        for d in (rd - 1, rd, rd + 1):
            if n >= 0 and d > 0 and Fraction(n) ** q == fr * d**q:
                return GRat(Fraction(n, d))
    return None


def sqrt(e) -> Expr:
    return pow_(e, Fraction(1, 2))


def exp(e) -> Expr:
    return App("exp", as_expr(e))


def ln(e) -> Expr:
    return App("ln", as_expr(e))


def arctan(e) -> Expr:
    return App("arctan", as_expr(e))


def sin(e) -> Expr:
    return App("sin", as_expr(e))


def cos(e) -> Expr:
    return App("cos", as_expr(e))


class AbstractFn:
    """Factory for an abstract function symbol of fixed arity."""

    def __init__(self, name: str, arity: int, dcounts=None):
        self.name = name
        self.arity = arity
        self.dcounts = tuple(dcounts) if dcounts else (0,) * arity

    def __call__(self, *args) -> AbsApp:
        if len(args) != self.arity:
            raise ExprError(f"{self.name} expects {self.arity} argument(s)")
        return AbsApp(self.name, self.dcounts, tuple(as_expr(a) for a in args))

    def d(self, slot: int) -> "AbstractFn":
        """Formal derivative with respect to argument slot (1-based)."""
        if not 1 <= slot <= self.arity:
            raise ExprError("derivative slot out of range")
        dc = list(self.dcounts)
        dc[slot - 1] += 1
        return AbstractFn(self.name, self.arity, dc)


# ---------------------------------------------------------------------------
# structural queries
# ---------------------------------------------------------------------------


def children(e: Expr) -> tuple:
    if isinstance(e, Add):
        return e.terms
    if isinstance(e, Mul):
        return e.factors
    if isinstance(e, Pow):
        return (e.base,)
    if isinstance(e, App):
        return (e.arg,)
    if isinstance(e, AbsApp):
        return e.args
    return ()


def walk(e: Expr):
    yield e
    for c in children(e):
        yield from walk(c)


def free_params(e: Expr) -> set:
    return {n.name for n in walk(e) if isinstance(n, Param)}


def abstract_symbols(e: Expr) -> set:
    """Sampling keys of all abstract-function nodes, e.g. {'F', 'D1F'}."""
    return {n.symbol for n in walk(e) if isinstance(n, AbsApp)}


def contains_abstract(e: Expr) -> bool:
    return any(isinstance(n, AbsApp) for n in walk(e))


def contains_transcendental(e: Expr) -> bool:
    return any(isinstance(n, App) for n in walk(e))


def is_rational_in_x(e: Expr) -> bool:
    """True if the tree uses only constants, variables, parameters and
    integer-power rational operations."""
    for n in walk(e):
        if isinstance(n, (App, AbsApp)):
            return False
        if isinstance(n, Pow) and n.exponent.denominator != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# substitution and differentiation
# ---------------------------------------------------------------------------


def subst(e: Expr, mapping: Mapping[Expr, Expr]) -> Expr:
    """Replace Var/Param leaves according to mapping."""
    if e in mapping:
        return mapping[e]
    if isinstance(e, (Num, Var, Param)):
        return e
    if isinstance(e, Add):
        return add(*(subst(t, mapping) for t in e.terms))
    if isinstance(e, Mul):
        return mul(*(subst(f, mapping) for f in e.factors))
    if isinstance(e, Pow):
        return pow_(subst(e.base, mapping), e.exponent)
    if isinstance(e, App):
        return App(e.fn, subst(e.arg, mapping))
    if isinstance(e, AbsApp):
        return AbsApp(e.name, e.dcounts, tuple(subst(a, mapping) for a in e.args))
    raise ExprError(f"cannot substitute into {e!r}")


def diff(e: Expr, a: int) -> Expr:
    """Exact partial derivative with respect to spatial axis a in {1,2,3}."""
    if a not in (1, 2, 3):
        raise ExprError("axis must be 1, 2 or 3")
    return diff_wrt(e, XVARS[a - 1])


def diff_wrt(e: Expr, leaf: Expr) -> Expr:
    """Derivative with respect to a Var or Param leaf (chain rule throughout)."""
    if not isinstance(leaf, (Var, Param)):
        raise ExprError("can only differentiate with respect to a Var or Param")
    return _diff(e, leaf, {})


def _diff(e: Expr, v: Expr, cache: dict) -> Expr:
    got = cache.get(e)
    if got is not None:
        return got
    out = _diff_raw(e, v, cache)
    cache[e] = out
    return out


def _diff_raw(e: Expr, v: Expr, cache: dict) -> Expr:
    if isinstance(e, (Num, Var, Param)):
        return NUM_ONE if e == v else NUM_ZERO
    if isinstance(e, Add):
        return add(*(_diff(t, v, cache) for t in e.terms))
    if isinstance(e, Mul):
        terms = []
        fs = e.factors
        for i, f in enumerate(fs):
            df = _diff(f, v, cache)
            if df is NUM_ZERO or df == NUM_ZERO:
                continue
            terms.append(mul(*fs[:i], df, *fs[i + 1 :]))
        return add(*terms) if terms else NUM_ZERO
    if isinstance(e, Pow):
        db = _diff(e.base, v, cache)
        if db == NUM_ZERO:
            return NUM_ZERO
        return mul(Num(GRat(e.exponent)), pow_(e.base, e.exponent - 1), db)
    if isinstance(e, App):
        da = _diff(e.arg, v, cache)
        if da == NUM_ZERO:
            return NUM_ZERO
        u = e.arg
        if e.fn == "exp":
            outer = e
        elif e.fn == "ln":
            outer = pow_(u, -1)
        elif e.fn == "arctan":
            outer = pow_(add(NUM_ONE, mul(u, u)), -1)
        elif e.fn == "sin":
            outer = cos(u)
        else:  # cos
            outer = mul(NUM_MINUS_ONE, sin(u))
        return mul(outer, da)
    if isinstance(e, AbsApp):
        terms = []
        for k, u in enumerate(e.args):
            du = _diff(u, v, cache)
            if du == NUM_ZERO:
                continue
            dc = list(e.dcounts)
            dc[k] += 1
            terms.append(mul(AbsApp(e.name, tuple(dc), e.args), du))
        return add(*terms) if terms else NUM_ZERO
    raise ExprError(f"cannot differentiate {e!r}")


def grad(e: Expr) -> tuple:
    return (diff(e, 1), diff(e, 2), diff(e, 3))


def instantiate(e: Expr, templates: Mapping[str, tuple]) -> Expr:
    """Replace abstract functions by concrete expressions.

    templates maps a function name to (slot_params, body) where body is an
    Expr over the given slot Param placeholders; derivative nodes become the
    corresponding exact derivatives of the body.
    """
    if isinstance(e, (Num, Var, Param)):
        return e
    if isinstance(e, Add):
        return add(*(instantiate(t, templates) for t in e.terms))
    if isinstance(e, Mul):
        return mul(*(instantiate(f, templates) for f in e.factors))
    if isinstance(e, Pow):
        return pow_(instantiate(e.base, templates), e.exponent)
    if isinstance(e, App):
        return App(e.fn, instantiate(e.arg, templates))
    if isinstance(e, AbsApp):
        args = tuple(instantiate(a, templates) for a in e.args)
        if e.name not in templates:
            return AbsApp(e.name, e.dcounts, args)
        slots, body = templates[e.name]
        if len(slots) != len(args):
            raise ExprError(f"template arity mismatch for {e.name}")
        for k, cnt in enumerate(e.dcounts):
            for _ in range(cnt):
                body = diff_wrt(body, slots[k])
        return subst(body, dict(zip(slots, args)))
    raise ExprError(f"cannot instantiate {e!r}")
