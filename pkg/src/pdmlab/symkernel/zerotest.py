"""Two-tier zero certification and seeded numeric evaluation.

Tier 1 (symbolic): an expression whose canonical form is the literal zero
node is proved zero exactly; for expressions linear in abstract-derivative
symbols this happens coefficient-wise by construction of the normal form.

Tier 2 (numeric): seeded random sampling of coordinates, parameters and
abstract-derivative symbols, with a scale-relative tolerance.  Sampling is
deterministic given (seed, label), so parallel verification stays
reproducible.
"""

from __future__ import annotations

import cmath
import hashlib
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .expr import (
    AbsApp,
    Add,
    App,
    Expr,
    Mul,
    Num,
    Param,
    Pow,
    Var,
    abstract_symbols,
    free_params,
)
from .ratform import normalize, raw_form
from .sexpr import to_sexpr

DEFAULT_SEED = 271828


class EvalDomainError(ArithmeticError):
    """Evaluation hit a pole or domain boundary; carries the subtree."""

    def __init__(self, subtree: Expr, reason: str):
        super().__init__(f"{reason} in {to_sexpr(subtree)}")
        self.subtree = subtree
        self.reason = reason


@dataclass(frozen=True)
class ZeroTestPolicy:
    """Sampling policy for the numeric tier.

    Coordinates are rationals from [-2,-0.1] u [0.1,2] (denominator 1024),
    avoiding the singular loci r=0, r~=0, x1=0 of the catalog; parameters
    and abstract-derivative symbols are drawn from [0.3, 1.7].
    """

    points: int = 50
    tol: float = 1e-9
    coord_low: Fraction = Fraction(1, 10)
    coord_high: Fraction = Fraction(2)
    param_low: Fraction = Fraction(3, 10)
    param_high: Fraction = Fraction(17, 10)
    seed: int = DEFAULT_SEED
    max_attempt_factor: int = 20

    def rng(self, label: str = "") -> random.Random:
        digest = hashlib.sha256(f"{self.seed}|{label}".encode()).digest()
        return random.Random(int.from_bytes(digest[:8], "big"))

    def sample_coord(self, rng: random.Random) -> Fraction:
        lo = int(self.coord_low * 1024)
        hi = int(self.coord_high * 1024)
        mag = Fraction(rng.randint(lo, hi), 1024)
        return mag if rng.random() < 0.5 else -mag

    def sample_param(self, rng: random.Random) -> Fraction:
        lo = int(self.param_low * 1024)
        hi = int(self.param_high * 1024)
        return Fraction(rng.randint(lo, hi), 1024)


DEFAULT_POLICY = ZeroTestPolicy()


# -- zero statuses -----------------------------------------------------------


@dataclass(frozen=True)
class ProvedZero:
    tier = "symbolic"

    @property
    def is_zero(self) -> bool:
        return True


@dataclass(frozen=True)
class NumericZero:
    points_tested: int
    max_residual: float
    tier = "numeric"

    @property
    def is_zero(self) -> bool:
        return True


@dataclass(frozen=True)
class NonZero:
    witness: dict
    value: complex
    tier = "numeric"

    @property
    def is_zero(self) -> bool:
        return False


@dataclass(frozen=True)
class Inconclusive:
    reason: str
    tier = "none"

    @property
    def is_zero(self) -> bool:
        return False


# -- evaluation ---------------------------------------------------------------


class _Scale:
    __slots__ = ("value",)

    def __init__(self):
        self.value = 0.0

    def feed(self, v: complex) -> complex:
        a = abs(v)
        if a > self.value:
            self.value = a
        return v


def _eval(e: Expr, point, params, absvals, scale: _Scale) -> complex:
    if isinstance(e, Num):
        return scale.feed(complex(e.val))
    if isinstance(e, Var):
        return scale.feed(complex(point[e.axis - 1]))
    if isinstance(e, Param):
        try:
            return scale.feed(complex(params[e.name]))
        except KeyError:
            raise EvalDomainError(e, f"unassigned parameter {e.name}")
    if isinstance(e, Add):
        return scale.feed(sum(_eval(t, point, params, absvals, scale) for t in e.terms))
    if isinstance(e, Mul):
        out = 1 + 0j
        for f in e.factors:
            out *= _eval(f, point, params, absvals, scale)
        return scale.feed(out)
    if isinstance(e, Pow):
        b = _eval(e.base, point, params, absvals, scale)
        q = e.exponent
        if q.denominator == 1:
            if b == 0 and q < 0:
                raise EvalDomainError(e, "division by zero")
            return scale.feed(b ** q.numerator)
        if b == 0:
            if q < 0:
                raise EvalDomainError(e, "division by zero")
            return scale.feed(0j)
        if b.imag == 0 and b.real < 0:
            raise EvalDomainError(e, "fractional power of a negative value")
        return scale.feed(b ** float(q))
    if isinstance(e, App):
        a = _eval(e.arg, point, params, absvals, scale)
        if e.fn == "exp":
            if a.real > 700:
                raise EvalDomainError(e, "exp overflow")
            return scale.feed(cmath.exp(a))
        if e.fn == "ln":
            if a == 0 or (a.imag == 0 and a.real <= 0):
                raise EvalDomainError(e, "ln of a non-positive value")
            return scale.feed(cmath.log(a))
        if e.fn == "arctan":
            if a.imag == 0:
                return scale.feed(complex(math.atan(a.real)))
            return scale.feed(cmath.atan(a))
        if e.fn == "sin":
            return scale.feed(cmath.sin(a))
        return scale.feed(cmath.cos(a))
    if isinstance(e, AbsApp):
        for u in e.args:
            _eval(u, point, params, absvals, scale)
        try:
            return scale.feed(complex(absvals[e.symbol]))
        except KeyError:
            raise EvalDomainError(e, f"unassigned abstract symbol {e.symbol}")
    raise TypeError(f"cannot evaluate {type(e).__name__}")


def evaluate(e: Expr, point, params=None, abstract_values=None):
    """Double-precision value of e at a spatial point.

    Evaluation order is fixed by the normalized tree.  Returns a float when
    the result is real, otherwise a complex value.  Raises EvalDomainError
    at poles (division by zero, ln of a non-positive value, ...).
    """
    v, _ = evaluate_with_scale(e, point, params, abstract_values)
    return v


def evaluate_with_scale(e: Expr, point, params=None, abstract_values=None):
    ne = normalize(e)
    scale = _Scale()
    v = _eval(ne, tuple(float(c) for c in point), params or {}, abstract_values or {}, scale)
    if v.imag == 0:
        v = v.real
    return v, scale.value


def _assignment(e_params, e_abstract, policy: ZeroTestPolicy, rng: random.Random):
    point = tuple(policy.sample_coord(rng) for _ in range(3))
    params = {name: float(policy.sample_param(rng)) for name in sorted(e_params)}
    absvals = {sym: float(policy.sample_param(rng)) for sym in sorted(e_abstract)}
    return point, params, absvals


def numeric_sample(e: Expr, policy: ZeroTestPolicy = DEFAULT_POLICY, label: str = "",
                   normalize_first: bool = True):
    """Force the numeric tier: returns NumericZero, NonZero or Inconclusive.

    normalize_first=False evaluates the tree exactly as given, so all
    cancellation happens in floating point; used to confirm symbolically
    proved identities on an independent route.
    """
    ne = raw_form(e)[1] if normalize_first else e
    names = free_params(ne)
    symbols = abstract_symbols(ne)
    rng = policy.rng(label)
    tested = 0
    max_rel = 0.0
    worst = None  # (relative residual, witness, value)
    attempts = 0
    while tested < policy.points and attempts < policy.points * policy.max_attempt_factor:
        attempts += 1
        point, params, absvals = _assignment(names, symbols, policy, rng)
        scale = _Scale()
        try:
            v = _eval(ne, tuple(float(c) for c in point), params, absvals, scale)
        except EvalDomainError:
            continue
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            continue
        tested += 1
        rel = abs(v) / (1.0 + scale.value)
        if rel > max_rel:
            max_rel = rel
            witness = {"point": tuple(str(c) for c in point)}
            if params:
                witness["params"] = params
            if absvals:
                witness["abstract"] = absvals
            worst = (rel, witness, v)
    if tested == 0:
        return Inconclusive("no sample point was evaluable; resample with another policy")
    if max_rel > policy.tol:
        return NonZero(witness=worst[1], value=worst[2])
    return NumericZero(points_tested=tested, max_residual=max_rel)


def is_zero(e: Expr, policy: ZeroTestPolicy = DEFAULT_POLICY, label: str = ""):
    """Certify e == 0: exact when normalization reaches the zero node,
    probabilistic otherwise."""
    proved, tree = raw_form(e)
    if proved:
        return ProvedZero()
    return numeric_sample(tree, policy, label, normalize_first=False)
