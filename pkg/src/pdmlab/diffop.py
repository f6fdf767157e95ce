"""First- and second-order differential operators on 3-space.

Conventions: a first-order operator is Q = -i(xi^a d_a + eta); a
second-order operator is A^{ab} d_a d_b + B^a d_a + C with A symmetric.
Hamiltonians are H = p_a f p_a - V = -(d_a f d_a) - V, i.e. A = -f*delta,
B = -grad f, C = -V.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .symkernel import (
    AbstractFn,
    Expr,
    IMAG,
    as_expr,
    diff,
    grad,
    is_provably_zero,
    mul,
    normalize,
    num,
    x1,
    x2,
    x3,
)
from .symkernel.expr import NUM_ZERO, Num, add
from .symkernel.ratform import rf_canon, to_rf

AXES = (1, 2, 3)
MINUS_I = num(0, -1)


def _e3(x):
    return tuple(as_expr(v) for v in x)


@dataclass(frozen=True)
class FirstOrderOp:
    """Q = -i(xi^a d_a + eta)."""

    xi: tuple
    eta: Expr

    def __post_init__(self):
        object.__setattr__(self, "xi", _e3(self.xi))
        object.__setattr__(self, "eta", as_expr(self.eta))

    def __add__(self, other: "FirstOrderOp") -> "FirstOrderOp":
        return FirstOrderOp(
            tuple(a + b for a, b in zip(self.xi, other.xi)), self.eta + other.eta
        )

    def __sub__(self, other: "FirstOrderOp") -> "FirstOrderOp":
        return self + other.scale(-1)

    def scale(self, c) -> "FirstOrderOp":
        c = as_expr(c)
        return FirstOrderOp(tuple(mul(c, x) for x in self.xi), mul(c, self.eta))

    def __neg__(self) -> "FirstOrderOp":
        return self.scale(-1)

    def normalized(self) -> "FirstOrderOp":
        return FirstOrderOp(tuple(normalize(x) for x in self.xi), normalize(self.eta))

    def is_zero(self) -> bool:
        return all(is_provably_zero(x) for x in self.xi) and is_provably_zero(self.eta)

    def eta_tilde(self) -> Expr:
        """The symmetrized-form constant: eta = (1/2) d_a xi^a + i*eta_tilde."""
        div = add(*(diff(self.xi[a - 1], a) for a in AXES))
        return normalize(MINUS_I * (self.eta - Fraction(1, 2) * div))


ZERO_FIRST_ORDER = FirstOrderOp((NUM_ZERO, NUM_ZERO, NUM_ZERO), NUM_ZERO)


@dataclass(frozen=True)
class SecondOrderOp:
    """A^{ab} d_a d_b + B^a d_a + C with A stored symmetric."""

    A: tuple  # 3x3 nested tuple, A[a][b] == A[b][a]
    B: tuple
    C: Expr

    def __post_init__(self):
        A = tuple(tuple(as_expr(v) for v in row) for row in self.A)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", _e3(self.B))
        object.__setattr__(self, "C", as_expr(self.C))

    def slots(self):
        """The ten coefficient slots: 6 upper-triangle A, 3 B, 1 C."""
        out = []
        for a in range(3):
            for b in range(a, 3):
                out.append(((a + 1, b + 1), self.A[a][b]))
        for a in range(3):
            out.append(((a + 1,), self.B[a]))
        out.append(((), self.C))
        return out

    def __add__(self, other: "SecondOrderOp") -> "SecondOrderOp":
        return SecondOrderOp(
            tuple(tuple(x + y for x, y in zip(r1, r2)) for r1, r2 in zip(self.A, other.A)),
            tuple(x + y for x, y in zip(self.B, other.B)),
            self.C + other.C,
        )

    def __sub__(self, other: "SecondOrderOp") -> "SecondOrderOp":
        return self + other.scale(-1)

    def scale(self, c) -> "SecondOrderOp":
        c = as_expr(c)
        return SecondOrderOp(
            tuple(tuple(mul(c, v) for v in row) for row in self.A),
            tuple(mul(c, v) for v in self.B),
            mul(c, self.C),
        )

    def shift(self, c) -> "SecondOrderOp":
        """Add a multiple of the identity (c acts as multiplication)."""
        return SecondOrderOp(self.A, self.B, self.C + as_expr(c))

    def normalized(self) -> "SecondOrderOp":
        return SecondOrderOp(
            tuple(tuple(normalize(v) for v in row) for row in self.A),
            tuple(normalize(v) for v in self.B),
            normalize(self.C),
        )

    def is_zero(self) -> bool:
        return all(is_provably_zero(v) for _, v in self.slots())


def second_order_zero() -> SecondOrderOp:
    z = NUM_ZERO
    return SecondOrderOp(((z, z, z), (z, z, z), (z, z, z)), (z, z, z), z)


def op_equal(a, b) -> bool:
    return (a - b).is_zero()


@dataclass(frozen=True)
class PDMHamiltonian:
    """H = p_a f p_a - V with f = 1/(2m) the inverse-mass profile."""

    f: Expr
    V: Expr

    def __post_init__(self):
        object.__setattr__(self, "f", as_expr(self.f))
        object.__setattr__(self, "V", as_expr(self.V))


@dataclass(frozen=True)
class KillingParams:
    """Parameters of the general 3d conformal Killing vector.

    xi^a = lam^a r^2 - 2 x^a (lam.x) + rotation(mu_rot) + omega x^a + nu^a,
    eta  = -3 lam.x + (3/2) omega + i c0.

    The rotation term uses eps_{cba} mu_c x_b, so the induced operator equals
    lam.K + mu.J + omega D + nu.P + c0 exactly in the P/J/D/K realization.
    """

    lam: tuple = (0, 0, 0)
    mu_rot: tuple = (0, 0, 0)
    omega: object = 0
    nu: tuple = (0, 0, 0)
    c0: object = 0

    def __post_init__(self):
        object.__setattr__(self, "lam", _e3(self.lam))
        object.__setattr__(self, "mu_rot", _e3(self.mu_rot))
        object.__setattr__(self, "omega", as_expr(self.omega))
        object.__setattr__(self, "nu", _e3(self.nu))
        object.__setattr__(self, "c0", as_expr(self.c0))


_EPS = {}
for _perm, _sgn in ((("123"), 1), (("231"), 1), (("312"), 1), (("132"), -1), (("213"), -1), (("321"), -1)):
    _EPS[tuple(int(ch) for ch in _perm)] = _sgn


def eps(a: int, b: int, c: int) -> int:
    return _EPS.get((a, b, c), 0)


R2 = x1 * x1 + x2 * x2 + x3 * x3
X = (x1, x2, x3)


def killing_to_op(p: KillingParams) -> FirstOrderOp:
    lam_dot_x = add(*(mul(p.lam[i], X[i]) for i in range(3)))
    xi = []
    for a in range(3):
        comp = mul(p.lam[a], R2) - 2 * X[a] * lam_dot_x + mul(p.omega, X[a]) + p.nu[a]
        for c in range(3):
            for b in range(3):
                s = eps(c + 1, b + 1, a + 1)
                if s:
                    comp = comp + mul(Num(s), p.mu_rot[c], X[b])
        xi.append(comp)
    eta = -3 * lam_dot_x + Fraction(3, 2) * p.omega + IMAG * p.c0
    return FirstOrderOp(tuple(xi), eta)


def conformal_killing_residuals(q: FirstOrderOp):
    """Residuals xi^b_a + xi^a_b - (2/3) delta_ab div(xi) for a <= b."""
    div = add(*(diff(q.xi[i], i + 1) for i in range(3)))
    out = []
    for a in range(3):
        for b in range(a, 3):
            r = diff(q.xi[b], a + 1) + diff(q.xi[a], b + 1)
            if a == b:
                r = r - Fraction(2, 3) * div
            out.append(r)
    return out


def hamiltonian_to_op(h: PDMHamiltonian) -> SecondOrderOp:
    f, V = h.f, h.V
    z = NUM_ZERO
    A = (
        (mul(-1, f), z, z),
        (z, mul(-1, f), z),
        (z, z, mul(-1, f)),
    )
    B = tuple(mul(-1, diff(f, a)) for a in AXES)
    return SecondOrderOp(A, B, mul(-1, V))


# ---------------------------------------------------------------------------
# products and commutators
# ---------------------------------------------------------------------------


def compose_first_order(q1: FirstOrderOp, q2: FirstOrderOp) -> SecondOrderOp:
    """Exact operator product q1*q2 as a second-order operator."""
    xi, eta = q1.xi, q1.eta
    zeta, theta = q2.xi, q2.eta
    # q1*q2 = -(xi^a zeta^b dadb + (xi^a zeta^b_a + eta zeta^b + xi^b theta) db
    #          + xi^a theta_a + eta*theta)
    A = [[None] * 3 for _ in range(3)]
    for a in range(3):
        for b in range(3):
            A[a][b] = mul(Fraction(-1, 2), xi[a] * zeta[b] + xi[b] * zeta[a])
    B = []
    for b in range(3):
        fl = add(*(mul(xi[a], diff(zeta[b], a + 1)) for a in range(3)))
        B.append(mul(-1, fl + eta * zeta[b] + xi[b] * theta))
    C = mul(-1, add(*(mul(xi[a], diff(theta, a + 1)) for a in range(3))) + eta * theta)
    return SecondOrderOp(tuple(tuple(r) for r in A), tuple(B), C)


def commute_qq(q1: FirstOrderOp, q2: FirstOrderOp) -> FirstOrderOp:
    """Exact commutator [q1, q2], again in the -i(xi d + eta) convention."""
    xi, eta = q1.xi, q1.eta
    zeta, theta = q2.xi, q2.eta
    new_xi = []
    for b in range(3):
        flow = add(
            *(mul(xi[a], diff(zeta[b], a + 1)) - mul(zeta[a], diff(xi[b], a + 1)) for a in range(3))
        )
        new_xi.append(normalize(mul(MINUS_I, flow)))
    s = add(*(mul(xi[a], diff(theta, a + 1)) - mul(zeta[a], diff(eta, a + 1)) for a in range(3)))
    return FirstOrderOp(tuple(new_xi), normalize(mul(MINUS_I, s)))


def _compose_2_1(H: SecondOrderOp, xih: tuple, etah: Expr):
    """Coefficients of H * (xih^c d_c + etah), split by derivative order."""
    T3: dict = {}
    T2: dict = {}
    T1: dict = {}
    T0 = NUM_ZERO
    A, B, C = H.A, H.B, H.C
    for a in range(3):
        for b in range(3):
            Aab = A[a][b]
            if Aab == NUM_ZERO:
                continue
            for c in range(3):
                key3 = tuple(sorted((a, b, c)))
                T3[key3] = T3.get(key3, NUM_ZERO) + Aab * xih[c]
                k2 = tuple(sorted((a, c)))
                T2[k2] = T2.get(k2, NUM_ZERO) + Aab * diff(xih[c], b + 1)
                k2 = tuple(sorted((b, c)))
                T2[k2] = T2.get(k2, NUM_ZERO) + Aab * diff(xih[c], a + 1)
                T1[(c,)] = T1.get((c,), NUM_ZERO) + Aab * diff(diff(xih[c], a + 1), b + 1)
            k2 = tuple(sorted((a, b)))
            T2[k2] = T2.get(k2, NUM_ZERO) + Aab * etah
            T1[(a,)] = T1.get((a,), NUM_ZERO) + Aab * diff(etah, b + 1)
            T1[(b,)] = T1.get((b,), NUM_ZERO) + Aab * diff(etah, a + 1)
            T0 = T0 + Aab * diff(diff(etah, a + 1), b + 1)
    for a in range(3):
        Ba = B[a]
        if Ba == NUM_ZERO:
            continue
        for c in range(3):
            k2 = tuple(sorted((a, c)))
            T2[k2] = T2.get(k2, NUM_ZERO) + Ba * xih[c]
            T1[(c,)] = T1.get((c,), NUM_ZERO) + Ba * diff(xih[c], a + 1)
        T1[(a,)] = T1.get((a,), NUM_ZERO) + Ba * etah
        T0 = T0 + Ba * diff(etah, a + 1)
    for c in range(3):
        T1[(c,)] = T1.get((c,), NUM_ZERO) + C * xih[c]
    T0 = T0 + C * etah
    return T3, T2, T1, T0


def _compose_1_2(xih: tuple, etah: Expr, H: SecondOrderOp):
    """Coefficients of (xih^c d_c + etah) * H, split by derivative order."""
    T3: dict = {}
    T2: dict = {}
    T1: dict = {}
    T0 = NUM_ZERO
    A, B, C = H.A, H.B, H.C
    for c in range(3):
        xc = xih[c]
        if xc == NUM_ZERO:
            continue
        for a in range(3):
            for b in range(3):
                Aab = A[a][b]
                if Aab == NUM_ZERO:
                    continue
                key3 = tuple(sorted((a, b, c)))
                T3[key3] = T3.get(key3, NUM_ZERO) + xc * Aab
                k2 = tuple(sorted((a, b)))
                T2[k2] = T2.get(k2, NUM_ZERO) + xc * diff(Aab, c + 1)
            Ba = B[a]
            if Ba != NUM_ZERO:
                k2 = tuple(sorted((a, c)))
                T2[k2] = T2.get(k2, NUM_ZERO) + xc * Ba
                T1[(a,)] = T1.get((a,), NUM_ZERO) + xc * diff(Ba, c + 1)
        T1[(c,)] = T1.get((c,), NUM_ZERO) + xc * C
        T0 = T0 + xc * diff(C, c + 1)
    for a in range(3):
        for b in range(3):
            if A[a][b] != NUM_ZERO:
                k2 = tuple(sorted((a, b)))
                T2[k2] = T2.get(k2, NUM_ZERO) + etah * A[a][b]
        if B[a] != NUM_ZERO:
            T1[(a,)] = T1.get((a,), NUM_ZERO) + etah * B[a]
    T0 = T0 + etah * C
    return T3, T2, T1, T0


def _dict_sub(d1: dict, d2: dict) -> dict:
    out = dict(d1)
    for k, v in d2.items():
        out[k] = out.get(k, NUM_ZERO) - v
    return out


def commute_hq(h: PDMHamiltonian, q: FirstOrderOp) -> SecondOrderOp:
    """Exact commutator [H, Q] as a second-order operator.

    The third-order coefficients must cancel identically for this operator
    class; the cancellation is asserted, not assumed.
    """
    return commute_second_first(hamiltonian_to_op(h), q)


def commute_second_first(H: SecondOrderOp, q: FirstOrderOp) -> SecondOrderOp:
    """[S, Q] for a general second-order S and first-order Q."""
    xih = tuple(mul(MINUS_I, x) for x in q.xi)
    etah = mul(MINUS_I, q.eta)
    L3, L2, L1, L0 = _compose_2_1(H, xih, etah)
    R3, R2_, R1, R0 = _compose_1_2(xih, etah, H)
    D3 = _dict_sub(L3, R3)
    for key, v in D3.items():
        if not is_provably_zero(v):
            raise AssertionError(f"third-order coefficient {key} did not cancel: {v!r}")
    D2 = _dict_sub(L2, R2_)
    D1 = _dict_sub(L1, R1)
    D0 = L0 - R0
    # D2 keys are unordered pairs (a<=b); the symmetric-matrix entry for a<b
    # is half the raw dd coefficient
    A = [[NUM_ZERO] * 3 for _ in range(3)]
    for (a, b), v in D2.items():
        if a == b:
            A[a][a] = normalize(v)
        else:
            half = normalize(mul(Fraction(1, 2), v))
            A[a][b] = half
            A[b][a] = half
    B = [NUM_ZERO] * 3
    for (a,), v in D1.items():
        B[a] = normalize(v)
    return SecondOrderOp(tuple(tuple(r) for r in A), tuple(B), normalize(D0))


# ---------------------------------------------------------------------------
# determining equations
# ---------------------------------------------------------------------------


def abstract_setup():
    """Fully abstract f, V, xi^a, eta as functions of x."""
    f = AbstractFn("f", 3)(x1, x2, x3)
    V = AbstractFn("V", 3)(x1, x2, x3)
    xi = tuple(AbstractFn(f"xi{a}", 3)(x1, x2, x3) for a in AXES)
    eta = AbstractFn("eta", 3)(x1, x2, x3)
    return f, V, xi, eta


def extract_determining(h: PDMHamiltonian = None, q: FirstOrderOp = None):
    """The ten coefficient residuals of [H, Q] over abstract f, V, xi, eta.

    Residuals are rescaled by -i so that each is a real-coefficient
    expression; they match the classical determining system up to a nonzero
    rational factor per equation.  Returned as (second_order, first_order,
    zeroth_order) lists.
    """
    if h is None or q is None:
        f, V, xi, eta = abstract_setup()
        h = PDMHamiltonian(f, V)
        q = FirstOrderOp(xi, eta)
    comm = commute_hq(h, q)
    second = [normalize(mul(MINUS_I, comm.A[a][b])) for a in range(3) for b in range(a, 3)]
    first = [normalize(mul(MINUS_I, b)) for b in comm.B]
    zeroth = [normalize(mul(MINUS_I, comm.C))]
    return second, first, zeroth


def expected_determining():
    """Reference determining expressions built from the same abstract symbols:
    trace+traceless second-order part, first-order part, zeroth-order part."""
    f, V, xi, eta = abstract_setup()
    second = []
    div_f_flow = add(*(mul(xi[c], diff(f, c + 1)) for c in range(3)))
    for a in range(3):
        for b in range(a, 3):
            e = mul(-1, f, diff(xi[b], a + 1) + diff(xi[a], b + 1))
            if a == b:
                e = e + div_f_flow
            second.append(normalize(e))
    first = []
    for a in range(3):
        lap_xi = add(*(diff(diff(xi[a], c + 1), c + 1) for c in range(3)))
        e = (
            -add(*(mul(xi[i], diff(diff(f, a + 1), i + 1)) for i in range(3)))
            + add(*(mul(diff(f, i + 1), diff(xi[a], i + 1)) for i in range(3)))
            + f * lap_xi
            + 2 * f * diff(eta, a + 1)
        )
        first.append(normalize(e))
    lap_eta = add(*(diff(diff(eta, a), a) for a in AXES))
    zero = normalize(
        add(*(mul(diff(f, a), diff(eta, a)) for a in AXES))
        + f * lap_eta
        - add(*(mul(xi[a - 1], diff(V, a)) for a in AXES))
    )
    return second, first, [zero]


def proportional_factor(e1: Expr, e2: Expr):
    """Nonzero scalar k with e1 == k*e2 exactly, or None."""
    r1 = rf_canon(to_rf(e1))
    r2 = rf_canon(to_rf(e2))
    if r2.is_zero():
        return None
    if r1.is_zero():
        return None
    mono, c2 = next(iter(sorted(r2.num.items(), key=lambda kv: str(kv[0]))))
    c1 = r1.num.get(mono)
    if c1 is None:
        return None
    k = c1 / c2
    if is_provably_zero(e1 - mul(Num(k), e2)):
        return k
    return None


# ---------------------------------------------------------------------------
# text-record serialization (shared expression grammar)
# ---------------------------------------------------------------------------


def first_order_to_records(q: FirstOrderOp) -> str:
    """Tagged records xi1..xi3, eta in the expression text grammar."""
    from .symkernel import to_sexpr

    lines = [f"xi{a} = {to_sexpr(q.xi[a - 1])}" for a in AXES]
    lines.append(f"eta = {to_sexpr(q.eta)}")
    return "\n".join(lines) + "\n"


def second_order_to_records(s: SecondOrderOp) -> str:
    """Tagged records A11..A33 (upper triangle), B1..B3, C."""
    from .symkernel import to_sexpr

    lines = []
    for a in range(3):
        for b in range(a, 3):
            lines.append(f"A{a + 1}{b + 1} = {to_sexpr(s.A[a][b])}")
    for a in AXES:
        lines.append(f"B{a} = {to_sexpr(s.B[a - 1])}")
    lines.append(f"C = {to_sexpr(s.C)}")
    return "\n".join(lines) + "\n"


def _parse_records(text: str) -> dict:
    from .symkernel import parse_sexpr

    out = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        out[key.strip()] = parse_sexpr(value.strip())
    return out


def first_order_from_records(text: str) -> FirstOrderOp:
    rec = _parse_records(text)
    return FirstOrderOp((rec["xi1"], rec["xi2"], rec["xi3"]), rec["eta"])


def second_order_from_records(text: str) -> SecondOrderOp:
    rec = _parse_records(text)
    A = tuple(
        tuple(rec[f"A{min(a, b)}{max(a, b)}"] for b in AXES) for a in AXES
    )
    return SecondOrderOp(A, (rec["B1"], rec["B2"], rec["B3"]), rec["C"])


def reduced_determining(h: PDMHamiltonian, p: KillingParams):
    """Residuals of the two reduced determining equations for a Killing flow:
    xi.grad(f) - 2(omega - 2 lam.x) f  and  xi.grad(V) + 3 lam.grad(f).

    Returned unnormalized; zero testing decides their status.
    """
    q = killing_to_op(p)
    lam_dot_x = add(*(mul(p.lam[i], X[i]) for i in range(3)))
    r1 = add(*(mul(q.xi[a - 1], diff(h.f, a)) for a in AXES)) - 2 * (p.omega - 2 * lam_dot_x) * h.f
    r2 = add(*(mul(q.xi[a - 1], diff(h.V, a)) for a in AXES)) + 3 * add(
        *(mul(p.lam[a - 1], diff(h.f, a)) for a in AXES)
    )
    return r1, r2
