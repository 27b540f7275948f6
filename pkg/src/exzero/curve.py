"""Elliptic curves over Q at a multiplicative prime.

Reduction data, the Tate parameter q_E recovered from the j-invariant by
Newton iteration on the integral j-series (computed internally from
E4**3 / Delta, no table lookups), the Tate curve coefficient series
a4(q), a6(q), the L-invariant log_p(q_E)/ord_p(q_E), the fully computable
height of the unit class, and the lambda_BK normalization formula.

The split/nonsplit test is the quadratic-residue criterion on -c6, valid
for p > 3; smaller primes are rejected at the gate.  Models must already
be minimal at the working prime (v_p(Delta) < 12 or v_p(c4) < 4).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .padic import PadicNumber, PadicError, padic_log, _val_int


class CurveError(ValueError):
    """Invalid curve input or an operation outside its precondition."""


@dataclass(frozen=True)
class EllipticCurveQ:
    """Integral Weierstrass model with the standard derived quantities."""
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    @property
    def b2(self):
        return self.a1 ** 2 + 4 * self.a2

    @property
    def b4(self):
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self):
        return self.a3 ** 2 + 4 * self.a6

    @property
    def b8(self):
        return (self.a1 ** 2 * self.a6 + 4 * self.a2 * self.a6
                - self.a1 * self.a3 * self.a4 + self.a2 * self.a3 ** 2
                - self.a4 ** 2)

    @property
    def c4(self):
        return self.b2 ** 2 - 24 * self.b4

    @property
    def c6(self):
        return -self.b2 ** 3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @property
    def discriminant(self):
        return (-self.b2 ** 2 * self.b8 - 8 * self.b4 ** 3
                - 27 * self.b6 ** 2 + 9 * self.b2 * self.b4 * self.b6)

    @property
    def j_invariant(self) -> Fraction:
        return Fraction(self.c4 ** 3, self.discriminant)

    def __post_init__(self):
        if self.discriminant == 0:
            raise CurveError("singular model: discriminant is zero")
        if self.c4 ** 3 - self.c6 ** 2 != 1728 * self.discriminant:
            raise CurveError("inconsistent invariants")  # cannot happen for integer input

    def is_minimal_at(self, p: int) -> bool:
        """p-minimality test for p > 3."""
        return _valuation(self.discriminant, p) < 12 or _valuation(self.c4, p) < 4

    def ainvs(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)


_INF = 10 ** 9  # stands in for +infinity (valuation of 0)


def _valuation(n: int, p: int) -> int:
    if n == 0:
        return _INF
    return 0 if n % p else _val_int(n, p)


def count_points(E: EllipticCurveQ, p: int) -> int:
    """#E(F_p) for a prime p > 3 of good reduction (or of the reduced cubic)."""
    # complete the square: y^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    b2, b4, b6 = E.b2 % p, E.b4 % p, E.b6 % p
    cnt = 1
    for x in range(p):
        rhs = (4 * x * x * x + b2 * x * x + 2 * b4 * x + b6) % p
        if rhs == 0:
            cnt += 1
        elif pow(rhs, (p - 1) // 2, p) == 1:
            cnt += 2
    return cnt


@dataclass(frozen=True)
class ReductionData:
    p: int
    kind: str             # good | split_multiplicative | nonsplit_multiplicative | additive
    v_disc: int
    v_c4: int
    v_j: int
    a_p: int


def reduction_type(E: EllipticCurveQ, p: int) -> ReductionData:
    """Classify the reduction of E at p > 3 and compute a_p."""
    if p <= 3:
        raise CurveError(f"p = {p} <= 3 is outside scope (p > 3 required)")
    if not E.is_minimal_at(p):
        raise CurveError(f"model is not minimal at {p}")
    vd = _valuation(E.discriminant, p)
    vc4 = _valuation(E.c4, p)
    j = E.j_invariant
    vj = _valuation(j.numerator, p) - _valuation(j.denominator, p)
    if vd == 0:
        return ReductionData(p, "good", vd, vc4, vj, p + 1 - count_points(E, p))
    if vc4 == 0:
        # node; split iff the tangent slopes are rational iff -c6 is a QR mod p
        mc6 = -E.c6 % p
        if mc6 == 0:
            raise CurveError("unexpected: c6 divisible by p at a multiplicative prime")
        split = pow(mc6, (p - 1) // 2, p) == 1
        kind = "split_multiplicative" if split else "nonsplit_multiplicative"
        return ReductionData(p, kind, vd, vc4, vj, 1 if split else -1)
    return ReductionData(p, "additive", vd, vc4, vj, 0)


# ----------------------------------------------------------------------
# integral q-expansions: sigma series, E4, E6, Delta, j


def _series_mul(a, b, K):
    out = [0] * K
    for i, x in enumerate(a):
        if x:
            for j in range(min(len(b), K - i)):
                if b[j]:
                    out[i + j] += x * b[j]
    return out


def _series_inv_unit(a, K):
    """Inverse of a series with a[0] = +-1; exact integer recurrence."""
    inv = [0] * K
    inv[0] = a[0]
    for n in range(1, K):
        s = sum(a[k] * inv[n - k] for k in range(1, min(n, len(a) - 1) + 1))
        inv[n] = -a[0] * s
    return inv


@lru_cache(maxsize=None)
def _sigma_series(k: int, K: int):
    """[0, sigma_k(1), ..., sigma_k(K-1)]"""
    out = [0] * K
    for d in range(1, K):
        dk = d ** k
        for m in range(d, K, d):
            out[m] += dk
    return tuple(out)


@lru_cache(maxsize=None)
def j_series_int(K: int):
    """Integer coefficients of q*j(q) = 1 + 744 q + 196884 q^2 + ...

    Built from E4(q)**3 / Delta(q) with Delta = (E4**3 - E6**2)/1728.
    """
    e4 = [1] + [240 * s for s in _sigma_series(3, K)[1:]]
    e6 = [1] + [-504 * s for s in _sigma_series(5, K)[1:]]
    e4_3 = _series_mul(_series_mul(e4, e4, K), e4, K)
    e6_2 = _series_mul(e6, e6, K)
    delta = [(a - b) for a, b in zip(e4_3, e6_2)]
    assert delta[0] == 0
    assert all(c % 1728 == 0 for c in delta)
    dq = [c // 1728 for c in delta[1:]] + [0]  # Delta / q, unit series
    return tuple(_series_mul(e4_3, _series_inv_unit(dq, K), K))


@dataclass(frozen=True)
class TateData:
    p: int
    q: PadicNumber
    ord_q: int
    u: PadicNumber
    l_invariant: PadicNumber


def tate_parameter(E: EllipticCurveQ, p: int, prec: int) -> TateData:
    """Tate parameter q_E with j(q_E) = j(E) mod p**prec, by Newton iteration.

    Requires multiplicative reduction, so v_p(j) = -ord_p(q_E) < 0.  The
    L-invariant log_p(q_E)/ord_p(q_E) is computed under the log_p(p) = 0
    branch; an apparent zero of log_p(q_E) escalates the precision a few
    times before being treated as an error (Saint-Etienne: it never is 0).
    """
    red = reduction_type(E, p)
    if red.kind not in ("split_multiplicative", "nonsplit_multiplicative"):
        raise CurveError(f"reduction at {p} is {red.kind}, not multiplicative")
    m = -red.v_j
    if m <= 0:
        raise CurveError("v_p(j) >= 0 at a multiplicative prime; invalid input")
    for attempt in range(4):
        M = prec + 4 * attempt
        W = M + m
        mod = p ** W
        j = E.j_invariant
        # j_tilde = j * p^m is a p-unit rational
        num, den = j.numerator, j.denominator
        vd = _valuation(den, p)
        if vd != m or _valuation(num, p) != 0:
            raise CurveError("inconsistent j valuation")
        j_t = num * pow(den // p ** m, -1, mod) % mod
        K = W // m + 2
        h = j_series_int(K)
        hm = [h[k] * pow(p, k * m, mod) % mod for k in range(K)]

        def G(u):
            acc = -j_t * u
            uk = 1
            for k in range(K):
                if hm[k]:
                    acc += hm[k] * uk
                uk = uk * u % mod
            return acc % mod

        def Gp(u):
            acc = -j_t
            uk = 1
            for k in range(1, K):
                if hm[k]:
                    acc += k * hm[k] * uk
                uk = uk * u % mod
            return acc % mod

        u = pow(j_t, -1, mod)
        for _ in range(W.bit_length() + 4):
            g = G(u)
            if g == 0:
                break
            u = (u - g * pow(Gp(u), -1, mod)) % mod
        if G(u) != 0:
            raise CurveError("Newton iteration for the Tate parameter did not converge")
        q = PadicNumber(p, m, u, m + M)
        u_E = PadicNumber(p, 0, u, M)
        logq = padic_log(q)
        if not logq.is_zero():
            l_inv = logq / PadicNumber.from_int(m, p, logq.prec + _valuation(m, p))
            return TateData(p=p, q=q, ord_q=m, u=u_E, l_invariant=l_inv)
    raise CurveError(
        "log_p(q_E) appears to vanish even after precision escalation; "
        "this contradicts the Saint-Etienne nonvanishing and signals a bug")


def evaluate_j(q: PadicNumber, prec: int) -> PadicNumber:
    """j(q) = (1/q)(1 + 744 q + ...) to absolute precision prec; needs v(q) > 0."""
    if q.is_zero() or q.valuation() <= 0:
        raise CurveError("evaluate_j needs ord_p(q) > 0")
    p, m = q.p, q.valuation()
    W = prec + m
    mod = p ** W
    K = W // m + 2
    h = j_series_int(K)
    qi = q.residue(min(W, q.prec))
    acc, qk = 0, 1
    for k in range(K):
        acc = (acc + h[k] * qk) % mod
        qk = qk * qi % mod
    return PadicNumber.from_int(acc, p, min(W, q.prec)) / q


def tate_series(q: PadicNumber, prec: int):
    """Tate curve coefficients (a4(q), a6(q)) to absolute precision prec.

    a4 = -5 s_3(q), a6 = -(5 s_3(q) + 7 s_5(q))/12 with
    s_k(q) = sum_n sigma_k(n) q^n.  The j-invariant of
    y^2 + xy = x^3 + a4 x + a6 reproduces the j-series at q, which is the
    round-trip that validates this normalization.
    """
    if q.is_zero():
        return PadicNumber.zero(q.p, prec), PadicNumber.zero(q.p, prec)
    if q.valuation() <= 0:
        raise CurveError("tate_series needs ord_p(q) > 0")
    p, m = q.p, q.valuation()
    mod = p ** prec
    K = prec // m + 2
    qi = q.residue(min(prec, q.prec))
    s3 = _sigma_series(3, K)
    s5 = _sigma_series(5, K)
    acc3 = acc5 = 0
    qk = qi
    for n in range(1, K):
        acc3 = (acc3 + s3[n] * qk) % mod
        acc5 = (acc5 + s5[n] * qk) % mod
        qk = qk * qi % mod
    a4 = -5 * acc3 % mod
    a6 = (-(5 * acc3 + 7 * acc5) % mod) * pow(12, -1, mod) % mod
    out_prec = min(prec, q.prec)
    return (PadicNumber.from_int(a4, p, out_prec),
            PadicNumber.from_int(a6, p, out_prec))


def height_unit_class(E: EllipticCurveQ, p: int, prec: int) -> PadicNumber:
    """Nekovar height of the unit class: E_p(1)^{-1} log_p(u_E), E_p(1) = 1 - 1/p.

    Requires split multiplicative reduction; the one fully computable height.
    """
    red = reduction_type(E, p)
    if red.kind != "split_multiplicative":
        raise CurveError("height of the unit class needs split multiplicative reduction")
    td = tate_parameter(E, p, prec)
    log_u = padic_log(td.u)
    euler = PadicNumber.from_fraction(Fraction(p - 1, p), p, prec + 2)
    return log_u / euler


@dataclass(frozen=True)
class LambdaBKResult:
    value: PadicNumber
    criterion: PadicNumber      # h * ord_p(q_E) - alpha^2 * L
    regulator: PadicNumber      # (h/alpha^2) * log_p(q_E) - L^2
    vanishes: bool              # value indistinguishable from 0 at precision


def lambda_bk(ord_c0: int, alpha: PadicNumber, h: PadicNumber,
              E: EllipticCurveQ, p: int, prec: int) -> LambdaBKResult:
    """The normalization factor ord(C_0) * (1/alpha - (alpha/h) * L/ord(q_E)).

    Also evaluates the equivalent vanishing criteria:
    value = 0  iff  h*ord_p(q_E) = alpha^2 * L  iff  the 2x2 regulator
    (h/alpha^2) * log_p(q_E) - L^2 vanishes (log_p(q_E) = E_p(1) * height of
    the unit class, nonzero by Saint-Etienne).
    """
    if alpha.is_zero():
        raise CurveError("alpha = 0 at working precision")
    if h.is_zero():
        raise CurveError("height input h = 0 at working precision")
    td = tate_parameter(E, p, prec)
    L = td.l_invariant
    ordq = PadicNumber.from_int(td.ord_q, p, prec + 4)
    one = PadicNumber.one(p, prec + 4)
    value = PadicNumber.from_int(ord_c0, p, prec + 4) * \
        (one / alpha - (alpha / h) * (L / ordq))
    criterion = h * ordq - alpha * alpha * L
    log_q = padic_log(td.q)
    regulator = (h / (alpha * alpha)) * log_q - L * L
    return LambdaBKResult(value=value, criterion=criterion,
                          regulator=regulator, vanishes=value.is_zero())
