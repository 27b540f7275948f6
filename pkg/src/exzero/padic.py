"""Exact p-adic arithmetic with explicit absolute-precision tracking.

A value is stored as ``u * p**v + O(p**M)`` with ``u`` a unit reduced mod
``p**(M-v)``.  Zero-at-precision is a first-class citizen (``v is None``).
Every operation propagates precision interval-style, so a result never
claims more digits than its inputs justify.

The logarithm uses the Iwasawa branch ``log_p(p) = 0`` (and ``log_p(zeta)=0``
for roots of unity); under this branch the L-invariant ``log_p(q)/ord_p(q)``
of ``q = p**n * u`` equals ``log_p(u)/n``.

Values are immutable and all operations are pure functions, so they are safe
to share and evaluate in parallel with deterministic results.
"""
from __future__ import annotations

from fractions import Fraction


class PadicError(ValueError):
    """Domain error in p-adic arithmetic (prime mismatch, bad input, ...)."""


class PadicPrecisionError(PadicError):
    """An operation would need more precision than the inputs carry."""


def _val_int(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _floor_log(n: int, p: int) -> int:
    e = 0
    while p ** (e + 1) <= n:
        e += 1
    return e


class PadicNumber:
    """Element of Q_p known modulo p**prec.

    Fields: prime ``p``; valuation ``v`` (``None`` marks zero-at-precision);
    unit part ``unit`` reduced mod ``p**(prec-v)`` and coprime to p;
    absolute precision ``prec``, meaning the value is known mod ``p**prec``.
    """

    __slots__ = ("p", "v", "unit", "prec")

    def __init__(self, p: int, v, unit: int, prec: int):
        if p < 2:
            raise PadicError(f"invalid prime {p}")
        self.p = p
        self.prec = prec
        if v is None or v >= prec:
            self.v = None
            self.unit = 0
            return
        unit %= p ** (prec - v)
        if unit == 0:
            self.v = None
            self.unit = 0
            return
        shift = _val_int(unit, p)
        if shift:
            v += shift
            if v >= prec:
                self.v = None
                self.unit = 0
                return
            unit = unit // p ** shift % p ** (prec - v)
        self.v = v
        self.unit = unit

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def zero(cls, p: int, prec: int) -> "PadicNumber":
        return cls(p, None, 0, prec)

    @classmethod
    def one(cls, p: int, prec: int) -> "PadicNumber":
        return cls(p, 0, 1, prec)

    @classmethod
    def from_int(cls, n: int, p: int, prec: int) -> "PadicNumber":
        if n == 0:
            return cls.zero(p, prec)
        v = _val_int(n, p)
        return cls(p, v, n // p ** v, prec)

    @classmethod
    def from_fraction(cls, q, p: int, prec: int) -> "PadicNumber":
        q = Fraction(q)
        if q == 0:
            return cls.zero(p, prec)
        num, den = q.numerator, q.denominator
        v = 0
        while num % p == 0:
            num //= p
            v += 1
        while den % p == 0:
            den //= p
            v -= 1
        rel = prec - v
        if rel <= 0:
            return cls.zero(p, prec)
        unit = num * pow(den, -1, p ** rel)
        return cls(p, v, unit, prec)

    # ------------------------------------------------------------------
    # inspection

    def is_zero(self) -> bool:
        """True when the value is indistinguishable from 0 at its precision."""
        return self.v is None

    def valuation(self) -> int:
        if self.v is None:
            raise PadicPrecisionError(
                f"value is O({self.p}^{self.prec}); valuation not determined")
        return self.v

    def residue(self, k: int) -> int:
        """Canonical integer representative mod p**k; requires v >= 0."""
        if k > self.prec:
            raise PadicPrecisionError(
                f"asked mod p^{k}, value only known mod p^{self.prec}")
        if self.v is None:
            return 0
        if self.v < 0:
            raise PadicError("negative valuation has no integer residue")
        return self.unit * self.p ** self.v % self.p ** k

    def lift(self) -> Fraction:
        """The rational lift u * p**v of the known digits (0 for zero)."""
        if self.v is None:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.v

    # ------------------------------------------------------------------
    # arithmetic

    def _check(self, other: "PadicNumber"):
        if not isinstance(other, PadicNumber):
            raise TypeError(f"expected PadicNumber, got {type(other).__name__}")
        if self.p != other.p:
            raise PadicError(f"prime mismatch: {self.p} vs {other.p}")

    def __add__(self, other):
        self._check(other)
        prec = min(self.prec, other.prec)
        return PadicNumber.from_fraction(self.lift() + other.lift(), self.p, prec)

    def __neg__(self):
        if self.v is None:
            return self
        return PadicNumber(self.p, self.v, -self.unit, self.prec)

    def __sub__(self, other):
        self._check(other)
        prec = min(self.prec, other.prec)
        return PadicNumber.from_fraction(self.lift() - other.lift(), self.p, prec)

    def __mul__(self, other):
        self._check(other)
        p = self.p
        if self.v is None and other.v is None:
            return PadicNumber.zero(p, self.prec + other.prec)
        if self.v is None:
            return PadicNumber.zero(p, self.prec + other.v)
        if other.v is None:
            return PadicNumber.zero(p, other.prec + self.v)
        v = self.v + other.v
        rel = min(self.prec - self.v, other.prec - other.v)
        return PadicNumber(p, v, self.unit * other.unit, v + rel)

    def __truediv__(self, other):
        self._check(other)
        p = self.p
        if other.v is None:
            raise ZeroDivisionError(
                f"division by a value indistinguishable from zero (O({p}^{other.prec}))")
        if self.v is None:
            return PadicNumber.zero(p, self.prec - other.v)
        v = self.v - other.v
        rel = min(self.prec - self.v, other.prec - other.v)
        inv = pow(other.unit % p ** rel, -1, p ** rel)
        return PadicNumber(p, v, self.unit * inv, v + rel)

    def __eq__(self, other):
        """Equality of the known digits at the smaller precision."""
        if not isinstance(other, PadicNumber) or self.p != other.p:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        p, prec = self.p, self.prec
        if self.v is None:
            return f"O({p}^{prec})"
        return f"{self.unit} * {p}^{self.v} + O({p}^{prec})"


def arith(x: PadicNumber, y: PadicNumber, op: str) -> PadicNumber:
    """Dispatch for the four ring operations (add, sub, mul, div)."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise PadicError(f"unknown op {op!r}")


def teichmuller(a: int, p: int, prec: int) -> PadicNumber:
    """Teichmuller lift: the (p-1)-st root of unity congruent to a mod p.

    Computed by iterating a -> a**p mod p**prec to stabilization.
    """
    if a % p == 0:
        raise PadicError(f"{a} is divisible by {p}; no Teichmuller lift")
    mod = p ** prec
    x = a % mod
    for _ in range(prec + 1):
        nxt = pow(x, p, mod)
        if nxt == x:
            break
        x = nxt
    return PadicNumber(p, 0, x, prec)


def teichmuller_int(a: int, p: int, prec: int) -> int:
    """Integer representative of the Teichmuller lift mod p**prec."""
    return teichmuller(a, p, prec).unit


def _one_unit_log_int(t: int, p: int, rel: int) -> int:
    """log(1+t) mod p**rel for an integer t with v_p(t) >= 1."""
    if rel <= 0:
        return 0
    # v(t^n / n) >= n - log_p(n), so stop once that passes rel
    n_max = rel + 2
    while n_max - _floor_log(n_max, p) < rel:
        n_max += 1
    W = p ** (rel + _floor_log(n_max, p) + 1)
    t %= W
    acc = 0
    tn = 1
    for n in range(1, n_max + 1):
        tn = tn * t % W
        k = _val_int(n, p) if n % p == 0 else 0
        term = (tn // p ** k) * pow(n // p ** k, -1, W) % W
        acc = acc - term if n % 2 == 0 else acc + term
    return acc % p ** rel


def padic_log(x: PadicNumber) -> PadicNumber:
    """p-adic logarithm on Q_p^x with the branch log_p(p) = 0.

    For x = p**v * u the value is log of the 1-unit <x> = u * omega(u)^{-1};
    in particular log_p(p**k * u) = log_p(u), and roots of unity map to 0.
    The result carries the relative precision of the input (prec - v digits).
    """
    if x.v is None:
        raise PadicError("log of a value indistinguishable from zero")
    p = x.p
    rel = x.prec - x.v
    mod = p ** rel
    omega = teichmuller_int(x.unit % p, p, rel)
    one_unit = x.unit * pow(omega, -1, mod) % mod
    return PadicNumber.from_int(_one_unit_log_int(one_unit - 1, p, rel), p, rel)


def one_unit_pow(base: int, t: int, p: int, prec: int) -> int:
    """(1+pz)**t mod p**prec for a p-adic integer exponent t.

    Binomial series sum_k C(t,k) (base-1)^k with the exact integer binomial
    (falling factorial over k!); converges for any 1-unit base when p > 3.
    """
    mod = p ** prec
    x = (base - 1) % mod
    if x % p != 0:
        raise PadicError("base must be a 1-unit")
    if x == 0:
        return 1
    # v(term) >= k - v(k!) >= k(p-2)/(p-1)
    k_max = prec * (p - 1) // (p - 2) + 3
    acc = 1
    num = 1
    fact = 1
    xk = 1
    for k in range(1, k_max + 1):
        num *= t - (k - 1)
        fact *= k
        xk = xk * x % mod
        acc = (acc + (num // fact) % mod * xk) % mod
    return acc
