"""Finite-level avatar of the cyclotomic Iwasawa algebra.

Group rings ``Z/p^M [Gamma_n]`` with ``Gamma_n = Z/p^n`` cyclic on a fixed
topological generator ``gamma`` with ``rho_cyc(gamma) = 1 + p``.  Towers of
compatible group-ring elements stand in for measures on Gamma; integration
against weights, expansion along the augmentation ideal ``J = (gamma - 1)``,
division by ``gamma - 1`` and the two-sided derivative-of-measure calculus
live here.

Finite-level precision ledger (documented invariants the tests pin down):

* dividing by ``gamma - 1`` is exact but only canonical up to the norm
  element ``N_n``; the canonical solution fixes the identity coefficient to
  zero at the top level and pushes down, so level-0 quantities extracted
  from one division are determined mod ``p**n_max``;
* Riemann sums against ``log rho_cyc`` weights use the integer lift
  ``i in [0, p**n)``, well defined mod ``p**(n+1)`` because
  ``v_p(log_p(1+p)) = 1``;
* consequently the two routes to a first derivative agree mod
  ``p**min(M, n_max+1)`` -- an exact congruence, not an approximation.

Towers are immutable; integration and derivatives are order-independent
reductions in exact modular arithmetic, safe to parallelize.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .padic import PadicNumber, _one_unit_log_int, _val_int


class IwasawaError(ValueError):
    """Domain error on group-ring towers (bad level, incompatibility, ...)."""


def log_rho_gamma_int(p: int, prec: int) -> int:
    """log_p(rho_cyc(gamma)) = log_p(1+p) as an integer mod p**prec."""
    return _one_unit_log_int(p, p, prec)


def _vali(n: int, p: int, cap: int) -> int:
    """Valuation of n mod p**cap, capped at cap for n = 0."""
    n %= p ** cap
    if n == 0:
        return cap
    return _val_int(n, p)


class GroupRingElement:
    """Element of Z/p^M [Gamma_n]; coefficient index i represents gamma**i."""

    __slots__ = ("p", "level", "mod_exp", "coeffs")

    def __init__(self, p: int, level: int, mod_exp: int, coeffs: Sequence[int]):
        if level < 0 or mod_exp < 1:
            raise IwasawaError(f"bad level {level} or modulus exponent {mod_exp}")
        size = p ** level
        if len(coeffs) != size:
            raise IwasawaError(f"expected {size} coefficients, got {len(coeffs)}")
        mod = p ** mod_exp
        self.p = p
        self.level = level
        self.mod_exp = mod_exp
        self.coeffs = tuple(c % mod for c in coeffs)

    @classmethod
    def zero(cls, p: int, level: int, mod_exp: int) -> "GroupRingElement":
        return cls(p, level, mod_exp, [0] * p ** level)

    @classmethod
    def dirac(cls, p: int, level: int, mod_exp: int, index: int = 0) -> "GroupRingElement":
        c = [0] * p ** level
        c[index % p ** level] = 1
        return cls(p, level, mod_exp, c)

    @classmethod
    def norm_element(cls, p: int, level: int, mod_exp: int) -> "GroupRingElement":
        return cls(p, level, mod_exp, [1] * p ** level)

    def _check(self, other: "GroupRingElement"):
        if (self.p, self.level, self.mod_exp) != (other.p, other.level, other.mod_exp):
            raise IwasawaError("group-ring parameter mismatch")

    def __add__(self, other):
        self._check(other)
        return GroupRingElement(self.p, self.level, self.mod_exp,
                                [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._check(other)
        return GroupRingElement(self.p, self.level, self.mod_exp,
                                [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return GroupRingElement(self.p, self.level, self.mod_exp,
                                [-a for a in self.coeffs])

    def scale(self, c: int) -> "GroupRingElement":
        return GroupRingElement(self.p, self.level, self.mod_exp,
                                [c * a for a in self.coeffs])

    def shift(self, k: int) -> "GroupRingElement":
        """Multiplication by gamma**k (cyclic index shift)."""
        size = len(self.coeffs)
        k %= size
        return GroupRingElement(self.p, self.level, self.mod_exp,
                                self.coeffs[-k:] + self.coeffs[:-k] if k else self.coeffs)

    def mul_gamma_minus_1(self) -> "GroupRingElement":
        return self.shift(1) - self

    def __mul__(self, other):
        """Full convolution product; meant for small synthetic levels."""
        self._check(other)
        size = len(self.coeffs)
        mod = self.p ** self.mod_exp
        out = [0] * size
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    k = i + j
                    if k >= size:
                        k -= size
                    out[k] = (out[k] + a * b) % mod
        return GroupRingElement(self.p, self.level, self.mod_exp, out)

    def __eq__(self, other):
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return (self.p, self.level, self.mod_exp, self.coeffs) == \
            (other.p, other.level, other.mod_exp, other.coeffs)

    __hash__ = None

    def augmentation(self) -> int:
        return sum(self.coeffs) % self.p ** self.mod_exp

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def project(self) -> "GroupRingElement":
        """Pushforward along Gamma_n -> Gamma_{n-1} (sum over fibers)."""
        if self.level == 0:
            raise IwasawaError("level 0 has no further projection")
        sub = self.p ** (self.level - 1)
        out = [0] * sub
        for i, c in enumerate(self.coeffs):
            out[i % sub] += c
        return GroupRingElement(self.p, self.level - 1, self.mod_exp, out)

    def reindex(self, a: int) -> "GroupRingElement":
        """Rewrite w.r.t. the generator gamma' = gamma**a (a coprime to p)."""
        size = len(self.coeffs)
        if size == 1:
            return self
        out = [0] * size
        for j in range(size):
            out[j] = self.coeffs[j * a % size]
        return GroupRingElement(self.p, self.level, self.mod_exp, out)

    def __repr__(self):
        return (f"GroupRingElement(p={self.p}, level={self.level}, "
                f"mod=p^{self.mod_exp}, coeffs={self.coeffs[:4]}...)")


class MeasureTower:
    """Projection-compatible family of group-ring elements, levels 0..n_max."""

    __slots__ = ("p", "mod_exp", "levels")

    def __init__(self, levels: Sequence[GroupRingElement]):
        if not levels:
            raise IwasawaError("empty tower")
        p = levels[0].p
        mod_exp = levels[0].mod_exp
        for n, elt in enumerate(levels):
            if elt.p != p or elt.mod_exp != mod_exp or elt.level != n:
                raise IwasawaError(f"level {n} entry has wrong parameters")
        for n in range(len(levels) - 1, 0, -1):
            if levels[n].project() != levels[n - 1]:
                raise IwasawaError(f"tower incompatible between levels {n} and {n-1}")
        self.p = p
        self.mod_exp = mod_exp
        self.levels = tuple(levels)

    @classmethod
    def from_top(cls, top: GroupRingElement) -> "MeasureTower":
        levels = [top]
        while levels[0].level > 0:
            levels.insert(0, levels[0].project())
        return cls(levels)

    @classmethod
    def dirac(cls, p: int, mod_exp: int, n_max: int, index: int = 0) -> "MeasureTower":
        return cls.from_top(GroupRingElement.dirac(p, n_max, mod_exp, index))

    @property
    def n_max(self) -> int:
        return len(self.levels) - 1

    @property
    def top(self) -> GroupRingElement:
        return self.levels[-1]

    def level0(self) -> int:
        """The level-0 component, an element of Z/p^M."""
        return self.levels[0].coeffs[0]

    def map_levels(self, f) -> "MeasureTower":
        return MeasureTower([f(elt) for elt in self.levels])

    def __add__(self, other):
        return MeasureTower([a + b for a, b in zip(self.levels, other.levels)])

    def __sub__(self, other):
        return MeasureTower([a - b for a, b in zip(self.levels, other.levels)])

    def scale(self, c: int) -> "MeasureTower":
        return self.map_levels(lambda e: e.scale(c))

    def mul_gamma_minus_1(self) -> "MeasureTower":
        return self.map_levels(lambda e: e.mul_gamma_minus_1())

    def __eq__(self, other):
        if not isinstance(other, MeasureTower):
            return NotImplemented
        return self.levels == other.levels

    __hash__ = None


# ----------------------------------------------------------------------
# integration


@dataclass(frozen=True)
class IntegrationResult:
    value: PadicNumber
    top_sum: int
    stabilization: int  # valuation of (top sum - previous-level sum)


def integrate(tower: MeasureTower,
              weight: Callable[[int, int], int]) -> IntegrationResult:
    """Riemann sum of a weight against the tower.

    ``weight(level, index)`` gives the integer value mod p**M of the weight
    on the class gamma**index of Gamma_level.  The achieved precision is
    defined as the agreement valuation between the two deepest level sums.
    """
    p, M = tower.p, tower.mod_exp
    mod = p ** M
    sums = []
    for n in (tower.n_max - 1, tower.n_max) if tower.n_max >= 1 else (tower.n_max,):
        elt = tower.levels[n]
        s = 0
        for i, c in enumerate(elt.coeffs):
            if c:
                s += weight(n, i) * c
        sums.append(s % mod)
    top = sums[-1]
    stab = M if len(sums) == 1 else _vali(top - sums[0], p, M)
    return IntegrationResult(
        value=PadicNumber.from_int(top, p, min(M, stab) if stab < M else M),
        top_sum=top,
        stabilization=stab,
    )


def weight_one(level: int, index: int) -> int:
    return 1


def make_weight_log_rho(p: int, M: int, power: int = 1) -> Callable[[int, int], int]:
    """Weight (log_p rho_cyc)**power with the canonical lift i in [0, p**n)."""
    ell = log_rho_gamma_int(p, M)
    mod = p ** M
    def w(level, index):
        return pow(index * ell % mod, power, mod) if power != 1 else index * ell % mod
    return w


def make_weight_rho_power(s_minus_1: int, p: int, M: int) -> Callable[[int, int], int]:
    """Weight rho_cyc**(s-1): gamma**i -> (1+p)**(i*(s-1)) mod p**M.

    ``s_minus_1`` is an integer representative of s-1 in p Z_p.
    """
    from .padic import one_unit_pow
    if s_minus_1 % p != 0:
        raise IwasawaError("need v_p(s-1) >= 1 for the weight to converge cleanly")
    base = one_unit_pow(1 + p, s_minus_1, p, M)
    mod = p ** M
    def w(level, index):
        return pow(base, index, mod)
    return w


# ----------------------------------------------------------------------
# J-adic expansion and (gamma-1) division


@dataclass(frozen=True)
class JExpansion:
    """m = sum c_i (gamma-1)**i mod J**k, with per-coefficient precision."""
    order: int
    coefficients: tuple  # of PadicNumber


def _divide_gamma_minus_1_top(elt: GroupRingElement) -> GroupRingElement:
    """Solve (gamma-1) * out = elt exactly; canonical gauge out[0] = 0.

    Requires augmentation(elt) == 0.  The solution is unique up to the norm
    element; the identity-coefficient gauge pins it down.
    """
    if elt.augmentation() != 0:
        raise IwasawaError("division by gamma-1 requires augmentation zero")
    mod = elt.p ** elt.mod_exp
    size = len(elt.coeffs)
    out = [0] * size
    for i in range(1, size):
        out[i] = (out[i - 1] - elt.coeffs[i]) % mod
    return GroupRingElement(elt.p, elt.level, elt.mod_exp, out)


def _orthogonalize_norm(elt: GroupRingElement) -> GroupRingElement:
    """Remove the norm-element component exactly when that is possible.

    The division gauge is only defined up to c * N_n, which shifts the
    augmentation by c * p**n.  When the augmentation is divisible by p**n
    (always the case for the quotient of a genuine J^2 tower) the multiple
    is subtracted so the result has augmentation exactly zero; otherwise
    the identity-coefficient gauge is kept unchanged.
    """
    aug = elt.augmentation()
    if aug == 0:
        return elt
    size = len(elt.coeffs)
    # require one extra digit of divisibility so the removed multiple c*N_n
    # has v_p(c) >= 1, keeping level-0 values stable mod p**(n+1)
    trigger = min(size * elt.p, elt.p ** elt.mod_exp)
    if elt.level >= elt.mod_exp or aug % trigger != 0:
        return elt
    return elt - GroupRingElement.norm_element(elt.p, elt.level, elt.mod_exp).scale(aug // size)


def divide_gamma_minus_1(tower: MeasureTower) -> MeasureTower:
    """The normalized division of Lemma-2.7 type.

    Returns m' with ((gamma-1)/log_p rho_cyc(gamma)) * m' = m at every
    level, i.e. solves (gamma-1) m' = log_p(1+p) * m exactly.  Canonical
    solution: zero component along the norm element whenever exactly
    achievable (identity-coefficient gauge otherwise), lower levels by
    pushforward so projection compatibility is automatic.
    """
    for elt in tower.levels:
        if elt.augmentation() != 0:
            raise IwasawaError("tower has nonzero augmentation; cannot divide")
    ell = log_rho_gamma_int(tower.p, tower.mod_exp)
    top = _orthogonalize_norm(_divide_gamma_minus_1_top(tower.top.scale(ell)))
    return MeasureTower.from_top(top)


def j_expand(tower: MeasureTower, k: int) -> JExpansion:
    """First k coefficients of m = sum c_i (gamma-1)**i mod J**k.

    c_0 is the augmentation (exact mod p**M); each further coefficient is
    obtained by one exact (gamma-1)-division and is determined mod
    p**min(M, n_max) because of the norm-element gauge.  Depth is capped at
    min(n_max + 1, p - 1): one tower level per division, and binomial
    collapse (gamma-1)**p = p * (...) at finite level past that.
    """
    p, M, n = tower.p, tower.mod_exp, tower.n_max
    if k < 1:
        raise IwasawaError("order must be >= 1")
    if k > min(n + 1, p - 1):
        raise IwasawaError(
            f"order {k} exceeds supported depth min(n_max+1, p-1) = {min(n + 1, p - 1)}")
    mod = p ** M
    coeff_prec = [M] + [min(M, n)] * (k - 1)
    cur = tower.top
    coeffs = []
    for i in range(k):
        c = cur.augmentation()
        coeffs.append(PadicNumber.from_int(c % mod, p, coeff_prec[i]))
        if i + 1 < k:
            delta = GroupRingElement.dirac(p, cur.level, M).scale(c)
            cur = _divide_gamma_minus_1_top(cur - delta)
    return JExpansion(order=k, coefficients=tuple(coeffs))


def reconstruct(expansion: JExpansion, p: int, level: int, mod_exp: int) -> GroupRingElement:
    """sum c_i (gamma-1)**i as a level-``level`` group-ring element."""
    acc = GroupRingElement.zero(p, level, mod_exp)
    power = GroupRingElement.dirac(p, level, mod_exp)
    for c in expansion.coefficients:
        acc = acc + power.scale(int(c.lift()))
        power = power.mul_gamma_minus_1()
    return acc


# ----------------------------------------------------------------------
# the derivative of a measure (two-sided Lemma-2.8 computation)


@dataclass(frozen=True)
class DerResult:
    limit_value: PadicNumber      # route (a): finite-level weighted sum
    level0_value: PadicNumber     # route (b): <xi'_0, z_0> via division
    agreement_valuation: int
    stabilization: int


def pairing_tower(xi: MeasureTower, z: MeasureTower) -> MeasureTower:
    """L_xi tower: level-n coefficient at sigma is <xi_n, z_n^sigma>.

    The pairing is the coefficientwise dot product; the Galois action on z
    is the index shift.  Compatibility of the result is a theorem given
    compatibility of both inputs, and is re-checked by the constructor.
    """
    if (xi.p, xi.mod_exp, xi.n_max) != (z.p, z.mod_exp, z.n_max):
        raise IwasawaError("pairing towers must share parameters")
    mod = xi.p ** xi.mod_exp
    levels = []
    for xe, ze in zip(xi.levels, z.levels):
        size = len(xe.coeffs)
        out = [0] * size
        for sigma in range(size):
            s = 0
            for i, a in enumerate(xe.coeffs):
                if a:
                    s += a * ze.coeffs[(i - sigma) % size]
            out[sigma] = s % mod
        levels.append(GroupRingElement(xi.p, xe.level, xi.mod_exp, out))
    return MeasureTower(levels)


def der_rho(xi: MeasureTower, z: MeasureTower) -> DerResult:
    """Derivative of the measure L_xi evaluated at z, both routes.

    Route (a) is the limit definition: the top-level sum of
    log_p(rho_cyc(tau^{-1})) <xi^tau, z> over Gamma_n with the canonical
    integer lift.  Route (b) divides the xi tower by
    (gamma-1)/log_p(rho_cyc(gamma)) and pairs at level 0.  They agree mod
    p**min(M, n_max+1); both are returned with the agreement valuation.
    """
    if (xi.p, xi.mod_exp, xi.n_max) != (z.p, z.mod_exp, z.n_max):
        raise IwasawaError("towers must share parameters")
    p, M, n = xi.p, xi.mod_exp, xi.n_max
    if xi.level0() != 0:
        raise IwasawaError("xi_0 != 0; the derivative requires a vanishing base level")
    mod = p ** M
    ell = log_rho_gamma_int(p, M)

    def route_a(level: int) -> int:
        xe, ze = xi.levels[level], z.levels[level]
        size = len(xe.coeffs)
        acc = 0
        for tau in range(size):
            pair = 0
            for i, a in enumerate(xe.coeffs):
                if a:
                    pair += a * ze.coeffs[(i + tau) % size]
            acc += (-tau * ell) * pair
        return acc % mod

    top = route_a(n)
    prev = route_a(n - 1) if n >= 1 else top
    stab = _vali(top - prev, p, M) if n >= 1 else M

    xi_prime = divide_gamma_minus_1(xi)
    level0 = xi_prime.level0() * z.level0() % mod
    agree = _vali(top - level0, p, M)
    return DerResult(
        limit_value=PadicNumber.from_int(top, p, M),
        level0_value=PadicNumber.from_int(level0, p, M),
        agreement_valuation=agree,
        stabilization=stab,
    )
