"""Weight-2 modular symbols for Gamma0(N) over exact rationals.

Manin-symbol presentation on P^1(Z/N) with the S and T relations, the plus
involution, Hecke action through Merel matrices, and the normalized plus
eigen-symbol of an elliptic curve.  Everything is fraction-free or exact
rational; no floating point anywhere.

Normalization.  The eigen-symbol is stored as an integer-valued function on
Manin symbols with content 1 and a recorded sign convention.  Reported
symbol values [r]^+ are scaled by the *period index*: the pairing of the
integral symbol against a primitive generator of the plus-fixed integral
cuspidal Hecke eigenlattice.  For the conductor-11 curve this gives
[0]^+ = 1/5 by exact linear algebra.  A residual prime-to-candidate unit
(a Manin-constant style discrepancy) cannot be ruled out without
transcendental periods; the certificate records the convention.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd, isqrt

from .curve import EllipticCurveQ, CurveError, reduction_type, count_points


class ModSymError(ValueError):
    """Invalid level, eigenspace failure, or inconsistent input."""


# ----------------------------------------------------------------------
# P^1(Z/N)


def _xgcd(a: int, b: int):
    if b == 0:
        return (-1, 0, -a) if a < 0 else (1, 0, a)
    x, y, g = _xgcd(b, a % b)
    return y, x - y * (a // b), g


def _lift_unit(a: int, d: int, n: int) -> int:
    """Lift a unit mod d (d | n) to a unit mod n."""
    if d == n or n == 1:
        return a % n if n > 1 else 0
    for k in range(n // d):
        cand = a + k * d
        if gcd(cand, n) == 1:
            return cand % n
    raise ModSymError(f"cannot lift {a} mod {d} to a unit mod {n}")


def p1_normalize(N: int, u: int, v: int):
    """Canonical representative of (u:v) in P^1(Z/N); None if undefined."""
    u %= N
    v %= N
    if N == 1:
        return (0, 0)
    if u == 0:
        return (0, 1) if gcd(v, N) == 1 else None
    s, _, g = _xgcd(u, N)
    if gcd(g, v) > 1:
        return None
    s = _lift_unit(s % (N // g), N // g, N)
    v = s * v % N
    if g == 1:
        return (1, v)
    v = min(v * t % N for t in range(1, N, N // g) if gcd(t, N) == 1)
    return (g, v)


class ManinSpace:
    """P^1(Z/N) representatives plus the weight-2 Manin relation matrix."""

    def __init__(self, N: int):
        if N < 1:
            raise ModSymError(f"level must be >= 1, got {N}")
        self.N = N
        seen = {}
        reps = []
        for u in range(N):
            for v in range(N):
                r = p1_normalize(N, u, v)
                if r is not None and r not in seen:
                    seen[r] = len(reps)
                    reps.append(r)
        if N == 1:
            seen = {(0, 0): 0}
            reps = [(0, 0)]
        self.reps = tuple(reps)
        self._index = seen
        self.relations = self._relation_columns()

    def __len__(self):
        return len(self.reps)

    def index(self, c: int, d: int):
        r = p1_normalize(self.N, c, d)
        return None if r is None else self._index[r]

    def _relation_columns(self):
        """Columns x + xS and x + xT + xT^2 as integer vectors."""
        n = len(self.reps)
        cols = []
        for i, (c, d) in enumerate(self.reps):
            vec = [0] * n
            vec[i] += 1
            vec[self.index(d, -c)] += 1
            cols.append(tuple(vec))
            vec = [0] * n
            vec[i] += 1
            vec[self.index(d, -c - d)] += 1
            vec[self.index(-c - d, c)] += 1
            cols.append(tuple(vec))
        return tuple(cols)

    def plus_columns(self):
        """Columns x - x.eta identifying a symbol with its mirror."""
        n = len(self.reps)
        cols = []
        for i, (c, d) in enumerate(self.reps):
            j = self.index(-c, d)
            if j == i:
                continue
            vec = [0] * n
            vec[i] += 1
            vec[j] -= 1
            cols.append(tuple(vec))
        return tuple(cols)

    def expected_size(self) -> int:
        out = self.N
        for p, _ in _factor(self.N):
            out = out // p * (p + 1)
        return out if self.N > 1 else 1


def p1_enumerate(N: int) -> ManinSpace:
    """The projective line with its relation data; |P^1| checked on the way."""
    space = ManinSpace(N)
    if len(space) != space.expected_size():
        raise ModSymError("P^1 enumeration does not match the index formula")
    return space


# ----------------------------------------------------------------------
# small factoring utilities (levels here are modest)


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _factor(n: int):
    n = abs(n)
    out = []
    for p in range(2, isqrt(n) + 1):
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    if n > 1:
        if not _is_probable_prime(n):
            raise ModSymError(f"cannot certify factorization of {n}")
        out.append((n, 1))
    return out


def radical(n: int) -> int:
    return reduce(lambda a, b: a * b, (p for p, _ in _factor(n)), 1)


# ----------------------------------------------------------------------
# Merel matrices and Hecke action


@lru_cache(maxsize=None)
def merel_matrices(n: int):
    """Merel's set: integer matrices of determinant n with a>b>=0, d>c>=0."""
    out = []
    for a in range(1, n + 1):
        for d in range((n + a - 1) // a, n + 2 - a):
            bc = a * d - n
            if bc == 0:
                for b in range(a):
                    out.append((a, b, 0, d))
                for c in range(1, d):
                    out.append((a, 0, c, d))
            else:
                for b in range((bc - 1) // (d - 1) + 1, a):
                    if bc % b == 0:
                        out.append((a, b, bc // b, d))
    return tuple(out)


def _action_matrix(space: ManinSpace, mats) -> list:
    """Column action sum_g [x.g] on the free module Z[P^1]."""
    n = len(space)
    A = [[0] * n for _ in range(n)]
    for x, (c, d) in enumerate(space.reps):
        for (a, b, cc, dd) in mats:
            j = space.index(c * a + d * cc, c * b + d * dd)
            if j is not None:
                A[j][x] += 1
    return A


# ----------------------------------------------------------------------
# exact linear algebra helpers (Fractions; spaces here are tiny)


def _kernel(rows, ncols):
    mat = [list(map(Fraction, r)) for r in rows]
    m = len(mat)
    piv = {}
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, m) if mat[i][c] != 0), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(m):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        piv[c] = r
        r += 1
        if r == m:
            break
    basis = []
    for fc in (c for c in range(ncols) if c not in piv):
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for c, pr in piv.items():
            vec[c] = -mat[pr][fc]
        basis.append(vec)
    return basis


def _integer_primitive(vec):
    den = reduce(lambda a, b: a * b // gcd(a, b), (f.denominator for f in vec), 1)
    ints = [int(f * den) for f in vec]
    g = reduce(gcd, (abs(x) for x in ints if x), 0)
    if g == 0:
        raise ModSymError("zero vector cannot be normalized")
    return [x // g for x in ints]


def _snf_row_transform(A):
    """Integer SNF with the row transform: returns (diag exponents D, U, rank).

    U A V = D with U unimodular; only U and the rank are needed (saturation
    of the column span and the quotient coordinates).
    """
    A = [row[:] for row in A]
    n = len(A)
    m = len(A[0]) if n else 0
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    t = 0
    while t < min(n, m):
        best = None
        for i in range(t, n):
            for j in range(t, m):
                if A[i][j] != 0 and (best is None or abs(A[i][j]) < best[2]):
                    best = (i, j, abs(A[i][j]))
        if best is None:
            break
        bi, bj, _ = best
        A[t], A[bi] = A[bi], A[t]
        U[t], U[bi] = U[bi], U[t]
        for row in A:
            row[t], row[bj] = row[bj], row[t]
        while True:
            changed = False
            for i in range(t + 1, n):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[t])]
                    if A[i][t]:
                        # remainder smaller than pivot: swap up and retry
                        A[t], A[i] = A[i], A[t]
                        U[t], U[i] = U[i], U[t]
                        changed = True
            if changed:
                continue
            for j in range(t + 1, m):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    for row in A:
                        row[j] -= q * row[t]
                    if A[t][j]:
                        for row in A:
                            row[t], row[j] = row[j], row[t]
                        changed = True
            if not changed:
                break
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    rank = sum(1 for i in range(min(n, m)) if A[i][i] != 0)
    return A, U, rank


def _invert_unimodular(U):
    n = len(U)
    aug = [[Fraction(U[i][j]) for j in range(n)]
           + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        pr = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[pr] = aug[pr], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    return [[int(aug[i][n + j]) for j in range(n)] for i in range(n)]


# ----------------------------------------------------------------------
# the eigen-symbol


@dataclass(frozen=True)
class EigenSymbol:
    """Integral plus eigen-symbol with its normalization certificate."""
    N: int
    values: tuple              # content-1 integers, one per Manin symbol
    period_index: int          # pairing with the plus cuspidal eigenlattice generator
    space: ManinSpace = field(repr=False, compare=False)
    certificate: dict = field(compare=False)

    def raw_path_value(self, a: int, m: int) -> int:
        """Integral symbol on the path {a/m, oo} via continued fractions."""
        return _path_value(self.space, self.values, a, m)

    def value(self, r) -> Fraction:
        """Normalized [r]^+ = raw/(period index); exact rational."""
        r = Fraction(r)
        return Fraction(self.raw_path_value(r.numerator, r.denominator),
                        self.period_index)


def _path_value(space: ManinSpace, values, a: int, m: int) -> int:
    """{a/m, oo} decomposed into Manin symbols along the convergents."""
    if m == 0:
        return 0
    if m < 0:
        a, m = -a, -m
    cf = []
    x, y = a, m
    while y:
        q = x // y
        cf.append(q)
        x, y = y, x - q * y
    Q = [0, 1]
    for t in cf[1:]:
        Q.append(t * Q[-1] + Q[-2])
    total = 0
    for k in range(len(cf)):
        sgn = -1 if k % 2 == 0 else 1     # (-1)^(k-1)
        j = space.index(sgn * Q[k + 1], Q[k])
        if j is not None:
            total += values[j]
    return -total


def sturm_bound(N: int) -> int:
    mu = N
    for p, _ in _factor(N):
        mu = mu // p * (p + 1)
    return mu // 6 + 1


def conductor_of(E: EllipticCurveQ) -> int:
    """Conductor of a semistable curve: the radical of the minimal discriminant.

    Curves with additive reduction at p > 3 are rejected (out of scope).
    """
    N = radical(E.discriminant)
    for p, _ in _factor(N):
        if p > 3:
            red = reduction_type(E, p)
            if red.kind == "additive":
                raise ModSymError(
                    f"additive reduction at {p}: conductor needs Tate's algorithm, "
                    "which is out of scope; pass N explicitly")
    return N


def eigen_symbol(E: EllipticCurveQ, N: int | None = None,
                 hecke_bound: int | None = None) -> EigenSymbol:
    """The normalized plus modular symbol attached to E at level N.

    Cuts the plus relation-satisfying function space down by the kernels of
    T_ell - a_ell(E) for good ell up to max(20, Sturm bound) until the
    eigenspace is one dimensional; anything else is an error (wrong level
    or non-eigenform input).
    """
    if N is None:
        N = conductor_of(E)
    space = p1_enumerate(N)
    n = len(space)
    rows = list(space.relations) + list(space.plus_columns())
    W = _kernel(rows, n)
    if not W:
        raise ModSymError(f"empty plus symbol space at level {N}")

    bound = hecke_bound if hecke_bound is not None else max(20, sturm_bound(N))
    used = {}
    basis = [[Fraction(int(i == j)) for j in range(len(W))] for i in range(len(W))]
    # vectors of the current candidate space, as functions on P^1
    def vectors():
        out = []
        for j in range(len(basis[0])):
            vec = [Fraction(0)] * n
            for i, w in enumerate(W):
                c = basis[i][j]
                if c:
                    vec = [a + c * b for a, b in zip(vec, w)]
            out.append(vec)
        return out

    for ell in _primes_up_to(bound):
        if N % ell == 0:
            continue
        if len(basis[0]) <= 1:
            break
        a_ell = ell + 1 - count_points(E, ell)
        used[ell] = a_ell
        A = _action_matrix(space, merel_matrices(ell))
        vecs = vectors()
        imgs = []
        for vec in vecs:
            # transpose action: (T^t v)(x) = sum_H v(x.H)
            img = [sum(A[i][x] * vec[i] for i in range(n) if A[i][x]) for x in range(n)]
            imgs.append([a - a_ell * b for a, b in zip(img, vec)])
        # kernel of basis -> images
        coords = [[img[i] for img in imgs] for i in range(n)]
        ker = _kernel(coords, len(imgs))
        basis = [[sum(basis[i][j] * kv[j] for j in range(len(imgs))) for kv in ker]
                 for i in range(len(W))]
        if not basis[0]:
            raise ModSymError("eigenspace became empty; a_ell sequence matches no eigenform")
    if len(basis[0]) != 1:
        raise ModSymError(
            f"plus eigenspace has dimension {len(basis[0])} after ell <= {bound}; "
            "wrong level or non-eigenform input")

    values = _integer_primitive(vectors()[0])
    period_index, values = _normalize_against_lattice(
        space, values, lambda ell: used.get(ell, ell + 1 - count_points(E, ell)), bound)
    up = {}
    for p, _ in _factor(N):
        up[p] = _measure_up_eigenvalue(space, values, p)
        if p > 3:
            expect = reduction_type(E, p).a_p
            if up[p] != expect:
                raise ModSymError(f"U_{p} eigenvalue {up[p]} != a_p = {expect}")
    cert = {
        "level": N,
        "hecke_eigenvalues": used,
        "hecke_bound": bound,
        "sturm_bound": sturm_bound(N),
        "u_eigenvalues": up,
        "period_index": period_index,
        "sign_convention": "[0]+ >= 0, else first nonzero value positive",
        "unit_ambiguity": "values exact up to a prime-to-candidate rational unit "
                          "(Manin-constant style); certified by exact linear algebra",
    }
    return EigenSymbol(N=N, values=tuple(values), period_index=period_index,
                       space=space, certificate=cert)


def _primes_up_to(bound: int):
    for n in range(2, bound + 1):
        if all(n % d for d in range(2, isqrt(n) + 1)):
            yield n


def _measure_up_eigenvalue(space: ManinSpace, values, p: int) -> int:
    """Read off the U_p eigenvalue from the U_p path relation."""
    for a, m in ((0, 1), (1, 3), (2, 5), (1, 7), (3, 8)):
        rhs = _path_value(space, values, a, m)
        if rhs == 0:
            continue
        lhs = sum(_path_value(space, values, a + b * m, p * m) for b in range(p))
        if lhs % rhs == 0:
            return lhs // rhs
    raise ModSymError(f"cannot determine U_{p} eigenvalue")


def _normalize_against_lattice(space: ManinSpace, values, aell, bound: int):
    """Period index: pair the symbol with the plus cuspidal eigenlattice.

    Computes the image lattice of Z[P^1] in the full S,T quotient by integer
    SNF, cuts the Hecke eigenline and its plus-fixed part, takes a primitive
    integral generator e+, and returns v(e+) with signs fixed so that
    v(e+) > 0 and [0]^+ >= 0 (first nonzero symbol value positive if
    [0]^+ = 0).
    """
    n = len(space)
    relmat = [[col[i] for col in space.relations] for i in range(n)]
    _, U, rank = _snf_row_transform(relmat)
    Uinv = _invert_unimodular(U)
    k = n - rank

    def op_on_quotient(A, z):
        x = [sum(Fraction(Uinv[i][rank + j]) * z[j] for j in range(k)) for i in range(n)]
        Ax = [sum(Fraction(A[i][jj]) * x[jj] for jj in range(n) if x[jj]) for i in range(n)]
        return [sum(Fraction(U[rank + i][jj]) * Ax[jj] for jj in range(n)) for i in range(k)]

    basis = [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]

    def cut(A, scalar):
        nonlocal basis
        nb = len(basis[0])
        imgs = []
        for j in range(nb):
            z = [basis[i][j] for i in range(k)]
            w = op_on_quotient(A, z)
            imgs.append([a - scalar * b for a, b in zip(w, z)])
        ker = _kernel([[img[i] for img in imgs] for i in range(k)], nb)
        basis = [[sum(basis[i][j] * kv[j] for j in range(nb)) for kv in ker]
                 for i in range(k)]

    # Hecke cuts leave the plus and minus eigenlines (dimension 2); the
    # plus involution then isolates the plus-fixed eigenlattice
    for ell in _primes_up_to(bound):
        if space.N % ell == 0:
            continue
        if len(basis[0]) <= 2:
            break
        cut(_action_matrix(space, merel_matrices(ell)), Fraction(aell(ell)))
    cut(_action_matrix(space, ((-1, 0, 0, 1),)), Fraction(1))
    if len(basis[0]) != 1:
        raise ModSymError("plus cuspidal eigenlattice is not one dimensional")
    e = _integer_primitive([basis[i][0] for i in range(k)])
    v_red = [sum(values[j] * Uinv[j][rank + i] for j in range(n)) for i in range(k)]
    period = sum(a * b for a, b in zip(v_red, e))
    if period == 0:
        raise ModSymError("symbol pairs to zero with its own eigenlattice")
    val0 = _path_value(space, values, 0, 1)
    if val0 < 0 or (val0 == 0 and next((x for x in values if x), 1) < 0):
        values = [-x for x in values]
        period = -period
    if period < 0:
        period = -period
    return period, list(values)


def symbol_value(sym: EigenSymbol, r) -> Fraction:
    """Exact normalized value [r]^+ of the plus symbol at {r, oo}."""
    return sym.value(r)
