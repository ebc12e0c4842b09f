"""Elliptic and hypergeometric building blocks.

Contains the complete elliptic integral K, the Jacobi functions sn, cn,
dn via the arithmetic-geometric mean and a descending Landen ladder, a
Lanczos gamma function, and the Gauss hypergeometric series 2F1 together
with its regularized variant.  All routines are plain-float and
deterministic; no module state other than a cache of Landen ladders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

from .exceptions import (
    ConvergenceError,
    DomainError,
    PoleError,
    UndefinedError,
)

AGM_MAX_ITER = 64
SERIES_MAX_TERMS = 10_000
TAYLOR_CUTOFF = 1.0e-4

_EPS = 2.220446049250313e-16


class JacobiTriple(NamedTuple):
    sn: float
    cn: float
    dn: float


@dataclass(frozen=True)
class EllipticModulus:
    """Squared modulus k2 with its derived quantities.

    The field a is the Heun singularity location 1/k2.  Values must
    satisfy 0 < k2 < 1 (the degenerate endpoints are rejected).
    """

    k2: float
    k: float
    a: float

    @classmethod
    def from_k2(cls, k2: float) -> "EllipticModulus":
        if not (0.0 < k2 < 1.0):
            raise DomainError(f"k2 must lie strictly inside (0, 1), got {k2}")
        return cls(k2=float(k2), k=math.sqrt(k2), a=1.0 / float(k2))


class _Ladder(NamedTuple):
    """AGM scale pairs (a_n, c_n) for n = 0..N plus K and sqrt(1-k2)."""

    pairs: tuple
    K: float
    kprime: float


@lru_cache(maxsize=256)
def _landen_ladder(k2: float) -> _Ladder:
    kp = math.sqrt(1.0 - k2)
    a, b = 1.0, kp
    pairs = [(a, math.sqrt(k2))]
    for _ in range(AGM_MAX_ITER):
        c = 0.5 * (a - b)
        if abs(c) <= _EPS * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        pairs.append((a, c))
    else:
        raise ConvergenceError("AGM did not converge within iteration cap")
    return _Ladder(pairs=tuple(pairs), K=math.pi / (2.0 * a), kprime=kp)


def complete_K(k2: float) -> float:
    """Complete elliptic integral of the first kind in the parameter k2.

    complete_K(0) returns pi/2 exactly; k2 must satisfy 0 <= k2 < 1.
    """
    if not (0.0 <= k2 < 1.0):
        raise DomainError(f"k2 must lie in [0, 1), got {k2}")
    if k2 == 0.0:
        return math.pi / 2.0
    return _landen_ladder(float(k2)).K


def _jacobi_core(v: float, k2: float, ladder: _Ladder) -> JacobiTriple:
    """sn, cn, dn for v in [0, K/2] (no argument folding)."""
    if v < TAYLOR_CUTOFF:
        v2 = v * v
        sn = v * (1.0 - (1.0 + k2) * v2 / 6.0
                  + (1.0 + 14.0 * k2 + k2 * k2) * v2 * v2 / 120.0)
        cn = 1.0 - v2 / 2.0 + (1.0 + 4.0 * k2) * v2 * v2 / 24.0
        dn = 1.0 - k2 * v2 / 2.0 + k2 * (4.0 + k2) * v2 * v2 / 24.0
        return JacobiTriple(sn, cn, dn)
    pairs = ladder.pairs
    n_top = len(pairs) - 1
    phi = math.ldexp(pairs[n_top][0] * v, n_top)
    phi_prev = phi
    for n in range(n_top, 0, -1):
        a_n, c_n = pairs[n]
        s = (c_n / a_n) * math.sin(phi)
        s = min(1.0, max(-1.0, s))
        phi_prev = phi
        phi = 0.5 * (phi + math.asin(s))
    sn = math.sin(phi)
    cn = math.cos(phi)
    if n_top == 0:
        dn = math.sqrt(1.0 - k2 * sn * sn)
    else:
        dn = cn / math.cos(phi_prev - phi)
    return JacobiTriple(sn, cn, dn)


def jacobi(u: float, k2: float) -> JacobiTriple:
    """Jacobi elliptic sn, cn, dn at real argument u for parameter k2.

    Arguments are folded into [0, K] using the exact quarter-period
    symmetries before evaluation, so parity and periodicity hold to
    machine precision.  Requires 0 < k2 < 1.
    """
    if not (0.0 < k2 < 1.0):
        raise DomainError(f"k2 must lie strictly inside (0, 1), got {k2}")
    k2 = float(k2)
    ladder = _landen_ladder(k2)
    K = ladder.K
    kp = ladder.kprime

    sign_s = 1.0
    p = u
    if p < 0.0:
        p = -p
        sign_s = -1.0
    # sn and cn change sign over a half period 2K, dn is 2K-periodic.
    n2 = math.floor(p / (2.0 * K))
    r = p - 2.0 * K * n2
    if r < 0.0:
        r = 0.0
    sign_c = 1.0
    if n2 % 2 == 1:
        sign_s = -sign_s
        sign_c = -1.0
    # Reflect (K, 2K) onto (0, K): sn(2K-v) = sn v, cn(2K-v) = -cn v.
    if r > K:
        r = 2.0 * K - r
        sign_c = -sign_c
    if r > 0.5 * K:
        # Evaluate at the complementary point K - r, where the ladder is
        # best conditioned, then map back.  This keeps cn relatively
        # accurate near its zero at K.
        t = K - r
        st, ct, dt = _jacobi_core(t, k2, ladder)
        sn = ct / dt
        cn = kp * st / dt
        dn = kp / dt
    else:
        sn, cn, dn = _jacobi_core(r, k2, ladder)
    return JacobiTriple(sign_s * sn, sign_c * cn, dn)


# Lanczos approximation, g = 7, nine coefficients.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _sinpi(x: float) -> float:
    """sin(pi x) with argument reduction done in exact arithmetic."""
    n = math.floor(x)
    r = x - n
    s = math.sin(math.pi * r)
    return -s if n % 2 else s


def _is_nonpositive_int(x: float, tol: float = 0.0) -> bool:
    if tol == 0.0:
        return x <= 0.0 and x == math.floor(x)
    m = round(x)
    return m <= 0 and abs(x - m) <= tol


def gamma_fn(x: float) -> float:
    """Gamma function on the real line, poles rejected explicitly."""
    if _is_nonpositive_int(x):
        raise PoleError(f"gamma pole at x = {x}")
    if x < 0.5:
        # Reflection keeps the Lanczos sum on its accurate half-line.
        return math.pi / (_sinpi(x) * gamma_fn(1.0 - x))
    xs = x - 1.0
    acc = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (xs + i)
    t = xs + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (xs + 0.5) * math.exp(-t) * acc


def _rgamma(x: float) -> float:
    """1 / gamma(x), zero at the poles."""
    if _is_nonpositive_int(x):
        return 0.0
    return 1.0 / gamma_fn(x)


_INT_TOL = 1.0e-12


def _near_nonpositive_int(x: float):
    """Return the integer m <= 0 with |x - m| <= tol, else None."""
    m = round(x)
    if m <= 0 and abs(x - m) <= _INT_TOL:
        return int(m)
    return None


def _series_2f1(A: float, B: float, C: float, z: float) -> float:
    term = 1.0
    total = 1.0
    small_run = 0
    for n in range(SERIES_MAX_TERMS):
        term *= (A + n) * (B + n) / ((C + n) * (n + 1.0)) * z
        total += term
        if abs(term) <= 1.0e-16 * abs(total):
            small_run += 1
            if small_run >= 2:
                return total
        else:
            small_run = 0
    raise ConvergenceError(
        f"2F1 series did not converge within {SERIES_MAX_TERMS} terms "
        f"(A={A}, B={B}, C={C}, z={z})")


def _polynomial_2f1(m: int, A: float, B: float, C: float, z: float) -> float:
    """Terminating series of degree m (A = -m up to roundoff)."""
    cpole = _near_nonpositive_int(C)
    if cpole is not None and -cpole < m:
        raise UndefinedError(
            f"2F1 denominator pole at n = {1 - cpole} precedes termination "
            f"at degree {m}")
    term = 1.0
    total = 1.0
    for n in range(m):
        term *= (A + n) * (B + n) / ((C + n) * (n + 1.0)) * z
        total += term
    return total


def gauss_2F1(A: float, B: float, C: float, z: float) -> float:
    """Gauss hypergeometric function 2F1(A, B; C; z) for real z in [-1, 1].

    Terminating cases are summed exactly.  Otherwise the direct series
    is used away from z = 1, an Euler transformation accelerates the
    slowly convergent region, and a two-term connection at 1 - z covers
    z close to or equal to 1.
    """
    if z == 0.0:
        return 1.0
    if abs(z) > 1.0:
        if abs(z) <= 1.0 + 1.0e-12:
            z = math.copysign(1.0, z)
        else:
            raise DomainError(f"2F1 series argument out of range: z = {z}")

    ma = _near_nonpositive_int(A)
    mb = _near_nonpositive_int(B)
    if ma is not None or mb is not None:
        degrees = [-m for m in (ma, mb) if m is not None]
        m = min(degrees)
        return _polynomial_2f1(m, A, B, C, z)

    if _near_nonpositive_int(C) is not None:
        raise UndefinedError(
            f"2F1 undefined: C = {C} is a non-positive integer and the "
            "series does not terminate")

    s = C - A - B
    s_int = abs(s - round(s)) <= _INT_TOL

    if z == 1.0:
        if s > _INT_TOL:
            # Gauss summation; rgamma absorbs poles of the denominator.
            return (gamma_fn(C) * gamma_fn(s) * _rgamma(C - A) * _rgamma(C - B))
        raise ConvergenceError(
            f"2F1 diverges at z = 1 when C - A - B = {s} <= 0")

    if z > 0.97 and not s_int:
        w = 1.0 - z
        p_coef = gamma_fn(C) * gamma_fn(s) * _rgamma(C - A) * _rgamma(C - B)
        q_coef = gamma_fn(C) * gamma_fn(-s) * _rgamma(A) * _rgamma(B)
        f1 = _series_2f1(A, B, A + B - C + 1.0, w) if p_coef != 0.0 else 0.0
        f2 = _series_2f1(C - A, C - B, s + 1.0, w) if q_coef != 0.0 else 0.0
        return p_coef * f1 + w ** s * q_coef * f2

    if s < 0.0 and z > 0.9:
        # Euler transformation: the partner series has a positive
        # convergence exponent at z = 1.
        return (1.0 - z) ** s * _series_2f1(C - A, C - B, C, z)

    return _series_2f1(A, B, C, z)


def tilde_F(A: float, B: float, C: float, z: float) -> float:
    """Regularized hypergeometric 2F1(A, B; C; z) / gamma(C).

    Non-positive integer C is rejected; no case in this package needs
    the limit value there.
    """
    if _near_nonpositive_int(C) is not None:
        raise UndefinedError(
            f"regularized 2F1 not supported at non-positive integer C = {C}")
    return gauss_2F1(A, B, C, z) / gamma_fn(C)
