"""Series solutions of the transformed eigenvalue problems.

Both expansion types share one pair of generic three-term recurrences.
For a Heun parameter set (a, q, alpha, beta, gamma, delta) the plain
power series around x = 0 has coefficients b_n obeying

    A_n b_{n+1} + B_n b_n + C_n b_{n-1} = 0,   b_{-1} = 0, b_0 = 1,

with

    A_n = a (n + gamma) (n + 1)
    B_n = -(a + 1) n^2 - [a (gamma + delta - 1) + alpha + beta - delta] n - q
    C_n = (n + alpha - 1) (n + beta - 1),

and the hypergeometric-kernel series (terms z^n 2F1-tilde(n + alpha,
gamma + delta - alpha - 1; n + gamma; z)) has

    A_n = a (n + 1)
    B_n = -(a + 1) n^2 - [a (2 alpha + 1 - gamma - delta) + alpha + beta - delta] n
          - q - a alpha (alpha + 1 - gamma - delta)
    C_n = (n + alpha - 1) (n + alpha - delta) (n + alpha + beta - gamma - delta).

Each family of either potential is the generic recurrence evaluated at
an index-transformed parameter set; the u <-> 2K - u partner families
additionally swap the singular points 0 and 1 first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .exceptions import (
    ArgumentError,
    ConsistencyError,
    ConvergenceError,
    MinimalSolutionError,
)
from .heun_core import (
    ExpansionFamily,
    FamilyGroup,
    HeunParams,
    PotentialKind,
    PotentialSpec,
    Prefactor,
    _real_pow,
    require_supported,
    transformed_params,
)
from .special_functions import gamma_fn, jacobi, tilde_F

DEFAULT_N_MAX = 500
_INT_TOL = 1.0e-9


@dataclass(frozen=True)
class RecurrenceTriple:
    """Callables alpha_n, beta_n, gamma_n of one three-term recurrence.

    beta_slope is the constant d(beta_n)/dE; the energy enters every
    beta_n through the accessory parameter alone, so the diagonal of the
    characteristic matrix is affine in E with this slope.
    """

    alpha_n: Callable[[int], float]
    beta_n: Callable[[int], float]
    gamma_n: Callable[[int], float]
    beta_slope: float


def _power_triple(p: HeunParams) -> tuple:
    a, q = p.a, p.q
    al, be, ga, de = p.alpha, p.beta, p.gamma, p.delta
    lin = a * (ga + de - 1.0) + al + be - de

    def alpha_n(n: int) -> float:
        return a * (n + ga) * (n + 1.0)

    def beta_n(n: int) -> float:
        return -(a + 1.0) * n * n - lin * n - q

    def gamma_n(n: int) -> float:
        return (n + al - 1.0) * (n + be - 1.0)

    return alpha_n, beta_n, gamma_n


def _hyper_triple(p: HeunParams) -> tuple:
    a, q = p.a, p.q
    al, be, ga, de = p.alpha, p.beta, p.gamma, p.delta
    lin = a * (2.0 * al + 1.0 - ga - de) + al + be - de
    const = q + a * al * (al + 1.0 - ga - de)

    def alpha_n(n: int) -> float:
        return a * (n + 1.0)

    def beta_n(n: int) -> float:
        return -(a + 1.0) * n * n - lin * n - const

    def gamma_n(n: int) -> float:
        return (n + al - 1.0) * (n + al - de) * (n + al + be - ga - de)

    return alpha_n, beta_n, gamma_n


def recurrence(spec: PotentialSpec, fam: ExpansionFamily,
               E: float) -> RecurrenceTriple:
    """Three-term recurrence of one family at energy E."""
    p2, _ = transformed_params(spec, fam, E)
    if fam.group is FamilyGroup.POWER:
        alpha_n, beta_n, gamma_n = _power_triple(p2)
    else:
        alpha_n, beta_n, gamma_n = _hyper_triple(p2)
    # q depends on E as -E/(4 k2); the x -> 1-x swap negates q once more.
    slope = 1.0 / (4.0 * spec.k.k2)
    if fam.group is FamilyGroup.HYPER_BOLD:
        slope = -slope
    return RecurrenceTriple(alpha_n=alpha_n, beta_n=beta_n,
                            gamma_n=gamma_n, beta_slope=slope)


def _gamma_roots(spec: PotentialSpec, fam: ExpansionFamily) -> list[float]:
    """Zeros in n of the gamma_n factor product."""
    p2, _ = transformed_params(spec, fam, 0.0)
    al, be, ga, de = p2.alpha, p2.beta, p2.gamma, p2.delta
    if fam.group is FamilyGroup.POWER:
        return [1.0 - al, 1.0 - be]
    return [1.0 - al, de - al, ga + de - al - be]


def truncation_order(spec: PotentialSpec, fam: ExpansionFamily) -> Optional[int]:
    """Largest retained index N when the series terminates, else None.

    Termination requires gamma_{N+1} = 0 with gamma_n nonzero for
    1 <= n <= N, which happens exactly when the smallest integer root of
    gamma is at least 1.  Roots are classified as integers with a 1e-9
    tolerance so that l values entered in decimal notation behave like
    their exact rational counterparts.
    """
    roots = _gamma_roots(spec, fam)
    best = None
    for r in roots:
        m = round(r)
        if abs(r - m) <= _INT_TOL and m >= 1:
            if best is None or m < best:
                best = int(m)
    if best is None:
        return None
    return best - 1


def solve_coeffs_finite(spec: PotentialSpec, fam: ExpansionFamily,
                        E: float) -> np.ndarray:
    """Coefficients b_0..b_N of a terminating series at energy E.

    The forward recurrence determines b_1..b_N from b_0 = 1; the final
    row beta_N b_N + gamma_N b_{N-1} must then vanish, which holds only
    when E is an eigenvalue.  A residual above 1e-9 * max|b| raises
    ConsistencyError.
    """
    N = truncation_order(spec, fam)
    if N is None:
        raise ArgumentError(
            f"family {fam.selector} does not terminate at l = {spec.l}")
    tri = recurrence(spec, fam, E)
    b = np.zeros(N + 1)
    b[0] = 1.0
    for n in range(N):
        prev = b[n - 1] if n >= 1 else 0.0
        b[n + 1] = -(tri.beta_n(n) * b[n] + tri.gamma_n(n) * prev) / tri.alpha_n(n)
    tail = b[N - 1] if N >= 1 else 0.0
    residual = abs(tri.beta_n(N) * b[N] + tri.gamma_n(N) * tail)
    if residual > 1.0e-9 * np.max(np.abs(b)):
        raise ConsistencyError(
            f"termination row residual {residual:.3e} at E = {E}; "
            "not an eigenvalue of this family")
    return b


def solve_coeffs_infinite(spec: PotentialSpec, fam: ExpansionFamily, E: float,
                          n_max: int = DEFAULT_N_MAX) -> tuple[np.ndarray, float]:
    """Minimal-solution coefficients b_0..b_{n_max} by backward recursion.

    Returns the normalized coefficients (b_0 = 1) and the tail ratio
    b_{n_max} / b_{n_max - 1}, which must approach k2 = 1/a for the
    minimal solution.  A ratio closer to the dominant limit 1 raises
    MinimalSolutionError.
    """
    if truncation_order(spec, fam) is not None:
        raise ArgumentError(
            f"family {fam.selector} terminates at l = {spec.l}; "
            "use the finite solver")
    tri = recurrence(spec, fam, E)
    k2 = spec.k.k2
    # The start index sits far enough above n_max that dominant-solution
    # contamination, which decays like k2 per step of the downward
    # recursion, is below 1e-12 at n_max.
    buffer = int(math.ceil(12.5 / max(0.02, -math.log10(k2)))) + 10
    top = n_max + buffer
    b = np.zeros(top + 2)
    b[top + 1] = 0.0
    b[top] = 1.0
    for n in range(top, 0, -1):
        g = tri.gamma_n(n)
        if g == 0.0:
            raise ArgumentError(
                f"gamma_{n} vanishes; family {fam.selector} admits no "
                "infinite minimal series here")
        b[n - 1] = -(tri.beta_n(n) * b[n] + tri.alpha_n(n) * b[n + 1]) / g
        if abs(b[n - 1]) > 1.0e250:
            b[n - 1:] /= abs(b[n - 1])
    if b[0] == 0.0:
        raise MinimalSolutionError("normalization coefficient b_0 vanished")
    b = b[:n_max + 1] / b[0]
    ratio = b[n_max] / b[n_max - 1] if b[n_max - 1] != 0.0 else math.inf
    n = float(n_max)
    minimal_limit = k2 * (1.0 + (tri_eps(spec, fam) - 2.0) / n)
    dominant_limit = 1.0
    if abs(ratio - dominant_limit) < abs(ratio - minimal_limit):
        raise MinimalSolutionError(
            f"tail ratio {ratio:.6g} tracks the dominant solution "
            f"(minimal limit {minimal_limit:.6g})")
    return b, float(ratio)


def tri_eps(spec: PotentialSpec, fam: ExpansionFamily) -> float:
    """Exponent parameter controlling the first-order tail correction."""
    p2, _ = transformed_params(spec, fam, 0.0)
    return p2.epsilon


@dataclass(frozen=True)
class SeriesSolution:
    """A concrete series eigenfunction candidate at one energy."""

    spec: PotentialSpec
    family: ExpansionFamily
    E: float
    coeffs: np.ndarray
    prefactor: Prefactor
    finite: bool
    tail_ratio: Optional[float] = None


def build_finite(spec: PotentialSpec, fam: ExpansionFamily,
                 E: float) -> SeriesSolution:
    coeffs = solve_coeffs_finite(spec, fam, E)
    _, pre = transformed_params(spec, fam, E)
    return SeriesSolution(spec=spec, family=fam, E=E, coeffs=coeffs,
                          prefactor=pre, finite=True)


def build_infinite(spec: PotentialSpec, fam: ExpansionFamily, E: float,
                   n_max: int = DEFAULT_N_MAX) -> SeriesSolution:
    coeffs, ratio = solve_coeffs_infinite(spec, fam, E, n_max=n_max)
    _, pre = transformed_params(spec, fam, E)
    return SeriesSolution(spec=spec, family=fam, E=E, coeffs=coeffs,
                          prefactor=pre, finite=False, tail_ratio=ratio)


def hyper_eval_args(spec: PotentialSpec,
                    fam: ExpansionFamily) -> tuple[float, float, float]:
    """(A0, B, C0) with term n evaluating 2F1-tilde(n+A0, B; n+C0; z).

    When the transformed equation has delta = 3/2 the raw kernel carries
    exponent difference C - A - B = -1/2 and diverges at z = 1; an Euler
    rewrite swaps in the pair (C - B, C - A), after which the exponent
    difference is +1/2 for every family in scope.
    """
    if fam.group is FamilyGroup.POWER:
        raise ArgumentError("power families have no hypergeometric kernel")
    p2, _ = transformed_params(spec, fam, 0.0)
    A0 = p2.alpha
    B = p2.gamma + p2.delta - p2.alpha - 1.0
    C0 = p2.gamma
    if abs(p2.delta - 1.5) < _INT_TOL:
        A0, B = C0 - B, C0 - A0
    return A0, B, C0


def evaluate_grid(sol: SeriesSolution, us) -> np.ndarray:
    """Values of a series solution on a grid of positions.

    Matches evaluate() pointwise; the hypergeometric kernels are summed
    with vectorized term recurrences, falling back to the scalar path
    for the few points close to the argument boundary.
    """
    us = np.asarray(us, dtype=float)
    spec = sol.spec
    fam = sol.family
    k2 = spec.k.k2
    trip = [jacobi(u, k2) for u in us]
    sn = np.array([t.sn for t in trip])
    cn = np.array([t.cn for t in trip])
    dn = np.array([t.dn for t in trip])
    pre = (_real_pow_vec(sn, sol.prefactor.p_sn)
           * _real_pow_vec(cn, sol.prefactor.p_cn)
           * _real_pow_vec(dn, sol.prefactor.p_dn))
    if fam.group is FamilyGroup.POWER:
        x = sn * sn
        if sol.finite:
            total = np.polynomial.polynomial.polyval(x, sol.coeffs)
        else:
            total = np.array([_power_sum(sol, float(xi), k2) for xi in x])
    else:
        z = sn * sn if fam.group is FamilyGroup.HYPER_BAR else cn * cn
        A0, B, C0 = hyper_eval_args(spec, fam)
        total = np.zeros_like(z)
        zp = np.ones_like(z)
        for n, bn in enumerate(sol.coeffs):
            if bn != 0.0:
                total += bn * zp * _tilde_f_vec(n + A0, B, n + C0, z)
            zp *= z
    return pre * total


def _real_pow_vec(base: np.ndarray, p: float) -> np.ndarray:
    if p == 0.0:
        return np.ones_like(base)
    m = round(p)
    if abs(p - m) < 1.0e-9:
        return base ** int(m)
    out = np.empty_like(base)
    for i, b in enumerate(base):
        out[i] = _real_pow(float(b), p)
    return out


_VEC_Z_CAP = 0.97


def _tilde_f_vec(A: float, B: float, C: float, z: np.ndarray) -> np.ndarray:
    """Regularized 2F1 on an array of arguments in [0, 1]."""
    out = np.empty_like(z)
    near = z > _VEC_Z_CAP
    if np.any(near):
        out[near] = [tilde_F(A, B, C, float(zi)) for zi in z[near]]
    body = ~near
    if np.any(body):
        zb = z[body]
        total = np.ones_like(zb)
        term = np.ones_like(zb)
        for n in range(SERIES_MAX_TERMS_VEC):
            term = term * ((A + n) * (B + n) / ((C + n) * (n + 1.0))) * zb
            total += term
            if np.max(np.abs(term)) <= 1.0e-16 * np.max(np.abs(total)):
                break
        else:
            raise ConvergenceError("vectorized 2F1 series did not converge")
        out[body] = total / gamma_fn(C)
    return out


SERIES_MAX_TERMS_VEC = 10_000


def evaluate(sol: SeriesSolution, u: float) -> float:
    """Value of a series solution at position u."""
    spec = sol.spec
    fam = sol.family
    k2 = spec.k.k2
    sn, cn, _ = jacobi(u, k2)
    pre = sol.prefactor.value(u, k2)
    if fam.group is FamilyGroup.POWER:
        x = sn * sn
        total = _power_sum(sol, x, k2)
    else:
        z = sn * sn if fam.group is FamilyGroup.HYPER_BAR else cn * cn
        A0, B, C0 = hyper_eval_args(spec, fam)
        total = 0.0
        zp = 1.0
        for n, bn in enumerate(sol.coeffs):
            if bn != 0.0:
                total += bn * zp * tilde_F(n + A0, B, n + C0, z)
            zp *= z
    return pre * total


def _power_sum(sol: SeriesSolution, x: float, k2: float) -> float:
    coeffs = sol.coeffs
    if sol.finite:
        return float(np.polynomial.polynomial.polyval(x, coeffs))
    total = 0.0
    term_mag = 0.0
    xp = 1.0
    for bn in coeffs:
        t = bn * xp
        total += t
        term_mag = abs(t)
        xp *= x
    # Geometric tail estimate: successive terms shrink like k2 * x.
    qhat = k2 * abs(x)
    if qhat >= 1.0:
        raise ConvergenceError(f"series argument x = {x} outside convergence")
    tail = term_mag * qhat / (1.0 - qhat)
    if tail > 1.0e-12 * max(abs(total), 1.0e-300):
        raise ConvergenceError(
            f"truncated tail estimate {tail:.3e} exceeds the error budget "
            f"relative to partial sum {total:.6g}")
    return total
