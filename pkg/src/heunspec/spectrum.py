"""Eigenvalue computation for terminating and infinite series.

Terminating families lead to an (N+1) x (N+1) tridiagonal
characteristic matrix whose determinant must vanish; the energy enters
only along the diagonal, affinely, so the eigenvalues come from one
symmetric (or general) tridiagonal eigenproblem.  Non-terminating
families quantize through the continued-fraction condition that the
minimal solution of the recurrence also satisfies the n = 0 row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .exceptions import ArgumentError, ConvergenceError, NoRootError
from .heun_core import ExpansionFamily, FamilyGroup, PotentialSpec
from .series_engine import (
    RecurrenceTriple,
    SeriesSolution,
    build_finite,
    recurrence,
    solve_coeffs_infinite,
    truncation_order,
)

DET_SCAN_SAMPLES = 400
CF_START_DEPTH = 64
CF_MAX_DEPTH = 100_000
CF_SHIFT_TOL = 1.0e-11


def default_window(spec: PotentialSpec) -> tuple[float, float]:
    """Default energy search window for scans."""
    s = (abs(spec.l) + 6.0) ** 2
    return (-s, s * (1.0 + 1.0 / spec.k.k2))


@dataclass
class SpectrumResult:
    """Finite spectrum of one family."""

    spec: PotentialSpec
    family: ExpansionFamily
    energies: list[float]
    solutions: list[SeriesSolution]
    arscott_ok: bool
    degenerate_pairs: list[tuple[int, int]]
    expected_count: int
    real_count: int


def characteristic_det(spec: PotentialSpec, fam: ExpansionFamily,
                       E: float, N: Optional[int] = None) -> float:
    """Determinant of the truncated characteristic matrix at energy E.

    Computed by the continuant recursion
    D_n = beta_n D_{n-1} - gamma_n alpha_{n-1} D_{n-2}.
    """
    if N is None:
        N = truncation_order(spec, fam)
        if N is None:
            raise ArgumentError(
                f"family {fam.selector} does not terminate at l = {spec.l}")
    tri = recurrence(spec, fam, E)
    return _continuant(tri, N)


def _continuant(tri: RecurrenceTriple, N: int) -> float:
    d_prev2 = 1.0
    d_prev = tri.beta_n(0)
    for n in range(1, N + 1):
        d = tri.beta_n(n) * d_prev - tri.gamma_n(n) * tri.alpha_n(n - 1) * d_prev2
        d_prev2, d_prev = d_prev, d
    return d_prev


def _continuant_complex(tri: RecurrenceTriple, N: int, E: complex) -> complex:
    """Continuant with complex energy, using the affine diagonal shift."""
    shift = tri.beta_slope * E
    d_prev2 = 1.0 + 0.0j
    d_prev = tri.beta_n(0) + shift
    for n in range(1, N + 1):
        d = ((tri.beta_n(n) + shift) * d_prev
             - tri.gamma_n(n) * tri.alpha_n(n - 1) * d_prev2)
        d_prev2, d_prev = d_prev, d
    return d_prev


def characteristic_det_complex(spec: PotentialSpec, fam: ExpansionFamily,
                               E: complex) -> complex:
    """Characteristic determinant continued to complex energy."""
    N = truncation_order(spec, fam)
    if N is None:
        raise ArgumentError(
            f"family {fam.selector} does not terminate at l = {spec.l}")
    tri = recurrence(spec, fam, 0.0)
    return _continuant_complex(tri, N, complex(E))


def arscott_check(spec: PotentialSpec,
                  fam: ExpansionFamily) -> tuple[bool, list[int]]:
    """Sign condition guaranteeing N+1 real simple eigenvalues.

    Checks alpha_{n-1} gamma_n > 0 for 1 <= n <= N; returns the flag and
    the list of violating indices n.
    """
    N = truncation_order(spec, fam)
    if N is None:
        raise ArgumentError(
            f"family {fam.selector} does not terminate at l = {spec.l}")
    tri = recurrence(spec, fam, 0.0)
    bad = [n for n in range(1, N + 1)
           if not tri.alpha_n(n - 1) * tri.gamma_n(n) > 0.0]
    return (len(bad) == 0, bad)


def finite_spectrum(spec: PotentialSpec, fam: ExpansionFamily) -> SpectrumResult:
    """All real eigenvalues of a terminating family, ascending.

    When the sign condition holds the characteristic matrix is
    symmetrized exactly and solved with a tridiagonal eigensolver,
    guaranteeing N+1 simple real eigenvalues.  Otherwise the real roots
    of the characteristic polynomial are taken from its companion
    matrix and polished against the determinant; complex pairs then
    show up as a deficit between expected_count and real_count.
    """
    N = truncation_order(spec, fam)
    if N is None:
        raise ArgumentError(
            f"family {fam.selector} does not terminate at l = {spec.l}")
    ok, _bad = arscott_check(spec, fam)
    tri = recurrence(spec, fam, 0.0)
    slope = tri.beta_slope
    diag = np.array([tri.beta_n(n) for n in range(N + 1)])
    if ok:
        if N == 0:
            lams = np.array([diag[0]])
        else:
            off = np.array([math.sqrt(tri.alpha_n(n) * tri.gamma_n(n + 1))
                            for n in range(N)])
            lams = eigh_tridiagonal(diag, off, eigvals_only=True)
        energies = sorted(float(-lam / slope) for lam in lams)
    else:
        energies = _companion_real_roots(tri, N)
    degenerate = [(i, j) for i in range(len(energies))
                  for j in range(i + 1, len(energies))
                  if abs(energies[i] - energies[j]) <= 1.0e-9 * (1.0 + abs(energies[i]))]
    solutions = [build_finite(spec, fam, E) for E in energies]
    return SpectrumResult(spec=spec, family=fam, energies=energies,
                          solutions=solutions, arscott_ok=ok,
                          degenerate_pairs=degenerate,
                          expected_count=N + 1, real_count=len(energies))


def _companion_real_roots(tri, N: int) -> list[float]:
    """Real roots of the characteristic determinant, ascending.

    The determinant is a degree N+1 polynomial in E, so its roots are
    the eigenvalues of the tridiagonal matrix built from the recurrence
    rows at E = 0 (mapped back through the diagonal slope).  Retained
    real candidates are polished with a narrow determinant bracket,
    which restores full precision when the dense eigensolver loses a
    few digits on a non-symmetric matrix.
    """
    slope = tri.beta_slope
    M = np.zeros((N + 1, N + 1))
    for n in range(N + 1):
        M[n, n] = tri.beta_n(n)
        if n < N:
            M[n, n + 1] = tri.alpha_n(n)
        if n > 0:
            M[n, n - 1] = tri.gamma_n(n)
    lams = np.linalg.eigvals(M)

    def det(E: float) -> float:
        d_prev2 = 1.0
        d_prev = tri.beta_n(0) + slope * E
        for n in range(1, N + 1):
            d = ((tri.beta_n(n) + slope * E) * d_prev
                 - tri.gamma_n(n) * tri.alpha_n(n - 1) * d_prev2)
            d_prev2, d_prev = d_prev, d
        return d_prev

    roots = []
    for lam in lams:
        if abs(lam.imag) > 1.0e-8 * (1.0 + abs(lam)):
            continue
        E = float(-lam.real / slope)
        width = 1.0e-6 * (1.0 + abs(E))
        lo_v, hi_v = det(E - width), det(E + width)
        if lo_v * hi_v < 0.0:
            E = float(brentq(det, E - width, E + width,
                             xtol=1.0e-12, rtol=8.9e-16))
        roots.append(E)
    return sorted(roots)


def infinite_energy(spec: PotentialSpec, fam: ExpansionFamily,
                    bracket: Optional[tuple[float, float]] = None) -> float:
    """One eigenvalue of a non-terminating family via continued fraction.

    The quantization function is

        f(E) = beta_0 - alpha_0 gamma_1 / (beta_1 - alpha_1 gamma_2 / (...))

    evaluated at increasing depth until the refined root moves by less
    than 1e-11.  The continued fraction also changes sign at its poles,
    so a candidate is accepted only if the minimal-solution coefficients
    satisfy the n = 0 row there.  With bracket None the default window
    is scanned and the lowest accepted root is returned.
    """
    if truncation_order(spec, fam) is not None:
        raise ArgumentError(
            f"family {fam.selector} terminates at l = {spec.l}; "
            "use finite_spectrum")
    if bracket is not None:
        return _cf_root(spec, fam, bracket[0], bracket[1])
    lo, hi = default_window(spec)
    grid = np.linspace(lo, hi, DET_SCAN_SAMPLES)
    vals = [_cf_value(spec, fam, E, 2000) for E in grid]
    for i in range(len(grid) - 1):
        if vals[i] * vals[i + 1] < 0.0:
            try:
                return _cf_root(spec, fam, float(grid[i]), float(grid[i + 1]))
            except NoRootError:
                continue
    raise NoRootError(
        f"no continued-fraction root of family {fam.selector} in the "
        f"default window [{lo:.4g}, {hi:.4g}]")


def _cf_value(spec: PotentialSpec, fam: ExpansionFamily, E: float,
              depth: int) -> float:
    tri = recurrence(spec, fam, E)
    f = tri.beta_n(depth)
    for n in range(depth - 1, -1, -1):
        if f == 0.0:
            f = 1.0e-300
        f = tri.beta_n(n) - tri.alpha_n(n) * tri.gamma_n(n + 1) / f
    return f


def _cf_root(spec: PotentialSpec, fam: ExpansionFamily,
             lo: float, hi: float) -> float:
    depth = CF_START_DEPTH
    root_prev = None
    while depth <= CF_MAX_DEPTH:
        flo = _cf_value(spec, fam, lo, depth)
        fhi = _cf_value(spec, fam, hi, depth)
        if flo * fhi > 0.0:
            raise NoRootError(
                f"continued fraction has no sign change on [{lo}, {hi}]")
        root = brentq(lambda E: _cf_value(spec, fam, E, depth), lo, hi,
                      xtol=1.0e-12, rtol=8.9e-16)
        if root_prev is not None and abs(root - root_prev) < CF_SHIFT_TOL:
            _reject_pole(spec, fam, float(root))
            return float(root)
        root_prev = root
        depth *= 2
    raise ConvergenceError(
        f"continued-fraction depth exceeded {CF_MAX_DEPTH} without "
        "stabilizing the root")


def _reject_pole(spec: PotentialSpec, fam: ExpansionFamily, E: float) -> None:
    """Distinguish a quantization root from a continued-fraction pole.

    At a true eigenvalue the minimal solution satisfies the first
    recurrence row; at a pole it does not.
    """
    coeffs, _ = solve_coeffs_infinite(spec, fam, E, n_max=200)
    tri = recurrence(spec, fam, E)
    row0 = tri.beta_n(0) * coeffs[0] + tri.alpha_n(0) * coeffs[1]
    scale = max(abs(tri.beta_n(0)), abs(tri.alpha_n(0)), 1.0)
    if abs(row0) > 1.0e-6 * scale:
        raise NoRootError(
            f"sign change at E = {E:.12g} is a continued-fraction pole "
            f"(row residual {abs(row0):.3e})")


def symmetry_partner(spec: PotentialSpec) -> PotentialSpec:
    """The spec with coupling parameter reflected, l -> -l - 5.

    The combination (l+2)(l+3) is invariant, so both specs describe the
    same potential; series families map onto partner families.
    """
    return PotentialSpec(kind=spec.kind, l=-spec.l - 5.0, k=spec.k)
