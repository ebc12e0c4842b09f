"""Independent eigenvalue oracle: wall asymptotics plus shooting.

This module deliberately knows nothing about series solutions or
recurrences.  It integrates psi'' = (V - E) psi with an adaptive
Runge-Kutta scheme, starting from the exact indicial behavior
psi ~ t^2 (1 + c2 t^2 + c4 t^4) at the singular walls, and quantizes
energies by a parity or matching condition:

* first potential, domain (-K, K): integrate from the regular center
  u = 0 with even (1, 0) or odd (0, 1) data and from the right wall
  inward; an eigenvalue makes the two branches proportional, so their
  Wronskian at u = K/2 vanishes.
* second potential, domain (0, 2K), symmetric about u = K: integrate
  from the wall at 0 up to the midpoint; symmetric eigenfunctions need
  psi'(K) = 0, antisymmetric ones psi(K) = 0.

Many trial energies integrate together as one stacked first-order
system, which keeps the scan and bisection passes cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .exceptions import ArgumentError
from .heun_core import PotentialKind, PotentialSpec
from .special_functions import complete_K, jacobi

RTOL = 1.0e-11
ATOL = 1.0e-14
WALL_OFFSET = 1.0e-3
BISECT_TOL = 1.0e-9
DEFAULT_SAMPLES = 400


@dataclass
class ShootingResult:
    """Eigenvalues found in a window, ascending; complete is False when
    the search stopped at max_count with sign changes left over."""

    energies: list[float]
    complete: bool


def _wall_coeffs(kind: PotentialKind, k2: float, L: float) -> tuple[float, float]:
    """W0 and W2 of the wall expansion V = 2/t^2 + W0 + W2 t^2 + O(t^4).

    t is the distance from the wall (u = K for the first potential,
    u = 0 for the second).
    """
    smooth0 = 2.0 * (1.0 + k2) / 3.0
    smooth2 = 2.0 * (1.0 - k2 + k2 * k2) / 15.0
    if kind is PotentialKind.V1:
        return smooth0 - 2.0 * k2 - L, smooth2 + L * k2
    return smooth0 - (1.0 - k2) * L, smooth2 - (1.0 - k2) * L * k2


def _wall_start(kind: PotentialKind, k2: float, L: float,
                E: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
    """psi and dpsi/dt at distance t from a wall, from the t^2 branch."""
    W0, W2 = _wall_coeffs(kind, k2, L)
    c2 = (W0 - E) / 10.0
    c4 = ((W0 - E) * c2 + W2) / 28.0
    t2 = t * t
    psi = t2 * (1.0 + c2 * t2 + c4 * t2 * t2)
    dpsi = 2.0 * t + 4.0 * c2 * t * t2 + 6.0 * c4 * t2 * t2 * t
    return psi, dpsi


def _advance(kind: PotentialKind, k2: float, L: float, E: np.ndarray,
             u0: float, u1: float, psi0: np.ndarray,
             dpsi0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Integrate the stacked system from u0 to u1."""
    m = len(E)
    one_m_k2 = 1.0 - k2

    def rhs(u, y):
        sn, cn, dn = jacobi(u, k2)
        if kind is PotentialKind.V1:
            V = one_m_k2 * (2.0 / (cn * cn) - L / (dn * dn))
        else:
            V = 2.0 / (sn * sn) - one_m_k2 * L / (dn * dn)
        out = np.empty(2 * m)
        out[:m] = y[m:]
        out[m:] = (V - E) * y[:m]
        return out

    y0 = np.concatenate((psi0, dpsi0))
    res = solve_ivp(rhs, (u0, u1), y0, method="DOP853",
                    rtol=RTOL, atol=ATOL, dense_output=False)
    if not res.success:
        raise ArgumentError(f"integration failed: {res.message}")
    y = res.y[:, -1]
    return y[:m], y[m:]


def matching_values(spec: PotentialSpec, parity: str,
                    energies: Sequence[float]) -> np.ndarray:
    """Vector of matching-function values F(E) for the given energies.

    Roots of F are the shooting eigenvalues of the requested symmetry
    class ("even" or "odd"; for the second potential these mean
    symmetric or antisymmetric about the midpoint u = K).
    """
    if parity not in ("even", "odd"):
        raise ArgumentError(f"parity must be 'even' or 'odd', got {parity!r}")
    E = np.asarray(list(energies), dtype=float)
    if E.size == 0:
        return np.empty(0)
    k2 = spec.k.k2
    L = spec.coupling
    K = complete_K(k2)
    delta = WALL_OFFSET * K
    if spec.kind is PotentialKind.V1:
        half = 0.5 * K
        if parity == "even":
            psi0 = np.ones_like(E)
            dpsi0 = np.zeros_like(E)
        else:
            psi0 = np.zeros_like(E)
            dpsi0 = np.ones_like(E)
        pl, dl = _advance(spec.kind, k2, L, E, 0.0, half, psi0, dpsi0)
        pw, dw_dt = _wall_start(spec.kind, k2, L, E, delta)
        # t measures distance from the wall, so du = -dt.
        pr, dr = _advance(spec.kind, k2, L, E, K - delta, half, pw, -dw_dt)
        return pl * dr - dl * pr
    pw, dw_dt = _wall_start(spec.kind, k2, L, E, delta)
    pk, dk = _advance(spec.kind, k2, L, E, delta, K, pw, dw_dt)
    return dk if parity == "even" else pk


def _bisect_batch(spec: PotentialSpec, parity: str, lo: np.ndarray,
                  flo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    lo = lo.copy()
    hi = hi.copy()
    sign_lo = np.sign(flo)
    while np.max(hi - lo) > BISECT_TOL:
        mid = 0.5 * (lo + hi)
        fm = matching_values(spec, parity, mid)
        left = np.sign(fm) == sign_lo
        lo = np.where(left, mid, lo)
        hi = np.where(left, hi, mid)
    return 0.5 * (lo + hi)


def shooting_spectrum(spec: PotentialSpec, parity: str, max_count: int = 8,
                      window: Optional[tuple[float, float]] = None,
                      samples: Optional[int] = None) -> ShootingResult:
    """Eigenvalues of one symmetry class found by scan plus bisection.

    The window defaults to the standard search window; the matching
    function is sampled, sign changes are bracketed, and each bracket
    is bisected to 1e-9.  At most max_count roots are refined.
    """
    if window is None:
        s = (abs(spec.l) + 6.0) ** 2
        window = (-s, s * (1.0 + 1.0 / spec.k.k2))
    n = samples if samples is not None else DEFAULT_SAMPLES
    grid = np.linspace(window[0], window[1], n)
    vals = matching_values(spec, parity, grid)
    lo_list, flo_list, hi_list = [], [], []
    for i in range(n - 1):
        if vals[i] == 0.0:
            lo_list.append(grid[i] - 1e-12)
            flo_list.append(matching_values(spec, parity, [grid[i] - 1e-12])[0])
            hi_list.append(grid[i] + 1e-12)
        elif vals[i] * vals[i + 1] < 0.0:
            lo_list.append(grid[i])
            flo_list.append(vals[i])
            hi_list.append(grid[i + 1])
    complete = len(lo_list) <= max_count
    lo_list = lo_list[:max_count]
    flo_list = flo_list[:max_count]
    hi_list = hi_list[:max_count]
    if not lo_list:
        return ShootingResult(energies=[], complete=complete)
    roots = _bisect_batch(spec, parity, np.array(lo_list),
                          np.array(flo_list), np.array(hi_list))
    return ShootingResult(energies=sorted(float(r) for r in roots),
                          complete=complete)


def shooting_match(spec: PotentialSpec, parity: str, target: float,
                   radius: float = 0.05,
                   max_radius: float = 0.8) -> Optional[float]:
    """The shooting eigenvalue nearest to target, or None.

    Scans a widening bracket around the target for a sign change of the
    matching function and bisects it.  Returns None when no sign change
    exists within max_radius, meaning the oracle has no eigenvalue of
    this symmetry class near the target.
    """
    res = shooting_match_table(spec, parity, [target], radius=radius,
                               max_radius=max_radius)
    return res[0]


def shooting_match_table(spec: PotentialSpec, parity: str,
                         targets: Sequence[float], radius: float = 0.05,
                         max_radius: float = 0.8) -> list[Optional[float]]:
    """shooting_match for many targets of one spec, batched."""
    targets = list(targets)
    out: list[Optional[float]] = [None] * len(targets)
    pending = list(range(len(targets)))
    r = radius
    while pending and r <= max_radius:
        # Nine probes per pending target in one stacked evaluation.
        offsets = np.linspace(-r, r, 9)
        probes = np.concatenate([targets[j] + offsets for j in pending])
        vals = matching_values(spec, parity, probes)
        lo, flo, hi, owners = [], [], [], []
        still = []
        for row, j in enumerate(pending):
            v = vals[9 * row:9 * row + 9]
            found = False
            for i in range(8):
                if v[i] * v[i + 1] < 0.0:
                    lo.append(targets[j] + offsets[i])
                    flo.append(v[i])
                    hi.append(targets[j] + offsets[i + 1])
                    owners.append(j)
                    found = True
                    break
            if not found:
                still.append(j)
        if lo:
            roots = _bisect_batch(spec, parity, np.array(lo),
                                  np.array(flo), np.array(hi))
            for root, j in zip(roots, owners):
                out[j] = float(root)
        pending = still
        r *= 3.0
    return out
