"""Residual checks, symmetry equivalences, and the shooting oracle."""

import ast
import dataclasses
import math

import numpy as np
import pytest

import heunspec.shooting
from heunspec.exceptions import ArgumentError
from heunspec.heun_core import ExpansionFamily, PotentialKind
from heunspec.spectrum import finite_spectrum
from heunspec.shooting import (
    _wall_start,
    matching_values,
    shooting_match,
    shooting_spectrum,
)
from heunspec.verify import (
    equivalence_suite,
    ode_residual,
    partner_coefficient_record,
    residual_grid,
)

from conftest import make_spec

fam = ExpansionFamily.from_selector

# Continued-fraction eigenvalues of the first potential at l = -3,
# k2 = 0.5 (same constants test_spectrum.py checks against the
# quantization function); the shooting oracle must reproduce them
# through a completely different route.
CF_L3_E0 = 2.428437037356383979258
CF_L3_E1 = 11.03026053382834296563
RING5_V1_L2_E = [-9.316624790355399849115, -2.683375209644600150885]


def bold5_ground():
    spec = make_spec("v1", -1.5, 0.5)
    res = finite_spectrum(spec, fam("bold5"))
    assert res.energies == pytest.approx([-1.375], rel=1e-12)
    return res.solutions[0]


def test_residual_small_at_eigenvalue():
    report = ode_residual(bold5_ground())
    assert report.max_rel_residual < 1e-9
    assert report.l2_rel_residual <= report.max_rel_residual


def test_residual_detects_detuned_energy():
    # shifting E while keeping the coefficients leaves the function
    # unchanged, so the residual must grow to the size of the shift
    sol = dataclasses.replace(bold5_ground(), E=-1.375 + 0.01)
    report = ode_residual(sol)
    assert report.max_rel_residual > 1e-4


def test_residual_shrinks_under_stencil_refinement():
    sol = bold5_ground()
    coarse = ode_residual(sol, n_grid=16).max_rel_residual
    fine = ode_residual(sol, n_grid=32).max_rel_residual
    assert coarse / fine > 3.0


def test_residual_of_zero_solution_is_zero():
    sol = bold5_ground()
    zero = dataclasses.replace(sol, coeffs=np.zeros_like(sol.coeffs))
    report = ode_residual(zero)
    assert report.max_rel_residual == 0.0
    assert report.l2_rel_residual == 0.0


def test_residual_grid_stays_interior():
    spec = make_spec("v2", 1.0, 0.5)
    us = residual_grid(spec, n_grid=32, margin=0.1)
    from heunspec.special_functions import complete_K
    K = complete_K(0.5)
    assert us[0] == pytest.approx(0.1 * K)
    assert us[-1] == pytest.approx(0.9 * K)


def test_residual_rejects_tiny_grid():
    with pytest.raises(ArgumentError):
        ode_residual(bold5_ground(), n_grid=8)


def test_shooting_matches_power_eigenvalues():
    spec = make_spec("v1", 2.0, 0.5)
    for E in RING5_V1_L2_E:
        got = shooting_match(spec, "even", E)
        assert got is not None
        assert abs(got - E) < 1e-6
    spec2 = make_spec("v2", 0.0, 0.5)
    got = shooting_match(spec2, "even", -2.0)
    assert got is not None
    assert abs(got + 2.0) < 1e-6


def test_shooting_agrees_with_continued_fraction():
    # non-terminating case: the oracle and the continued fraction are
    # independent routes to the same even-sector eigenvalues
    spec = make_spec("v1", -3.0, 0.5)
    even = shooting_spectrum(spec, "even", window=(0.0, 12.0))
    assert even.complete
    assert even.energies == pytest.approx([CF_L3_E0, CF_L3_E1], abs=5e-9)
    odd = shooting_spectrum(spec, "odd", window=(0.0, 12.0))
    assert odd.complete
    assert odd.energies == pytest.approx([6.008387618943264], abs=5e-9)


def test_shooting_interleaves_parities():
    # between the two even roots there is exactly one odd root
    assert CF_L3_E0 < 6.008387618943264 < CF_L3_E1


def test_hyper_level_has_no_shooting_partner():
    # the terminating two-sided series at half-odd l satisfies a mixed
    # interior condition, not a parity condition, so neither symmetry
    # class owns an eigenvalue near its energy
    spec = make_spec("v2", -1.5, 0.25)
    res = finite_spectrum(spec, fam("bar5"))
    assert res.energies == pytest.approx([0.0625], rel=1e-12)
    assert shooting_match(spec, "even", 0.0625) is None
    assert shooting_match(spec, "odd", 0.0625) is None


def test_wall_series_quadratic_slope():
    for kind, l in ((PotentialKind.V1, 1.0), (PotentialKind.V2, -1.5)):
        L = (l + 2.0) * (l + 3.0)
        E = np.array([1.0])
        p1, _ = _wall_start(kind, 0.5, L, E, 1e-3)
        p2, _ = _wall_start(kind, 0.5, L, E, 2e-3)
        slope = math.log(p2[0] / p1[0]) / math.log(2.0)
        assert slope == pytest.approx(2.0, abs=1e-4)


def test_matching_values_rejects_bad_parity():
    spec = make_spec("v1", 0.0, 0.5)
    with pytest.raises(ArgumentError):
        matching_values(spec, "mixed", [1.0])


def test_equivalence_suite_power_and_hyper():
    records = equivalence_suite(make_spec("v1", 1.0, 0.5))
    assert len(records) == 8
    assert all(r.max_dev < 1e-12 for r in records)
    names = " ".join(r.name for r in records)
    assert "ring5(l=1) vs ring1(l=-6)" in names
    assert "bold5(l=1) vs bold2(l=-6)" in names


def test_equivalence_suite_half_odd():
    records = equivalence_suite(make_spec("v2", -1.5, 0.25))
    assert len(records) == 4
    assert all(r.max_dev < 1e-12 for r in records)
    names = " ".join(r.name for r in records)
    assert "bar5(l=-1.5) vs bar3(l=-3.5)" in names


def test_partner_coefficients_match_termwise():
    spec = make_spec("v1", 2.0, 0.5)
    res = finite_spectrum(spec, fam("ring5"))
    rec = partner_coefficient_record(spec, fam("ring5"), res.energies[0])
    assert rec.max_dev < 1e-12
    # same identity along the non-terminating branch
    rec2 = partner_coefficient_record(make_spec("v1", -3.0, 0.5),
                                      fam("ring5"), CF_L3_E0)
    assert rec2.max_dev < 1e-12


def test_shooting_module_is_independent():
    # the oracle must never import the machinery it is checking
    tree = ast.parse(open(heunspec.shooting.__file__).read())
    banned = ("series_engine", "spectrum", "verify")
    for node in ast.walk(tree):
        mods = []
        if isinstance(node, ast.Import):
            mods = [a.name for a in node.names]
        elif isinstance(node, ast.ImportFrom):
            mods = [node.module or ""] + [a.name for a in node.names]
        for m in mods:
            assert not any(b in m for b in banned), f"oracle imports {m}"
