"""Recurrence triples, truncation, Miller recursion, and evaluation."""

import math

import numpy as np
import pytest

from heunspec.exceptions import (
    ArgumentError,
    ConsistencyError,
    MinimalSolutionError,
)
from heunspec.heun_core import (
    ExpansionFamily,
    FamilyGroup,
    PotentialKind,
    PotentialSpec,
)
from heunspec.series_engine import (
    build_finite,
    build_infinite,
    evaluate,
    evaluate_grid,
    hyper_eval_args,
    recurrence,
    solve_coeffs_finite,
    solve_coeffs_infinite,
    truncation_order,
    tri_eps,
)
from heunspec.special_functions import complete_K, jacobi

RING5_V1_L2_E = [-9.316624790355399849115, -2.683375209644600150885]
RING7_V2_L3_E = [-17.28232998312526813906, -3.717670016874731860935]

# V1 l=-3, k2=0.5, even power family: lowest continued-fraction level
# and its backward-recursion coefficients (25-digit reference run)
CF_L3_E0 = 2.428437037356383979258
CF_L3_COEFFS = {
    1: 0.53578148132180801037,
    2: 0.26221894105030916481,
    3: 0.12606317639065413624,
    5: 0.028954883049760691012,
    10: 0.0007563582518706335586,
}


def fam(sel):
    return ExpansionFamily.from_selector(sel)


def vspec(l, k2=0.5):
    return PotentialSpec.from_k2(PotentialKind.V1, l, k2)


def wspec(l, k2=0.5):
    return PotentialSpec.from_k2(PotentialKind.V2, l, k2)


def rows_match(tri, ref_rows, n_max=7):
    """Row-proportional comparison of two recurrence conventions.

    Each row of a three-term recursion may carry an arbitrary nonzero
    scale, so only the ratios beta_n/alpha_n and gamma_n/alpha_n are
    meaningful.
    """
    for n in range(n_max):
        ra, rb, rg = ref_rows(n)
        ea, eb, eg = tri.alpha_n(n), tri.beta_n(n), tri.gamma_n(n)
        assert eb * ra == pytest.approx(rb * ea, rel=1e-12, abs=1e-12)
        assert eg * ra == pytest.approx(rg * ea, rel=1e-12, abs=1e-12)


def test_even_v1_family_low_rows():
    # first rows of the even first-well family at l = 2, k2 = 1/2
    spec = vspec(2.0)
    tri = recurrence(spec, fam("ring5"), RING5_V1_L2_E[0])
    assert tri.alpha_n(0) == pytest.approx(1.0, rel=1e-14)
    assert tri.gamma_n(1) == pytest.approx(0.5, rel=1e-14)
    assert tri.gamma_n(2) == pytest.approx(0.0, abs=1e-14)


def test_bold_rows_match_reference_forms():
    # independent transcription of the two second-kind family triples
    k2, l, E = 0.5, -0.5, -1.234
    spec = vspec(l, k2)

    def rows5(n):
        a = (1.0 - 1.0 / k2) * (n + 1.0)
        b = ((1.0 / k2 - 2.0) * n * n
             + (2.0 + 2.0 * l - (l + 2.0) / k2) * n
             - (E + l + 2.0) / (4.0 * k2) + (2.0 + l - l * l) / 4.0)
        g = ((n - (l + 1.0) / 2.0) * (n - (l + 2.0) / 2.0)
             * (n - l - 2.5))
        return a, b, g

    def rows6(n):
        a = (1.0 - 1.0 / k2) * (n + 1.0)
        b = ((1.0 / k2 - 2.0) * n * n
             + (1.0 + 2.0 * l - (l + 1.0) / k2) * n
             - (E + 3.0 * l + 5.0) / (4.0 * k2)
             + (5.0 + 3.0 * l - l * l) / 4.0)
        g = (n - l / 2.0) * (n - (l + 1.0) / 2.0) * (n - l - 2.5)
        return a, b, g

    rows_match(recurrence(spec, fam("bold5"), E), rows5)
    rows_match(recurrence(spec, fam("bold6"), E), rows6)


def test_power_first_family_leading_coefficient():
    # alpha_n of the index-1 family is a (n + gamma)(n + 1)
    tri1 = recurrence(vspec(0.7, 0.5), fam("ring1"), 0.0)
    tri2 = recurrence(wspec(0.7, 0.5), fam("ring1"), 0.0)
    for n in range(5):
        assert tri1.alpha_n(n) == pytest.approx(
            2.0 * (n + 0.5) * (n + 1.0), rel=1e-14)
        assert tri2.alpha_n(n) == pytest.approx(
            2.0 * (n + 2.5) * (n + 1.0), rel=1e-14)


def test_energy_slope_of_diagonal():
    # the energy enters the diagonal linearly with slope +-1/(4 k2)
    for spec, sel, sign in ((vspec(1.0), "ring5", 1.0),
                            (wspec(1.0), "bar5", 1.0),
                            (vspec(1.0), "bold5", -1.0),
                            (vspec(1.0), "bold6", -1.0)):
        tri = recurrence(spec, fam(sel), 0.0)
        tri_up = recurrence(spec, fam(sel), 1.0)
        measured = tri_up.beta_n(0) - tri.beta_n(0)
        assert measured == pytest.approx(sign / (4.0 * 0.5), rel=1e-13)
        assert tri.beta_slope == pytest.approx(sign / (4.0 * 0.5),
                                               rel=1e-14)


def test_partner_families_share_rows():
    # family index pairs related by l -> -l - 5 produce identical rows
    pairs = [(vspec(2.0), "ring5", vspec(-7.0), "ring1"),
             (vspec(2.0), "ring6", vspec(-7.0), "ring2"),
             (wspec(1.0), "ring7", wspec(-6.0), "ring3"),
             (vspec(-0.5), "bold5", vspec(-4.5), "bold2"),
             (wspec(-0.5), "bar5", wspec(-4.5), "bar3")]
    for sa, fa, sb, fb in pairs:
        ta = recurrence(sa, fam(fa), -1.7)
        tb = recurrence(sb, fam(fb), -1.7)
        for n in range(6):
            assert ta.alpha_n(n) == pytest.approx(tb.alpha_n(n), rel=1e-12)
            assert ta.beta_n(n) == pytest.approx(tb.beta_n(n), rel=1e-12,
                                                 abs=1e-12)
            assert ta.gamma_n(n) == pytest.approx(tb.gamma_n(n), rel=1e-12,
                                                  abs=1e-12)


def test_truncation_table_integer_l():
    expect_v1 = {
        "ring5": [0, 0, 1, 1, 2, 2],
        "ring6": [None, 0, 0, 1, 1, 2],
        "bold5": [0, 0, 1, 1, 2, 2],
        "bold6": [None, 0, 0, 1, 1, 2],
    }
    for sel, col in expect_v1.items():
        for l, N in enumerate(col):
            assert truncation_order(vspec(float(l)), fam(sel)) == N, (sel, l)
    expect_v2 = {
        "ring5": [0, 0, 1, 1, 2, 2],
        "ring7": [None, 0, 0, 1, 1, 2],
        "bar5": [0, 0, 1, 1, 2, 2],
        "bar7": [None, 0, 0, 1, 1, 2],
    }
    for sel, col in expect_v2.items():
        for l, N in enumerate(col):
            assert truncation_order(wspec(float(l)), fam(sel)) == N, (sel, l)


def test_truncation_table_half_odd_l():
    for sel, maker in (("bold5", vspec), ("bold6", vspec),
                       ("bar5", wspec), ("bar7", wspec)):
        for i, twol in enumerate((-3, -1, 1, 3, 5)):
            assert truncation_order(maker(twol / 2.0), fam(sel)) == i


def test_truncation_negative_l_first_families():
    assert truncation_order(vspec(-6.0), fam("ring1")) == 0
    assert truncation_order(vspec(-7.0), fam("ring1")) == 1
    assert truncation_order(vspec(-3.0), fam("ring5")) is None
    assert truncation_order(vspec(0.3), fam("ring5")) is None
    assert truncation_order(vspec(0.3), fam("bold5")) is None


def test_finite_coefficients_at_eigenvalue():
    spec = vspec(2.0)
    b = solve_coeffs_finite(spec, fam("ring5"), RING5_V1_L2_E[0])
    assert b.shape == (2,)
    assert b[0] == 1.0
    tri = recurrence(spec, fam("ring5"), RING5_V1_L2_E[0])
    assert b[1] == pytest.approx(-tri.beta_n(0) / tri.alpha_n(0), rel=1e-14)


def test_finite_coefficients_reject_detuned_energy():
    with pytest.raises(ConsistencyError):
        solve_coeffs_finite(vspec(2.0), fam("ring5"), RING5_V1_L2_E[0] + 0.01)


def test_backward_recursion_reference_coefficients():
    spec = vspec(-3.0)
    b, ratio = solve_coeffs_infinite(spec, fam("ring5"), CF_L3_E0, n_max=60)
    assert b[0] == 1.0
    for n, ref in CF_L3_COEFFS.items():
        assert b[n] == pytest.approx(ref, rel=1e-11)


def test_backward_recursion_depth_stability():
    spec = vspec(-3.0)
    b60, _ = solve_coeffs_infinite(spec, fam("ring5"), CF_L3_E0, n_max=60)
    b120, _ = solve_coeffs_infinite(spec, fam("ring5"), CF_L3_E0, n_max=120)
    assert b60[50] == pytest.approx(b120[50], rel=1e-12)


def test_backward_recursion_tail_ratio():
    spec = vspec(-3.0)
    _, ratio = solve_coeffs_infinite(spec, fam("ring5"), CF_L3_E0, n_max=200)
    eps = tri_eps(spec, fam("ring5"))
    # first-order large-n model of the recessive growth ratio
    model = 0.5 * (1.0 + (eps - 2.0) / 200.0)
    assert ratio == pytest.approx(model, abs=1e-3)


def test_backward_recursion_rejects_terminating_family():
    with pytest.raises(ArgumentError):
        solve_coeffs_infinite(vspec(2.0), fam("ring5"), -9.3)


def test_backward_recursion_detects_dominant_tail():
    # far from the asymptotic regime the measured ratio tracks the
    # dominant branch and the solver must refuse
    spec = PotentialSpec.from_k2(PotentialKind.V1, -3.0, 0.9)
    with pytest.raises(MinimalSolutionError):
        solve_coeffs_infinite(spec, fam("ring5"), 2.4284370373563840,
                              n_max=3)


def test_one_term_even_solution_is_elementary():
    # single-coefficient level of the first well at l = 0: the series
    # collapses to cn^2 / dn^2 with energy 2 k2 - 2
    spec = vspec(0.0)
    sol = build_finite(spec, fam("ring5"), 2.0 * 0.5 - 2.0)
    for u in (0.2, 0.7, 1.3, 1.7):
        t = jacobi(u, 0.5)
        assert evaluate(sol, u) == pytest.approx(t.cn ** 2 / t.dn ** 2,
                                                 rel=1e-13)


def test_one_term_even_solution_second_well():
    spec = wspec(0.0)
    sol = build_finite(spec, fam("ring5"), -2.0)
    for u in (0.3, 0.9, 1.6):
        t = jacobi(u, 0.5)
        assert evaluate(sol, u) == pytest.approx(t.sn ** 2 / t.dn ** 2,
                                                 rel=1e-13)


def test_odd_family_vanishes_at_origin():
    spec = vspec(1.0)
    E = truncation_energy_single(spec, "ring6")
    sol = build_finite(spec, fam("ring6"), E)
    assert evaluate(sol, 0.0) == 0.0


def truncation_energy_single(spec, sel):
    # one-term family: the diagonal root beta_0 = 0
    from heunspec.spectrum import finite_spectrum
    res = finite_spectrum(spec, fam(sel))
    assert len(res.energies) == 1
    return res.energies[0]


def test_grid_evaluation_matches_scalar(rng):
    cases = [(vspec(2.0), "ring5", RING5_V1_L2_E[0]),
             (vspec(-1.5), "bold5", -0.5 - 1.75 * 0.5),
             (wspec(-1.5), "bar5", -0.5 + 2.25 * 0.5)]
    for spec, sel, E in cases:
        sol = build_finite(spec, fam(sel), E)
        K = complete_K(spec.k.k2)
        us = rng.uniform(0.05 * K, 0.95 * K, size=24)
        if spec.kind is PotentialKind.V2:
            us = us + 0.2 * K
        grid_vals = evaluate_grid(sol, us)
        for u, gv in zip(us, grid_vals):
            assert gv == pytest.approx(evaluate(sol, float(u)), rel=1e-13)


def test_infinite_grid_evaluation_matches_scalar(rng):
    spec = vspec(-3.0)
    sol = build_infinite(spec, fam("ring5"), CF_L3_E0)
    K = complete_K(0.5)
    us = rng.uniform(0.1 * K, 0.9 * K, size=12)
    grid_vals = evaluate_grid(sol, us)
    for u, gv in zip(us, grid_vals):
        assert gv == pytest.approx(evaluate(sol, float(u)), rel=1e-12)


def test_bold_value_at_center_is_finite():
    # at u = 0 the kernel argument reaches 1 and the closed Gauss value
    # takes over
    spec = vspec(-1.5)
    sol = build_finite(spec, fam("bold5"), -0.5 - 1.75 * 0.5)
    v0 = evaluate(sol, 0.0)
    assert math.isfinite(v0) and v0 != 0.0
    v_near = evaluate(sol, 1e-6)
    assert v0 == pytest.approx(v_near, rel=1e-4)


def test_hyper_kernel_arguments():
    # second-kind kernels of the first well at l = -1/2, as printed
    # forms F(n - l/2, 2 + l/2; n + 5/2) and F(n + (1-l)/2, (3+l)/2;
    # n + 5/2) of the argument cn^2
    spec = vspec(-0.5)
    a5, b5, c5 = hyper_eval_args(spec, fam("bold5"))
    assert (a5, b5, c5) == pytest.approx((0.25, 1.75, 2.5), rel=1e-14)
    a6, b6, c6 = hyper_eval_args(spec, fam("bold6"))
    assert (a6, b6, c6) == pytest.approx((0.75, 1.25, 2.5), rel=1e-14)


def test_hyper_kernel_balance_is_half():
    # after the Euler rewrite every kernel satisfies c - a - b = 1/2,
    # which keeps the series bounded through the interior point
    for spec, group, idxs in ((vspec(-0.5), FamilyGroup.HYPER_BOLD,
                               (1, 2, 5, 6)),
                              (wspec(-0.5), FamilyGroup.HYPER_BAR,
                               (1, 3, 5, 7))):
        for i in idxs:
            a0, b0, c0 = hyper_eval_args(spec, ExpansionFamily(group, i))
            assert c0 - a0 - b0 == pytest.approx(0.5, abs=1e-12)


def test_integer_l_hyper_duplicates_power_level():
    # at integer l the kernels terminate and the second-kind family
    # reproduces the power-family eigenfunction
    from heunspec.spectrum import finite_spectrum
    sb = finite_spectrum(vspec(1.0), fam("bold6"))
    sp = finite_spectrum(vspec(1.0), fam("ring5"))
    assert len(sb.energies) == len(sp.energies) == 1
    assert sb.energies[0] == pytest.approx(sp.energies[0], rel=1e-12)
    K = complete_K(0.5)
    us = np.linspace(0.1 * K, 0.9 * K, 17)
    vb = evaluate_grid(sb.solutions[0], us)
    vp = evaluate_grid(sp.solutions[0], us)
    ratio = vb[8] / vp[8]
    assert np.max(np.abs(vb - ratio * vp)) < 1e-12 * np.max(np.abs(vb))
