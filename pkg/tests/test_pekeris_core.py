import math

import numpy as np
import pytest

from pekeris_core import (EXACT_CENTRIFUGAL, PEKERIS_APPROX, DomainError, centrifugal_exact,
                          centrifugal_pekeris, centrifugal_taylor, discrepancy_profile,
                          effective_potential, morse_potential, pekeris_coefficients)

ALPHAS = (1.0, 1.4405, 2.0, 5.0)
EPS = np.finfo(float).eps


@pytest.mark.parametrize("alpha, expected", [
    (1.0, (1.0, -2.0, 2.0)),
    (2.0, (0.25, 0.5, 0.25)),
])
def test_coefficients_known_values(alpha, expected):
    assert pekeris_coefficients(alpha).as_tuple() == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("alpha", ALPHAS + (0.3, 3.5, 10.0, 37.0))
def test_coefficients_sum_to_one(alpha):
    c = pekeris_coefficients(alpha)
    # rounding grows with the size of the terms: about 24, -53 and 30 at alpha = 0.3
    magnitude = max(1.0, sum(abs(v) for v in c.as_tuple()))
    assert abs(c.c0 + c.c1 + c.c2 - 1.0) <= 10 * EPS * magnitude


@pytest.mark.parametrize("alpha", [3.5, 5.0, 10.0])
def test_coefficient_signs_for_large_alpha(alpha):
    c = pekeris_coefficients(alpha)
    assert c.c0 > 0
    assert c.c2 < 0


@pytest.mark.parametrize("alpha", [0.0, -1.0, math.inf, math.nan])
def test_coefficients_reject_bad_alpha(alpha):
    with pytest.raises(DomainError):
        pekeris_coefficients(alpha)


@pytest.mark.parametrize("r, expected", [(0.0, 1.0), (1.0, 0.25), (0.15, 1 / 1.3225)])
def test_centrifugal_exact_values(r, expected):
    assert centrifugal_exact(r) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("r", [-1.0, -1.5, -10.0])
def test_centrifugal_exact_rejects_pole(r):
    with pytest.raises(DomainError):
        centrifugal_exact(r)


def test_centrifugal_exact_is_array_aware():
    values = centrifugal_exact(np.array([0.0, 1.0, 3.0]))
    assert values == pytest.approx([1.0, 0.25, 0.0625])


@pytest.mark.parametrize("alpha", ALPHAS)
def test_pekeris_form_is_one_at_origin(alpha):
    assert centrifugal_pekeris(pekeris_coefficients(alpha), 0.0) == pytest.approx(1.0, abs=10 * EPS)


def test_pekeris_form_tends_to_c0():
    c = pekeris_coefficients(1.4405)
    assert c.c0 == pytest.approx(1 - 3 / 1.4405 + 3 / 1.4405 ** 2, rel=1e-13)
    assert c.c0 == pytest.approx(0.3631449, abs=1e-7)
    assert centrifugal_pekeris(c, 60.0) == pytest.approx(c.c0, rel=1e-14)


def test_pekeris_form_direct_evaluation():
    c = pekeris_coefficients(2.0)
    expected = 0.25 + 0.5 * math.exp(-0.2) + 0.25 * math.exp(-0.4)
    assert centrifugal_pekeris(c, 0.1) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_pekeris_form_matches_taylor_through_second_order(alpha):
    """f(0) = 1, f'(0) = -2, f''(0) = 6 by five-point differences."""
    c = pekeris_coefficients(alpha)
    h = 1e-3
    f = lambda r: centrifugal_pekeris(c, r)
    fm2, fm1, f0, fp1, fp2 = f(-2 * h), f(-h), f(0.0), f(h), f(2 * h)
    first = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
    second = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h)
    assert f0 == pytest.approx(1.0, abs=1e-6)
    assert first == pytest.approx(-2.0, abs=1e-6)
    assert second == pytest.approx(6.0, abs=1e-6)


def test_taylor_series_truncation():
    assert centrifugal_taylor(0.1, order=2) == pytest.approx(1 - 0.2 + 0.03)
    assert centrifugal_taylor(0.1, order=3) == pytest.approx(1 - 0.2 + 0.03 - 0.004)
    # third-order gap to the exact term is O(r^4)
    assert abs(centrifugal_taylor(0.01, order=3) - centrifugal_exact(0.01)) < 1e-7


def test_discrepancy_zero_at_origin():
    profile = discrepancy_profile(1.4405, -0.3, 0.3, 61)
    i = profile.r_values.index(min(profile.r_values, key=abs))
    assert profile.r_values[i] == pytest.approx(0.0, abs=1e-15)
    assert profile.relative_error[i] <= 1e-14
    assert all(e >= 0 for e in profile.relative_error)


def test_discrepancy_monotone_for_alpha_two():
    profile = discrepancy_profile(2.0, 0.0, 0.3, 31)
    errors = profile.relative_error
    assert len(errors) == 31
    assert all(b >= a for a, b in zip(errors, errors[1:]))


def test_larger_alpha_is_worse_at_fixed_r():
    small = discrepancy_profile(2.0, 0.15, 0.3, 2).relative_error[0]
    large = discrepancy_profile(5.0, 0.15, 0.3, 2).relative_error[0]
    assert large > small
    assert small == pytest.approx(1.94e-3, rel=0.02)


def test_profile_rows_and_max():
    profile = discrepancy_profile(1.4405, 0.0, 0.3, 4)
    rows = profile.rows()
    assert len(rows) == 4
    r, exact, approx, err = rows[-1]
    assert r == pytest.approx(0.3)
    assert err == pytest.approx(abs(approx - exact) / exact)
    assert profile.max_relative_error() == max(profile.relative_error)


@pytest.mark.parametrize("r_min, r_max, samples", [
    (-1.0, 0.3, 10),
    (-2.0, 0.3, 10),
    (0.3, 0.0, 10),
    (0.0, math.inf, 10),
    (0.0, 0.3, 1),
])
def test_discrepancy_rejects_bad_range(r_min, r_max, samples):
    with pytest.raises(DomainError):
        discrepancy_profile(1.4405, r_min, r_max, samples)


def test_morse_potential_minimum():
    r = np.linspace(-0.5, 2.0, 2501)
    v = morse_potential(10.0, 1.4405, r)
    assert morse_potential(10.0, 1.4405, 0.0) == pytest.approx(-10.0)
    assert r[np.argmin(v)] == pytest.approx(0.0, abs=1e-3)


def test_effective_potential_variants_agree_without_barrier():
    r = np.linspace(-0.5, 5.0, 50)
    pekeris = effective_potential(629.0, 1.4405, 0.0, PEKERIS_APPROX)(r)
    exact = effective_potential(629.0, 1.4405, 0.0, EXACT_CENTRIFUGAL)(r)
    np.testing.assert_allclose(pekeris, exact, rtol=0, atol=1e-12)


def test_effective_potential_barrier_terms():
    barrier = 6.0
    r = 0.2
    c = pekeris_coefficients(1.4405)
    pekeris = effective_potential(629.0, 1.4405, barrier, PEKERIS_APPROX)(r)
    exact = effective_potential(629.0, 1.4405, barrier, EXACT_CENTRIFUGAL)(r)
    base = morse_potential(629.0, 1.4405, r)
    assert pekeris - base == pytest.approx(barrier * centrifugal_pekeris(c, r))
    assert exact - base == pytest.approx(barrier / 1.2 ** 2)


def test_effective_potential_rejects_unknown_variant():
    with pytest.raises(DomainError):
        effective_potential(1.0, 1.0, 0.0, "wkb")
