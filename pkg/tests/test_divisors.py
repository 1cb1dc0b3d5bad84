"""Divisor sieves, weighted tables, main terms, and the identity check."""

import json
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np
import pytest

from zetalab.divisors import (
    N_CEILING,
    dirichlet_identity_check,
    error_term,
    error_trend,
    main_terms,
    main_terms_to_json,
    series_tail_bound,
    sieve_divisor_counts,
    trend_to_csv,
    weighted_divisor_table,
)
from zetalab.errors import CeilingError, DomainError
from zetalab.zetanum import zeta_eval


@lru_cache(maxsize=None)
def _dk_brute(k: int, n: int) -> int:
    # ordered factorizations into k parts, by the divisor-sum recursion
    if k == 1:
        return 1
    return sum(_dk_brute(k - 1, d) for d in range(1, n + 1) if n % d == 0)


@pytest.fixture(scope="module")
def ledger_2_035():
    return weighted_divisor_table(2, 0.35, 10**5)


@pytest.fixture(scope="module")
def poly_2_035():
    return main_terms(2, 0.35)


@pytest.fixture(scope="module")
def poly_1_04():
    return main_terms(1, 0.4)


# ---------------------------------------------------------------------------
# Sieve tables.
# ---------------------------------------------------------------------------


def test_sieve_small_values():
    d4 = sieve_divisor_counts(4, 50)
    assert d4[1] == 1
    assert d4[2] == 4
    assert d4[6] == 16
    assert d4[16] == 35  # binom(4+4-1, 4-1) for p^4
    d2 = sieve_divisor_counts(2, 1000)
    assert int(d2[12]) == 6
    assert int(np.sum(d2[1:])) == 7069


def test_sieve_against_brute_force():
    for k in (2, 3, 5, 6):
        table = sieve_divisor_counts(k, 600)
        for n in (1, 2, 17, 36, 97, 128, 360, 599, 600):
            assert table[n] == _dk_brute(k, n), (k, n)


def test_sieve_dimension_one_is_ones():
    t = sieve_divisor_counts(1, 20)
    assert t[0] == 0
    assert np.all(t[1:] == 1)


def test_sieve_validation():
    with pytest.raises(DomainError):
        sieve_divisor_counts(0, 10)
    with pytest.raises(DomainError):
        sieve_divisor_counts(2, 0)
    with pytest.raises(DomainError):
        sieve_divisor_counts(2.0, 10)
    with pytest.raises(CeilingError):
        sieve_divisor_counts(2, N_CEILING + 1)


# ---------------------------------------------------------------------------
# Weighted tables and the summatory function.
# ---------------------------------------------------------------------------


def test_weighted_table_prime_values():
    # at a prime p the only splittings are p*1 and 1*p
    ledger = weighted_divisor_table(1, 0.3, 100)
    for p in (2, 3, 5, 7, 11, 97):
        expected = 4.0 + p ** (-0.3)
        assert math.isclose(ledger.combined[p], expected, rel_tol=1e-12)


def test_weighted_table_multiplicative():
    ledger = weighted_divisor_table(2, 0.25, 10**4)
    rng = np.random.default_rng(20260822)
    checked = 0
    while checked < 500:
        m = int(rng.integers(2, 100))
        n = int(rng.integers(2, 100))
        if math.gcd(m, n) != 1:
            continue
        lhs = ledger.combined[m * n]
        rhs = ledger.combined[m] * ledger.combined[n]
        assert math.isclose(lhs, rhs, rel_tol=1e-12), (m, n)
        checked += 1


def test_zero_shift_collapses_to_plain_counts():
    for ell in (1, 2, 3):
        ledger = weighted_divisor_table(ell, 0.0, 3000)
        plain = sieve_divisor_counts(4 + ell, 3000)
        assert np.array_equal(ledger.combined, plain.astype(np.float64))


def test_summatory_matches_cumsum(ledger_2_035):
    direct = np.cumsum(ledger_2_035.combined)
    for X in (1, 17, 999, 10**4, 10**5):
        assert math.isclose(ledger_2_035.summatory_at(X), direct[X], rel_tol=1e-12)
    # floor semantics and the empty sum
    assert ledger_2_035.summatory_at(10.7) == ledger_2_035.summatory_at(10)
    assert ledger_2_035.summatory_at(0.3) == 0.0


def test_summatory_beyond_ceiling(ledger_2_035):
    with pytest.raises(DomainError):
        ledger_2_035.summatory_at(10**5 + 1)


def test_weighted_table_validation():
    with pytest.raises(DomainError):
        weighted_divisor_table(0, 0.3, 100)
    with pytest.raises(DomainError):
        weighted_divisor_table(1, -0.1, 100)
    with pytest.raises(DomainError):
        weighted_divisor_table(1, 0.5, 100)


# ---------------------------------------------------------------------------
# Main-term polynomials from the contour route.
# ---------------------------------------------------------------------------


def test_main_terms_frozen_coefficients(poly_1_04, poly_2_035):
    # frozen from an independent high-precision run of the residue expansion
    ref_c = [-23.838008, 10.577486, -1.058233, 0.517591]
    ref_cp = [24.230175]
    assert len(poly_1_04.c_coeffs) == 4
    assert len(poly_1_04.cprime_coeffs) == 1
    for got, want in zip(poly_1_04.c_coeffs, ref_c):
        assert abs(got - want) < 2e-5
    assert abs(poly_1_04.cprime_coeffs[0] - ref_cp[0]) < 2e-5

    ref_c2 = [-593.311313, 165.291488, -20.167760, 1.994387]
    ref_cp2 = [593.556836, 43.502719]
    assert len(poly_2_035.c_coeffs) == 4
    assert len(poly_2_035.cprime_coeffs) == 2
    for got, want in zip(poly_2_035.c_coeffs, ref_c2):
        assert abs(got - want) < 2e-4
    for got, want in zip(poly_2_035.cprime_coeffs, ref_cp2):
        assert abs(got - want) < 2e-4


def test_simple_pole_coefficient_closed_form(poly_1_04):
    # one secondary factor makes the lower pole simple, with residue
    # zeta(1-a)^4 / (1-a)
    want = float(zeta_eval(0.6, dps=30).real ** 4) / 0.6
    assert abs(poly_1_04.cprime_coeffs[0] - want) < 1e-8


def test_main_terms_diagnostics(poly_2_035):
    d = poly_2_035.diagnostics
    assert d["max_rel_discrepancy"] < 1e-8
    assert d["max_imag_leak"] < 1e-20
    assert d["radius_check"] == d["radius"] / 2.0
    assert d["nodes"] == 256


def test_main_terms_validation():
    with pytest.raises(DomainError, match="unweighted"):
        main_terms(1, 0.0)
    with pytest.raises(DomainError):
        main_terms(1, 0.6)
    with pytest.raises(DomainError):
        main_terms(0, 0.3)


def test_evaluate_rejects_nonpositive(poly_1_04):
    with pytest.raises(DomainError):
        poly_1_04.evaluate(0.0)
    with pytest.raises(DomainError):
        poly_1_04.evaluate(-3.0)


def test_fraction_shift_accepted():
    # exact input types for a must coerce cleanly
    poly = main_terms(1, Fraction(2, 5))
    assert poly.a == 0.4


# ---------------------------------------------------------------------------
# Identity check with the computed tail bound.
# ---------------------------------------------------------------------------


def test_identity_unweighted_case():
    chk = dirichlet_identity_check(1, 0.0, 3.0, 10**4)
    assert chk.within_bound
    assert chk.residual < 1e-4


def test_identity_weighted_case(ledger_2_035):
    chk = dirichlet_identity_check(2, 0.35, 2.0, 10**5, ledger=ledger_2_035)
    assert chk.within_bound
    # s = 2 converges slowly; the residual sits at the 1e-2 scale while the
    # bound is an order of magnitude above it
    assert 0.01 < chk.residual < 0.05
    assert chk.tail_bound > chk.residual


def test_identity_third_case():
    chk = dirichlet_identity_check(3, 0.2, 2.5, 10**4)
    assert chk.within_bound
    assert chk.residual < 0.01


def test_identity_complex_s():
    chk = dirichlet_identity_check(1, 0.4, 2 + 1j, 10**4)
    assert chk.within_bound
    assert chk.residual < chk.tail_bound


def test_identity_rhs_is_series_value():
    chk = dirichlet_identity_check(1, 0.0, 3.0, 10**4)
    want = complex(zeta_eval(3.0, dps=25) ** 5)  # a = 0 merges the factors
    assert abs(chk.rhs - want) < 1e-12 * abs(want)


def test_identity_ledger_reuse_mismatch(ledger_2_035):
    with pytest.raises(DomainError):
        dirichlet_identity_check(1, 0.35, 2.0, 10**5, ledger=ledger_2_035)
    with pytest.raises(DomainError):
        dirichlet_identity_check(2, 0.2, 2.0, 10**5, ledger=ledger_2_035)


def test_identity_validation():
    with pytest.raises(DomainError):
        dirichlet_identity_check(1, 0.3, 1.2, 10**4)
    with pytest.raises(DomainError):
        dirichlet_identity_check(1, 0.3, 2.0, 5000)


def test_tail_bound_shrinks_with_n():
    b1 = series_tail_bound(2, 0.35, 2.0, 10**4)
    b2 = series_tail_bound(2, 0.35, 2.0, 10**5)
    assert 0 < b2 < b1
    with pytest.raises(DomainError):
        series_tail_bound(2, 0.35, 1.0, 10**4)


# ---------------------------------------------------------------------------
# Error terms and trend reports.
# ---------------------------------------------------------------------------


def test_error_term_frozen_values(ledger_2_035, poly_2_035):
    # frozen magnitudes; anything drifting past a few units means the
    # contour coefficients or the sieve changed
    assert abs(error_term(ledger_2_035, poly_2_035, 10**3) - (-549.34)) < 5.0
    assert abs(error_term(ledger_2_035, poly_2_035, 10**4) - 1647.87) < 5.0
    assert abs(error_term(ledger_2_035, poly_2_035, 10**5) - 55050.39) < 5.0


def test_error_term_below_one(ledger_2_035, poly_2_035):
    # empty sum, so the error is minus the main term
    got = error_term(ledger_2_035, poly_2_035, 0.5)
    assert got == -poly_2_035.evaluate(0.5)


def test_error_term_validation(ledger_2_035, poly_2_035, poly_1_04):
    with pytest.raises(DomainError):
        error_term(ledger_2_035, poly_1_04, 100.0)
    with pytest.raises(DomainError):
        error_term(ledger_2_035, poly_2_035, 0.0)
    with pytest.raises(DomainError):
        error_term(ledger_2_035, poly_2_035, 10**5 + 1)


def test_error_trend_rows(ledger_2_035, poly_2_035):
    Xs = [10**3, 10**4, 10**5]
    rows = error_trend(ledger_2_035, poly_2_035, Xs)
    assert [r["X"] for r in rows] == [float(x) for x in Xs]
    for r in rows:
        E = error_term(ledger_2_035, poly_2_035, r["X"])
        assert r["E"] == E
        assert math.isclose(r["normalized"], abs(E) / r["X"] ** 0.55, rel_tol=1e-12)
        assert r["summatory"] - r["main_term"] == r["E"]


def test_trend_csv_header(ledger_2_035, poly_2_035):
    rows = error_trend(ledger_2_035, poly_2_035, [10**3], eps=0.05)
    text = trend_to_csv(rows, eps=0.05)
    assert text.splitlines()[0] == "X,summatory,main_term,E,absE_over_X^0.55"
    rows = error_trend(ledger_2_035, poly_2_035, [10**3], eps=0.01)
    text = trend_to_csv(rows, eps=0.01)
    assert text.splitlines()[0] == "X,summatory,main_term,E,absE_over_X^0.51"
    assert len(text.splitlines()) == 2


def test_main_terms_json(poly_2_035):
    doc = json.loads(main_terms_to_json(poly_2_035))
    assert doc["schema"] == "zetalab.main_terms.v1"
    assert doc["ell"] == 2
    assert doc["a"] == 0.35
    assert len(doc["c_coeffs"]) == 4
    assert len(doc["cprime_coeffs"]) == 2
    assert doc["diagnostics"]["max_rel_discrepancy"] < 1e-8
