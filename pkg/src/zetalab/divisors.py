"""Weighted divisor tables, their summatory functions, Perron-style main
terms via numerical Laurent extraction, and the resulting error terms.

The weighted divisor function here is the Dirichlet convolution of the
4-dimensional divisor counts with ell-dimensional counts damped by e^(-a):
its generating series is zeta(s)^4 * zeta(s+a)^ell. Main terms come from
the residues of that series times X^s/s at s = 1 (pole of order 4) and
s = 1 - a (pole of order ell), extracted by contour moments on circles
around each pole and cross-validated at two radii. The error term is the
exact summatory minus both evaluated main-term polynomials.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from mpmath import mp, mpc, mpf, workdps

from . import _kernels
from .errors import CeilingError, DomainError, PrecisionError
from .zetanum import _MP_LOCK, zeta_eval

N_CEILING = 50_000_000
CONTOUR_NODES_DEFAULT = 256
CONTOUR_REL_TOL_DEFAULT = 1.0e-8


def sieve_divisor_counts(k: int, N: int) -> np.ndarray:
    """Table of k-dimensional divisor counts for n = 1..N (index 0 unused).

    Built by k-1 divisor-convolution passes over the all-ones table; exact
    int64 integers on either kernel backend.
    """
    if not (isinstance(k, int) and k >= 1):
        raise DomainError(f"k must be a positive integer, got {k!r}")
    if not (isinstance(N, int) and N >= 1):
        raise DomainError(f"N must be a positive integer, got {N!r}")
    if N > N_CEILING:
        raise CeilingError(f"N = {N} exceeds the table ceiling {N_CEILING}")
    f = np.ones(N + 1, dtype=np.int64)
    f[0] = 0
    for _ in range(k - 1):
        f = _kernels.conv_with_ones(f)
    return f


@dataclass
class DivisorLedger:
    """Sieve tables, the weighted combination, and its running summatory."""

    ell: int
    a: float
    N: int
    d4_table: np.ndarray
    dell_table: np.ndarray
    combined: np.ndarray
    summatory: np.ndarray

    def summatory_at(self, X: float) -> float:
        """Sum of the weighted divisor values over n <= X (0 below 1)."""
        if X > self.N:
            raise DomainError(f"X = {X} beyond table ceiling N = {self.N}")
        idx = int(math.floor(X))
        if idx < 1:
            return 0.0
        return float(self.summatory[idx])


def weighted_divisor_table(ell: int, a, N: int) -> DivisorLedger:
    """Ledger for the weighted convolution with shift a in [0, 1/2).

    combined[n] = sum over n = q*e of d4(q) * dell(e) * e^(-a). At a = 0
    this collapses exactly to the (4+ell)-dimensional divisor counts, and
    the table is built that way (integer convolution, then cast).
    """
    if not (isinstance(ell, int) and ell >= 1):
        raise DomainError(f"ell must be a positive integer, got {ell!r}")
    a_f = float(a)
    if not (0.0 <= a_f < 0.5):
        raise DomainError(f"shift a must lie in [0, 1/2), got {a}")
    d4 = sieve_divisor_counts(4, N)
    dell = sieve_divisor_counts(ell, N)
    if a_f == 0.0:
        combined = sieve_divisor_counts(4 + ell, N).astype(np.float64)
    else:
        combined = _kernels.weighted_combine(d4, dell, a_f)
    summatory = _kernels.running_sum(combined)
    return DivisorLedger(
        ell=ell,
        a=a_f,
        N=N,
        d4_table=d4,
        dell_table=dell,
        combined=combined,
        summatory=summatory,
    )


# ---------------------------------------------------------------------------
# Laurent moments by contour integration and the main-term polynomials.
# ---------------------------------------------------------------------------


def _series_factor(s: mpc, ell: int, a, dps: int) -> mpc:
    """zeta(s)^4 * zeta(s+a)^ell / s at the working precision."""
    za = zeta_eval(s, dps=dps)
    zb = zeta_eval(s + a, dps=dps)
    return za**4 * zb**ell / s


def _laurent_moments(
    pole, order: int, radius, ell: int, a, dps: int, nodes: int
) -> list[mpc]:
    """Principal-part coefficients f_{-1}..f_{-order} at the given pole.

    f_{-i} is the mean over the circle of F(s) * (s - pole)^i; trapezoid on
    a circle converges spectrally for the analytic integrand.
    """
    with _MP_LOCK:
        with workdps(dps + 10):
            p = mpc(pole)
            r = mpf(radius)
            ring = []
            for jj in range(nodes):
                z = mp.e ** (mpc(0, 2) * mp.pi * jj / nodes)
                ring.append((z, _series_factor(p + r * z, ell, a, dps)))
            out = []
            for i in range(1, order + 1):
                acc = mpc(0)
                for z, Fv in ring:
                    acc += Fv * (r * z) ** i
                out.append(acc / nodes)
            return out


@dataclass(frozen=True)
class MainTermPolynomial:
    """Main-term coefficients: X * sum c_k log^k X over k = 0..3 plus
    X^(1-a) * sum cprime_k log^k X over k = 0..ell-1."""

    ell: int
    a: float
    c_coeffs: tuple
    cprime_coeffs: tuple
    diagnostics: dict = field(default_factory=dict)

    def evaluate(self, X: float) -> float:
        if X <= 0:
            raise DomainError(f"main terms need X > 0, got {X}")
        L = math.log(X)
        lead = sum(c * L**k for k, c in enumerate(self.c_coeffs))
        sub = sum(c * L**k for k, c in enumerate(self.cprime_coeffs))
        return X * lead + X ** (1.0 - self.a) * sub


def _moments_to_coeffs(moments: Sequence[mpc]) -> list[float]:
    # residue of F(s) X^s at a pole of order m: sum over i of
    # f_{-i} * log^(i-1) X / (i-1)!, i.e. coefficient of log^k is f_{-(k+1)}/k!
    out = []
    fact = 1
    for k, f in enumerate(moments):
        if k:
            fact *= k
        out.append(float(mp.re(f)) / fact)
    return out


def main_terms(
    ell: int,
    a,
    dps: int = 30,
    nodes: int = CONTOUR_NODES_DEFAULT,
    rel_tol: float = CONTOUR_REL_TOL_DEFAULT,
) -> MainTermPolynomial:
    """Main-term polynomials from contour Laurent moments at both poles.

    Radii r = min(a, 1-a, 1/4)/4 and r/2 are both run; any coefficient
    disagreeing by more than rel_tol relative raises PrecisionError with
    the advice to raise dps. a = 0 merges the poles and is rejected; use
    the unweighted path (divisor dimension 4+ell) instead.
    """
    if not (isinstance(ell, int) and ell >= 1):
        raise DomainError(f"ell must be a positive integer, got {ell!r}")
    a_f = float(a)
    if a_f == 0.0:
        raise DomainError(
            "a = 0 merges the two poles; use the unweighted divisor path "
            "of dimension 4+ell instead of main_terms"
        )
    if not (0.0 < a_f < 0.5):
        raise DomainError(f"shift a must lie in (0, 1/2), got {a}")
    r = min(a_f, 1.0 - a_f, 0.25) / 4.0
    runs = []
    for radius in (r, r / 2.0):
        f_pole = _laurent_moments(1, 4, radius, ell, a_f, dps, nodes)
        g_pole = _laurent_moments(1.0 - a_f, ell, radius, ell, a_f, dps, nodes)
        imag_leak = max(
            [abs(float(mp.im(v))) for v in f_pole + g_pole]
        )
        runs.append(
            (_moments_to_coeffs(f_pole), _moments_to_coeffs(g_pole), imag_leak)
        )
    (c1, cp1, leak1), (c2, cp2, leak2) = runs
    worst = 0.0
    for u, v in zip(c1 + cp1, c2 + cp2):
        scale = max(abs(u), abs(v), 1e-30)
        worst = max(worst, abs(u - v) / scale)
    if worst > rel_tol:
        raise PrecisionError(
            f"contour coefficients differ by {worst:.3g} relative between "
            f"radii {r:g} and {r/2:g} (tolerance {rel_tol:g}); raise dps"
        )
    return MainTermPolynomial(
        ell=ell,
        a=a_f,
        c_coeffs=tuple(c1),
        cprime_coeffs=tuple(cp1),
        diagnostics={
            "radius": r,
            "radius_check": r / 2.0,
            "nodes": nodes,
            "dps": dps,
            "max_rel_discrepancy": worst,
            "max_imag_leak": max(leak1, leak2),
        },
    )


# ---------------------------------------------------------------------------
# Identity check against the generating series, with a computed tail bound.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IdentityCheck:
    residual: float
    tail_bound: float
    lhs: complex
    rhs: complex
    s: complex
    N: int

    @property
    def within_bound(self) -> bool:
        return self.residual <= self.tail_bound


@lru_cache(maxsize=None)
def _unweighted_main_coeffs(m: int, dps: int = 30) -> tuple:
    """Coefficients q_k with sum_{n<=x} d_m(n) ~ x * sum q_k log^k x."""
    if m < 4:
        raise DomainError(f"majorant dimension must be >= 4, got {m}")
    # the series factor is zeta^4 * zeta(.+a)^ell / s; with a = 0 and
    # ell = m - 4 it collapses to zeta^m / s, whose order-m pole at 1
    # carries the d_m main-term coefficients
    mom = _laurent_moments(1, m, 0.0625, m - 4, 0.0, dps, CONTOUR_NODES_DEFAULT)
    return tuple(_moments_to_coeffs(mom))


def _log_power_integral(k: int, N: float, sigma: float) -> float:
    # I_k = integral over (N, inf) of log^k x * x^(-sigma) dx, sigma > 1
    lnN = math.log(N)
    I = N ** (1.0 - sigma) / (sigma - 1.0)
    for i in range(1, k + 1):
        I = N ** (1.0 - sigma) * lnN**i / (sigma - 1.0) + i * I / (sigma - 1.0)
    return I


def series_tail_bound(ell: int, a, s, N: int) -> float:
    """Computed bound for the tail sum beyond N of the weighted series at s.

    Majorizes the weighted values by unweighted counts of dimension 4+ell
    (the damping factor is <= 1), approximates their local density by the
    derivative of the main term, integrates it against x^(-Re s) in closed
    form, and applies a factor-3 margin for the fluctuation of the counts
    around that density.
    """
    sigma = float(mp.re(mpc(s)))
    if sigma <= 1.05:
        raise DomainError(f"tail bound needs Re s > 1.05, got {sigma}")
    m = 4 + ell
    q = _unweighted_main_coeffs(m)
    # density ~ d/dx [x * Q(log x)] = Q(log x) + Q'(log x)
    dens = list(q)
    for k in range(len(q) - 1):
        dens[k] += (k + 1) * q[k + 1]
    tail = sum(dk * _log_power_integral(k, float(N), sigma) for k, dk in enumerate(dens))
    return 3.0 * abs(tail)


def dirichlet_identity_check(
    ell: int,
    a,
    s,
    N: int,
    ledger: Optional[DivisorLedger] = None,
) -> IdentityCheck:
    """Residual of the truncated series against zeta(s)^4 zeta(s+a)^ell.

    Re s >= 1.5 (absolute convergence with headroom) and N >= 10^4. The
    returned tail_bound is the computed majorant from series_tail_bound;
    residuals sit below it, typically within a small factor.
    """
    sC = mpc(s)
    if float(mp.re(sC)) < 1.5:
        raise DomainError(f"need Re s >= 1.5, got {mp.re(sC)}")
    if N < 10**4:
        raise DomainError(f"need N >= 10^4, got {N}")
    if ledger is None:
        ledger = weighted_divisor_table(ell, a, N)
    elif ledger.N < N or ledger.ell != ell or float(ledger.a) != float(a):
        raise DomainError("ledger does not match the requested configuration")
    n = np.arange(1, N + 1, dtype=np.float64)
    sc = complex(sC)
    lhs = complex(np.sum(ledger.combined[1 : N + 1] * np.exp(-sc * np.log(n))))
    with _MP_LOCK:
        with workdps(25):
            rhs_mp = zeta_eval(sC) ** 4 * zeta_eval(sC + float(a)) ** ell
    rhs = complex(rhs_mp)
    residual = abs(lhs - rhs)
    return IdentityCheck(
        residual=residual,
        tail_bound=series_tail_bound(ell, a, sc, N),
        lhs=lhs,
        rhs=rhs,
        s=sc,
        N=N,
    )


# ---------------------------------------------------------------------------
# Error term and trend reports.
# ---------------------------------------------------------------------------


def error_term(ledger: DivisorLedger, poly: MainTermPolynomial, X: float) -> float:
    """Exact summatory at X minus both main-term polynomials.

    X may sit below 1 (empty sum); X beyond the ledger ceiling is a range
    error. The polynomial must describe the same (ell, a) as the ledger.
    """
    if poly.ell != ledger.ell or float(poly.a) != float(ledger.a):
        raise DomainError(
            f"polynomial is for (ell={poly.ell}, a={poly.a}), ledger holds "
            f"(ell={ledger.ell}, a={ledger.a})"
        )
    if X <= 0:
        raise DomainError(f"X must be positive, got {X}")
    if X > ledger.N:
        raise DomainError(f"X = {X} beyond ledger ceiling N = {ledger.N}")
    return ledger.summatory_at(X) - poly.evaluate(X)


def error_trend(
    ledger: DivisorLedger,
    poly: MainTermPolynomial,
    Xs: Sequence[float],
    eps: float = 0.05,
) -> list[dict]:
    """Rows (X, summatory, main_term, E, |E|/X^(1/2+eps)) for each X."""
    rows = []
    for X in Xs:
        S = ledger.summatory_at(X)
        M = poly.evaluate(X)
        E = S - M
        rows.append(
            {
                "X": float(X),
                "summatory": S,
                "main_term": M,
                "E": E,
                "normalized": abs(E) / float(X) ** (0.5 + eps),
            }
        )
    return rows


def trend_to_csv(rows: Iterable[dict], eps: float = 0.05) -> str:
    header = f"X,summatory,main_term,E,absE_over_X^{0.5 + eps:g}"
    lines = [header]
    for r in rows:
        lines.append(
            f"{r['X']:.12g},{r['summatory']:.12g},{r['main_term']:.12g},"
            f"{r['E']:.12g},{r['normalized']:.12g}"
        )
    return "\n".join(lines) + "\n"


def main_terms_to_json(poly: MainTermPolynomial) -> str:
    doc = {
        "schema": "zetalab.main_terms.v1",
        "ell": poly.ell,
        "a": poly.a,
        "c_coeffs": list(poly.c_coeffs),
        "cprime_coeffs": list(poly.cprime_coeffs),
        "diagnostics": poly.diagnostics,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
