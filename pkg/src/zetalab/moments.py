"""Adaptive quadrature of hybrid moment integrals and log-polynomial fits.

The integrand |zeta(1/2+it)|^4 * |zeta(sigma+it)|^(2j) is smooth but
oscillates on the scale of the local zero spacing, so initial panels are
sized to keep the dominant phase advance under pi/4 per node and an
adaptive worst-panel bisection does the rest. Panel results are reduced in
ascending interval order, so a run's output is reproducible bit for bit for
a given configuration regardless of how the panels were scheduled.

Node values come from the float64 line-batch kernel (abs error ~1e-12,
far below any quadrature tolerance accepted here); the 25-digit path in
zetanum is used by the test suite to validate that kernel, not per node.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernels
from .errors import CeilingError, DomainError, PrecisionError

T_CEILING = 1.0e5
REL_TOL_FLOOR = 1.0e-6
PANEL_CEILING_DEFAULT = 200_000

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class MomentSample:
    """One quadrature result for the hybrid moment over [t_lo, t_hi]."""

    t_lo: float
    t_hi: float
    sigma: float
    j: int
    value: float
    error_estimate: float
    step_stats: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.value < 0 or self.error_estimate < 0:
            raise ValueError("value and error_estimate must be nonnegative")

    @property
    def converged(self) -> bool:
        return bool(self.step_stats.get("converged", True))


@dataclass(frozen=True)
class LogPolyFit:
    degree: int
    coefficients: tuple
    residual: float
    condition: float

    def evaluate(self, T: float) -> float:
        L = math.log(T)
        return T * sum(c * L**k for k, c in enumerate(self.coefficients))


def _integrand(ts: np.ndarray, sigma: float, j: int) -> np.ndarray:
    # one batched line evaluation per vertical line
    v = np.abs(_kernels.line_zeta(0.5, ts)) ** 4
    if j > 0:
        v = v * np.abs(_kernels.line_zeta(sigma, ts)) ** (2 * j)
    return v


def _panel_width(t: float) -> float:
    # phase advance < pi/4 per node: ~log(t/2pi)/2pi zeros per unit t
    return 4.0 * math.pi / max(1.2, math.log(max(t, 20.0) / (2.0 * math.pi)))


def _eval_panel(a: float, b: float, sigma: float, j: int) -> tuple[float, float, int]:
    """Coarse GL16 value, refined two-half value, and node count for [a, b]."""
    mid = 0.5 * (a + b)
    half1 = 0.5 * (b - a)
    nodes = np.concatenate(
        [
            mid + half1 * _GL_NODES,
            0.5 * (a + mid) + 0.5 * (mid - a) * _GL_NODES,
            0.5 * (mid + b) + 0.5 * (b - mid) * _GL_NODES,
        ]
    )
    vals = _integrand(nodes, sigma, j)
    coarse = half1 * float(_GL_WEIGHTS @ vals[:16])
    fine = 0.5 * (mid - a) * float(_GL_WEIGHTS @ vals[16:32]) + 0.5 * (
        b - mid
    ) * float(_GL_WEIGHTS @ vals[32:])
    return coarse, fine, nodes.size


def _validate(t_lo: float, t_hi: float, sigma: float, j: int, rel_tol: float) -> None:
    if not (isinstance(j, int) and j >= 0):
        raise DomainError(f"j must be a nonnegative integer, got {j!r}")
    if not (0.5 <= sigma <= 1.0):
        raise DomainError(f"sigma must lie in [1/2, 1], got {sigma}")
    if not (0.0 <= t_lo <= t_hi):
        raise DomainError(f"need 0 <= t_lo <= t_hi, got [{t_lo}, {t_hi}]")
    if t_hi > T_CEILING:
        raise CeilingError(f"t_hi = {t_hi:g} exceeds the desk-scale ceiling {T_CEILING:g}")
    if rel_tol < REL_TOL_FLOOR:
        raise DomainError(f"rel_tol must be >= {REL_TOL_FLOOR:g}, got {rel_tol:g}")


def hybrid_moment_trace(
    t_lo: float,
    t_hi: float,
    sigma: float,
    j: int,
    rel_tols: Sequence[float],
    panel_ceiling: int = PANEL_CEILING_DEFAULT,
) -> list[MomentSample]:
    """Snapshots of one nested adaptive refinement at each tolerance.

    rel_tols must be strictly decreasing; the k-th snapshot is the state of
    the same refinement the moment tolerance k was first satisfied, so later
    snapshots strictly refine earlier ones.
    """
    tols = [float(x) for x in rel_tols]
    if not tols or any(b >= a for a, b in zip(tols, tols[1:])):
        raise DomainError(f"rel_tols must be strictly decreasing, got {rel_tols}")
    _validate(t_lo, t_hi, sigma, j, tols[-1])

    if t_lo == t_hi:
        return [
            MomentSample(t_lo, t_hi, sigma, j, 0.0, 0.0, {"panels": 0, "converged": True})
            for _ in tols
        ]

    # initial panels by the phase rule
    edges = [t_lo]
    while edges[-1] < t_hi:
        edges.append(min(t_hi, edges[-1] + _panel_width(edges[-1])))
    heap: list = []
    evals = 0
    running_val = 0.0
    running_err = 0.0
    for a, b in zip(edges, edges[1:]):
        coarse, fine, n = _eval_panel(a, b, sigma, j)
        evals += n
        heapq.heappush(heap, (-abs(coarse - fine), a, b, fine))
        running_val += fine
        running_err += abs(coarse - fine)

    refinements = 0
    snapshots: list[MomentSample] = []

    def ordered_totals() -> tuple[float, float]:
        # reduction in ascending interval order: reproducible bit for bit
        val = 0.0
        err = 0.0
        for neg, _a, _b, fine in sorted(heap, key=lambda e: e[1]):
            val += fine
            err += -neg
        return val, err

    for tol in tols:
        while True:
            if running_err <= tol * abs(running_val) or len(heap) >= panel_ceiling:
                value, err = ordered_totals()
                converged = err <= tol * abs(value)
                snapshots.append(
                    MomentSample(
                        t_lo,
                        t_hi,
                        sigma,
                        j,
                        max(value, 0.0),
                        err,
                        {
                            "panels": len(heap),
                            "initial_panels": len(edges) - 1,
                            "refinements": refinements,
                            "node_evals": evals,
                            "converged": converged,
                            "rel_tol": tol,
                            "backend": _kernels.BACKEND,
                        },
                    )
                )
                break
            neg, a, b, old_fine = heapq.heappop(heap)
            running_val -= old_fine
            running_err -= -neg
            mid = 0.5 * (a + b)
            for lo2, hi2 in ((a, mid), (mid, b)):
                coarse2, fine2, n2 = _eval_panel(lo2, hi2, sigma, j)
                evals += n2
                heapq.heappush(heap, (-abs(coarse2 - fine2), lo2, hi2, fine2))
                running_val += fine2
                running_err += abs(coarse2 - fine2)
            refinements += 1
    return snapshots


def hybrid_moment(
    t_lo: float,
    t_hi: float,
    sigma: float,
    j: int,
    rel_tol: float = 1.0e-4,
    panel_ceiling: int = PANEL_CEILING_DEFAULT,
) -> MomentSample:
    """Hybrid moment over [t_lo, t_hi] by adaptive worst-panel bisection.

    The error estimate compares each panel's single-interval rule against
    its two-half refinement; refinement continues until the summed estimate
    is below rel_tol times the value or the panel ceiling is reached, in
    which case the sample comes back flagged unconverged rather than as an
    exception.
    """
    return hybrid_moment_trace(t_lo, t_hi, sigma, j, [rel_tol], panel_ceiling)[0]


def fit_log_polynomial(samples: Sequence[MomentSample], degree: int = 4) -> LogPolyFit:
    """Least-squares fit of value/T against powers of log T.

    Needs >= 8 samples at common (sigma, j), all starting at t_lo = 0 and
    spanning at least one decade in T. Ill-conditioning raises rather than
    returning garbage coefficients.
    """
    if degree < 0:
        raise DomainError(f"degree must be >= 0, got {degree}")
    if len(samples) < 8:
        raise DomainError(f"need >= 8 samples, got {len(samples)}")
    key = {(s.sigma, s.j) for s in samples}
    if len(key) != 1:
        raise DomainError(f"samples mix (sigma, j) configurations: {sorted(key)}")
    if any(s.t_lo != 0.0 for s in samples):
        raise DomainError("fit model requires samples over [0, T]; found t_lo != 0")
    T = np.array([s.t_hi for s in samples], dtype=float)
    if np.min(T) <= 0 or np.max(T) / np.min(T) < 10.0:
        raise DomainError("samples must span at least one decade in T")
    y = np.array([s.value for s in samples], dtype=float) / T
    L = np.log(T)
    V = np.vander(L, degree + 1, increasing=True)
    condition = float(np.linalg.cond(V))
    if condition > 1.0e12:
        raise PrecisionError(
            f"normal equations ill-conditioned (cond = {condition:.3g}); "
            "widen the T span or lower the degree"
        )
    coeffs, *_ = np.linalg.lstsq(V, y, rcond=None)
    residual = float(np.sqrt(np.mean((V @ coeffs - y) ** 2)))
    return LogPolyFit(
        degree=degree,
        coefficients=tuple(float(c) for c in coeffs),
        residual=residual,
        condition=condition,
    )


def samples_to_csv(samples: Iterable[MomentSample]) -> str:
    """CSV rows (T_lo, T_hi, sigma, j, value, error_estimate); stable format."""
    lines = ["T_lo,T_hi,sigma,j,value,error_estimate"]
    for s in samples:
        lines.append(
            f"{s.t_lo:.12g},{s.t_hi:.12g},{s.sigma:.12g},{s.j},"
            f"{s.value:.12g},{s.error_estimate:.12g}"
        )
    return "\n".join(lines) + "\n"
