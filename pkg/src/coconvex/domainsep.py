"""Domain-of-(co)convex-polynomial checks and hyperplane predicates.

A domain of a convex polynomial (DCP) is a compact interval on which ``p`` is
convex, together with a point outside it where ``|p|`` exceeds its maximum
over the interval, and a Jackson-type bound for some target function.  The
coconvex variant (DCCP) replaces the witness by inflection points at which
``|p| <= 1/2``.

All extrema of polynomials over intervals are computed exactly from critical
points, never from grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional, Union

import numpy as np

from .approx import (
    DeviationKind,
    JacksonReport,
    ModulusConfig,
    check_jackson_bound,
)
from .errors import (
    InconsistentDegenerate,
    NotInteriorPoint,
    PointInsideDomain,
    WitnessOutsideDomain,
)
from .funcexpr import PiecewiseFn, eval_fn
from .polynomial import Interval, Polynomial, _as_interval, extrema, inflection_points, sup_abs
from .shape import YPartition

WITNESS_TOL = 1e-9
INFLECTION_MATCH_TOL = 1e-6
HALF = 0.5
WITNESS_DILATION = 3.0
WITNESS_GRID = 1001
T_GRID = 101


@dataclass(frozen=True)
class Witness:
    t: float
    value: float  # |p(t)|
    sup: float  # sup |p| over the domain
    margin: float


@dataclass(frozen=True)
class DcpReport:
    prop1_compact: bool
    prop2_witness: Optional[Witness]
    prop3: Optional[JacksonReport]
    overall: bool
    prop3_note: str = ""


@dataclass(frozen=True)
class InflectionRow:
    y: float
    abs_value: float
    within_half: bool


@dataclass(frozen=True)
class VerifiedInflections:
    points: tuple[InflectionRow, ...]
    match_with_declared: bool


@dataclass(frozen=True)
class DccpReport:
    prop1_changes_convexity: bool
    prop2_paper_mode: tuple[InflectionRow, ...]
    prop2_verified_mode: VerifiedInflections
    prop3: Optional[JacksonReport]
    overall_paper: bool
    overall_verified: bool
    prop3_note: str = ""


@dataclass(frozen=True)
class SeparationVerdict:
    holds: bool
    inf_lhs: float
    sup_rhs: float
    b: Optional[float] = None
    t: Optional[float] = None
    failing_t: tuple[float, ...] = ()

    @property
    def margin(self) -> float:
        return self.inf_lhs - self.sup_rhs


def compact_neighborhood(D, x_o: float, c: float) -> Interval:
    """Closure of ``{x in D : x^2 < c}``; contains ``x_o`` and sits inside ``D``."""
    D = _as_interval(D)
    if c <= 0:
        raise ValueError("c must be positive")
    if not D.contains(x_o):
        raise WitnessOutsideDomain(f"x_o = {x_o!r} is not in {D}")
    if x_o * x_o >= c:
        raise NotInteriorPoint(f"x_o^2 = {x_o * x_o!r} is not below c = {c!r}")
    r = math.sqrt(c)
    return Interval(max(D.lo, -r), min(D.hi, r))


def _is_convex_on(p: Polynomial, D: Interval) -> bool:
    p2 = p.derivative(2)
    lo, _, _, _ = extrema(p2, D)
    return lo >= -WITNESS_TOL


def find_witness(p: Polynomial, D: Interval, t: Optional[float] = None) -> Optional[Witness]:
    """A point outside ``D`` where ``|p|`` beats its sup over ``D``.

    With ``t`` given only that point is tried; otherwise the best point of a
    grid over ``D`` dilated about its midpoint is returned.
    """
    sup, _ = sup_abs(p, D)
    if t is not None:
        if D.contains(t):
            return None
        v = abs(p(t))
        return Witness(t, v, sup, v - sup) if v > sup + WITNESS_TOL else None
    half = WITNESS_DILATION * D.halfwidth or 1.0
    grid = np.linspace(D.midpoint - half, D.midpoint + half, WITNESS_GRID)
    grid = grid[(grid < D.lo) | (grid > D.hi)]
    if grid.size == 0:
        return None
    vals = np.abs(p(grid))
    j = int(np.argmax(vals))
    if vals[j] > sup + WITNESS_TOL:
        return Witness(float(grid[j]), float(vals[j]), sup, float(vals[j] - sup))
    return None


def _jackson(f, f2, p, n, cfg, deviation_kind, x0):
    try:
        return check_jackson_bound(f, f2, p, n, cfg, deviation_kind, x0), ""
    except InconsistentDegenerate as exc:
        return None, str(exc)


def check_dcp(p: Polynomial, D, f: PiecewiseFn, f2: PiecewiseFn,
              cfg: Optional[ModulusConfig] = None, t_witness: Optional[float] = None,
              n: Optional[int] = None,
              deviation_kind: Union[DeviationKind, str] = DeviationKind.SUP,
              x0: Optional[float] = None) -> DcpReport:
    """Check the three DCP properties; ``n`` defaults to ``degree + 1``."""
    D = _as_interval(D)
    n = n or max(p.degree + 1, 1)
    cfg = cfg or ModulusConfig(mode="replication", k=2, r=2, t=0.5, h=0.4, interval=D)
    prop1 = _is_convex_on(p, D)
    witness = find_witness(p, D, t_witness)
    prop3, note = _jackson(f, f2, p, n, cfg, deviation_kind, x0)
    overall = prop1 and witness is not None and witness.margin > 0 \
        and prop3 is not None and prop3.bound_holds
    return DcpReport(prop1, witness, prop3, overall, note)


def _rows(p: Polynomial, ys) -> tuple[InflectionRow, ...]:
    return tuple(InflectionRow(float(y), abs(p(y)), abs(p(y)) <= HALF) for y in ys)


def check_dccp(p: Polynomial, D, Y_declared: YPartition, f: PiecewiseFn, f2: PiecewiseFn,
               cfg: ModulusConfig, n: Optional[int] = None,
               deviation_kind: Union[DeviationKind, str] = DeviationKind.SUP,
               x0: Optional[float] = None) -> DccpReport:
    """Coconvex-domain check, both with the declared ``y_i`` and recomputed ones."""
    D = _as_interval(D)
    n = n or max(p.degree + 1, 1)
    found = inflection_points(p, D)
    prop1 = bool(found)
    paper_rows = _rows(p, Y_declared.points)
    match = len(found) == Y_declared.s and all(
        abs(a - b) <= INFLECTION_MATCH_TOL for a, b in zip(found, Y_declared.points))
    verified = VerifiedInflections(_rows(p, found), match)
    prop3, note = _jackson(f, f2, p, n, cfg, deviation_kind, x0)
    jack_ok = prop3 is not None and prop3.bound_holds
    overall_paper = prop1 and all(r.within_half for r in paper_rows) and jack_ok
    overall_verified = prop1 and all(r.within_half for r in verified.points) and jack_ok
    return DccpReport(prop1, paper_rows, verified, prop3, overall_paper, overall_verified, note)


def supporting_hyperplane(p: Polynomial, D, x_hat: float, alpha: float) -> SeparationVerdict:
    """Level ``alpha`` supports ``p`` on ``D`` if ``p >= alpha`` off ``x_hat``.

    Removing the single point ``x_hat`` does not change the infimum of a
    continuous ``p``, so the minimum over all of ``D`` is used.
    """
    D = _as_interval(D)
    if not D.contains(x_hat):
        raise WitnessOutsideDomain(f"x_hat = {x_hat!r} is not in {D}")
    lo, _, _, _ = extrema(p, D)
    return SeparationVerdict(lo >= alpha - WITNESS_TOL, inf_lhs=lo, sup_rhs=alpha)


def strictly_separates(p: Polynomial, D, x: float) -> SeparationVerdict:
    """Is there ``b`` with ``max_D p < b < p(x)``?  ``b`` is the midpoint."""
    D = _as_interval(D)
    if D.contains(x):
        raise PointInsideDomain(f"x = {x!r} lies in {D}")
    _, _, s, _ = extrema(p, D)
    v = p(x)
    b = 0.5 * (s + v)
    if s < b < v:
        return SeparationVerdict(True, inf_lhs=v, sup_rhs=s, b=b)
    return SeparationVerdict(False, inf_lhs=v, sup_rhs=s)


def _scaled_extremes(p, D1, q, D2, w: float) -> tuple[float, float]:
    pmin, _, pmax, _ = extrema(p, D1)
    qmin, _, qmax, _ = extrema(q, D2)
    inf_l = w * pmin if w >= 0 else w * pmax
    sup_r = w * qmax if w >= 0 else w * qmin
    return inf_l, sup_r


def strongly_separated(p: Polynomial, D1, q: Polynomial, D2,
                       hbar: Optional[PiecewiseFn] = None,
                       t: Union[float, Literal["all"], None] = None) -> SeparationVerdict:
    """``inf_{D1} hbar(t) p > sup_{D2} hbar(t) q``.

    Without ``hbar`` the weight is 1.  ``t="all"`` demands the inequality at
    every point of a 101-point grid over [0, 1] and lists the failures.
    """
    D1, D2 = _as_interval(D1), _as_interval(D2)
    if hbar is None:
        lo, hi = _scaled_extremes(p, D1, q, D2, 1.0)
        return SeparationVerdict(lo > hi, inf_lhs=lo, sup_rhs=hi)
    if t is None:
        raise ValueError("a weight function needs t (a value in [0, 1] or 'all')")
    if t == "all":
        ts = np.linspace(0.0, 1.0, T_GRID)
        failing = []
        worst = None
        for tt in ts:
            lo, hi = _scaled_extremes(p, D1, q, D2, eval_fn(hbar, float(tt)))
            if not lo > hi:
                failing.append(float(tt))
            if worst is None or lo - hi < worst[0] - worst[1]:
                worst = (lo, hi, float(tt))
        return SeparationVerdict(not failing, inf_lhs=worst[0], sup_rhs=worst[1],
                                 t=worst[2], failing_t=tuple(failing))
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    lo, hi = _scaled_extremes(p, D1, q, D2, eval_fn(hbar, t))
    return SeparationVerdict(lo > hi, inf_lhs=lo, sup_rhs=hi, t=t)
