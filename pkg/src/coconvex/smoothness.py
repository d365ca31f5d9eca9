"""Symmetric differences and weighted Ditzian-Totik moduli (sup norm).

Two flavours are provided.  ``dt_modulus_standard`` is the textbook
``sup_{0<h<=t} || phi^r * Delta^k_{h phi}(g, .) ||`` on [-1, 1] with
``phi(x) = sqrt(1 - x^2)``.  ``dt_modulus_replication`` follows the
arithmetic used in the worked examples instead: one fixed step ``h`` (no
``phi`` scaling), any interval, and the weight ``|1 - x^2|`` taken at its
maximum over the interval even where ``phi`` would be undefined.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import comb
from typing import Optional

import numpy as np

from .errors import OutOfDomain
from .funcexpr import PiecewiseFn, eval_fn
from .polynomial import Interval, _as_interval

H_FLOOR = 1e-4  # smallest step tried in standard mode
H_CEIL = 10.0
H_CHUNK = 64
X_GRID = 2001
POLE_RADIUS = 1e-3

UNIT = Interval(-1.0, 1.0)


class Mode(str, Enum):
    STANDARD = "standard"
    REPLICATION = "replication"


@dataclass(frozen=True)
class ModulusSpec:
    k: int
    r: int = 0
    t: float = 1.0
    mode: Mode = Mode.STANDARD
    interval: Interval = UNIT
    h_explicit: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "interval", _as_interval(self.interval))
        if self.k < 0 or self.r < 0:
            raise ValueError("k and r must be nonnegative")
        if self.t <= 0:
            raise ValueError("t must be positive")
        if self.mode is Mode.STANDARD:
            if self.interval != UNIT:
                raise ValueError("standard mode lives on [-1, 1]")
        else:
            if self.k < 1:
                raise ValueError("replication mode needs a difference order k >= 1")
            if self.h_explicit is None or not 0 < self.h_explicit <= self.t:
                raise ValueError("replication mode needs 0 < h_explicit <= t")


def _binomial_weights(k: int) -> np.ndarray:
    return np.array([comb(k, i) * (-1) ** (k - i) for i in range(k + 1)], dtype=float)


def sym_diff(g: PiecewiseFn, x: float, step: float, k: int) -> float:
    """``sum_i C(k,i) (-1)^(k-i) g(x - k*step/2 + i*step)``."""
    if k < 1:
        raise ValueError("difference order must be positive")
    total = 0.0
    for i in range(k + 1):
        xi = x - k * step / 2 + i * step
        if not g.domain.contains(xi):
            raise OutOfDomain(f"difference node {xi!r} is outside {g.domain}")
        total += comb(k, i) * (-1) ** (k - i) * eval_fn(g, xi)
    return total


def _diff_table(g: PiecewiseFn, xs: np.ndarray, steps: np.ndarray, k: int,
                box: Interval, poles: list[float]) -> np.ndarray:
    """k-th differences at every x with its own step; invalid tuples give NaN."""
    nodes = xs[:, None] - (k * steps[:, None]) / 2 + np.arange(k + 1) * steps[:, None]
    ok = np.all((nodes >= box.lo) & (nodes <= box.hi), axis=1)
    for z in poles:
        ok &= ~np.any(np.abs(nodes - z) < POLE_RADIUS, axis=1)
    out = np.full(len(xs), np.nan)
    if ok.any():
        vals = g.evaluate(nodes[ok].ravel()).reshape(-1, k + 1)
        out[ok] = vals @ _binomial_weights(k)
    return out


def _lattice() -> np.ndarray:
    # every two-significant-digit number in [H_FLOOR, H_CEIL]; the same set for
    # all t, so the steps tried for t are a subset of those tried for t' > t
    lo, hi = round(np.log10(H_FLOOR)), round(np.log10(H_CEIL))
    pts = [float(f"{m}e{e - 1}") for e in range(lo, hi) for m in range(10, 100)]
    return np.array(pts + [H_CEIL])


H_LATTICE = _lattice()


def h_grid(t: float) -> np.ndarray:
    """Steps ``h <= t`` searched by the standard modulus (empty below 1e-4)."""
    return H_LATTICE[H_LATTICE <= t * (1 + 1e-12)]


def _standard_profile(g: PiecewiseFn, k: int, r: int, hs: np.ndarray) -> np.ndarray:
    """``max_x |phi^r Delta^k_{h phi} g|`` for every step in ``hs``."""
    xs = UNIT.linspace(X_GRID)
    phi = np.sqrt(np.clip(1.0 - xs * xs, 0.0, None))
    weight = np.tile(phi ** r, H_CHUNK)
    poles = g.poles()
    out = np.zeros(len(hs))
    for start in range(0, len(hs), H_CHUNK):
        chunk = hs[start:start + H_CHUNK]
        m = len(chunk)
        steps = np.outer(chunk, phi).ravel()
        d = _diff_table(g, np.tile(xs, m), steps, k, UNIT, poles)
        d = np.abs(weight[: m * len(xs)] * d).reshape(m, len(xs))
        d = np.where(np.isnan(d), 0.0, d)
        out[start:start + m] = d.max(axis=1)
    return out


def dt_modulus_standard(g: PiecewiseFn, spec: ModulusSpec) -> float:
    if spec.mode is not Mode.STANDARD:
        raise ValueError("dt_modulus_standard needs a standard-mode ModulusSpec")
    return dt_modulus_standard_curve(g, spec.k, spec.r, [spec.t])[0]


def dt_modulus_standard_curve(g: PiecewiseFn, k: int, r: int, ts) -> list[float]:
    """Standard modulus at several ``t`` from one sweep over the step lattice.

    Tuples leaving [-1, 1] or passing within ``POLE_RADIUS`` of a pole count
    as 0.  ``k = 0`` gives ``||phi^r g||`` for every ``t``.
    """
    ts = [float(t) for t in ts]
    if any(t <= 0 for t in ts):
        raise ValueError("t must be positive")
    if not g.domain.contains_interval(UNIT):
        raise OutOfDomain(f"g must be defined on [-1, 1], got {g.domain}")
    if k == 0:
        xs = UNIT.linspace(X_GRID)
        w = np.clip(1.0 - xs * xs, 0.0, None) ** (r / 2)
        v = float(np.nanmax(np.abs(w * g.evaluate(xs))))
        return [v] * len(ts)
    hs = h_grid(max(ts))
    prof = np.maximum.accumulate(_standard_profile(g, k, r, hs)) if len(hs) else hs
    return [float(prof[len(h_grid(t)) - 1]) if len(h_grid(t)) else 0.0 for t in ts]


def replication_weight(interval) -> float:
    """``max |1 - x^2|`` over the interval (8 on [-3, 3])."""
    lo, hi = _as_interval(interval)
    cands = [abs(1.0 - lo * lo), abs(1.0 - hi * hi)]
    if lo <= 0.0 <= hi:
        cands.append(1.0)
    return max(cands)


def apply_replication_weight(delta_value: float, interval) -> float:
    return replication_weight(interval) * abs(delta_value)


def max_fixed_step_diff(g: PiecewiseFn, k: int, h: float, interval=None) -> tuple[float, float]:
    """Largest ``|Delta^k_h g(x)|`` over an interior grid, with its location.

    Tuples that leave the interval or come within ``POLE_RADIUS`` of a
    singularity are skipped.
    """
    box = g.domain if interval is None else _as_interval(interval)
    lo, hi = box.lo + k * h / 2, box.hi - k * h / 2
    if lo > hi:
        return 0.0, box.midpoint
    xs = np.linspace(lo, hi, X_GRID)
    d = np.abs(_diff_table(g, xs, np.full(len(xs), h), k, box, g.poles()))
    if np.all(np.isnan(d)):
        return 0.0, box.midpoint
    j = int(np.nanargmax(d))
    return float(d[j]), float(xs[j])


def dt_modulus_replication(g: PiecewiseFn, spec: ModulusSpec) -> float:
    if spec.mode is not Mode.REPLICATION:
        raise ValueError("dt_modulus_replication needs a replication-mode ModulusSpec")
    delta, _ = max_fixed_step_diff(g, spec.k, spec.h_explicit, spec.interval)
    return apply_replication_weight(delta, spec.interval)


def modulus(g: PiecewiseFn, spec: ModulusSpec) -> float:
    if spec.mode is Mode.STANDARD:
        return dt_modulus_standard(g, spec)
    return dt_modulus_replication(g, spec)


def scan_for_difference(g: PiecewiseFn, k: int, h: float, target: float,
                        interval=None, tol: float = 1e-2,
                        num: int = 20001) -> list[tuple[float, float]]:
    """Points x where the fixed-step difference equals ``target`` within ``tol``.

    Used to look for the evaluation point behind a quoted difference value.
    Grid hits are kept as they are; sign changes of ``Delta - target`` between
    neighbouring valid grid points are bisected, and kept only if the limit
    really matches (a jump across a singularity does not).
    """
    box = g.domain if interval is None else _as_interval(interval)
    xs = np.linspace(box.lo + k * h / 2, box.hi - k * h / 2, num)
    poles = g.poles()

    def diff_at(x):
        return float(_diff_table(g, np.array([x]), np.array([h]), k, box, poles)[0])

    gap = _diff_table(g, xs, np.full(len(xs), h), k, box, poles) - target
    found = [(float(xs[i]), float(gap[i] + target)) for i in np.nonzero(np.abs(gap) < tol)[0]]
    for i in np.nonzero(gap[:-1] * gap[1:] < 0)[0]:
        a, b, ga = float(xs[i]), float(xs[i + 1]), float(gap[i])
        for _ in range(80):
            m = 0.5 * (a + b)
            gm = diff_at(m) - target
            if np.isnan(gm):
                break
            if (gm < 0) == (ga < 0):
                a, ga = m, gm
            else:
                b = m
        m = 0.5 * (a + b)
        dm = diff_at(m)
        if abs(dm - target) < tol:
            found.append((m, dm))
    return sorted(found)
