"""Convexity and coconvexity checks.

For general piecewise functions the checks are sampled secant tests: they can
refute convexity but never prove it, so ``holds=True`` only means that no
violation was found at the sampling resolution.  Polynomial inputs are
certified exactly from the real roots of ``p''``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .funcexpr import PiecewiseFn
from .polynomial import Interval, Polynomial, _as_interval, extrema

SECANT_TOL = 1e-9
DEFAULT_PAIRS = 200
DEFAULT_LAMBDAS = tuple(round(0.1 * i, 1) for i in range(1, 10))

Func = Union[PiecewiseFn, Polynomial]


@dataclass(frozen=True)
class YPartition:
    points: tuple[float, ...]
    interval: Interval

    def __post_init__(self):
        pts = tuple(float(y) for y in self.points)
        I = _as_interval(self.interval)
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError(f"partition points must be strictly increasing: {pts}")
        if pts and not (I.lo < pts[0] and pts[-1] < I.hi):
            raise ValueError(f"partition points must be interior to {I}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "interval", I)

    @property
    def s(self) -> int:
        return len(self.points)

    def subintervals(self) -> list[Interval]:
        edges = [self.interval.lo, *self.points, self.interval.hi]
        return [Interval(a, b) for a, b in zip(edges, edges[1:])]


@dataclass(frozen=True)
class Counterexample:
    x: float
    y: float
    lam: float
    lhs: float
    rhs: float


@dataclass(frozen=True)
class ShapeVerdict:
    holds: bool
    counterexample: Optional[Counterexample] = None
    method: str = "sampled"


def sign_pattern(Y: YPartition) -> list[int]:
    """Expected sign of f'' on each piece: +1 on the rightmost, alternating leftward."""
    s = Y.s
    return [1 if (s - i) % 2 == 0 else -1 for i in range(s + 1)]


def halton(n: int, base: int) -> np.ndarray:
    """First ``n`` terms (index 1..n) of the van der Corput sequence in ``base``."""
    out = np.zeros(n)
    for j in range(n):
        i, f, r = j + 1, 1.0, 0.0
        while i > 0:
            f /= base
            r += f * (i % base)
            i //= base
        out[j] = r
    return out


def sample_pairs(I: Interval, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic low-discrepancy pairs strictly inside ``I``."""
    return I.lo + I.width * halton(count, 2), I.lo + I.width * halton(count, 3)


def _values(f: Func, xs: np.ndarray) -> np.ndarray:
    return f(xs) if isinstance(f, Polynomial) else f.evaluate(xs)


def secant_gap(f: Func, x: float, y: float, lam: float) -> Counterexample:
    """The two sides of ``f((1-lam)x + lam y) <= (1-lam) f(x) + lam f(y)``."""
    z = (1 - lam) * x + lam * y
    fx, fy, fz = _values(f, np.array([x, y, z]))
    return Counterexample(x, y, lam, float(fz), float((1 - lam) * fx + lam * fy))


def _sampled(f: Func, I: Interval, orientation: int, pair_count: int,
             lambdas: Sequence[float]) -> ShapeVerdict:
    xs, ys = sample_pairs(I, pair_count)
    fx, fy = _values(f, xs), _values(f, ys)
    lam = np.asarray(lambdas, dtype=float)
    zs = (1 - lam[None, :]) * xs[:, None] + lam[None, :] * ys[:, None]
    lhs = _values(f, zs.ravel()).reshape(zs.shape)
    rhs = (1 - lam[None, :]) * fx[:, None] + lam[None, :] * fy[:, None]
    with np.errstate(invalid="ignore"):
        bad = orientation * (lhs - rhs) > SECANT_TOL
    bad &= ~(np.isnan(lhs) | np.isnan(rhs))
    if not bad.any():
        return ShapeVerdict(True)
    i, j = np.argwhere(bad)[0]
    ce = Counterexample(float(xs[i]), float(ys[i]), float(lam[j]),
                        float(lhs[i, j]), float(rhs[i, j]))
    return ShapeVerdict(False, ce)


def _exact(p: Polynomial, I: Interval, orientation: int) -> ShapeVerdict:
    """Certify ``orientation * p'' >= 0`` on ``I``; find a secant witness if not."""
    p2 = p.derivative(2)
    if orientation > 0:
        worst, z, _, _ = extrema(p2, I)
    else:
        _, _, worst, z = extrema(p2, I)
        worst = -worst
    if worst >= -SECANT_TOL:
        return ShapeVerdict(True, method="exact")
    for j in range(60):
        d = I.halfwidth * 0.5**j
        x, y = max(I.lo, z - d), min(I.hi, z + d)
        if y <= x:
            break
        ce = secant_gap(p, x, y, 0.5)
        if orientation * (ce.lhs - ce.rhs) > SECANT_TOL:
            return ShapeVerdict(False, ce, method="exact")
    # concavity too faint to show up in a secant; report what the sampler sees
    return ShapeVerdict(True, method="exact")


def secant_convexity_test(f: Func, I=None, pair_count: int = DEFAULT_PAIRS,
                          lambdas: Sequence[float] = DEFAULT_LAMBDAS,
                          pairs: Optional[Sequence[tuple[float, float]]] = None) -> ShapeVerdict:
    """Test ``f((1-l)x + l y) <= (1-l) f(x) + l f(y)`` on ``I``.

    With explicit ``pairs`` only those pairs are tested.  Otherwise polynomials
    are certified exactly and piecewise functions are sampled.
    """
    if I is None:
        I = f.domain if isinstance(f, PiecewiseFn) else Interval(-1.0, 1.0)
    I = _as_interval(I)
    if pairs is not None:
        for x, y in pairs:
            for lam in lambdas:
                ce = secant_gap(f, x, y, lam)
                if ce.lhs - ce.rhs > SECANT_TOL:
                    return ShapeVerdict(False, ce, method="pairs")
        return ShapeVerdict(True, method="pairs")
    if isinstance(f, PiecewiseFn):
        p = f.polynomial()
        if p is not None:
            f = p
    if isinstance(f, Polynomial):
        return _exact(f, I, 1)
    return _sampled(f, I, 1, pair_count, lambdas)


def in_delta2(f: Func, Y: YPartition, samples: int = DEFAULT_PAIRS,
              lambdas: Sequence[float] = DEFAULT_LAMBDAS) -> ShapeVerdict:
    """Does ``f`` change convexity exactly as ``Y`` prescribes?

    Each subinterval is checked with the orientation from :func:`sign_pattern`;
    concave pieces need the reversed secant inequality.
    """
    if isinstance(f, PiecewiseFn):
        p = f.polynomial()
        f = p if p is not None else f
    for sub, sigma in zip(Y.subintervals(), sign_pattern(Y)):
        if isinstance(f, Polynomial):
            v = _exact(f, sub, sigma)
        else:
            v = _sampled(f, sub, sigma, samples, lambdas)
        if not v.holds:
            return v
    return ShapeVerdict(True, method="exact" if isinstance(f, Polynomial) else "sampled")
