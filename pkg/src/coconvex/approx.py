"""Best uniform (co)convex polynomial approximation and Jackson constants.

The best approximation from polynomials of degree <= n-1 whose second
derivative follows a prescribed sign pattern is computed on a grid: the
deviation and the sign constraints are imposed at Chebyshev points, which
turns the problem into a small linear program.  The result bounds the true
degree of approximation from above, up to discretisation error between the
grid points.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from .errors import InconsistentDegenerate
from .funcexpr import PiecewiseFn, affine_pullback, pointwise_deviation, sup_deviation
from .lp import lp_minimax_solve
from .polynomial import Interval, Polynomial, _as_interval
from .shape import YPartition, sign_pattern
from .smoothness import Mode, ModulusSpec, UNIT, apply_replication_weight, modulus

SHAPE_TOL = 1e-9
ACTIVE_TOL = 1e-7
REFINE_STOP = 1e-4
REFINE_MAX_GRID = 4097


@dataclass(frozen=True)
class ApproxResult:
    poly: Polynomial
    epsilon: float
    active_points: tuple[float, ...]
    grid_size: int
    max_shape_violation: float = 0.0
    singular_points: int = 0


@dataclass(frozen=True)
class JacksonReport:
    deviation: float
    n: int
    omega: float
    c: float
    degenerate: bool

    @property
    def bound_holds(self) -> bool:
        rhs = self.c / self.n**2 * self.omega
        return self.deviation <= rhs * (1 + 1e-12) + 1e-300


def chebyshev_grid(I: Interval, size: int, extra=()) -> np.ndarray:
    """Chebyshev extreme points mapped to ``I``, merged with ``extra`` points."""
    j = np.arange(size)
    u = np.sin(np.pi * (2 * j - (size - 1)) / (2 * (size - 1))) if size > 1 else np.zeros(1)
    xs = I.midpoint + I.halfwidth * u
    xs[0], xs[-1] = I.lo, I.hi
    return np.union1d(xs, np.asarray(extra, dtype=float))


def _minimax_lp(xs: np.ndarray, fx: np.ndarray, n: int, I: Interval,
                sigma: Optional[np.ndarray] = None) -> Polynomial:
    """Coefficients minimising ``max |fx - p(xs)|`` with ``sigma * p'' >= 0`` rows."""
    # fit in u = (x - mid)/half for conditioning, convert back afterwards
    mid, half = I.midpoint, I.halfwidth
    u = (xs - mid) / half
    V = np.vander(u, n, increasing=True)
    rows = np.zeros((0, n))
    if sigma is not None:
        keep = sigma != 0.0
        powers = np.arange(n)
        V2 = np.zeros((keep.sum(), n))
        if n > 2:
            V2[:, 2:] = powers[2:] * (powers[2:] - 1) * u[keep, None] ** (powers[2:] - 2)
        rows = -sigma[keep, None] * V2 / half**2

    # eps = e0 + d with d free keeps every right-hand side nonnegative, so the
    # all-slack basis is feasible and no phase-1 work is needed
    e0 = float(np.max(np.abs(fx)))
    ones = np.ones((len(xs), 1))
    A = np.vstack([
        np.hstack([V, -ones]),
        np.hstack([-V, -ones]),
        np.hstack([rows, np.zeros((len(rows), 1))]),
        np.hstack([np.zeros((1, n)), -np.ones((1, 1))]),
    ])
    b = np.concatenate([fx + e0, e0 - fx, np.zeros(len(rows)), [e0]])
    cost = np.zeros(n + 1)
    cost[-1] = 1.0
    sol = lp_minimax_solve(cost, A, b, bounds=[(None, None)] * (n + 1))
    q = Polynomial(tuple(sol.x[:n]))
    return q.compose(Polynomial((-mid / half, 1.0 / half)))


def _solve(f: PiecewiseFn, n: int, Y: YPartition, grid_size: int) -> ApproxResult:
    I = Y.interval
    xs = chebyshev_grid(I, grid_size, Y.points)
    fx = f.evaluate(xs)
    good = ~np.isnan(fx)
    singular = int((~good).sum())
    xs, fx = xs[good], fx[good]

    sigma = np.zeros(len(xs))
    edges = [I.lo, *Y.points, I.hi]
    for (a, b), s in zip(zip(edges, edges[1:]), sign_pattern(Y)):
        sigma[(xs >= a) & (xs <= b)] = s
    # no sign constraint at the change points themselves
    for y in Y.points:
        sigma[xs == y] = 0.0

    poly = _minimax_lp(xs, fx, n, I, sigma)
    resid = np.abs(fx - poly(xs))
    eps = float(resid.max())
    shaped = sigma != 0.0
    p2 = poly.derivative(2)(xs)
    viol = float(np.max(np.concatenate([[0.0], -(sigma[shaped] * p2[shaped])])))
    active = tuple(float(x) for x in xs[resid >= eps - ACTIVE_TOL * max(1.0, eps)])
    return ApproxResult(poly, eps, active, grid_size, viol, singular)


def best_shape_approx(f: PiecewiseFn, n: int, Y: Optional[YPartition] = None,
                      grid_size: int = 257, refine: bool = False) -> ApproxResult:
    """Best uniform approximation of ``f`` by degree <= n-1 polynomials in Delta2(Y).

    ``refine=True`` doubles the grid until epsilon moves by less than 1e-4.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if Y is None:
        Y = YPartition((), f.domain)
    if grid_size < 4 * n:
        raise ValueError(f"grid_size must be at least 4n = {4 * n}")
    res = _solve(f, n, Y, grid_size)
    while refine and 2 * res.grid_size - 1 <= REFINE_MAX_GRID:
        nxt = _solve(f, n, Y, 2 * res.grid_size - 1)
        done = abs(nxt.epsilon - res.epsilon) < REFINE_STOP
        res = nxt
        if done:
            break
    return res


def unconstrained_minimax(f: PiecewiseFn, n: int, I=None, grid_size: int = 257) -> float:
    """Plain discrete minimax error, no shape rows (for comparisons)."""
    I = f.domain if I is None else _as_interval(I)
    xs = chebyshev_grid(I, grid_size)
    fx = f.evaluate(xs)
    xs, fx = xs[~np.isnan(fx)], fx[~np.isnan(fx)]
    return float(np.max(np.abs(fx - _minimax_lp(xs, fx, n, I)(xs))))


def jackson_constant(deviation: float, n: int, omega: float) -> JacksonReport:
    """Smallest ``c`` with ``deviation <= c / n^2 * omega``."""
    if deviation < 0 or omega < 0 or n < 1:
        raise ValueError("need deviation >= 0, omega >= 0, n >= 1")
    if omega == 0.0:
        if deviation > 0.0:
            raise InconsistentDegenerate(
                f"modulus is 0 but deviation is {deviation!r}; no finite constant works")
        return JacksonReport(deviation, n, omega, 0.0, True)
    return JacksonReport(deviation, n, omega, deviation * n**2 / omega, False)


class DeviationKind(str, Enum):
    POINTWISE = "pointwise"
    SUP = "sup"


@dataclass(frozen=True)
class ModulusConfig:
    """How to obtain the modulus for a Jackson-type bound.

    ``mode`` is ``standard``, ``replication``, or ``quoted``; the last one
    takes a difference value as given and only applies the replication weight.
    """

    mode: str = "replication"
    k: int = 2
    r: int = 2
    t: float = 0.5
    h: Optional[float] = None
    interval: Optional[Interval] = None
    quoted_delta: Optional[float] = None

    def __post_init__(self):
        if self.mode not in ("standard", "replication", "quoted"):
            raise ValueError(f"unknown modulus mode {self.mode!r}")
        if self.interval is not None:
            object.__setattr__(self, "interval", _as_interval(self.interval))
        if self.mode == "quoted" and self.quoted_delta is None:
            raise ValueError("quoted mode needs quoted_delta")


def evaluate_modulus(f2: PiecewiseFn, cfg: ModulusConfig) -> float:
    interval = cfg.interval or f2.domain
    if cfg.mode == "quoted":
        return apply_replication_weight(cfg.quoted_delta, interval)
    if cfg.mode == "replication":
        spec = ModulusSpec(k=cfg.k, r=cfg.r, t=cfg.t, mode=Mode.REPLICATION,
                           interval=interval, h_explicit=cfg.h)
        return modulus(f2, spec)
    g = f2 if interval == UNIT else affine_pullback(f2, interval)
    return modulus(g, ModulusSpec(k=cfg.k, r=cfg.r, t=cfg.t))


def check_jackson_bound(f: PiecewiseFn, f2: PiecewiseFn, p: Polynomial, n: int,
                        cfg: ModulusConfig,
                        deviation_kind: Union[DeviationKind, str] = DeviationKind.SUP,
                        x0: Optional[float] = None) -> JacksonReport:
    """Deviation of ``p`` from ``f``, modulus of ``f2``, and the implied constant."""
    kind = DeviationKind(deviation_kind)
    if kind is DeviationKind.POINTWISE:
        if x0 is None:
            raise ValueError("pointwise deviation needs x0")
        dev = pointwise_deviation(f, p, x0)
    else:
        dev = sup_deviation(f, p, cfg.interval or f.domain).value
    omega = evaluate_modulus(f2, cfg)
    return jackson_constant(dev, n, omega)
