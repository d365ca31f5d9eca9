"""Univariate real polynomials on bounded intervals.

Everything here works in plain IEEE doubles.  Roots are isolated by splitting
the interval at the critical points (found recursively from the derivative)
and at a uniform bracketing grid, then bisecting every sign change.  Roots of
even multiplicity do not change sign; they are picked up at the critical
points where the polynomial is indistinguishable from zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import IdenticallyZero

BRACKET_POINTS = 4097
MERGE_TOL = 1e-10

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise ValueError(f"interval bounds must be finite, got [{lo}, {hi}]")
        if lo > hi:
            raise ValueError(f"interval lower bound exceeds upper bound: [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def halfwidth(self) -> float:
        return 0.5 * (self.hi - self.lo)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= x <= self.hi + tol

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def linspace(self, num: int) -> np.ndarray:
        return np.linspace(self.lo, self.hi, num)

    def __iter__(self):
        yield self.lo
        yield self.hi

    def __str__(self):
        return f"[{self.lo!r}, {self.hi!r}]"


@dataclass(frozen=True)
class Polynomial:
    """Dense polynomial, coefficients in ascending powers.

    Trailing zero coefficients are stripped, so the zero polynomial has
    ``coeffs == ()`` and ``degree == -1``.
    """

    coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        cs = [float(c) for c in self.coeffs]
        while cs and cs[-1] == 0.0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def constant(cls, c: float) -> "Polynomial":
        return cls((c,))

    @classmethod
    def x(cls) -> "Polynomial":
        return cls((0.0, 1.0))

    @classmethod
    def from_roots(cls, roots: Iterable[float], lead: float = 1.0) -> "Polynomial":
        p = cls.constant(lead)
        for r in roots:
            p = p * cls((-float(r), 1.0))
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        """Horner evaluation; accepts a float or an array of points."""
        if isinstance(x, np.ndarray):
            out = np.zeros_like(x, dtype=float)
            for c in reversed(self.coeffs):
                out = out * x + c
            return out
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def rounding_bound(self, x):
        """Bound on the rounding error of Horner evaluation at ``x``."""
        absx = np.abs(x)
        acc = np.zeros_like(absx, dtype=float) if isinstance(x, np.ndarray) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * absx + abs(c)
        return 4 * (len(self.coeffs) + 1) * _EPS * acc

    def derivative(self, order: int = 1) -> "Polynomial":
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        cs = list(self.coeffs)
        for _ in range(order):
            cs = [i * c for i, c in enumerate(cs)][1:]
        return Polynomial(tuple(cs))

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0.0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0.0] * (n - len(other.coeffs))
        return Polynomial(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if self.is_zero or other.is_zero:
            return Polynomial()
        out = [0.0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, scalar: float):
        return Polynomial(tuple(c / scalar for c in self.coeffs))

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = Polynomial.constant(1.0)
        for _ in range(k):
            out = out * self
        return out

    def compose(self, inner: "Polynomial") -> "Polynomial":
        """Return ``self(inner(x))``."""
        out = Polynomial()
        for c in reversed(self.coeffs):
            out = out * inner + c
        return out

    def __str__(self):
        if self.is_zero:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0.0:
                continue
            if i == 0:
                terms.append(repr(c))
            elif i == 1:
                terms.append(f"{c!r}*x")
            else:
                terms.append(f"{c!r}*x^{i}")
        return " + ".join(terms)


def _as_poly(v) -> Polynomial:
    if isinstance(v, Polynomial):
        return v
    return Polynomial.constant(float(v))


def _as_interval(I) -> Interval:
    return I if isinstance(I, Interval) else Interval(*I)


def eval_poly(p: Polynomial, x: float) -> float:
    return p(x)


def derivative(p: Polynomial, order: int = 1) -> Polynomial:
    return p.derivative(order)


def _bisect(p: Polynomial, a: float, b: float, fa: float) -> float:
    # run to float resolution; costs ~60 evaluations and beats 1e-12 comfortably
    while True:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = p(m)
        if fm == 0.0:
            return m
        if (fm < 0.0) == (fa < 0.0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def _merge(points: Sequence[float], tol: float = MERGE_TOL) -> list[float]:
    out: list[float] = []
    for x in sorted(x + 0.0 for x in points):
        if out and x - out[-1] <= tol:
            continue
        out.append(x)
    return out


def real_roots(p: Polynomial, I) -> list[float]:
    """All real roots of ``p`` in the closed interval ``I``, sorted."""
    I = _as_interval(I)
    if p.is_zero:
        raise IdenticallyZero("the zero polynomial has every point as a root")
    if p.degree == 0:
        return []
    if p.degree == 1:
        r = -p.coeffs[0] / p.coeffs[1] + 0.0
        return [r] if I.lo <= r <= I.hi else []

    critical = real_roots(p.derivative(), I)
    grid = np.union1d(I.linspace(BRACKET_POINTS), np.asarray(critical, dtype=float))
    vals = p(grid)

    roots = [float(x) for x in grid[vals == 0.0]]
    sign = np.sign(vals)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    for i in flips:
        roots.append(_bisect(p, float(grid[i]), float(grid[i + 1]), float(vals[i])))
    # even-multiplicity roots touch zero without crossing it
    for c in critical:
        if abs(p(c)) <= p.rounding_bound(c):
            roots.append(c)
    return _merge(roots)


def _candidates(p: Polynomial, I: Interval) -> list[float]:
    pts = [I.lo]
    if p.degree >= 2:
        pts.extend(x for x in real_roots(p.derivative(), I) if I.lo < x < I.hi)
    pts.append(I.hi)
    return pts


def sup_abs(p: Polynomial, I) -> tuple[float, float]:
    """``max |p|`` over ``I`` and the leftmost point attaining it."""
    I = _as_interval(I)
    best, arg = -1.0, I.lo
    for x in _candidates(p, I):
        v = abs(p(x))
        if v > best:
            best, arg = v, x
    return best, arg


def extrema(p: Polynomial, I) -> tuple[float, float, float, float]:
    """Signed extrema ``(min, argmin, max, argmax)`` of ``p`` over ``I``."""
    I = _as_interval(I)
    pts = _candidates(p, I)
    vals = [p(x) for x in pts]
    i_min = min(range(len(pts)), key=lambda i: (vals[i], i))
    i_max = max(range(len(pts)), key=lambda i: (vals[i], -i))
    return vals[i_min], pts[i_min], vals[i_max], pts[i_max]


def inflection_points(p: Polynomial, I) -> list[float]:
    """Interior points of ``I`` where ``p''`` changes sign."""
    I = _as_interval(I)
    if p.degree < 2:
        return []
    p2 = p.derivative(2)
    if p2.degree == 0:
        return []
    rs = [r for r in real_roots(p2, I) if I.lo < r < I.hi]
    edges = [I.lo, *rs, I.hi]
    out = []
    for j, r in enumerate(rs, start=1):
        left = p2(0.5 * (edges[j - 1] + r))
        right = p2(0.5 * (r + edges[j + 1]))
        if left * right < 0.0:
            out.append(r)
    return out


def preimage_interval(p: Polynomial, target, domain) -> list[Interval]:
    """``{x in domain : target.lo <= p(x) <= target.hi}`` as maximal closed intervals.

    Components that collapse to a single point come back as zero-width
    intervals.
    """
    target = _as_interval(target)
    domain = _as_interval(domain)

    breaks = {domain.lo, domain.hi}
    for level in {target.lo, target.hi}:
        q = p - level
        if q.is_zero:
            # p is the constant `level`, which lies in the target
            return [domain]
        breaks.update(real_roots(q, domain))
    bs = sorted(breaks)

    def inside(x, slack):
        v = p(x)
        return target.lo - slack <= v <= target.hi + slack

    root_like = set(bs) - {domain.lo, domain.hi}
    point_in = [
        inside(b, 1e-9 * (1.0 + abs(p(b)))) if b in root_like else inside(b, 0.0)
        for b in bs
    ]
    gap_in = [inside(0.5 * (a + b), 0.0) for a, b in zip(bs, bs[1:])]

    comps: list[Interval] = []
    start = None
    for i, b in enumerate(bs):
        carried = i > 0 and gap_in[i - 1]
        if point_in[i] or carried:
            if start is None:
                start = b
            end = b
        leaving = i == len(bs) - 1 or not gap_in[i]
        if start is not None and leaving:
            comps.append(Interval(start, end))
            start = None
    return comps
