import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from coconvex.errors import IdenticallyZero
from coconvex.polynomial import (
    Interval,
    Polynomial,
    derivative,
    eval_poly,
    extrema,
    inflection_points,
    preimage_interval,
    real_roots,
    sup_abs,
)
from oracles import grid_sup_abs, sign_scan_inflections

P3 = Polynomial((0.0, -1.0, 0.5))
P5 = Polynomial((4.0, 0.0, -5.0, 0.0, 1.0))
D = Interval(-3.0, 3.0)

coeff = st.floats(-5, 5, allow_nan=False).map(lambda c: round(c, 3))
polys = st.lists(coeff, min_size=1, max_size=7).map(lambda c: Polynomial(tuple(c)))


def test_interval_rejects_reversed_and_infinite():
    with pytest.raises(ValueError):
        Interval(1.0, 0.0)
    with pytest.raises(ValueError):
        Interval(0.0, math.inf)


def test_trailing_zeros_are_stripped():
    assert Polynomial((1.0, 2.0, 0.0, 0.0)).degree == 1
    assert Polynomial((0.0,)).degree == -1


@pytest.mark.parametrize("p, x, want", [
    (P3, 3.0, 1.5),
    (P5, 1.5, -2.1875),
    (Polynomial(()), 7.0, 0.0),
])
def test_eval(p, x, want):
    assert eval_poly(p, x) == want


def test_eval_vectorised_matches_scalar():
    xs = np.linspace(-3, 3, 11)
    assert np.array_equal(P5(xs), [P5(float(x)) for x in xs])


def test_derivatives():
    assert derivative(P3, 2) == Polynomial((1.0,))
    assert derivative(P5, 2) == Polynomial((-10.0, 0.0, 12.0))
    assert derivative(Polynomial((3.0,)), 1).degree == -1
    assert derivative(P5, 0) == P5


def test_algebra():
    x = Polynomial.x()
    assert (x + 2) * (x + 1) * (x - 1) * (x - 2) == P5
    assert P5 == Polynomial.from_roots([-2, -1, 1, 2])
    assert (x**2).compose(x + 1) == Polynomial((1.0, 2.0, 1.0))


@given(polys, st.floats(-3, 3))
def test_derivative_matches_central_difference(p, x):
    d = 1e-6
    fd = (p(x + d) - p(x - d)) / (2 * d)
    got = derivative(p, 1)(x)
    assert abs(got - fd) <= 1e-4 * (1 + abs(got))


def test_real_roots_examples():
    assert real_roots(P5, D) == [-2.0, -1.0, 1.0, 2.0]
    assert real_roots(Polynomial((1.0, 0.0, 1.0)), D) == []
    r = real_roots(Polynomial((-10.0, 0.0, 12.0)), D)
    assert r == pytest.approx([-math.sqrt(5 / 6), math.sqrt(5 / 6)], abs=1e-12)


def test_real_roots_zero_polynomial():
    with pytest.raises(IdenticallyZero):
        real_roots(Polynomial(()), D)


def test_double_root_found():
    p = Polynomial.from_roots([0.5, 0.5, -1.0])
    assert real_roots(p, D) == pytest.approx([-1.0, 0.5], abs=1e-7)


@given(st.lists(st.floats(-2.9, 2.9).map(lambda r: round(r, 2)), min_size=1, max_size=5,
                unique=True))
def test_roots_of_product_recovered(roots):
    roots = sorted(roots)
    if any(b - a < 0.05 for a, b in zip(roots, roots[1:])):
        return
    got = real_roots(Polynomial.from_roots(roots), D)
    assert got == pytest.approx(roots, abs=1e-9)


def test_sup_abs_examples():
    assert sup_abs(P3, D) == (7.5, -3.0)
    assert sup_abs(Polynomial((2.0,)), Interval(0.0, 1.0)) == (2.0, 0.0)
    # value from a 100,001-point grid scan (tests/oracles.py), argmax is leftmost
    assert sup_abs(P5, D) == (40.0, -3.0)


def test_sup_abs_against_grid_scan():
    rng = np.random.default_rng(7)
    for _ in range(100):
        c = rng.normal(size=rng.integers(1, 8))
        val, _ = sup_abs(Polynomial(tuple(c)), D)
        ref, _ = grid_sup_abs(c, -3, 3)
        assert ref <= val + 1e-12
        assert abs(val - ref) <= 1e-8 * (1 + val)


def test_extrema_signed():
    lo, xlo, hi, xhi = extrema(P3, D)
    assert (lo, xlo, hi, xhi) == (-0.5, 1.0, 7.5, -3.0)


def test_inflection_examples():
    s = math.sqrt(5 / 6)
    assert inflection_points(P5, D) == pytest.approx([-s, s], abs=1e-12)
    assert inflection_points(P3, D) == []
    assert inflection_points(Polynomial((0, 0, 0, 1.0)), Interval(-1, 1)) == [0.0]


def test_inflection_ignores_touching_zero():
    # p'' = 12 x^2 touches zero at 0 without changing sign
    assert inflection_points(Polynomial((0, 0, 0, 0, 1.0)), Interval(-1, 1)) == []


def test_inflection_against_sign_scan():
    rng = np.random.default_rng(11)
    for _ in range(30):  # the acceptance suite runs 100 more
        c = rng.normal(size=rng.integers(1, 8))
        got = inflection_points(Polynomial(tuple(c)), D)
        want = sign_scan_inflections(c, -3, 3)
        assert len(got) == len(want)
        assert got == pytest.approx(want, abs=1e-8)


def test_preimage_examples():
    assert preimage_interval(Polynomial.x(), (0, 1), D) == [Interval(0, 1)]
    # boundary equations 0.5x^2 - x = 0 and = 1.5 solved by hand: {0, 2} and {-1, 3}
    assert preimage_interval(P3, (0, 1.5), D) == [Interval(-1, 0), Interval(2, 3)]
    pts = preimage_interval(P5, (0, 0), D)
    assert [(i.lo, i.hi) for i in pts] == [(-2, -2), (-1, -1), (1, 1), (2, 2)]


def test_preimage_constant():
    assert preimage_interval(Polynomial((1.0,)), (0, 2), D) == [D]
    assert preimage_interval(Polynomial((5.0,)), (0, 2), D) == []


def _check_preimage(p, target, dom, rng):
    parts = preimage_interval(p, target, dom)
    for a, b in zip(parts, parts[1:]):
        assert a.hi < b.lo
        mid = 0.5 * (a.hi + b.lo)
        assert not (target[0] - 1e-9 <= p(mid) <= target[1] + 1e-9)
    for x in rng.uniform(dom.lo, dom.hi, 200):
        inside = any(i.lo - 1e-10 <= x <= i.hi + 1e-10 for i in parts)
        v = p(x)
        if inside:
            assert target[0] - 1e-9 <= v <= target[1] + 1e-9
        else:
            assert not (target[0] + 1e-9 <= v <= target[1] - 1e-9)
    for i in parts:
        for x in (i.lo, i.hi, i.midpoint):
            assert target[0] - 1e-9 <= p(x) <= target[1] + 1e-9


def test_preimage_membership_random():
    rng = np.random.default_rng(5)
    for _ in range(30):
        c = rng.normal(size=rng.integers(2, 7))
        lo = float(rng.normal())
        _check_preimage(Polynomial(tuple(c)), (lo, lo + abs(rng.normal())), D, rng)


@given(st.floats(0.1, 3), st.floats(-2, 2), st.floats(-3, 3), st.floats(0, 4))
def test_preimage_of_monotone_is_one_interval(a, b, lo, width):
    p = Polynomial((b, a, 0.0, a / 10))  # p' = a + 0.3 a x^2 > 0
    assert len(preimage_interval(p, (lo, lo + width), D)) <= 1
