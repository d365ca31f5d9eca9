import math

import numpy as np
import pytest

from coconvex.errors import OutOfDomain
from coconvex.funcexpr import PiecewiseFn, parse_piecewise
from coconvex.polynomial import Interval, Polynomial
from coconvex.smoothness import (
    H_LATTICE,
    ModulusSpec,
    apply_replication_weight,
    dt_modulus_replication,
    dt_modulus_standard,
    dt_modulus_standard_curve,
    h_grid,
    max_fixed_step_diff,
    modulus,
    replication_weight,
    scan_for_difference,
    sym_diff,
)
from coconvex.worked_examples import EXAMPLE2

D = Interval(-3.0, 3.0)
QUAD = PiecewiseFn.single("6*x^2 - 6*x + 2", D)


def rep(k, h, interval=D, t=0.5):
    return ModulusSpec(k=k, r=2, t=t, mode="replication", interval=interval, h_explicit=h)


def test_sym_diff_examples():
    assert sym_diff(QUAD, 0.0, 0.4, 2) == pytest.approx(1.92, abs=1e-12)
    assert sym_diff(PiecewiseFn.single("3*x - 1", D), 0.7, 0.9, 2) == pytest.approx(0, abs=1e-12)
    # (1.1^2 - 0.9^2) by hand
    assert sym_diff(PiecewiseFn.single("x^2", D), 1.0, 0.2, 1) == pytest.approx(0.4, abs=1e-12)


def test_sym_diff_out_of_domain():
    with pytest.raises(OutOfDomain):
        sym_diff(QUAD, 2.9, 0.4, 2)


def test_second_difference_of_quadratic_is_constant():
    rng = np.random.default_rng(2)
    for _ in range(10):
        a, b, c = rng.normal(size=3)
        g = PiecewiseFn.from_polynomial(Polynomial((c, b, a)), D)
        h = rng.uniform(0.01, 0.5)
        vals = [sym_diff(g, x, h, 2) for x in rng.uniform(-2.4, 2.4, 100)]
        assert np.var(vals) <= 1e-18 * (1 + abs(a)) ** 2
        assert np.mean(vals) == pytest.approx(2 * a * h * h, rel=1e-9, abs=1e-12)


def test_modulus_settings_validation():
    with pytest.raises(ValueError):
        ModulusSpec(k=2, interval=D)
    with pytest.raises(ValueError):
        ModulusSpec(k=2, mode="replication", interval=D, t=0.5, h_explicit=0.6)
    with pytest.raises(ValueError):
        ModulusSpec(k=2, mode="replication", interval=D)


def test_lattice_is_nested_and_exact():
    assert 0.5 in H_LATTICE and 0.45 in H_LATTICE and 1.0 in H_LATTICE
    assert h_grid(0.5)[-1] == 0.5
    assert set(h_grid(0.2)) <= set(h_grid(0.3))
    assert len(h_grid(5e-5)) == 0


def test_standard_examples():
    one = PiecewiseFn.single("1", (-1, 1))
    assert dt_modulus_standard(one, ModulusSpec(k=0, r=2, t=0.3)) == 1.0
    # Delta^2_{h phi} x^2 = 2 h^2 (1 - x^2): sup at h = t, x = 0
    sq = PiecewiseFn.single("x^2", (-1, 1))
    assert dt_modulus_standard(sq, ModulusSpec(k=2, r=0, t=1.0)) == pytest.approx(2.0, abs=1e-3)
    assert dt_modulus_standard(sq, ModulusSpec(k=2, r=0, t=0.5)) == pytest.approx(0.5, abs=1e-3)


def test_standard_excludes_tuples_leaving_the_interval():
    # with r = 0 and no exclusion the endpoint stencil would leave [-1, 1]
    g = PiecewiseFn.single("x", (-1, 1))
    assert dt_modulus_standard(g, ModulusSpec(k=1, r=0, t=0.5)) == pytest.approx(0.5, abs=1e-3)


def test_standard_needs_unit_interval():
    with pytest.raises(OutOfDomain):
        dt_modulus_standard(PiecewiseFn.single("x", (0, 1)), ModulusSpec(k=1))


def test_curve_matches_single_calls():
    g = parse_piecewise("[-1, 0.3) : x^3; [0.3, 1] : abs(x - 0.5)")
    ts = [0.1, 0.25, 0.5]
    assert dt_modulus_standard_curve(g, 2, 1, ts) == [
        dt_modulus_standard(g, ModulusSpec(k=2, r=1, t=t)) for t in ts]


def test_replication_example1():
    assert dt_modulus_replication(QUAD, rep(2, 0.4)) == pytest.approx(15.36, abs=1e-9)
    zero = PiecewiseFn.single("0", D)
    assert dt_modulus_replication(zero, rep(2, 0.4)) == 0.0
    lin = PiecewiseFn.single("x", D)
    assert dt_modulus_replication(lin, rep(2, 0.3)) == pytest.approx(0.0, abs=1e-12)


def test_replication_consistent_with_weighted_difference():
    # equal up to rounding: the grid maximum picks the largest rounded difference
    d = sym_diff(QUAD, 0.0, 0.4, 2)
    want = apply_replication_weight(d, D)
    assert dt_modulus_replication(QUAD, rep(2, 0.4)) == pytest.approx(want, rel=1e-13)


def test_replication_weight():
    assert replication_weight(D) == 8.0
    assert replication_weight(Interval(-0.5, 0.5)) == 1.0
    assert replication_weight(Interval(2.0, 3.0)) == 8.0
    assert apply_replication_weight(124.678, D) == pytest.approx(997.424, abs=1e-9)
    assert apply_replication_weight(1.92, D) == pytest.approx(15.36, abs=1e-9)
    assert apply_replication_weight(0.0, Interval(-7, 7)) == 0.0


def test_max_fixed_step_diff_skips_poles():
    v, x = max_fixed_step_diff(EXAMPLE2.f2, 4, 0.1, Interval(-3, 0))
    assert math.isfinite(v) and v > 0
    assert min(abs(x - 0.2 * i + 0.2 - (-2.0)) for i in range(5)) >= 1e-3 - 1e-12


def test_quoted_delta_scan_only_finds_points_near_the_pole():
    hits = scan_for_difference(EXAMPLE2.f2, 4, 0.1, 124.678, Interval(-3, 0))
    for x, v in hits:
        assert abs(v - 124.678) < 1e-2
        assert abs(x + 2.0) < 0.25
    assert len(hits) == 4


def test_modulus_dispatch():
    assert modulus(QUAD, rep(2, 0.4)) == dt_modulus_replication(QUAD, rep(2, 0.4))
    sq = PiecewiseFn.single("x^2", (-1, 1))
    assert modulus(sq, ModulusSpec(k=2, t=1.0)) == dt_modulus_standard(sq, ModulusSpec(k=2, t=1.0))
