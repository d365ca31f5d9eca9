"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line (visible with ``-s`` and repeated in
the terminal summary) and then asserts.  Criterion 2 carries two printed
values that do not round to the recomputed ones within the stated tolerance;
that test is an expected failure and its line says FAIL.
"""

import contextlib
import io
import json
import math

import numpy as np
import pytest

from coconvex.approx import best_shape_approx
from coconvex.cli import main
from coconvex.domainsep import strictly_separates, strongly_separated
from coconvex.funcexpr import PiecewiseFn
from coconvex.polynomial import Interval, Polynomial, inflection_points, preimage_interval
from coconvex.smoothness import (
    ModulusSpec,
    apply_replication_weight,
    dt_modulus_replication,
    dt_modulus_standard,
    dt_modulus_standard_curve,
    sym_diff,
)
from coconvex.worked_examples import EXAMPLE1, run_replication

from cli_matrix import EX1, EX2, MATRIX
from conftest import ACCEPTANCE_LINES
from oracles import brute_minimax, chebyshev_nodes, sign_scan_inflections

U = Interval(-1.0, 1.0)
D = Interval(-3.0, 3.0)


def verdict(number, title, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}" + (f" ({detail})" if detail else "")
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


def _row_summary(rows):
    bad = [f"{r.label}: {r.computed!r} vs {r.paper_value!r}" for r in rows if not r.pass_]
    return f"{len(rows) - len(bad)}/{len(rows)} rows" + (f"; off: {'; '.join(bad)}" if bad else "")


EXPECTED_EX1 = {
    "p3(3)": (1.5, 1e-12), "p3(-3)": (7.5, 1e-12), "|p3(-0.6)|": (0.78, 1e-12),
    "(1-l)p3(3) + l p3(-3), l=0.6": (5.1, 1e-12), "p3(6)": (12.0, 1e-12),
    "(f(1) + f(2))/2": (-1.25, 1e-12),
    "sup |p3| on [-3,3]": (7.5, 1e-9), "f(1)": (-1.5, 1e-12), "f(2)": (-1.0, 1e-12),
    "f(1.5)": (-2.093, 1e-3), "|f(3) - p3(3)|": (13.0, 1e-9),
    "Delta^2_0.4 f''": (1.92, 1e-9), "omega_{2,2}(f'', 1/2) [replication]": (15.36, 1e-9),
    "c1": (7.62, 5e-3),
}

EXPECTED_EX2 = {
    "p5(1.5)": (-2.1875, 1e-12), "p5(1)": (0.0, 1e-12), "p5(1.25)": (-1.37, 1e-3),
    "(p5(1.5) + p5(1))/2": (-1.09, 1e-3), "f(0)": (4.0, 1e-12), "f(0.5)": (2.5, 1e-12),
    "f(1.25)": (0.25, 1e-12), "(f(0) + f(0.5))/2": (3.25, 1e-12),
    "|p5(-2)|": (0.0, 1e-12), "|p5(-1)|": (0.0, 1e-12), "|p5(1)|": (0.0, 1e-12),
    "|p5(2)|": (0.0, 1e-12), "|f(-3) - p5(-3)|": (38.0, 1e-9),
    "omega from quoted Delta^4 = 124.678": (997.424, 1e-9), "c2": (0.953, 1e-3),
}


def _rows_match(rows, expected):
    got = {r.label: r for r in rows}
    assert set(got) == set(expected)
    for label, (value, tol) in expected.items():
        assert got[label].paper_value == value and got[label].tolerance == tol
    return all(abs(r.computed - r.paper_value) <= r.tolerance for r in rows)


def test_criterion_1_example1_replication():
    rows = run_replication("example1")
    ok = _rows_match(rows, EXPECTED_EX1) and all(r.pass_ for r in rows)
    code, _, _ = cli("replicate", "example1", "--quiet")
    ok = ok and code == 0
    note = next(r.provenance_note for r in rows if r.label == "|p3(-0.6)|")
    ok = ok and "-0.78" in note and "+0.78" in note
    assert verdict(1, "Example 1 replication", ok, _row_summary(rows))


@pytest.mark.xfail(strict=True, reason="two printed values lie outside 1e-3 of the exact ones")
def test_criterion_2_example2_replication():
    rows = run_replication("example2")
    ok = _rows_match(rows, EXPECTED_EX2) and all(r.pass_ for r in rows)
    code, _, _ = cli("replicate", "example2", "--quiet")
    ok = ok and code == 0
    assert verdict(2, "Example 2 replication", ok, _row_summary(rows))


def test_criterion_2_rows_within_reach():
    # every row except the two off by more than the tolerance passes,
    # and those two are off by exactly the gaps between print and exact value
    rows = {r.label: r for r in run_replication("example2")}
    failing = {k for k, r in rows.items() if not r.pass_}
    assert failing == {"p5(1.25)", "(p5(1.5) + p5(1))/2"}
    assert rows["p5(1.25)"].computed == -1.37109375
    assert rows["(p5(1.5) + p5(1))/2"].computed == -1.09375
    assert rows["c2"].computed == pytest.approx(0.952454, abs=1e-6)


def test_criterion_3_dcp():
    code, out, _ = cli("check-dcp", "--config", EX1)
    rep = json.loads(out)["report"]
    margin = rep["prop2_witness"]["margin"]
    ok = code == 0 and rep["overall"] is True and abs(margin - 4.5) <= 1e-9
    assert verdict(3, "check-dcp on Example 1", ok, f"overall={rep['overall']}, margin={margin!r}")


def test_criterion_4_dccp():
    code, out, _ = cli("check-dccp", "--config", EX2)
    rep = json.loads(out)["report"]
    ver = rep["prop2_verified_mode"]
    ys = [row["y"] for row in ver["points"]]
    s = math.sqrt(5 / 6)  # roots of p5'' = 12x^2 - 10, independent of the library
    ok = (rep["overall_paper"] is True and ver["match_with_declared"] is False
          and len(ys) == 2 and abs(ys[0] + 0.912871) <= 1e-6 and abs(ys[1] - 0.912871) <= 1e-6
          and abs(ys[1] - s) <= 1e-12)
    assert verdict(4, "check-dccp dual mode on Example 2", ok,
                   f"overall_paper={rep['overall_paper']}, "
                   f"match={ver['match_with_declared']}, inflections={ys}")


def _random_poly(rng, deg):
    return Polynomial(tuple(rng.normal(size=deg + 1)))


def _annihilation(rng):
    worst = 0.0
    for case in range(250):
        k = int(rng.integers(1, 6))
        p = _random_poly(rng, int(rng.integers(0, k)))
        if case % 25 == 0:
            g = PiecewiseFn.from_polynomial(p, U)
            val = dt_modulus_standard(g, ModulusSpec(k=k, r=int(rng.integers(0, 3)),
                                                     t=float(rng.uniform(0.05, 1))))
            scale = 2.0**k * max(abs(c) for c in p.coeffs) * len(p.coeffs)
        else:
            g = PiecewiseFn.from_polynomial(p, D)
            h = float(rng.uniform(0.01, 1.0))
            x = float(rng.uniform(-3 + k * h / 2, 3 - k * h / 2))
            val = sym_diff(g, x, h, k)
            nodes = x - k * h / 2 + h * np.arange(k + 1)
            scale = 2.0**k * float(np.max(np.abs(p(nodes))))
        worst = max(worst, abs(val) / max(scale, 1.0))
    return worst


MONOTONE_FUNCTIONS = [
    "abs(x)", "x^2", "x^3", "abs(x)^3", "abs(x - 0.3)", "1/(x + 2)", "x*abs(x)",
    "abs(x - 0.5)^3", "x^5 - x", "1/(x^2 + 0.1)", "abs(x^2 - 0.25)", "x^4 - x^2",
    "abs(x + 0.5)*x", "1/(3 - x)", "abs(abs(x) - 0.5)", "(x + 1)^6/64", "x/(x^2 + 1)",
    "abs(x^3 - 0.1)", "2*x^7 - x^3", "abs(x - 0.9)^2*(x + 1)",
]
T_VALUES = [0.01, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0]


def test_criterion_5_modulus_properties():
    rng = np.random.default_rng(20240501)
    worst = _annihilation(rng)
    annihilates = worst <= 1e-9

    drops = 0
    for text in MONOTONE_FUNCTIONS:
        curve = dt_modulus_standard_curve(PiecewiseFn.single(text, U), 2, 1, T_VALUES)
        drops += sum(b < a for a, b in zip(curve, curve[1:]))

    rel = 0.0
    for text in MONOTONE_FUNCTIONS[:6]:
        for lam in (-3.0, 0.25, 7.5):
            g = PiecewiseFn.single(text, U)
            lg = PiecewiseFn.single(f"({lam!r})*({text})", U)
            spec = ModulusSpec(k=2, r=1, t=0.3)
            a, b = dt_modulus_standard(g, spec), dt_modulus_standard(lg, spec)
            rel = max(rel, abs(b - abs(lam) * a) / max(abs(lam) * a, 1e-300))
            rspec = ModulusSpec(k=2, r=2, t=0.5, mode="replication", interval=U, h_explicit=0.4)
            a, b = dt_modulus_replication(g, rspec), dt_modulus_replication(lg, rspec)
            rel = max(rel, abs(b - abs(lam) * a) / max(abs(lam) * a, 1e-300))
    rel = max(rel, abs(apply_replication_weight(-3 * 124.678, D) - 3 * 997.424) / (3 * 997.424))
    homogeneous = rel <= 1e-12

    ok = annihilates and drops == 0 and homogeneous
    assert verdict(5, "modulus properties", ok,
                   f"annihilation worst {worst:.2e} over 250 cases; "
                   f"{drops} monotonicity drops over 20x8; homogeneity rel {rel:.1e}")


APPROX_INSTANCES = [
    ("x^2", 2), ("abs(x)", 3), ("x^3", 3), ("x^4", 3), ("abs(x - 0.3)", 2),
    ("1/(x + 2)", 3), ("x^3 - x", 2), ("abs(x)^3 + x", 3), ("(x + 1)^4/4", 3),
    ("2*x^2 - abs(x)", 3),
]


def test_criterion_6_approximation_oracle():
    e2 = best_shape_approx(PiecewiseFn.single("x^2", U), 2, grid_size=257).epsilon
    xs = chebyshev_nodes(-1, 1, 33)
    gaps = []
    for text, n in APPROX_INSTANCES:
        f = PiecewiseFn.single(text, U)
        want, _ = brute_minimax(xs, f.evaluate(xs), n, convex=True)
        gaps.append(abs(best_shape_approx(f, n, grid_size=33).epsilon - want))
    rises = 0
    for text, _ in APPROX_INSTANCES:
        f = PiecewiseFn.single(text, U)
        eps = [best_shape_approx(f, n, grid_size=65).epsilon for n in range(1, 6)]
        rises += sum(b > a + 1e-9 for a, b in zip(eps, eps[1:]))
    ok = abs(e2 - 0.5) <= 2e-3 and max(gaps) <= 2e-3 and rises == 0
    assert verdict(6, "approximation oracle", ok,
                   f"E_2(x^2) = {e2:.6f}; worst brute-force gap {max(gaps):.1e}; {rises} rises in n")


def _preimage_ok(p, target, rng):
    parts = preimage_interval(p, target, D)
    lo, hi = target
    for x in rng.uniform(D.lo, D.hi, 200):
        v = p(x)
        inside = any(i.lo - 1e-10 <= x <= i.hi + 1e-10 for i in parts)
        if inside and not lo - 1e-9 <= v <= hi + 1e-9:
            return False
        if not inside and lo + 1e-9 <= v <= hi - 1e-9:
            return False
    return True


def test_criterion_7_geometry_oracles():
    rng = np.random.default_rng(7)
    mismatches = 0
    for _ in range(100):
        c = rng.normal(size=int(rng.integers(1, 8)))
        got = inflection_points(Polynomial(tuple(c)), D)
        want = sign_scan_inflections(c, D.lo, D.hi)
        if len(got) != len(want) or any(abs(a - b) > 1e-8 for a, b in zip(got, want)):
            mismatches += 1
    bad = 0
    for _ in range(40):
        p = _random_poly(rng, int(rng.integers(1, 6)))
        lo = float(rng.normal())
        bad += not _preimage_ok(p, (lo, lo + abs(float(rng.normal()))), rng)
    ok = mismatches == 0 and bad == 0
    assert verdict(7, "geometry oracles", ok,
                   f"{mismatches}/100 inflection mismatches; {bad}/40 preimage failures")


def _scaling_suite():
    rng = np.random.default_rng(41)
    checked = broken = 0
    grid = np.linspace(-1, 1, 201)
    while checked < 25:
        p, q = _random_poly(rng, 2), _random_poly(rng, 2)
        if min(p(grid)) <= 0 or min(q(grid)) <= 0:
            continue
        base = strongly_separated(p, U, q, U).holds
        for w in ("1 + x^2", "x + 0.1", "3", "1/(2 - x)"):
            t = float(rng.uniform(0, 1))
            hbar = PiecewiseFn.single(w, (0, 1))
            broken += strongly_separated(p, U, q, U, hbar, t).holds != base
        checked += 1
    return broken


def test_criterion_8_separation():
    v = strictly_separates(EXAMPLE1.p, D, 6.0)
    literal = v.holds and v.b == 9.75 and v.sup_rhs < v.b < EXAMPLE1.p(6.0)
    broken = _scaling_suite()
    t_id = PiecewiseFn.single("x", (0, 1))
    all_t = strongly_separated(Polynomial((1.0, 0.0, 1.0)), U, Polynomial((0.0, 0.0, -1.0)), U,
                               t_id, "all")
    zero_only = not all_t.holds and all_t.failing_t == (0.0,)
    ok = literal and broken == 0 and zero_only
    assert verdict(8, "separation contracts", ok,
                   f"b = {v.b!r}, sup = {v.sup_rhs!r}; {broken} scaling breaks; "
                   f"AllT fails at t = {list(all_t.failing_t)}")


def test_criterion_9_determinism():
    def sweep():
        return [cli(*argv, "--float-format", "fixed17") for argv, _ in MATRIX]

    first, second = sweep(), sweep()
    same = first == second
    codes = [c for c, _, _ in first] == [c for _, c in MATRIX]
    ok = same and codes
    assert verdict(9, "CLI determinism", ok,
                   f"{len(MATRIX)} invocations, byte-identical={same}, exit codes as expected={codes}")
