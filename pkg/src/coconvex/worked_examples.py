"""The two worked examples, embedded, and the pipeline that recomputes them.

Each :class:`ReplicationRow` pairs a recomputed number with the printed value
it is compared against.  Where the printed value is rounded (or truncated)
the tolerance says so; where a printed value disagrees with direct
evaluation the note records it and the row checks what can be checked.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .approx import DeviationKind, ModulusConfig, check_jackson_bound, jackson_constant
from .domainsep import check_dccp, check_dcp, strictly_separates
from .errors import UnknownExample
from .funcexpr import PiecewiseFn, parse_piecewise, pointwise_deviation
from .polynomial import Interval, Polynomial, inflection_points, sup_abs
from .shape import YPartition, secant_convexity_test, secant_gap
from .smoothness import (
    ModulusSpec,
    apply_replication_weight,
    dt_modulus_replication,
    scan_for_difference,
    sym_diff,
)

EXACT = 1e-12
TIGHT = 1e-9


@dataclass(frozen=True)
class ReplicationRow:
    label: str
    computed: float
    paper_value: float
    tolerance: float
    provenance_note: str
    pass_: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "pass_", abs(self.computed - self.paper_value) <= self.tolerance)


@dataclass(frozen=True)
class Example:
    name: str
    p: Polynomial
    domain: Interval
    n: int
    f: PiecewiseFn
    f1: PiecewiseFn
    f2: PiecewiseFn
    modulus_arg: PiecewiseFn
    modulus: ModulusConfig
    x0: float
    y: tuple[float, ...] = ()
    witness: float | None = None


D33 = Interval(-3.0, 3.0)

EXAMPLE1 = Example(
    name="example1",
    p=Polynomial((0.0, -1.0, 0.5)),
    domain=D33,
    n=3,
    f=parse_piecewise("""
        [-3, 0) : x
        [0, 3]  : 0.5*x^4 - (x - 1)^3 - 2*x^2
    """),
    f1=parse_piecewise("""
        [-3, 0) : 1
        [0, 3]  : 2*x^3 - 3*(x - 1)^2 - 4*x
    """),
    f2=parse_piecewise("""
        [-3, 0) : 0
        [0, 3]  : 6*x^2 - 6*x + 2
    """),
    # the modulus is taken of the quadratic branch of f'' over the whole domain
    modulus_arg=PiecewiseFn.single("6*x^2 - 6*x + 2", D33),
    modulus=ModulusConfig(mode="replication", k=2, r=2, t=0.5, h=0.4, interval=D33),
    x0=3.0,
    witness=6.0,
)

_F2_EX2 = parse_piecewise("""
    [-3, 0] : ((abs(x^2 - 4))^2*(6*x - 8) - (2*x^3 - 8*x)^2) / (abs(x^2 - 4))^3
    (0, 3]  : 0
""")

EXAMPLE2 = Example(
    name="example2",
    p=Polynomial.from_roots([-2.0, -1.0, 1.0, 2.0]),
    domain=D33,
    n=5,
    f=parse_piecewise("""
        [-3, 0] : abs(x^2 - 4) + x
        (0, 3]  : abs(2*x - 4) - x
    """),
    f1=parse_piecewise("""
        [-3, 0] : (2*x^3 - 8*x) / abs(x^2 - 4) + 1
        (0, 3]  : (4*x - 8) / abs(2*x - 4) - 1
    """),
    f2=_F2_EX2,
    modulus_arg=_F2_EX2,
    modulus=ModulusConfig(mode="quoted", k=4, r=2, t=0.2, h=0.1, interval=D33,
                          quoted_delta=124.678),
    x0=-3.0,
    y=(-2.0, -1.0, 1.0, 2.0),
)

EXAMPLES = {"example1": EXAMPLE1, "example2": EXAMPLE2}


def get_example(name: str) -> Example:
    try:
        return EXAMPLES[name]
    except KeyError:
        raise UnknownExample(f"unknown example {name!r}; choose from {sorted(EXAMPLES)}") from None


def _rows_example1() -> tuple[list[ReplicationRow], dict]:
    ex = EXAMPLE1
    p, f = ex.p, ex.f
    lam = 0.6
    rows = [
        ReplicationRow("p3(3)", p(3.0), 1.5, EXACT, "example 1, step 1: value of p3 at x = 3"),
        ReplicationRow("p3(-3)", p(-3.0), 7.5, EXACT, "example 1, step 1: value of p3 at y = -3"),
        ReplicationRow(
            "|p3(-0.6)|", abs(p(-0.6)), 0.78, EXACT,
            "example 1, step 1: printed as -0.78, but 0.5*0.36 + 0.6 = +0.78; "
            "the row checks the magnitude only"),
        ReplicationRow(
            "(1-l)p3(3) + l p3(-3), l=0.6", (1 - lam) * p(3.0) + lam * p(-3.0), 5.1, EXACT,
            "example 1, step 1: convex combination of endpoint values"),
        ReplicationRow("p3(6)", p(6.0), 12.0, EXACT, "example 1, step 2: value at the witness t = 6"),
        ReplicationRow("sup |p3| on [-3,3]", sup_abs(p, ex.domain)[0], 7.5, TIGHT,
                       "example 1, step 2: maximum of |p3| over the domain, attained at -3"),
        ReplicationRow("f(1)", f(1.0), -1.5, EXACT, "example 1, step 3: f at x0 = 1"),
        ReplicationRow("f(2)", f(2.0), -1.0, EXACT, "example 1, step 3: f at y0 = 2"),
        ReplicationRow("f(1.5)", f(1.5), -2.093, 1e-3,
                       "example 1, step 3: printed to three decimals; exact value -2.09375"),
        ReplicationRow("(f(1) + f(2))/2", 0.5 * f(1.0) + 0.5 * f(2.0), -1.25, EXACT,
                       "example 1, step 3: convex combination of f values"),
        ReplicationRow("|f(3) - p3(3)|", pointwise_deviation(f, p, ex.x0), 13.0, TIGHT,
                       "example 1, step 3: deviation evaluated at the single point x = 3"),
        ReplicationRow("Delta^2_0.4 f''", sym_diff(ex.modulus_arg, 0.0, 0.4, 2), 1.92, TIGHT,
                       "example 1, step 3: second difference of 6x^2 - 6x + 2 with step 0.4"),
    ]
    spec = ModulusSpec(k=2, r=2, t=0.5, mode="replication", interval=ex.domain, h_explicit=0.4)
    omega = dt_modulus_replication(ex.modulus_arg, spec)
    rows.append(ReplicationRow("omega_{2,2}(f'', 1/2) [replication]", omega, 15.36, TIGHT,
                               "example 1, step 3: weight (1 - 3^2) = -8 times 1.92, in magnitude"))
    c = jackson_constant(pointwise_deviation(f, p, ex.x0), ex.n, omega).c
    rows.append(ReplicationRow("c1", c, 7.62, 5e-3,
                               "example 1, step 3: constant printed to two decimals; exact 7.6171875"))

    checks = {
        "secant p3 at (3, -3), l=0.6": secant_gap(p, 3.0, -3.0, lam),
        "secant f at (1, 2), l=0.5": secant_gap(f, 1.0, 2.0, 0.5),
        "p3 convex on [-3,3] (exact)": secant_convexity_test(p, ex.domain).holds,
        "f convex on [-3,3] (sampled)": secant_convexity_test(f, ex.domain),
        "dcp": check_dcp(p, ex.domain, f, ex.modulus_arg, ex.modulus, t_witness=ex.witness,
                         n=ex.n, deviation_kind=DeviationKind.POINTWISE, x0=ex.x0),
        "strict separation at t = 6": strictly_separates(p, ex.domain, ex.witness),
    }
    return rows, checks


def _rows_example2() -> tuple[list[ReplicationRow], dict]:
    ex = EXAMPLE2
    p, f = ex.p, ex.f
    rows = [
        ReplicationRow("p5(1.5)", p(1.5), -2.1875, EXACT, "example 2, step 1: value at x = 1.5"),
        ReplicationRow("p5(1)", p(1.0), 0.0, EXACT, "example 2, step 1: value at y = 1"),
        ReplicationRow("p5(1.25)", p(1.25), -1.37, 1e-3,
                       "example 2, step 1: printed as -1.37, exact -1.37109375; "
                       "the gap of 1.094e-3 exceeds the 1e-3 tolerance"),
        ReplicationRow(
            "(p5(1.5) + p5(1))/2", 0.5 * p(1.5) + 0.5 * p(1.0), -1.09, 1e-3,
            "example 2, step 1: printed as -1.09, a truncation of the exact -1.09375; "
            "the 1e-3 tolerance cannot absorb the 3.75e-3 gap"),
        ReplicationRow("f(0)", f(0.0), 4.0, EXACT, "example 2, step 3: f at x0 = 0"),
        ReplicationRow("f(0.5)", f(0.5), 2.5, EXACT, "example 2, step 3: f at y0 = 0.5"),
        ReplicationRow("f(1.25)", f(1.25), 0.25, EXACT,
                       "example 2, step 3: f at the printed combination point 1.25"),
        ReplicationRow("(f(0) + f(0.5))/2", 0.5 * f(0.0) + 0.5 * f(0.5), 3.25, EXACT,
                       "example 2, step 3: convex combination of f values"),
    ]
    for y in ex.y:
        rows.append(ReplicationRow(f"|p5({y:g})|", abs(p(y)), 0.0, EXACT,
                                   f"example 2, step 2: declared change point y = {y:g}"))
    dev = pointwise_deviation(f, p, ex.x0)
    rows.append(ReplicationRow("|f(-3) - p5(-3)|", dev, 38.0, TIGHT,
                               "example 2, step 3: deviation evaluated at the single point x = -3"))
    omega = apply_replication_weight(ex.modulus.quoted_delta, ex.domain)
    rows.append(ReplicationRow("omega from quoted Delta^4 = 124.678", omega, 997.424, TIGHT,
                               "example 2, step 3: weight (1 - 3^2) = -8 times 124.678, in magnitude"))
    c = jackson_constant(dev, ex.n, omega).c
    rows.append(ReplicationRow("c2", c, 0.953, 1e-3,
                               "example 2, step 3: constant printed to three decimals; exact 0.95245..."))

    Y = YPartition(ex.y, ex.domain)
    scan = scan_for_difference(ex.f2, 4, 0.1, ex.modulus.quoted_delta, Interval(-3.0, 0.0))
    checks = {
        "secant p5 at (1.5, 1), l=0.5": secant_gap(p, 1.5, 1.0, 0.5),
        "secant f at (0, 0.5), l=0.5": secant_gap(f, 0.0, 0.5, 0.5),
        "recomputed inflection points of p5": inflection_points(p, ex.domain),
        "dccp": check_dccp(p, ex.domain, Y, f, ex.f2, ex.modulus, n=ex.n,
                           deviation_kind=DeviationKind.POINTWISE, x0=ex.x0),
        "x in [-3,0] with Delta^4_0.1 f''(x) = 124.678 (+-1e-2)": [x for x, _ in scan],
        "jackson pipeline c": check_jackson_bound(
            f, ex.f2, p, ex.n, ex.modulus, DeviationKind.POINTWISE, ex.x0).c,
    }
    return rows, checks


def run_replication(example_id: str) -> list[ReplicationRow]:
    return replication_report(example_id)[0]


def replication_report(example_id: str) -> tuple[list[ReplicationRow], dict]:
    get_example(example_id)
    if example_id == "example1":
        return _rows_example1()
    return _rows_example2()
