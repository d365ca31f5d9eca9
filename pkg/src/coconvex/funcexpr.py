"""Expression trees, piecewise functions, and deviations from polynomials.

Grammar (no implicit multiplication, ``abs`` is the only function)::

    expr    := ["-"] term (("+" | "-") term)*
    term    := power (("*" | "/") power)*
    power   := primary ["^" integer]
    primary := number | "x" | "(" expr ")" | "abs" "(" expr ")"

A leading minus is stored as ``0 - term`` so that the tree only uses the node
kinds below; the printer renders it back as ``(-term)``.

Piecewise files hold one piece per line, ``[a, b) : <expr>``, with ``#``
starting a comment.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import (
    DivisionByZero,
    NotPolynomial,
    OutOfDomain,
    ParseError,
    PieceBoundaryCrossed,
)
from .polynomial import Interval, Polynomial, _as_interval, real_roots

SUP_GRID = 10001
REFINE_ROUNDS = 3


# -- expression nodes --------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exp: int

    def __post_init__(self):
        if self.exp < 0:
            raise ValueError("integer-power exponent must be >= 0")


@dataclass(frozen=True)
class Abs:
    arg: "Expr"


Expr = Union[Const, Var, BinOp, Pow, Abs]

X = Var()


def _is_negation(e) -> bool:
    return isinstance(e, BinOp) and e.op == "-" and e.left == Const(0.0)


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


@dataclass
class _Tok:
    kind: str  # num, x, abs, op, end
    text: str
    offset: int  # byte offset


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    raw = text.encode("utf-8")

    def byte_off(i):
        return len(text[:i].encode("utf-8"))

    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            rest = text[pos:]
            stripped = rest.lstrip()
            if not stripped:
                break
            at = pos + (len(rest) - len(stripped))
            raise ParseError(f"unexpected character {stripped[0]!r}", byte_off(at),
                             {"number", "x", "abs", "(", "-"})
        start = m.start(m.lastgroup)
        if m.group("num") is not None:
            toks.append(_Tok("num", m.group("num"), byte_off(start)))
        elif m.group("name") is not None:
            name = m.group("name")
            if name not in ("x", "abs"):
                raise ParseError(f"unknown name {name!r}", byte_off(start), {"x", "abs"})
            toks.append(_Tok(name, name, byte_off(start)))
        else:
            toks.append(_Tok("op", m.group("op"), byte_off(start)))
        pos = m.end()
    toks.append(_Tok("end", "", len(raw)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def at_op(self, *ops) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def fail(self, expected):
        t = self.tok
        what = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"unexpected {what}", t.offset, expected)

    def expect_op(self, op):
        if not self.at_op(op):
            self.fail({op})
        self.i += 1

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            self.fail({"+", "-", "*", "/", "^", "end of input"})
        return e

    def expr(self) -> Expr:
        if self.at_op("-"):
            self.i += 1
            node = BinOp("-", Const(0.0), self.term())
        else:
            node = self.term()
        while self.at_op("+", "-"):
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.power()
        while self.at_op("*", "/"):
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.power())
        return node

    def power(self) -> Expr:
        node = self.primary()
        if self.at_op("^"):
            self.i += 1
            t = self.tok
            if t.kind != "num" or not t.text.isdigit():
                self.fail({"integer"})
            self.i += 1
            node = Pow(node, int(t.text))
        return node

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Const(float(t.text))
        if t.kind == "x":
            self.i += 1
            return X
        if t.kind == "abs":
            self.i += 1
            self.expect_op("(")
            inner = self.expr()
            self.expect_op(")")
            return Abs(inner)
        if self.at_op("("):
            self.i += 1
            inner = self.expr()
            self.expect_op(")")
            return inner
        self.fail({"number", "x", "abs", "("})


def parse_expr(text: str) -> Expr:
    return _Parser(text).parse()


# -- printing ----------------------------------------------------------------


def _fmt_num(v: float) -> str:
    s = repr(float(v))
    return f"({s})" if s.startswith("-") else s


def to_text(e: Expr) -> str:
    """Render ``e`` so that ``parse_expr(to_text(e))`` rebuilds the same tree."""
    return _show(e, 0)


def _show(e: Expr, ctx: int) -> str:
    # ctx: 0 = sum operand (left), 1 = sum right operand, 2 = product left,
    # 3 = product right, 4 = power base
    if isinstance(e, Const):
        return _fmt_num(e.value)
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Abs):
        return f"abs({_show(e.arg, 0)})"
    if isinstance(e, Pow):
        base = _show(e.base, 4)
        if isinstance(e.base, Pow):
            base = f"({base})"
        return f"{base}^{e.exp}"
    if _is_negation(e):
        return f"(-{_show(e.right, 2)})"
    if e.op in "+-":
        s = f"{_show(e.left, 0)} {e.op} {_show(e.right, 1)}"
        return f"({s})" if ctx >= 1 else s
    s = f"{_show(e.left, 2)} {e.op} {_show(e.right, 3)}"
    return f"({s})" if ctx >= 3 else s


# -- evaluation --------------------------------------------------------------


def _ev(e: Expr, x: np.ndarray) -> np.ndarray:
    if isinstance(e, Const):
        return np.full_like(x, e.value)
    if isinstance(e, Var):
        return x
    if isinstance(e, Abs):
        return np.abs(_ev(e.arg, x))
    if isinstance(e, Pow):
        return _ev(e.base, x) ** e.exp
    a = _ev(e.left, x)
    b = _ev(e.right, x)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    bad = b == 0.0
    return np.where(bad, np.nan, a / np.where(bad, 1.0, b))


def eval_expr(e: Expr, x):
    """Evaluate at a float (raises on a zero denominator) or an array (NaN there)."""
    with np.errstate(over="ignore", invalid="ignore"):
        if isinstance(x, np.ndarray):
            return _ev(e, x.astype(float))
        v = float(_ev(e, np.array([float(x)]))[0])
    if math.isnan(v):
        raise DivisionByZero(x)
    return v


def substitute(e: Expr, inner: Expr) -> Expr:
    """Replace every ``x`` in ``e`` by ``inner``."""
    if isinstance(e, Const):
        return e
    if isinstance(e, Var):
        return inner
    if isinstance(e, Abs):
        return Abs(substitute(e.arg, inner))
    if isinstance(e, Pow):
        return Pow(substitute(e.base, inner), e.exp)
    return BinOp(e.op, substitute(e.left, inner), substitute(e.right, inner))


def scale(e: Expr, c: float) -> Expr:
    return BinOp("*", Const(float(c)), e)


def to_polynomial(e: Expr) -> Polynomial:
    """Expand ``e`` into a Polynomial; ``abs`` and non-constant divisors refuse."""
    if isinstance(e, Const):
        return Polynomial.constant(e.value)
    if isinstance(e, Var):
        return Polynomial.x()
    if isinstance(e, Abs):
        raise NotPolynomial("abs(...) is not a polynomial")
    if isinstance(e, Pow):
        return to_polynomial(e.base) ** e.exp
    a, b = to_polynomial(e.left), to_polynomial(e.right)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if b.degree > 0:
        raise NotPolynomial("division by a non-constant expression")
    if b.is_zero:
        raise NotPolynomial("division by zero")
    return a / b.coeffs[0]


def from_polynomial(p: Polynomial) -> Expr:
    node = None
    for i, c in enumerate(p.coeffs):
        if c == 0.0:
            continue
        mag = Const(abs(c))
        if i == 0:
            term = mag
        else:
            power = X if i == 1 else Pow(X, i)
            term = power if abs(c) == 1.0 else BinOp("*", mag, power)
        if node is None:
            node = term if c > 0 else BinOp("-", Const(0.0), term)
        else:
            node = BinOp("+" if c > 0 else "-", node, term)
    return node if node is not None else Const(0.0)


def _zero_set(e: Expr, I: Interval) -> list[float]:
    """Zeros of ``e`` on ``I`` (used for denominators)."""
    try:
        p = to_polynomial(e)
    except NotPolynomial:
        p = None
    if p is not None:
        return [] if p.is_zero else real_roots(p, I)
    if isinstance(e, Abs):
        return _zero_set(e.arg, I)
    if isinstance(e, Pow):
        return _zero_set(e.base, I) if e.exp > 0 else []
    if isinstance(e, BinOp) and e.op == "*":
        return sorted(set(_zero_set(e.left, I)) | set(_zero_set(e.right, I)))
    # generic fallback: sign changes and exact zeros on a fine grid
    xs = I.linspace(20001)
    vs = eval_expr(e, xs)
    out = list(xs[vs == 0.0])
    s = np.sign(vs)
    for i in np.nonzero(s[:-1] * s[1:] < 0)[0]:
        a, b = xs[i], xs[i + 1]
        for _ in range(60):
            m = 0.5 * (a + b)
            if np.sign(eval_expr(e, np.array([m]))[0]) == s[i]:
                a = m
            else:
                b = m
        out.append(0.5 * (a + b))
    return sorted(float(v) for v in out)


def poles(e: Expr, I: Interval) -> list[float]:
    """Points of ``I`` where some divide node in ``e`` has a zero denominator."""
    if isinstance(e, (Const, Var)):
        return []
    if isinstance(e, Abs):
        return poles(e.arg, I)
    if isinstance(e, Pow):
        return poles(e.base, I)
    found = set(poles(e.left, I)) | set(poles(e.right, I))
    if e.op == "/":
        found |= set(_zero_set(e.right, I))
    return sorted(found)


# -- piecewise functions -----------------------------------------------------


@dataclass(frozen=True)
class Piece:
    lo: float
    hi: float
    lo_closed: bool
    hi_closed: bool
    expr: Expr

    @property
    def interval(self) -> Interval:
        return Interval(self.lo, self.hi)

    def owns(self, x):
        left = (x > self.lo) | ((x == self.lo) & self.lo_closed)
        right = (x < self.hi) | ((x == self.hi) & self.hi_closed)
        return left & right

    def header(self) -> str:
        return (f"{'[' if self.lo_closed else '('}{self.lo!r}, "
                f"{self.hi!r}{']' if self.hi_closed else ')'}")


@dataclass(frozen=True)
class PiecewiseFn:
    pieces: tuple[Piece, ...]
    domain: Interval = field(init=False)

    def __post_init__(self):
        ps = tuple(sorted(self.pieces, key=lambda p: (p.lo, p.hi)))
        if not ps:
            raise ValueError("a piecewise function needs at least one piece")
        if not (ps[0].lo_closed and ps[-1].hi_closed):
            raise ValueError("the domain must be closed at both ends")
        for a, b in zip(ps, ps[1:]):
            if a.hi != b.lo:
                raise ValueError(f"gap or overlap between pieces at {a.hi!r} / {b.lo!r}")
            if a.hi_closed == b.lo_closed:
                raise ValueError(f"boundary {a.hi!r} must belong to exactly one piece")
        for p in ps:
            if p.lo > p.hi or (p.lo == p.hi and not (p.lo_closed and p.hi_closed)):
                raise ValueError(f"empty piece {p.header()}")
        object.__setattr__(self, "pieces", ps)
        object.__setattr__(self, "domain", Interval(ps[0].lo, ps[-1].hi))

    @classmethod
    def single(cls, expr: Expr | str, domain) -> "PiecewiseFn":
        if isinstance(expr, str):
            expr = parse_expr(expr)
        lo, hi = _as_interval(domain)
        return cls((Piece(lo, hi, True, True, expr),))

    @classmethod
    def from_polynomial(cls, p: Polynomial, domain) -> "PiecewiseFn":
        return cls.single(from_polynomial(p), domain)

    def piece_index(self, x: float) -> int:
        for i, p in enumerate(self.pieces):
            if p.owns(x):
                return i
        raise OutOfDomain(f"x = {x!r} lies outside the domain {self.domain}")

    def __call__(self, x):
        if isinstance(x, np.ndarray):
            return self.evaluate(x)
        return eval_fn(self, x)

    def evaluate(self, xs: np.ndarray) -> np.ndarray:
        """Vectorised evaluation; singular points come back as NaN."""
        xs = np.asarray(xs, dtype=float)
        out = np.full(xs.shape, np.nan)
        covered = np.zeros(xs.shape, dtype=bool)
        for p in self.pieces:
            m = p.owns(xs)
            if m.any():
                out[m] = eval_expr(p.expr, xs[m])
                covered |= m
        if not covered.all():
            bad = xs[~covered].flat[0]
            raise OutOfDomain(f"x = {bad!r} lies outside the domain {self.domain}")
        return out

    def poles(self) -> list[float]:
        out = set()
        for p in self.pieces:
            for z in poles(p.expr, p.interval):
                if p.owns(z):
                    out.add(z)
        return sorted(out)

    def scaled(self, c: float) -> "PiecewiseFn":
        return PiecewiseFn(tuple(
            Piece(p.lo, p.hi, p.lo_closed, p.hi_closed, scale(p.expr, c)) for p in self.pieces
        ))

    def polynomial(self) -> Polynomial | None:
        """The polynomial this function equals, if it is one smooth piece."""
        if len(self.pieces) != 1:
            return None
        try:
            return to_polynomial(self.pieces[0].expr)
        except NotPolynomial:
            return None

    def to_text(self) -> str:
        return "\n".join(f"{p.header()} : {to_text(p.expr)}" for p in self.pieces) + "\n"


_PIECE = re.compile(r"^\s*([\[(])\s*([^,]+?)\s*,\s*([^\])]+?)\s*([\])])\s*:\s*(.+?)\s*$")


def parse_piecewise(text: str) -> PiecewiseFn:
    """Read the one-piece-per-line format; ``;`` also separates pieces."""
    pieces = []
    lines = [raw.split("#", 1)[0] for raw in text.splitlines()]
    for raw in ";".join(lines).split(";"):
        line = raw.strip()
        if not line:
            continue
        m = _PIECE.match(line)
        if m is None:
            raise ValueError(f"malformed piece line: {raw.strip()!r}")
        lb, a, b, rb, body = m.groups()
        pieces.append(Piece(_num(a), _num(b), lb == "[", rb == "]", parse_expr(body)))
    return PiecewiseFn(tuple(pieces))


def _num(s: str) -> float:
    # endpoints may be written as expressions, e.g. "-3"
    p = to_polynomial(parse_expr(s))
    if p.degree > 0:
        raise ValueError(f"piece endpoint must be a number: {s!r}")
    return p.coeffs[0] if p.coeffs else 0.0


# -- operations --------------------------------------------------------------


def eval_fn(f: PiecewiseFn, x: float) -> float:
    i = f.piece_index(x)
    return eval_expr(f.pieces[i].expr, x)


def numeric_second_derivative(f: PiecewiseFn, x: float, delta: float) -> float:
    i = f.piece_index(x)
    for y in (x - delta, x + delta):
        if f.piece_index(y) != i:
            raise PieceBoundaryCrossed(
                f"stencil point {y!r} leaves the piece {f.pieces[i].header()}")
    return (eval_fn(f, x - delta) - 2.0 * eval_fn(f, x) + eval_fn(f, x + delta)) / delta**2


def pointwise_deviation(f: PiecewiseFn, p: Polynomial, x0: float) -> float:
    return abs(eval_fn(f, x0) - p(x0))


@dataclass(frozen=True)
class SupResult:
    value: float
    argmax: float
    singular_samples: int = 0


def sup_deviation(f: PiecewiseFn, p: Polynomial, I=None) -> SupResult:
    """``max |f - p|`` over ``I`` by grid scan plus local refinement.

    Samples that hit a zero denominator are skipped and counted.
    """
    I = f.domain if I is None else _as_interval(I)
    if not f.domain.contains_interval(I):
        raise OutOfDomain(f"{I} is not inside the domain {f.domain}")
    xs = I.linspace(SUP_GRID)
    dev = np.abs(f.evaluate(xs) - p(xs))
    singular = int(np.isnan(dev).sum())
    if singular == len(xs):
        return SupResult(float("nan"), I.lo, singular)
    j = int(np.nanargmax(dev))
    best, arg = float(dev[j]), float(xs[j])

    a = float(xs[max(j - 1, 0)])
    b = float(xs[min(j + 1, len(xs) - 1)])
    for _ in range(REFINE_ROUNDS):
        probe = np.linspace(a, b, 7)
        vals = np.abs(f.evaluate(probe) - p(probe))
        if np.all(np.isnan(vals)):
            break
        k = int(np.nanargmax(vals))
        if vals[k] > best:
            best, arg = float(vals[k]), float(probe[k])
        third = (b - a) / 3.0
        a, b = max(a, arg - third / 2), min(b, arg + third / 2)
    return SupResult(best, arg, singular)


def affine_pullback(f: PiecewiseFn, source=None) -> PiecewiseFn:
    """Re-express ``f`` restricted to ``source`` as a function on [-1, 1].

    ``g(u) = f(mid + half*u)``; piece boundaries move with the map.
    """
    source = f.domain if source is None else _as_interval(source)
    if not source.lo < source.hi:
        raise ValueError("cannot pull back from a degenerate interval")
    mid, half = source.midpoint, source.halfwidth
    if mid == 0.0 and half == 1.0:
        inner = X
    elif mid == 0.0:
        inner = BinOp("*", Const(half), X)
    else:
        inner = BinOp("+", Const(mid), BinOp("*", Const(half), X))

    def to_u(x):
        if x == source.lo:
            return -1.0
        if x == source.hi:
            return 1.0
        return (x - mid) / half + 0.0

    pieces = []
    for p in f.pieces:
        lo, hi = max(p.lo, source.lo), min(p.hi, source.hi)
        if lo > hi:
            continue
        lo_c = p.lo_closed if lo == p.lo else True
        hi_c = p.hi_closed if hi == p.hi else True
        expr = p.expr if inner is X else substitute(p.expr, inner)
        pieces.append(Piece(to_u(lo), to_u(hi), lo_c, hi_c, expr))
    # slivers only arise where `source` touches a piece boundary
    if len(pieces) > 1:
        pieces = [p for p in pieces if p.lo < p.hi]
    first, last = pieces[0], pieces[-1]
    pieces[0] = Piece(first.lo, first.hi, True, first.hi_closed, first.expr)
    last = pieces[-1]
    pieces[-1] = Piece(last.lo, last.hi, last.lo_closed, True, last.expr)
    return PiecewiseFn(tuple(pieces))
