"""Sparse multivariate polynomials over Q under a fixed variable order.

Variables are addressed by their 1-based position ``v`` in the order
x1 < x2 < ... < xn; the *level* of a polynomial is the largest ``v`` that
occurs with positive exponent.  Exponent vectors always have length ``n``.

Resultants, discriminants, gcds and squarefree parts are computed by
clearing denominators and handing the integer polynomial to sympy's dense
recursive routines (subresultant PRS, heuristic gcd, Yun).  The Sylvester
determinant oracle in :mod:`singlecell.verify` does not go through sympy.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from sympy.polys.densebasic import dmp_from_dict, dmp_to_dict
from sympy.polys.densetools import dmp_diff_in
from sympy.polys.domains import ZZ
from sympy.polys.euclidtools import dmp_gcd, dmp_primitive, dmp_resultant
from sympy.polys.densearith import dmp_exquo
from sympy.polys.sqfreetools import dmp_sqf_list, dmp_sqf_part

from .exact import DomainError, format_rational, to_rational

__all__ = [
    "VarOrder", "Polynomial", "ProjectionTag", "level", "degree", "coeffs",
    "ldcf", "eval_prefix", "derivative", "resultant", "discriminant", "gcd",
    "normalize_basis", "squarefree_factors", "canonical", "poly_key",
    "parse_polynomial", "PolyParseError", "exact_div", "univariate_coeffs",
]


@dataclass(frozen=True)
class VarOrder:
    names: tuple

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if len(set(names)) != len(names):
            raise DomainError(f"duplicate variable names in {names}")

    def __len__(self):
        return len(self.names)

    def level_of(self, name: str) -> int:
        return self.names.index(name) + 1

    @classmethod
    def default(cls, n: int) -> "VarOrder":
        return cls(tuple(f"x{i}" for i in range(1, n + 1)))


def _grevlex_key(exps):
    return (sum(exps), tuple(-e for e in reversed(exps)))


class Polynomial:
    """Immutable sparse polynomial: exponent tuple -> nonzero Fraction."""

    __slots__ = ("nvars", "_terms", "_level", "_hash")

    def __init__(self, nvars: int, terms: Mapping[tuple, object] = ()):
        self.nvars = nvars
        clean = {}
        for exps, c in dict(terms).items():
            c = to_rational(c)
            if c:
                if len(exps) != nvars:
                    raise DomainError(f"exponent vector {exps} has wrong length")
                clean[tuple(exps)] = c
        self._terms = clean
        lvl = 0
        for exps in clean:
            for v in range(nvars, lvl, -1):
                if exps[v - 1]:
                    lvl = v
                    break
        self._level = lvl
        self._hash = None

    @classmethod
    def _raw(cls, nvars, terms):
        # trusted path: terms already hold nonzero Fractions
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj._terms = terms
        lvl = 0
        for exps in terms:
            for v in range(nvars, lvl, -1):
                if exps[v - 1]:
                    lvl = v
                    break
        obj._level = lvl
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, nvars: int, c) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, v: int) -> "Polynomial":
        exps = [0] * nvars
        exps[v - 1] = 1
        return cls(nvars, {tuple(exps): 1})

    @property
    def terms(self) -> Mapping[tuple, Fraction]:
        return self._terms

    @property
    def level(self) -> int:
        return self._level

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return self._level == 0

    def constant_value(self) -> Fraction:
        if self._level:
            raise DomainError("polynomial is not constant")
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def sorted_terms(self):
        """Terms in descending graded reverse-lexicographic order."""
        return sorted(self._terms.items(), key=lambda t: _grevlex_key(t[0]), reverse=True)

    def leading_coefficient(self) -> Fraction:
        if not self._terms:
            return Fraction(0)
        return max(self._terms.items(), key=lambda t: _grevlex_key(t[0]))[1]

    # arithmetic -----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise DomainError("polynomials over different variable counts")
            return other
        return Polynomial.constant(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = to_rational(other)
            if not c:
                return Polynomial._raw(self.nvars, {})
            return Polynomial._raw(self.nvars, {e: c * v for e, v in self._terms.items()})
        other = self._coerce(other)
        out = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Polynomial._raw(self.nvars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise DomainError("negative exponent")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._level == 0 and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # evaluation -----------------------------------------------------------

    def evaluate(self, point: Sequence) -> Fraction:
        """Value at a full rational point (length >= level)."""
        return eval_prefix(self, point[: self.nvars]).constant_value() if self._level > len(point) \
            else _eval_full(self, point)

    def to_text(self, names: Sequence[str] | None = None) -> str:
        names = names or VarOrder.default(self.nvars).names
        if not self._terms:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            mono = "*".join(
                name if e == 1 else f"{name}^{e}" for name, e in zip(names, exps) if e
            )
            mag = abs(c)
            if not mono:
                body = format_rational(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{format_rational(mag)}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Polynomial({self.to_text()!r})"

    def __str__(self):
        return self.to_text()


def _eval_full(p: Polynomial, point) -> Fraction:
    total = Fraction(0)
    pts = [to_rational(x) for x in point[: p.nvars]]
    for exps, c in p.terms.items():
        t = c
        for x, e in zip(pts, exps):
            if e:
                t *= x ** e
        total += t
    return total


# projection ingredients -----------------------------------------------------

def level(p: Polynomial) -> int:
    return p.level


def degree(p: Polynomial, v: int) -> int:
    if p.is_zero():
        raise DomainError("degree of the zero polynomial")
    return max(e[v - 1] for e in p.terms)


def coeffs(p: Polynomial, v: int) -> list[Polynomial]:
    """Coefficients of ``p`` as a polynomial in ``x_v``, index k holds x_v^k."""
    if p.is_zero():
        return [p]
    buckets: dict[int, dict] = {}
    for exps, c in p.terms.items():
        k = exps[v - 1]
        rest = exps[: v - 1] + (0,) + exps[v:]
        buckets.setdefault(k, {})[rest] = c
    top = max(buckets)
    return [Polynomial._raw(p.nvars, buckets.get(k, {})) for k in range(top + 1)]


def ldcf(p: Polynomial, v: int) -> Polynomial:
    if p.is_zero():
        raise DomainError("leading coefficient of the zero polynomial")
    return coeffs(p, v)[-1]


def eval_prefix(p: Polynomial, r: Sequence) -> Polynomial:
    """Substitute ``r[0..j-1]`` for ``x1..xj``."""
    j = len(r)
    if j > p.nvars:
        raise DomainError("prefix longer than the variable count")
    if j == 0:
        return p
    r = [to_rational(x) for x in r]
    powers: list[dict] = [{} for _ in range(j)]
    out: dict = {}
    for exps, c in p.terms.items():
        t = c
        for k in range(j):
            e = exps[k]
            if e:
                cache = powers[k]
                pw = cache.get(e)
                if pw is None:
                    pw = cache[e] = r[k] ** e
                t *= pw
        if t:
            rest = (0,) * j + exps[j:]
            out[rest] = out.get(rest, 0) + t
    return Polynomial._raw(p.nvars, {e: c for e, c in out.items() if c})


def derivative(p: Polynomial, v: int) -> Polynomial:
    out = {}
    for exps, c in p.terms.items():
        e = exps[v - 1]
        if e:
            out[exps[: v - 1] + (e - 1,) + exps[v:]] = c * e
    return Polynomial._raw(p.nvars, out)


def univariate_coeffs(p: Polynomial, v: int) -> list[Fraction]:
    """Dense coefficients (low to high) of a polynomial involving only ``x_v``."""
    if p.is_zero():
        return [Fraction(0)]
    out = [Fraction(0)] * (degree(p, v) + 1)
    for exps, c in p.terms.items():
        if any(e for k, e in enumerate(exps) if k != v - 1):
            raise DomainError(f"{p} is not univariate in x{v}")
        out[exps[v - 1]] = c
    return out


# integer dense bridge -------------------------------------------------------

def _integer_scale(p: Polynomial) -> tuple[Fraction, dict]:
    """Return ``(c, P)`` with ``p = c * P``, P integral with content 1."""
    den = 1
    for c in p.terms.values():
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = {e: int(c * den) for e, c in p.terms.items()}
    g = 0
    for c in ints.values():
        g = math.gcd(g, c)
    g = g or 1
    return Fraction(g, den), {e: c // g for e, c in ints.items()}


def _perm(k: int, main: int) -> tuple:
    # dmp variable order: main variable outermost, then x1..xk ascending
    return (main - 1,) + tuple(i for i in range(k) if i != main - 1)


def _to_dmp(int_terms: dict, k: int, main: int):
    perm = _perm(k, main)
    d = {tuple(e[i] for i in perm): ZZ(c) for e, c in int_terms.items()}
    return dmp_from_dict(d, k - 1, ZZ)


def _from_dmp(f, nvars: int, k: int, main: int) -> Polynomial:
    perm = _perm(k, main)
    out = {}
    for e, c in dmp_to_dict(f, k - 1, ZZ).items():
        full = [0] * nvars
        for pos, i in enumerate(perm):
            full[i] = e[pos]
        if c:
            out[tuple(full)] = Fraction(int(c))
    return Polynomial._raw(nvars, out)


@lru_cache(maxsize=20000)
def _resultant_cached(p: Polynomial, q: Polynomial, v: int) -> Polynomial:
    m, n = degree(p, v), degree(q, v)
    if m < n:
        # sympy drops the (-1)^(mn) factor when the first degree is smaller
        r = _resultant_cached(q, p, v)
        return -r if m * n % 2 else r
    cp, P = _integer_scale(p)
    cq, Q = _integer_scale(q)
    k = max(p.level, q.level, v)
    res = dmp_resultant(_to_dmp(P, k, v), _to_dmp(Q, k, v), k - 1, ZZ)
    r = _from_dmp([res], p.nvars, k, v)  # resultant lacks the eliminated level
    return r * (cp ** degree(q, v) * cq ** degree(p, v))


def resultant(p: Polynomial, q: Polynomial, v: int) -> Polynomial:
    """Sylvester resultant of ``p`` and ``q`` with respect to ``x_v``."""
    if p.is_zero() or q.is_zero() or degree(p, v) < 1 or degree(q, v) < 1:
        raise DomainError("resultant needs positive degree in the eliminated variable")
    return _resultant_cached(p, q, v)


def discriminant(p: Polynomial, v: int) -> Polynomial:
    """(-1)^(d(d-1)/2) * res(p, dp/dx_v) / ldcf(p); the constant 1 for d = 1."""
    if p.is_zero():
        raise DomainError("discriminant of the zero polynomial")
    d = degree(p, v)
    if d < 1:
        raise DomainError("discriminant needs positive degree")
    if d == 1:
        return Polynomial.constant(p.nvars, 1)
    return _discriminant_cached(p, v)


@lru_cache(maxsize=20000)
def _discriminant_cached(p: Polynomial, v: int) -> Polynomial:
    d = degree(p, v)
    r = _resultant_cached(p, derivative(p, v), v)
    q = exact_div(r, ldcf(p, v))
    return -q if (d * (d - 1) // 2) % 2 else q


def exact_div(a: Polynomial, b: Polynomial) -> Polynomial:
    """Exact quotient ``a / b``; raises if ``b`` does not divide ``a``."""
    if b.is_zero():
        raise DomainError("division by the zero polynomial")
    if b.is_constant():
        return a * (1 / b.constant_value())
    ca, A = _integer_scale(a)
    cb, B = _integer_scale(b)
    k = max(a.level, b.level)
    try:
        q = dmp_exquo(_to_dmp(A, k, k), _to_dmp(B, k, k), k - 1, ZZ)
    except Exception as exc:  # sympy raises ExactQuotientFailed
        raise DomainError(f"{b} does not divide {a}") from exc
    return _from_dmp(q, a.nvars, k, k) * (ca / cb)


def canonical(p: Polynomial) -> Polynomial:
    """Integer-primitive form with positive grevlex-leading coefficient."""
    if p.is_zero():
        return p
    c, P = _integer_scale(p)
    poly = Polynomial._raw(p.nvars, {e: Fraction(x) for e, x in P.items()})
    return -poly if poly.leading_coefficient() < 0 else poly


def gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    if p.is_zero() and q.is_zero():
        raise DomainError("gcd(0, 0) is undefined")
    if p.is_zero():
        return canonical(q)
    if q.is_zero():
        return canonical(p)
    if p.is_constant() or q.is_constant():
        return Polynomial.constant(p.nvars, 1)
    return _gcd_cached(canonical(p), canonical(q))


@lru_cache(maxsize=50000)
def _gcd_cached(p: Polynomial, q: Polynomial) -> Polynomial:
    _, P = _integer_scale(p)
    _, Q = _integer_scale(q)
    k = max(p.level, q.level)
    g = dmp_gcd(_to_dmp(P, k, k), _to_dmp(Q, k, k), k - 1, ZZ)
    return canonical(_from_dmp(g, p.nvars, k, k))


def poly_key(p: Polynomial):
    """Deterministic total order used for deduplication and tie-breaking."""
    main = p.level
    return (
        main,
        degree(p, main) if main else 0,
        p.total_degree(),
        len(p.terms),
        tuple((tuple(-x for x in e), -c) for e, c in p.sorted_terms()),
    )


def squarefree_factors(p: Polynomial) -> list[Polynomial]:
    """Canonical squarefree pieces of ``p`` (in its main variable).

    The primitive part in the main variable is split by Yun's algorithm;
    the content (a polynomial in lower variables) is reduced to its
    squarefree part and kept attached to the first piece, so that
    nullification of ``p`` stays visible on that piece.
    """
    if p.is_constant():
        return []
    return list(_sqf_cached(canonical(p)))


@lru_cache(maxsize=20000)
def _sqf_cached(p: Polynomial) -> tuple:
    k = p.level
    _, P = _integer_scale(p)
    f = _to_dmp(P, k, k)
    if k == 1:
        content, prim = None, f
    else:
        content, prim = dmp_primitive(f, k - 1, ZZ)
    _, pieces = dmp_sqf_list(prim, k - 1, ZZ)
    pieces = [_from_dmp(g, p.nvars, k, k) for g, _ in pieces]
    pieces = [g for g in pieces if not g.is_constant()]
    if content is not None:
        cpart = dmp_sqf_part(content, k - 2, ZZ)
        cpoly = _from_dmp([cpart], p.nvars, k, k)  # wrap as degree-0 in main
        if not cpoly.is_constant():
            pieces[0] = pieces[0] * cpoly
    return tuple(sorted({canonical(g) for g in pieces}, key=poly_key))


def normalize_basis(P: Iterable[Polynomial]) -> list[Polynomial]:
    """Coprime squarefree basis of ``P`` (constants dropped, sorted)."""
    pieces = set()
    for p in P:
        pieces.update(squarefree_factors(p))
    basis: list[Polynomial] = []

    def add(g: Polynomial):
        if g.is_constant():
            return
        for i, b in enumerate(basis):
            h = gcd(g, b)
            if not h.is_constant():
                del basis[i]
                if h == canonical(g) and h == b:
                    basis.append(h)
                    return
                for piece in (exact_div(b, h), h, exact_div(g, h)):
                    if not piece.is_constant():
                        add(canonical(piece))
                return
        basis.append(g)

    for g in sorted(pieces, key=poly_key):
        add(g)
    return sorted(set(basis), key=poly_key)


# provenance -------------------------------------------------------------------

PROJECTION_KINDS = ("disc", "ldcf", "coeff-nonnull", "res", "derivative-fallback")


@dataclass(frozen=True)
class ProjectionTag:
    kind: str
    parents: tuple
    variable: int

    def __post_init__(self):
        if self.kind not in PROJECTION_KINDS:
            raise DomainError(f"unknown projection kind {self.kind!r}")
        need = 2 if self.kind == "res" else 1
        if len(self.parents) != need:
            raise DomainError(f"{self.kind} tag needs {need} parent(s)")


# text grammar -----------------------------------------------------------------

class PolyParseError(ValueError):
    """Syntax or name error in polynomial text; carries a 1-based position."""

    def __init__(self, message: str, text: str, offset: int):
        line = text.count("\n", 0, offset) + 1
        col = offset - (text.rfind("\n", 0, offset) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.column = col
        self.reason = message


_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m.end() == pos or (m.group(0).strip() == "" and m.end() >= len(text)):
            break
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(("num", m.group(1), start))
        elif m.group(2):
            out.append(("name", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise PolyParseError(f"unexpected character {ch!r}", text, start)
            out.append((ch, ch, start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def parse_polynomial(text: str, order: VarOrder) -> Polynomial:
    """Parse ``+ - * / ^`` expressions over rational literals and ``order``'s names.

    Division is only allowed by a constant; implicit multiplication is an error.
    """
    toks = _tokenize(text)
    n = len(order)
    pos = 0

    def peek():
        return toks[pos]

    def take(kind=None):
        nonlocal pos
        tok = toks[pos]
        if kind and tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise PolyParseError(f"expected {kind!r}, found {what}", text, tok[2])
        pos += 1
        return tok

    def expr():
        left = term()
        while peek()[0] in ("+", "-"):
            op = take()[0]
            right = term()
            left = left + right if op == "+" else left - right
        return left

    def term():
        left = unary()
        while peek()[0] in ("*", "/"):
            op, _, at = take()
            right = unary()
            if op == "*":
                left = left * right
            else:
                if not right.is_constant() or right.is_zero():
                    raise PolyParseError("division by a non-constant or zero", text, at)
                left = left * (1 / right.constant_value())
        return left

    def unary():
        if peek()[0] == "-":
            take()
            return -unary()
        if peek()[0] == "+":
            take()
            return unary()
        return power()

    def power():
        base = atom()
        if peek()[0] == "^":
            take()
            tok = take("num")
            if not tok[1].isdigit():
                raise PolyParseError("exponent must be a nonnegative integer", text, tok[2])
            base = base ** int(tok[1])
        return base

    def atom():
        kind, val, at = peek()
        if kind == "num":
            take()
            return Polynomial.constant(n, Fraction(val))
        if kind == "name":
            take()
            if val not in order.names:
                raise PolyParseError(f"unknown variable {val!r}", text, at)
            return Polynomial.var(n, order.level_of(val))
        if kind == "(":
            take()
            inner = expr()
            take(")")
            return inner
        what = "end of input" if kind == "end" else repr(val)
        raise PolyParseError(f"unexpected {what}", text, at)

    result = expr()
    tail = peek()
    if tail[0] != "end":
        raise PolyParseError(f"unexpected {tail[1]!r}", text, tail[2])
    return result
