"""Problem instances: the native JSON format, an SMT-LIB extractor and a generator."""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .exact import DomainError, format_rational, parse_rational
from .poly import Polynomial, PolyParseError, VarOrder, parse_polynomial


class InstanceError(ValueError):
    """Invalid instance document; the message carries a position when known."""


@dataclass
class Instance:
    var_order: VarOrder
    polynomials: list
    sample: tuple
    name: str = ""
    expect_fail: bool = False

    def __post_init__(self):
        if len(self.sample) != len(self.var_order):
            raise InstanceError(
                f"sample has {len(self.sample)} coordinates but there are "
                f"{len(self.var_order)} variables")
        for p in self.polynomials:
            if p.is_constant():
                raise InstanceError(f"constant polynomial {p} in the instance")

    def to_document(self) -> dict:
        names = self.var_order.names
        doc = {
            "vars": list(names),
            "polys": [p.to_text(names) for p in self.polynomials],
            "sample": [format_rational(x) for x in self.sample],
        }
        if self.expect_fail:
            doc["expect_fail"] = True
        return doc

    def __eq__(self, other):
        return (isinstance(other, Instance) and self.var_order == other.var_order
                and self.polynomials == other.polynomials and self.sample == other.sample)


def _position(text: Optional[str], offset: int) -> str:
    if text is None:
        return ""
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return f" (line {line}, column {col})"


def parse_instance(document, name: str = "") -> Instance:
    """Validate a native instance given as JSON text or an already decoded dict."""
    text = None
    if isinstance(document, str):
        text = document
        try:
            document = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceError(
                f"JSON syntax error: {exc.msg} at line {exc.lineno}, column {exc.colno}") from None
    if not isinstance(document, dict):
        raise InstanceError("instance must be a JSON object")
    for key in ("vars", "polys", "sample"):
        if key not in document:
            raise InstanceError(f"missing field {key!r}")
    try:
        order = VarOrder(tuple(str(v) for v in document["vars"]))
    except DomainError as exc:
        raise InstanceError(str(exc)) from None
    polys = []
    for k, src in enumerate(document["polys"]):
        try:
            p = parse_polynomial(str(src), order)
        except PolyParseError as exc:
            msg = f"polys[{k}] {src!r}: {exc}"
            if text is not None:
                start = text.find(json.dumps(src))
                if start >= 0:
                    msg += f"; in the document{_position(text, start + exc.column)}"
            raise InstanceError(msg) from None
        if p.is_constant():
            raise InstanceError(f"polys[{k}]: constant polynomial {src!r} is not allowed")
        polys.append(p)
    try:
        sample = tuple(parse_rational(str(x)) for x in document["sample"])
    except ValueError as exc:
        raise InstanceError(f"sample: {exc}") from None
    return Instance(order, polys, sample, name, bool(document.get("expect_fail", False)))


# SMT-LIB -----------------------------------------------------------------------------

class SmtlibError(ValueError):
    pass


_SMT_TOKEN = re.compile(r"\s*(?:(;[^\n]*)|(\()|(\))|(\|[^|]*\|)|(\"(?:[^\"]|\"\")*\")|([^\s()]+))")
_SUPPORTED_CMDS = {"set-logic", "set-info", "set-option", "check-sat", "exit", "get-model",
                   "get-value", "push", "pop"}
_COMPARISONS = {"<", "<=", "=", ">=", ">"}


def _sexprs(text: str):
    """Parse into nested lists of (token, offset) leaves."""
    stack: list = [[]]
    pos = 0
    while pos < len(text):
        m = _SMT_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        pos = m.end()
        if m.group(1) is not None:
            continue
        if m.group(2):
            stack.append([])
            stack[-1].append(("(", m.start(2)))
        elif m.group(3):
            if len(stack) == 1:
                raise SmtlibError(f"unbalanced ')'{_position(text, m.start(3))}")
            done = stack.pop()
            stack[-1].append(done)
        else:
            tok = next(g for g in m.groups()[3:] if g is not None)
            stack[-1].append((tok, m.start(m.lastindex)))
    if len(stack) != 1:
        raise SmtlibError("unbalanced '(' at end of input")
    return stack[0]


def extract_smtlib(text: str):
    """Polynomials of the atoms of a conjunctive QF_NRA script.

    Returns ``(VarOrder, [Polynomial])``; each atom ``a ~ b`` becomes ``a - b``.
    """
    names: list = []
    asserts: list = []
    for form in _sexprs(text):
        if not isinstance(form, list) or len(form) < 2 or isinstance(form[1], list):
            raise SmtlibError(f"expected a command{_position(text, _offset(form))}")
        head, at = form[1]
        if head in ("declare-fun", "declare-const"):
            sym = form[2][0]
            sort = form[-1]
            if head == "declare-fun" and (not isinstance(form[3], list) or len(form[3]) != 1):
                raise SmtlibError(f"unsupported construct: function symbol {sym}{_position(text, at)}")
            if isinstance(sort, list) or sort[0] != "Real":
                shown = "compound sort" if isinstance(sort, list) else f"sort {sort[0]}"
                raise SmtlibError(f"unsupported construct: {shown} for {sym}{_position(text, at)}")
            names.append(sym)
        elif head == "assert":
            asserts.append(form[2])
        elif head in _SUPPORTED_CMDS:
            continue
        else:
            raise SmtlibError(f"unsupported construct: {head}{_position(text, at)}")
    order = VarOrder(tuple(names))
    n = len(names)
    polys: list = []

    def term(e) -> Polynomial:
        if not isinstance(e, list):
            tok, at = e
            if tok in names:
                return Polynomial.var(n, order.level_of(tok))
            try:
                return Polynomial.constant(n, Fraction(tok))
            except (ValueError, ZeroDivisionError):
                raise SmtlibError(f"unknown symbol {tok}{_position(text, at)}") from None
        op, at = e[1] if len(e) > 1 and not isinstance(e[1], list) else ("", _offset(e))
        args = [term(a) for a in e[2:]]
        if op == "+" and args:
            out = args[0]
            for a in args[1:]:
                out = out + a
            return out
        if op == "-" and args:
            if len(args) == 1:
                return -args[0]
            out = args[0]
            for a in args[1:]:
                out = out - a
            return out
        if op == "*" and args:
            out = args[0]
            for a in args[1:]:
                out = out * a
            return out
        if op == "/" and len(args) >= 2:
            out = args[0]
            for a in args[1:]:
                if not a.is_constant() or a.is_zero():
                    raise SmtlibError(f"unsupported construct: division by a non-constant{_position(text, at)}")
                out = out * (1 / a.constant_value())
            return out
        raise SmtlibError(f"unsupported construct: {op or 'expression'}{_position(text, at)}")

    def formula(e):
        if not isinstance(e, list):
            tok, at = e
            if tok == "true":
                return
            raise SmtlibError(f"unsupported construct: {tok}{_position(text, at)}")
        op, at = e[1] if len(e) > 1 and not isinstance(e[1], list) else ("", _offset(e))
        if op == "and":
            for sub in e[2:]:
                formula(sub)
            return
        if op in _COMPARISONS:
            args = [term(a) for a in e[2:]]
            if len(args) < 2:
                raise SmtlibError(f"comparison needs two operands{_position(text, at)}")
            for a, b in zip(args, args[1:]):
                p = a - b
                if not p.is_constant() and p not in polys:
                    polys.append(p)
            return
        raise SmtlibError(f"unsupported construct: {op or 'expression'}{_position(text, at)}")

    for a in asserts:
        formula(a)
    return order, polys


def _offset(e) -> int:
    if isinstance(e, list):
        return e[0][1] if e else 0
    return e[1]


# generator ---------------------------------------------------------------------------

def _random_poly(rng: random.Random, n: int, max_degree: int, bound: int) -> Polynomial:
    while True:
        terms = {}
        for _ in range(rng.randint(1, 4)):
            total = rng.randint(0, max_degree)
            exps = [0] * n
            for _ in range(total):
                exps[rng.randrange(n)] += 1
            c = 0
            while c == 0:
                c = rng.randint(-bound, bound)
            terms[tuple(exps)] = terms.get(tuple(exps), 0) + c
        p = Polynomial(n, terms)
        if not p.is_constant():
            return p


def _random_sample(rng: random.Random, n: int) -> tuple:
    out = []
    for _ in range(n):
        den = rng.choice((1, 2, 3, 4, 5, 7))
        out.append(Fraction(rng.randint(-4 * den, 4 * den), den))
    return tuple(out)


def generate(n_vars: int, n_polys: int, max_degree: int, coeff_bound: int, seed: int,
             retries: int = 50) -> Instance:
    """Random sparse instance; the sample avoids zeros of the inputs when possible."""
    if n_vars not in (1, 2, 3):
        raise ValueError("n_vars must be 1, 2 or 3")
    if not 1 <= max_degree <= 4:
        raise ValueError("max_degree must be between 1 and 4")
    rng = random.Random(seed)
    order = VarOrder.default(n_vars)
    polys = [_random_poly(rng, n_vars, max_degree, coeff_bound) for _ in range(n_polys)]
    sample = _random_sample(rng, n_vars)
    expect_fail = False
    for attempt in range(retries + 1):
        if all(p.evaluate(sample) != 0 for p in polys):
            break
        if attempt == retries:
            expect_fail = True
            break
        sample = _random_sample(rng, n_vars)
    return Instance(order, polys, sample, f"gen-{seed}", expect_fail)


def corpus_instance(seed: int) -> Instance:
    """The fuzzing corpus: 2-3 variables, up to 4 polynomials, degree <= 3, |coeff| <= 10."""
    rng = random.Random(10_000 + seed)
    n_vars = rng.choice((2, 3))
    n_polys = rng.randint(1, 4)
    inst = generate(n_vars, n_polys, 3, 10, seed)
    inst.name = f"corpus-{seed:03d}"
    return inst


def load_instance(path: str, sample: Optional[Sequence] = None) -> Instance:
    """Read a native ``.json`` instance or an ``.smt2`` script (which needs ``sample``)."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    name = path.rsplit("/", 1)[-1]
    if path.endswith(".smt2"):
        order, polys = extract_smtlib(text)
        if sample is None:
            raise InstanceError("an SMT-LIB input needs --sample")
        return Instance(order, polys, tuple(parse_rational(str(x)) for x in sample), name)
    inst = parse_instance(text, name)
    if sample is not None:
        inst = Instance(inst.var_order, inst.polynomials,
                        tuple(parse_rational(str(x)) for x in sample), name, inst.expect_fail)
    return inst
