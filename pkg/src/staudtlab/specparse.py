"""Parsers for the ring-spec grammar and for element expressions.

Ring specs:  Z(6), GF(5), GF(3^2), GF(9), Q, Quat(Q), M(2,GF(3)),
T(2,GF(3)), Dual(Z(4)), Sum(Z(2),Z(3)).  GF also accepts a prime power
as its single argument; the canonical rendering is always the p^k form.

Element expressions use +, -, * and ^ with inv(...) for inverses.
Atoms: integers, a/b rational literals, the symbols g (field
generator), i/j/k (quaternion units), eps (dual unit), row-major
matrix literals [[...],[...]], and component tuples (e1,e2) for sums.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import RingSemanticError, RingSyntaxError
from .rings import (
    DualRing,
    Element,
    GFRing,
    MatRing,
    QuatRing,
    RationalRing,
    Ring,
    SumRing,
    TriRing,
    ZmodRing,
    is_prime,
)

_PUNCT = set("(),[]+-*^/")


def _tokenize(text: str):
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", int(text[i:j]), i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        if c in _PUNCT:
            tokens.append((c, c, i))
            i += 1
            continue
        raise RingSyntaxError(f"unexpected character {c!r}", i)
    tokens.append(("end", None, n))
    return tokens


class _TokenStream:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise RingSyntaxError(
                f"expected {kind!r}, found {tok[1]!r}", tok[2]
            )
        return tok

    def done(self):
        tok = self.peek()
        if tok[0] != "end":
            raise RingSyntaxError(f"trailing input {tok[1]!r}", tok[2])


_SPEC_CACHE: dict = {}


def parse_ring_spec(text: str) -> Ring:
    """Parse a ring-spec string into a Ring; instances are interned."""
    cached = _SPEC_CACHE.get(text)
    if cached is not None:
        return cached
    ts = _TokenStream(text)
    ring = _parse_spec(ts)
    ts.done()
    _SPEC_CACHE.setdefault(ring.spec_string(), ring)
    _SPEC_CACHE[text] = _SPEC_CACHE[ring.spec_string()]
    return _SPEC_CACHE[text]


def _parse_spec(ts: _TokenStream) -> Ring:
    kind, value, pos = ts.next()
    if kind != "name":
        raise RingSyntaxError(f"expected a ring kind, found {value!r}", pos)
    name = value
    if name == "Q":
        return RationalRing()
    if name == "Z":
        ts.expect("(")
        n = ts.expect("int")[1]
        ts.expect(")")
        return ZmodRing(n)
    if name == "GF":
        ts.expect("(")
        q = ts.expect("int")[1]
        if ts.peek()[0] == "^":
            ts.next()
            k = ts.expect("int")[1]
            ts.expect(")")
            if not is_prime(q):
                raise RingSemanticError(f"{q} not prime")
            return GFRing(q, k)
        ts.expect(")")
        p, k = _prime_power(q)
        return GFRing(p, k)
    if name == "Quat":
        ts.expect("(")
        base = _parse_spec(ts)
        ts.expect(")")
        return QuatRing(base)
    if name == "M":
        ts.expect("(")
        n = ts.expect("int")[1]
        ts.expect(",")
        base = _parse_spec(ts)
        ts.expect(")")
        return MatRing(n, base)
    if name == "T":
        ts.expect("(")
        r = ts.expect("int")[1]
        ts.expect(",")
        base = _parse_spec(ts)
        ts.expect(")")
        return TriRing(r, base)
    if name == "Dual":
        ts.expect("(")
        base = _parse_spec(ts)
        ts.expect(")")
        return DualRing(base)
    if name == "Sum":
        ts.expect("(")
        parts = [_parse_spec(ts)]
        while ts.peek()[0] == ",":
            ts.next()
            parts.append(_parse_spec(ts))
        ts.expect(")")
        return SumRing(parts)
    raise RingSyntaxError(f"unknown ring kind {name!r}", pos)


def _prime_power(q: int):
    if q < 2:
        raise RingSemanticError(f"GF order must be >= 2, got {q}")
    for p in range(2, q + 1):
        if q % p == 0:
            if not is_prime(p):
                raise RingSemanticError(f"{q} is not a prime power")
            k = 0
            v = q
            while v % p == 0:
                v //= p
                k += 1
            if v != 1:
                raise RingSemanticError(f"{q} is not a prime power")
            return p, k
    raise RingSemanticError(f"{q} is not a prime power")


# -- element expressions ------------------------------------------------------


def parse_expr(text: str):
    """Parse an element expression into an AST (ring independent)."""
    ts = _TokenStream(text)
    node = _parse_sum(ts)
    ts.done()
    return node


def _parse_sum(ts):
    node = _parse_term(ts)
    while ts.peek()[0] in ("+", "-"):
        op = ts.next()[0]
        rhs = _parse_term(ts)
        node = ("add" if op == "+" else "sub", node, rhs)
    return node


def _parse_term(ts):
    node = _parse_factor(ts)
    while ts.peek()[0] == "*":
        ts.next()
        node = ("mul", node, _parse_factor(ts))
    return node


def _parse_factor(ts):
    if ts.peek()[0] == "-":
        ts.next()
        return ("neg", _parse_factor(ts))
    return _parse_power(ts)


def _parse_power(ts):
    node = _parse_atom(ts)
    if ts.peek()[0] == "^":
        ts.next()
        k = ts.expect("int")[1]
        node = ("pow", node, k)
    return node


def _parse_atom(ts):
    kind, value, pos = ts.next()
    if kind == "int":
        if ts.peek()[0] == "/":
            ts.next()
            den = ts.expect("int")[1]
            if den == 0:
                raise RingSyntaxError("zero denominator", pos)
            return ("frac", value, den)
        return ("int", value)
    if kind == "name":
        if value == "inv":
            ts.expect("(")
            inner = _parse_sum(ts)
            ts.expect(")")
            return ("inv", inner)
        return ("sym", value, pos)
    if kind == "(":
        items = [_parse_sum(ts)]
        while ts.peek()[0] == ",":
            ts.next()
            items.append(_parse_sum(ts))
        ts.expect(")")
        if len(items) == 1:
            return items[0]
        return ("tuple", items)
    if kind == "[":
        rows = []
        while True:
            ts.expect("[")
            row = [_parse_sum(ts)]
            while ts.peek()[0] == ",":
                ts.next()
                row.append(_parse_sum(ts))
            ts.expect("]")
            rows.append(row)
            if ts.peek()[0] == ",":
                ts.next()
                continue
            break
        ts.expect("]")
        return ("matrix", rows)
    raise RingSyntaxError(f"unexpected token {value!r}", pos)


def eval_ast(node, ring: Ring):
    """Evaluate an expression AST to a payload of the given ring."""
    op = node[0]
    if op == "int":
        return ring.from_int(node[1])
    if op == "frac":
        return ring.from_fraction(Fraction(node[1], node[2]))
    if op == "sym":
        sym = ring.generator_symbols().get(node[1])
        if sym is None:
            raise RingSyntaxError(
                f"symbol {node[1]!r} is not defined in {ring.spec_string()}",
                node[2],
            )
        return sym
    if op == "neg":
        return ring.neg(eval_ast(node[1], ring))
    if op == "add":
        return ring.add(eval_ast(node[1], ring), eval_ast(node[2], ring))
    if op == "sub":
        return ring.sub(eval_ast(node[1], ring), eval_ast(node[2], ring))
    if op == "mul":
        return ring.mul(eval_ast(node[1], ring), eval_ast(node[2], ring))
    if op == "pow":
        return ring.power(eval_ast(node[1], ring), node[2])
    if op == "inv":
        return ring.inv(eval_ast(node[1], ring))
    if op == "tuple":
        if not isinstance(ring, SumRing):
            raise RingSemanticError(
                f"tuple literal is not valid in {ring.spec_string()}"
            )
        if len(node[1]) != len(ring.parts):
            raise RingSemanticError(
                f"expected {len(ring.parts)} components, got {len(node[1])}"
            )
        return tuple(
            eval_ast(child, part) for child, part in zip(node[1], ring.parts)
        )
    if op == "matrix":
        if not isinstance(ring, (MatRing, TriRing)):
            raise RingSemanticError(
                f"matrix literal is not valid in {ring.spec_string()}"
            )
        rows = node[1]
        n = ring.n
        if len(rows) != n or any(len(r) != n for r in rows):
            raise RingSemanticError(f"matrix literal must be {n}x{n}")
        raw = tuple(
            tuple(eval_ast(entry, ring.base) for entry in row) for row in rows
        )
        return ring.canonical(raw)
    raise RingSemanticError(f"unknown AST node {op!r}")


def eval_expr(ring: Ring, text: str) -> Element:
    """Evaluate an element expression in the given ring."""
    return Element(ring, eval_ast(parse_expr(text), ring))


def parse_element(ring: Ring, text: str) -> Element:
    """Alias of eval_expr; literals are just small expressions."""
    return eval_expr(ring, text)
