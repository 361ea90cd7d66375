"""Text presentations of rings and homomorphisms.

Grammar (whitespace insensitive)::

    ring     := atom ("x" atom)*
    atom     := "Z/" NAT | "Z/" NAT "[" IDENT "]" "/(" poly ")" | "(" ring ")"
    hom      := ring "->" ring (":" bindings)?
    bindings := IDENT "->" poly ("," IDENT "->" poly)*
    poly     := ["-"] term (("+" | "-") term)*
    term     := INT ["*"] IDENT ["^" NAT] | IDENT ["^" NAT] | INT

Products expose their factor units as generators ``e1, e2, ...``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import AffSchemeError
from .homs import make_hom
from .rings import FiniteRing, RingHom, format_poly, poly_quotient, product, zmod


class ParseError(AffSchemeError):
    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f" (expected one of: {', '.join(expected)})" if expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


class SemanticError(AffSchemeError):
    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        super().__init__(message if offset is None else f"{message} at offset {offset}")


@dataclass(frozen=True)
class Modular:
    n: int


@dataclass(frozen=True)
class PolyQuotient:
    n: int
    var: str
    coeffs: tuple[int, ...]  # ascending degree


@dataclass(frozen=True)
class Product:
    factors: tuple["RingExpr", ...]


RingExpr = Union[Modular, PolyQuotient, Product]

# (coefficient, generator name or None, exponent)
Term = tuple[int, Union[str, None], int]


@dataclass(frozen=True)
class HomExpr:
    source: RingExpr
    target: RingExpr
    bindings: tuple[tuple[str, tuple[Term, ...]], ...]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, s: str) -> bool:
        self.ws()
        return self.text.startswith(s, self.pos)

    def expect(self, s: str):
        if not self.peek(s):
            raise ParseError(f"unexpected {self._here()}", self.pos, (repr(s),))
        self.pos += len(s)

    def _here(self) -> str:
        if self.pos >= len(self.text):
            return "end of input"
        return repr(self.text[self.pos])

    def at_end(self) -> bool:
        self.ws()
        return self.pos >= len(self.text)

    def nat(self) -> int:
        self.ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise ParseError(f"unexpected {self._here()}", start, ("natural number",))
        return int(self.text[start:self.pos])

    def ident(self) -> str:
        self.ws()
        start = self.pos
        if self.pos < len(self.text) and (self.text[self.pos].isalpha() or self.text[self.pos] == "_"):
            self.pos += 1
            while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
                self.pos += 1
        if start == self.pos:
            raise ParseError(f"unexpected {self._here()}", start, ("identifier",))
        return self.text[start:self.pos]

    # ring := atom ("x" atom)*
    def ring(self) -> RingExpr:
        factors = [self.atom()]
        while self.peek("x"):
            self.pos += 1
            factors.append(self.atom())
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def atom(self) -> RingExpr:
        self.ws()
        if self.peek("("):
            self.pos += 1
            inner = self.ring()
            self.expect(")")
            return inner
        if not self.peek("Z"):
            raise ParseError(f"unexpected {self._here()}", self.pos, ("'Z/'", "'('"))
        self.pos += 1
        self.expect("/")
        at = self.pos
        n = self.nat()
        if n == 0:
            raise SemanticError("modulus must be at least 1", at)
        if not self.peek("["):
            return Modular(n)
        self.pos += 1
        var = self.ident()
        self.expect("]")
        self.expect("/")
        self.expect("(")
        poly_at = self.pos
        terms = self.poly()
        self.expect(")")
        if n < 2:
            raise SemanticError("polynomial quotients need modulus at least 2", at)
        coeffs = _coefficients(terms, var, poly_at)
        return PolyQuotient(n, var, coeffs)

    def poly(self) -> tuple[Term, ...]:
        terms = []
        sign = 1
        if self.peek("-"):
            self.pos += 1
            sign = -1
        elif self.peek("+"):
            self.pos += 1
        terms.append(self.term(sign))
        while True:
            if self.peek("+"):
                self.pos += 1
                terms.append(self.term(1))
            elif self.peek("-") and not self.peek("->"):
                self.pos += 1
                terms.append(self.term(-1))
            else:
                break
        return tuple(terms)

    def term(self, sign: int) -> Term:
        self.ws()
        coeff = None
        if self.pos < len(self.text) and self.text[self.pos].isdigit():
            coeff = self.nat()
            if self.peek("*"):
                self.pos += 1
            elif not (self.pos < len(self.text) and (self.text[self.pos].isalpha() or self.text[self.pos] == "_")):
                return (sign * coeff, None, 0)
        self.ws()
        if coeff is None or (self.pos < len(self.text) and (self.text[self.pos].isalpha() or self.text[self.pos] == "_")):
            name = self.ident()
            exp = 1
            if self.peek("^"):
                self.pos += 1
                exp = self.nat()
            return (sign * (1 if coeff is None else coeff), name, exp)
        raise ParseError(f"unexpected {self._here()}", self.pos, ("identifier",))

    def hom(self) -> HomExpr:
        src = self.ring()
        self.expect("->")
        tgt = self.ring()
        bindings = []
        if self.peek(":"):
            self.pos += 1
            while True:
                at = self.pos
                name = self.ident()
                self.expect("->")
                image = self.poly()
                if any(b[0] == name for b in bindings):
                    raise SemanticError(f"generator {name!r} bound twice", at)
                bindings.append((name, image))
                if self.peek(","):
                    self.pos += 1
                    continue
                break
        return HomExpr(src, tgt, tuple(bindings))


def _coefficients(terms: tuple[Term, ...], var: str, offset: int) -> tuple[int, ...]:
    by_deg: dict[int, int] = {}
    for c, name, exp in terms:
        if name is not None and name != var:
            raise SemanticError(f"unknown variable {name!r} (ring variable is {var!r})", offset)
        d = 0 if name is None else exp
        by_deg[d] = by_deg.get(d, 0) + c
    deg = max((d for d, c in by_deg.items() if c != 0), default=0)
    coeffs = tuple(by_deg.get(d, 0) for d in range(deg + 1))
    if deg < 1:
        raise SemanticError("polynomial must have degree at least 1", offset)
    if coeffs[-1] != 1:
        raise SemanticError(f"polynomial {format_poly(coeffs, var)} is not monic", offset)
    return coeffs


def parse_ring(text: str) -> RingExpr:
    p = _Parser(text)
    expr = p.ring()
    if not p.at_end():
        raise ParseError(f"unexpected {p._here()}", p.pos, ("'x'", "end of input"))
    return expr


def parse_hom(text: str) -> HomExpr:
    p = _Parser(text)
    expr = p.hom()
    if not p.at_end():
        raise ParseError(f"unexpected {p._here()}", p.pos, ("','", "end of input"))
    return expr


def parse_poly(text: str) -> tuple[Term, ...]:
    p = _Parser(text)
    terms = p.poly()
    if not p.at_end():
        raise ParseError(f"unexpected {p._here()}", p.pos, ("'+'", "'-'", "end of input"))
    return terms


def format_ring(expr: RingExpr) -> str:
    if isinstance(expr, Modular):
        return f"Z/{expr.n}"
    if isinstance(expr, PolyQuotient):
        return f"Z/{expr.n}[{expr.var}]/({format_poly(expr.coeffs, expr.var)})"
    parts = [f"({format_ring(f)})" if isinstance(f, Product) else format_ring(f) for f in expr.factors]
    return " x ".join(parts)


def format_terms(terms: tuple[Term, ...]) -> str:
    out = ""
    for c, name, exp in terms:
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if name is None:
            body = str(mag)
        else:
            mono = name if exp == 1 else f"{name}^{exp}"
            body = mono if mag == 1 else f"{mag}{mono}"
        out += (("-" if sign == "-" else "") if not out else sign) + body
    return out or "0"


def format_hom(expr: HomExpr) -> str:
    text = f"{format_ring(expr.source)} -> {format_ring(expr.target)}"
    if expr.bindings:
        text += " : " + ", ".join(f"{n} -> {format_terms(t)}" for n, t in expr.bindings)
    return text


def build_ring(expr: RingExpr | str) -> FiniteRing:
    if isinstance(expr, str):
        expr = parse_ring(expr)
    if isinstance(expr, Modular):
        return zmod(expr.n)
    if isinstance(expr, PolyQuotient):
        return poly_quotient(zmod(expr.n), expr.coeffs, expr.var)
    ring = product(*(build_ring(f) for f in expr.factors))
    names = [n for n, _ in ring.generators]
    dup = sorted({n for n in names if names.count(n) > 1})
    if dup:
        raise SemanticError(f"generator name(s) {dup} are ambiguous in {format_ring(expr)}")
    return ring


def evaluate(ring: FiniteRing, terms: tuple[Term, ...] | str) -> int:
    """Index of a polynomial expression in the ring's named generators."""
    if isinstance(terms, str):
        terms = parse_poly(terms)
    total = ring.zero
    for c, name, exp in terms:
        if name is None:
            v = ring.one
        else:
            try:
                v = ring.pow(ring.generator(name), exp)
            except KeyError:
                known = [n for n, _ in ring.generators]
                raise SemanticError(f"{ring.presentation} has no generator {name!r}; "
                                    f"known: {known}") from None
        total = ring.add(total, ring.times(c, v))
    return total


def build_hom(expr: HomExpr | str) -> RingHom:
    if isinstance(expr, str):
        expr = parse_hom(expr)
    src, tgt = build_ring(expr.source), build_ring(expr.target)
    gens = {n for n, _ in src.generators}
    bound = {n for n, _ in expr.bindings}
    if gens - bound:
        raise SemanticError(f"unbound generator(s) {sorted(gens - bound)}")
    if bound - gens:
        raise SemanticError(f"{src.presentation} has no generator(s) {sorted(bound - gens)}")
    images = {n: evaluate(tgt, t) for n, t in expr.bindings}
    return make_hom(src, tgt, images)


CORPUS = tuple([f"Z/{n}" for n in range(2, 25)] + [
    "Z/2[x]/(x^2)",
    "Z/2[x]/(x^2+x)",
    "Z/3[x]/(x^2+1)",
    "Z/4 x Z/3",
    "Z/2 x Z/2",
])

HOM_CORPUS = (
    "Z/12 -> Z/4",
    "Z/12 -> Z/3",
    "Z/12 -> Z/6",
    "Z/24 -> Z/8",
    "Z/12 -> Z/12",
    "Z/6 -> Z/2 x Z/3",
    "Z/2 x Z/3 -> Z/6 : e1 -> 3, e2 -> 4",
    "Z/2 x Z/3 -> Z/3 : e1 -> 0, e2 -> 1",
    "Z/2 x Z/3 -> Z/2 : e1 -> 1, e2 -> 0",
    "Z/4 x Z/3 -> Z/12 : e1 -> 9, e2 -> 4",
    "Z/2[x]/(x^2+x) -> Z/2 : x -> 0",
    "Z/2[x]/(x^2+x) -> Z/2 x Z/2 : x -> e1",
    "Z/2[x]/(x^2) -> Z/2 : x -> 0",
    "Z/4 -> Z/2[x]/(x^2)",
    "Z/3[x]/(x^2+1) -> Z/3[y]/(y^2+1) : x -> 2y",
)
