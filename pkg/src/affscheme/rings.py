"""Finite commutative unital rings stored as dense operation tables.

Elements are the indices ``0 .. order-1``.  Two rings are the same ring only
if they are the same object; "isomorphic" claims go through
:func:`affscheme.homs.find_isomorphism`.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import CapacityError, HomError, InvariantError, limits


@dataclass(frozen=True, eq=False)
class FiniteRing:
    add_table: tuple[tuple[int, ...], ...]
    mul_table: tuple[tuple[int, ...], ...]
    zero: int
    one: int
    presentation: str = ""
    labels: tuple = ()
    # named elements that, together with 1, generate the ring
    generators: tuple[tuple[str, int], ...] = ()
    factors: tuple["FiniteRing", ...] = ()

    def __post_init__(self):
        n = len(self.add_table)
        if n < 1:
            raise InvariantError("a ring has at least one element")
        if n > limits().max_order:
            raise CapacityError(f"ring order {n} exceeds max_order={limits().max_order}")
        if len(self.mul_table) != n or any(len(r) != n for r in self.add_table + self.mul_table):
            raise InvariantError("operation tables must be square and of equal size")
        if not (0 <= self.zero < n and 0 <= self.one < n):
            raise InvariantError("zero/one index out of range")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(n)))

    def __repr__(self):
        return f"FiniteRing({self.presentation or '?'}, order={self.order})"

    @property
    def order(self) -> int:
        return len(self.add_table)

    @property
    def elements(self) -> range:
        return range(self.order)

    @property
    def is_zero_ring(self) -> bool:
        return self.order == 1

    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    @cached_property
    def neg_table(self) -> tuple[int, ...]:
        out = []
        for a in self.elements:
            row = self.add_table[a]
            out.append(next(b for b in self.elements if row[b] == self.zero))
        return tuple(out)

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def sub(self, a: int, b: int) -> int:
        return self.add_table[a][self.neg_table[b]]

    def pow(self, a: int, k: int) -> int:
        r = self.one
        for _ in range(k):
            r = self.mul_table[r][a]
        return r

    def times(self, k: int, a: int | None = None) -> int:
        """The integer multiple ``k * a`` (``a`` defaults to 1)."""
        a = self.one if a is None else a
        if k < 0:
            k, a = -k, self.neg(a)
        r = self.zero
        for _ in range(k):
            r = self.add_table[r][a]
        return r

    @cached_property
    def inverse_table(self) -> tuple[int | None, ...]:
        out = []
        for a in self.elements:
            row = self.mul_table[a]
            out.append(next((b for b in self.elements if row[b] == self.one), None))
        return tuple(out)

    def is_unit(self, a: int) -> bool:
        return self.inverse_table[a] is not None

    def inverse(self, a: int) -> int:
        inv = self.inverse_table[a]
        if inv is None:
            raise ValueError(f"{self.labels[a]} is not invertible in {self.presentation}")
        return inv

    @cached_property
    def units(self) -> frozenset[int]:
        return frozenset(a for a in self.elements if self.inverse_table[a] is not None)

    @property
    def is_field(self) -> bool:
        return self.order > 1 and len(self.units) == self.order - 1

    def additive_order(self, a: int) -> int:
        k, r = 1, a
        while r != self.zero:
            r = self.add_table[r][a]
            k += 1
        return k

    def is_nilpotent(self, a: int) -> bool:
        r = a
        for _ in range(self.order):
            if r == self.zero:
                return True
            r = self.mul_table[r][a]
        return r == self.zero

    def index_of(self, label) -> int:
        return self._label_index[label]

    @cached_property
    def _label_index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels)}

    def format(self, a: int) -> str:
        lab = self.labels[a]
        return str(lab)

    def generator(self, name: str) -> int:
        for n, idx in self.generators:
            if n == name:
                return idx
        raise KeyError(name)


@dataclass(frozen=True)
class RingElement:
    ring: FiniteRing
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.ring.order:
            raise InvariantError(f"index {self.index} out of range for {self.ring!r}")


def _index(ring: FiniteRing, a) -> int:
    if isinstance(a, RingElement):
        if a.ring is not ring:
            raise InvariantError("element belongs to a different ring")
        return a.index
    return a


def ring_axiom_violation(ring: FiniteRing, *, exhaustive_up_to: int = 16, samples: int = 20000,
                         seed: int = 0):
    """Return ``None`` if the ring axioms hold, else a ``(law, witness)`` pair.

    All triples are checked for order up to ``exhaustive_up_to``; above that a
    fixed-seed random sample of triples is used.
    """
    A, M, z, o = ring.add_table, ring.mul_table, ring.zero, ring.one
    els = ring.elements
    for a in els:
        if A[a][z] != a:
            return "additive identity", (a,)
        if M[a][o] != a:
            return "multiplicative identity", (a,)
        if z not in A[a]:
            return "additive inverse", (a,)
        for b in els:
            if A[a][b] != A[b][a]:
                return "additive commutativity", (a, b)
            if M[a][b] != M[b][a]:
                return "multiplicative commutativity", (a, b)
    if ring.order <= exhaustive_up_to:
        triples: Iterable = itertools.product(els, repeat=3)
    else:
        rng = random.Random(seed)
        n = ring.order
        triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in range(samples))
    for a, b, c in triples:
        if A[A[a][b]][c] != A[a][A[b][c]]:
            return "additive associativity", (a, b, c)
        if M[M[a][b]][c] != M[a][M[b][c]]:
            return "multiplicative associativity", (a, b, c)
        if M[a][A[b][c]] != A[M[a][b]][M[a][c]]:
            return "distributivity", (a, b, c)
    return None


# -- constructors ------------------------------------------------------------

def zmod(n: int) -> FiniteRing:
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"modulus must be a positive integer, got {n!r}")
    if n > limits().max_order:
        raise CapacityError(f"ring order {n} exceeds max_order={limits().max_order}")
    add = tuple(tuple((i + j) % n for j in range(n)) for i in range(n))
    mul = tuple(tuple((i * j) % n for j in range(n)) for i in range(n))
    return FiniteRing(add, mul, 0, 1 % n, presentation=f"Z/{n}")


def zmod_modulus(ring: FiniteRing) -> int | None:
    """``n`` if ``ring`` has exactly the tables of ``zmod(n)``, else ``None``."""
    n = ring.order
    if ring.zero != 0 or ring.one != 1 % n:
        return None
    for i in range(n):
        ra, rm = ring.add_table[i], ring.mul_table[i]
        for j in range(n):
            if ra[j] != (i + j) % n or rm[j] != (i * j) % n:
                return None
    return n


def format_poly(coeffs: Sequence[int], var: str = "x") -> str:
    """Render ascending coefficients as ``x^2+x+1`` style text."""
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if k == 0:
            body = str(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}{mono}"
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += sign + body
    return out


def poly_quotient(base: FiniteRing, monic_coeffs: Sequence[int], var: str = "x") -> FiniteRing:
    """``base[var] / (p)`` for a monic ``p`` given by ascending coefficients.

    ``poly_quotient(zmod(2), [0, 1, 1])`` is Z/2[x]/(x^2+x).
    """
    n = zmod_modulus(base)
    if n is None or n < 2:
        raise ValueError("base must be zmod(n) with n >= 2")
    coeffs = [int(c) for c in monic_coeffs]
    d = len(coeffs) - 1
    if d < 1:
        raise ValueError("polynomial must have degree >= 1")
    if coeffs[-1] % n != 1:
        raise ValueError(f"polynomial {format_poly(coeffs, var)} is not monic")
    order = n**d
    if order > limits().max_order:
        raise CapacityError(f"ring order {order} exceeds max_order={limits().max_order}")
    low = [c % n for c in coeffs[:-1]]
    elems = list(itertools.product(range(n), repeat=d))
    # stored little-endian: elems[i][k] is the coefficient of var^k
    elems = [tuple(reversed(e)) for e in elems]
    index = {e: i for i, e in enumerate(elems)}

    def reduce(prod: list[int]) -> tuple[int, ...]:
        prod = prod[:]
        for k in range(len(prod) - 1, d - 1, -1):
            c = prod[k] % n
            if c:
                for j in range(d):
                    prod[k - d + j] -= c * low[j]
            prod[k] = 0
        return tuple(c % n for c in prod[:d])

    add = []
    mul = []
    for a in elems:
        ra, rm = [], []
        for b in elems:
            ra.append(index[tuple((x + y) % n for x, y in zip(a, b))])
            prod = [0] * (2 * d - 1)
            for i, x in enumerate(a):
                if x:
                    for j, y in enumerate(b):
                        prod[i + j] += x * y
            rm.append(index[reduce(prod)])
        add.append(tuple(ra))
        mul.append(tuple(rm))
    zero = index[(0,) * d]
    one = index[(1,) + (0,) * (d - 1)]
    labels = tuple(format_poly(list(e), var) for e in elems)
    gens = ((var, index[reduce([0, 1] + [0] * max(0, d - 2))]),)
    return FiniteRing(tuple(add), tuple(mul), zero, one,
                      presentation=f"Z/{n}[{var}]/({format_poly(coeffs, var)})",
                      labels=labels, generators=gens)


def tuple_ring(components: Sequence[FiniteRing], elements: Iterable[tuple[int, ...]],
               presentation: str = "") -> FiniteRing:
    """The ring on a set of index tuples closed under componentwise operations."""
    elems = sorted(set(elements))
    if len(elems) > limits().max_order:
        raise CapacityError(f"ring order {len(elems)} exceeds max_order={limits().max_order}")
    index = {e: i for i, e in enumerate(elems)}
    k = len(components)
    adds = [c.add_table for c in components]
    muls = [c.mul_table for c in components]
    add, mul = [], []
    try:
        for a in elems:
            add.append(tuple(index[tuple(adds[t][a[t]][b[t]] for t in range(k))] for b in elems))
            mul.append(tuple(index[tuple(muls[t][a[t]][b[t]] for t in range(k))] for b in elems))
        zero = index[tuple(c.zero for c in components)]
        one = index[tuple(c.one for c in components)]
    except KeyError as exc:
        raise InvariantError(f"element set not closed under ring operations: {exc}") from None
    return FiniteRing(tuple(add), tuple(mul), zero, one, presentation=presentation,
                      labels=tuple(elems))


def direct_product(rings: Sequence[FiniteRing], presentation: str | None = None) -> FiniteRing:
    total = 1
    for r in rings:
        total *= r.order
    if total > limits().max_order:
        raise CapacityError(f"ring order {total} exceeds max_order={limits().max_order}")
    if presentation is None:
        presentation = " x ".join(_wrap(r.presentation) for r in rings) if rings else "0"
    elems = itertools.product(*(r.elements for r in rings))
    return tuple_ring(rings, elems, presentation)


def _wrap(p: str) -> str:
    return f"({p})" if " x " in p else p


def product(*rings: FiniteRing) -> FiniteRing:
    """Componentwise product; exposes idempotents ``e1, e2, ..`` and factor generators."""
    base = direct_product(rings)
    gens = []
    for k, r in enumerate(rings):
        unit = tuple(r.one if t == k else rings[t].zero for t in range(len(rings)))
        gens.append((f"e{k + 1}", base.index_of(unit)))
    for k, r in enumerate(rings):
        for name, g in r.generators:
            emb = tuple(g if t == k else rings[t].zero for t in range(len(rings)))
            gens.append((name, base.index_of(emb)))
    labels = tuple(tuple(r.labels[i] for r, i in zip(rings, e)) for e in base.labels)
    return FiniteRing(base.add_table, base.mul_table, base.zero, base.one,
                      presentation=base.presentation, labels=labels,
                      generators=tuple(gens), factors=tuple(rings))


def zero_ring() -> FiniteRing:
    return zmod(1)


# -- homomorphisms -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RingHom:
    source: FiniteRing
    target: FiniteRing
    table: tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != self.source.order:
            raise InvariantError("hom table must be total on the source")
        if any(not 0 <= t < self.target.order for t in self.table):
            raise InvariantError("hom table value out of range")

    def __call__(self, a) -> int:
        return self.table[_index(self.source, a)]

    def __repr__(self):
        return f"RingHom({self.source.presentation} -> {self.target.presentation})"

    @property
    def is_injective(self) -> bool:
        return len(set(self.table)) == self.source.order

    @property
    def is_surjective(self) -> bool:
        return len(set(self.table)) == self.target.order

    @property
    def is_bijective(self) -> bool:
        return self.is_injective and self.is_surjective

    def kernel(self) -> "Ideal":
        z = self.target.zero
        return Ideal(self.source, frozenset(a for a, t in enumerate(self.table) if t == z))

    def inverse(self) -> "RingHom":
        if not self.is_bijective:
            raise ValueError("only bijective homs have inverses")
        inv = [0] * self.target.order
        for a, t in enumerate(self.table):
            inv[t] = a
        return RingHom(self.target, self.source, tuple(inv))

    def same_as(self, other: "RingHom") -> bool:
        return (self.source is other.source and self.target is other.target
                and self.table == other.table)


def hom_law_violation(source: FiniteRing, target: FiniteRing, table: Sequence[int]):
    """``None`` if ``table`` is a unital ring hom, else ``(law, witness)``."""
    if table[source.zero] != target.zero:
        return "preserves 0", (source.zero,)
    if table[source.one] != target.one:
        return "preserves 1", (source.one,)
    SA, SM, TA, TM = source.add_table, source.mul_table, target.add_table, target.mul_table
    for a in source.elements:
        fa = table[a]
        for b in source.elements:
            if table[SA[a][b]] != TA[fa][table[b]]:
                return "preserves +", (a, b)
            if table[SM[a][b]] != TM[fa][table[b]]:
                return "preserves *", (a, b)
    return None


def ring_hom(source: FiniteRing, target: FiniteRing, table: Sequence[int]) -> RingHom:
    """Build a RingHom after checking all four laws exhaustively."""
    table = tuple(table)
    bad = hom_law_violation(source, target, table)
    if bad is not None:
        law, witness = bad
        raise HomError(f"map {source.presentation} -> {target.presentation} violates "
                       f"{law!r} at {witness}", witness={"law": law, "elements": list(witness)})
    return RingHom(source, target, table)


def identity_hom(ring: FiniteRing) -> RingHom:
    return RingHom(ring, ring, tuple(ring.elements))


def compose(g: RingHom, f: RingHom) -> RingHom:
    """``g . f``."""
    if f.target is not g.source:
        raise InvariantError("cannot compose: codomain/domain mismatch")
    return RingHom(f.source, g.target, tuple(g.table[t] for t in f.table))


def to_zero_ring(ring: FiniteRing, zero: FiniteRing) -> RingHom:
    if not zero.is_zero_ring:
        raise InvariantError("target is not the zero ring")
    return RingHom(ring, zero, (0,) * ring.order)


def projections(ring: FiniteRing) -> tuple[RingHom, ...]:
    """Projection homs of a ring built by :func:`product`."""
    if not ring.factors:
        raise ValueError(f"{ring.presentation} was not built as a product")
    out = []
    for k, f in enumerate(ring.factors):
        table = tuple(f.index_of(lab[k]) for lab in ring.labels)
        out.append(RingHom(ring, f, table))
    return tuple(out)


# -- ideals ------------------------------------------------------------------

@dataclass(frozen=True)
class Ideal:
    ring: FiniteRing
    members: frozenset[int]

    def __contains__(self, a) -> bool:
        return _index(self.ring, a) in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    @property
    def key(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))

    @property
    def is_unit_ideal(self) -> bool:
        return len(self.members) == self.ring.order

    def format(self) -> str:
        return "{" + ", ".join(self.ring.format(a) for a in self.key) + "}"

    def __repr__(self):
        return f"Ideal({self.ring.presentation}, {self.format()})"


def ideal_violation(ring: FiniteRing, members: Iterable[int]):
    """``None`` if ``members`` is an ideal, else ``(law, witness)``."""
    m = frozenset(members)
    if ring.zero not in m:
        return "contains 0", ()
    for a in m:
        for b in m:
            if ring.add_table[a][b] not in m:
                return "closed under +", (a, b)
        for r in ring.elements:
            if ring.mul_table[r][a] not in m:
                return "closed under ring multiples", (r, a)
    return None


def is_ideal(ring: FiniteRing, members: Iterable[int]) -> bool:
    return ideal_violation(ring, members) is None


def _check_ideal(ring: FiniteRing, ideal: Ideal):
    if ideal.ring is not ring:
        raise InvariantError("ideal belongs to a different ring")
    bad = ideal_violation(ring, ideal.members)
    if bad is not None:
        raise InvariantError(f"not an ideal: fails '{bad[0]}' at {bad[1]}")


def _additive_closure(ring: FiniteRing, seed: Iterable[int]) -> frozenset[int]:
    members = {ring.zero}
    frontier = list(set(seed) - members)
    members.update(frontier)
    gens = list(members)
    while frontier:
        new = []
        for a in frontier:
            for g in gens:
                s = ring.add_table[a][g]
                if s not in members:
                    members.add(s)
                    new.append(s)
        frontier = new
    return frozenset(members)


def ideal_from_generators(ring: FiniteRing, gens: Iterable) -> Ideal:
    gens = [_index(ring, g) for g in gens]
    multiples = {ring.mul_table[r][g] for g in gens for r in ring.elements}
    return Ideal(ring, _additive_closure(ring, multiples))


def zero_ideal(ring: FiniteRing) -> Ideal:
    return Ideal(ring, frozenset([ring.zero]))


def unit_ideal(ring: FiniteRing) -> Ideal:
    return Ideal(ring, frozenset(ring.elements))


def ideal_sum(i: Ideal, j: Ideal) -> Ideal:
    return ideal_from_generators(i.ring, i.members | j.members)


def ideal_intersection(i: Ideal, j: Ideal) -> Ideal:
    return Ideal(i.ring, i.members & j.members)


def enumerate_ideals(ring: FiniteRing) -> list[Ideal]:
    """All ideals, each once, ordered by sorted member tuple."""
    cap = limits().max_ideals
    start = zero_ideal(ring)
    seen = {start.members: start}
    frontier = [start]
    while frontier:
        new = []
        for ideal in frontier:
            for a in ring.elements:
                if a in ideal.members:
                    continue
                bigger = ideal_from_generators(ring, ideal.members | {a})
                if bigger.members not in seen:
                    seen[bigger.members] = bigger
                    new.append(bigger)
                    if len(seen) > cap:
                        raise CapacityError(f"more than max_ideals={cap} ideals")
        frontier = new
    return sorted(seen.values(), key=lambda i: i.key)


@dataclass(frozen=True)
class IdealClass:
    is_proper: bool
    is_prime: bool
    is_maximal: bool


def classify_ideal(ring: FiniteRing, ideal: Ideal) -> IdealClass:
    _check_ideal(ring, ideal)
    m = ideal.members
    proper = ring.one not in m
    if not proper:
        return IdealClass(False, False, False)
    prime = True
    for a in ring.elements:
        if a in m:
            continue
        row = ring.mul_table[a]
        if any(row[b] in m for b in ring.elements if b not in m):
            prime = False
            break
    # maximal: every a outside the ideal together with it generates the unit ideal
    maximal = all(ring.one in ideal_from_generators(ring, m | {a}).members
                  for a in ring.elements if a not in m)
    return IdealClass(True, prime, maximal)


def prime_ideals(ring: FiniteRing) -> list[Ideal]:
    return [i for i in enumerate_ideals(ring) if classify_ideal(ring, i).is_prime]


def annihilator(ring: FiniteRing, a) -> Ideal:
    a = _index(ring, a)
    row = ring.mul_table[a]
    return Ideal(ring, frozenset(h for h in ring.elements if row[h] == ring.zero))


def radical(ring: FiniteRing, ideal: Ideal) -> Ideal:
    """Elements with some power ``a^m`` (``1 <= m <= order``) in the ideal."""
    _check_ideal(ring, ideal)
    out = set()
    for a in ring.elements:
        p = a
        for _ in range(ring.order):
            if p in ideal.members:
                out.add(a)
                break
            p = ring.mul_table[p][a]
    return Ideal(ring, frozenset(out))


def radical_via_primes(ring: FiniteRing, ideal: Ideal) -> Ideal:
    """Intersection of all primes containing the ideal (whole ring if none)."""
    members = set(ring.elements)
    for p in prime_ideals(ring):
        if ideal.members <= p.members:
            members &= p.members
    return Ideal(ring, frozenset(members))


def quotient(ring: FiniteRing, ideal: Ideal) -> tuple[FiniteRing, RingHom]:
    _check_ideal(ring, ideal)
    coset_of: dict[int, int] = {}
    reps: list[int] = []
    for a in ring.elements:
        if a in coset_of:
            continue
        k = len(reps)
        reps.append(a)
        for i in ideal.members:
            coset_of[ring.add_table[a][i]] = k
    add = tuple(tuple(coset_of[ring.add_table[a][b]] for b in reps) for a in reps)
    mul = tuple(tuple(coset_of[ring.mul_table[a][b]] for b in reps) for a in reps)
    q = FiniteRing(add, mul, coset_of[ring.zero], coset_of[ring.one],
                   presentation=f"({ring.presentation})/{ideal.format()}",
                   labels=tuple(f"[{ring.format(a)}]" for a in reps))
    return q, RingHom(ring, q, tuple(coset_of[a] for a in ring.elements))


# -- localization ------------------------------------------------------------

def multiplicative_closure(ring: FiniteRing, gens: Iterable) -> frozenset[int]:
    s = {ring.one}
    frontier = [ring.one]
    gens = {_index(ring, g) for g in gens}
    while frontier:
        new = []
        for a in frontier:
            for g in gens:
                p = ring.mul_table[a][g]
                if p not in s:
                    s.add(p)
                    new.append(p)
        frontier = new
    return frozenset(s)


@dataclass(frozen=True, eq=False)
class LocalizedRing:
    base: FiniteRing
    denominators: frozenset[int]
    result: FiniteRing
    map: RingHom
    # (numerator, denominator) -> element of result, for every pair
    fractions: dict = field(repr=False, default_factory=dict)
    # one representative fraction per element of result
    representatives: tuple[tuple[int, int], ...] = field(repr=False, default=())

    def fraction(self, a, t) -> int:
        """The element ``a/t`` of the localized ring."""
        return self.fractions[(_index(self.base, a), _index(self.base, t))]


def localize(ring: FiniteRing, s: Iterable, presentation: str | None = None) -> LocalizedRing:
    """Ring of fractions with denominators in the multiplicative closure of ``s``."""
    S = multiplicative_closure(ring, s)
    denoms = sorted(S)
    if presentation is None:
        presentation = f"({ring.presentation})[S^-1]"
    M = ring.mul_table
    if ring.zero in S:
        zero = zmod(1)
        zero = FiniteRing(zero.add_table, zero.mul_table, 0, 0, presentation="0", labels=("0",))
        fr = {(a, t): 0 for a in ring.elements for t in denoms}
        return LocalizedRing(ring, S, zero, RingHom(ring, zero, (0,) * ring.order), fr,
                             ((ring.zero, ring.one),))
    # v*x = 0 for some v in S  <=>  w*x = 0 with w the product of all of S
    w = ring.one
    for t in denoms:
        w = M[w][t]

    def equivalent(p, q) -> bool:
        (a, t), (b, u) = p, q
        return M[w][ring.sub(M[a][u], M[b][t])] == ring.zero

    reps: list[tuple[int, int]] = []
    cls: dict[tuple[int, int], int] = {}
    # numerators over 1 first so that a/1 classes come in base order
    pairs = [(a, t) for t in denoms for a in ring.elements]
    pairs.sort(key=lambda p: (p[1] != ring.one, p[1], p[0]))
    for p in pairs:
        for k, r in enumerate(reps):
            if equivalent(p, r):
                cls[p] = k
                break
        else:
            cls[p] = len(reps)
            reps.append(p)
    A = ring.add_table
    add, mul = [], []
    for (a, t) in reps:
        ra, rm = [], []
        for (b, u) in reps:
            tu = M[t][u]
            ra.append(cls[(A[M[a][u]][M[b][t]], tu)])
            rm.append(cls[(M[a][b], tu)])
        add.append(tuple(ra))
        mul.append(tuple(rm))

    def label(p):
        a, t = p
        return ring.format(a) if t == ring.one else f"{ring.format(a)}/{ring.format(t)}"

    result = FiniteRing(tuple(add), tuple(mul), cls[(ring.zero, ring.one)],
                        cls[(ring.one, ring.one)], presentation=presentation,
                        labels=tuple(label(p) for p in reps))
    hom = RingHom(ring, result, tuple(cls[(a, ring.one)] for a in ring.elements))
    return LocalizedRing(ring, S, result, hom, cls, tuple(reps))


def localize_at_prime(ring: FiniteRing, prime: Ideal) -> LocalizedRing:
    if not classify_ideal(ring, prime).is_prime:
        raise InvariantError(f"{prime!r} is not prime")
    comp = [a for a in ring.elements if a not in prime.members]
    return localize(ring, comp, presentation=f"({ring.presentation})_{prime.format()}")


def localize_at_element(ring: FiniteRing, f) -> LocalizedRing:
    f = _index(ring, f)
    return localize(ring, [f], presentation=f"({ring.presentation})_{ring.format(f)}")


def preimage_ideal(hom: RingHom, ideal: Ideal) -> Ideal:
    if ideal.ring is not hom.target:
        raise InvariantError("ideal must live in the hom's target")
    return Ideal(hom.source, frozenset(a for a in hom.source.elements
                                       if hom.table[a] in ideal.members))


def image_ideal(hom: RingHom, ideal: Ideal) -> Ideal:
    """The ideal of the target generated by the image of ``ideal``."""
    return ideal_from_generators(hom.target, {hom.table[a] for a in ideal.members})
