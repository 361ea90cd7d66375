"""Finite topological spaces, Spec with the Zariski topology, continuous maps."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import InvariantError
from .rings import (FiniteRing, Ideal, RingHom, _index, classify_ideal, enumerate_ideals,
                    image_ideal, preimage_ideal)

Open = frozenset


def _sort_key(s: frozenset) -> tuple:
    return (len(s), tuple(sorted(s)))


def members(u) -> frozenset[int]:
    """Index set of an OpenSet or any iterable of point indices."""
    if isinstance(u, OpenSet):
        return u.members
    return frozenset(u)


@dataclass(frozen=True, eq=False)
class FiniteTopology:
    point_count: int
    opens: tuple[frozenset[int], ...]
    name: str = ""

    def __post_init__(self):
        opens = sorted({frozenset(o) for o in self.opens}, key=_sort_key)
        object.__setattr__(self, "opens", tuple(opens))
        full = frozenset(range(self.point_count))
        s = set(opens)
        if frozenset() not in s or full not in s:
            raise InvariantError("a topology contains the empty set and the whole space")
        for o in opens:
            if not o <= full:
                raise InvariantError(f"open {sorted(o)} mentions unknown points")
        for a, b in itertools.combinations(opens, 2):
            if a | b not in s:
                raise InvariantError(f"not closed under union: {sorted(a)}, {sorted(b)}")
            if a & b not in s:
                raise InvariantError(f"not closed under intersection: {sorted(a)}, {sorted(b)}")

    def __repr__(self):
        return f"FiniteTopology({self.name or self.point_count}, opens={len(self.opens)})"

    @property
    def points(self) -> range:
        return range(self.point_count)

    @property
    def full(self) -> frozenset[int]:
        return frozenset(range(self.point_count))

    @cached_property
    def _open_set(self) -> frozenset:
        return frozenset(self.opens)

    def is_open(self, u) -> bool:
        return members(u) in self._open_set

    def open(self, u) -> "OpenSet":
        return OpenSet(self, members(u))

    def closed_sets(self) -> list[frozenset[int]]:
        return [self.full - o for o in self.opens]

    def opens_within(self, u) -> list[frozenset[int]]:
        u = members(u)
        return [o for o in self.opens if o <= u]

    def opens_containing(self, x: int) -> list[frozenset[int]]:
        return [o for o in self.opens if x in o]

    @cached_property
    def _minimal(self) -> tuple[frozenset[int], ...]:
        out = []
        for x in self.points:
            m = self.full
            for o in self.opens:
                if x in o:
                    m = m & o
            out.append(m)
        return tuple(out)

    def minimal_open(self, x: int) -> frozenset[int]:
        """Smallest open containing ``x``."""
        return self._minimal[x]

    def closure(self, x: int) -> frozenset[int]:
        return frozenset(y for y in self.points if x in self._minimal[y])

    def specializes(self, x: int, y: int) -> bool:
        """True when ``y`` lies in the closure of ``x``."""
        return x in self._minimal[y]

    def is_discrete(self) -> bool:
        return all(len(self._minimal[x]) == 1 for x in self.points)


@dataclass(frozen=True)
class OpenSet:
    topology: FiniteTopology
    members: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        if self.members not in self.topology._open_set:
            raise InvariantError(f"{sorted(self.members)} is not open")

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self):
        return len(self.members)

    def __contains__(self, x):
        return x in self.members


def generate_topology(point_count: int, basis: Iterable[Iterable[int]], name: str = "") -> FiniteTopology:
    """All unions of basis sets, plus the empty set and the whole space."""
    basis = sorted({frozenset(b) for b in basis}, key=_sort_key)
    opens = {frozenset(), frozenset(range(point_count))}
    frontier = set(basis)
    opens |= frontier
    while frontier:
        new = set()
        for o in frontier:
            for b in basis:
                u = o | b
                if u not in opens:
                    new.add(u)
        opens |= new
        frontier = new
    for a, b in itertools.combinations(sorted(opens, key=_sort_key), 2):
        if a & b not in opens:
            raise InvariantError(f"basis is not intersection-stable: {sorted(a)} & {sorted(b)} "
                                 "is not a union of basis sets")
    return FiniteTopology(point_count, tuple(opens), name=name)


def discrete_space(n: int, name: str = "") -> FiniteTopology:
    return generate_topology(n, [{i} for i in range(n)], name=name or f"discrete{n}")


def sierpinski() -> FiniteTopology:
    """Point 0 is open (the generic point), point 1 is closed."""
    return FiniteTopology(2, (frozenset(), frozenset({0}), frozenset({0, 1})), name="sierpinski")


def chain_space(n: int, name: str = "") -> FiniteTopology:
    opens = [frozenset(range(k)) for k in range(n + 1)]
    return FiniteTopology(n, tuple(opens), name=name or f"chain{n}")


BUILTIN_SPACES = {
    "sierpinski": sierpinski,
    "discrete1": lambda: discrete_space(1),
    "discrete2": lambda: discrete_space(2),
    "discrete3": lambda: discrete_space(3),
    "chain3": lambda: chain_space(3),
}


def builtin_space(name: str) -> FiniteTopology:
    try:
        return BUILTIN_SPACES[name]()
    except KeyError:
        raise KeyError(f"unknown builtin space {name!r}; choose from {sorted(BUILTIN_SPACES)}") from None


@dataclass(frozen=True)
class ContinuousMap:
    source: FiniteTopology
    target: FiniteTopology
    point_map: tuple[int, ...]
    checks: "SpecMapChecks | None" = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.point_map) != self.source.point_count:
            raise InvariantError("point map must be total on the source")
        for o in self.target.opens:
            pre = self.preimage(o)
            if not self.source.is_open(pre):
                raise InvariantError(f"preimage of open {sorted(o)} is {sorted(pre)}, not open")

    def __call__(self, x: int) -> int:
        return self.point_map[x]

    def preimage(self, u) -> frozenset[int]:
        u = members(u)
        return frozenset(x for x in self.source.points if self.point_map[x] in u)

    def image(self, u) -> frozenset[int]:
        return frozenset(self.point_map[x] for x in members(u))


def compose_maps(g: ContinuousMap, f: ContinuousMap) -> ContinuousMap:
    if f.target is not g.source:
        raise InvariantError("cannot compose continuous maps: spaces differ")
    return ContinuousMap(f.source, g.target, tuple(g.point_map[y] for y in f.point_map))


def identity_map(space: FiniteTopology) -> ContinuousMap:
    return ContinuousMap(space, space, tuple(space.points))


# -- Spec --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpecSpace:
    ring: FiniteRing
    points: tuple[Ideal, ...]
    topology: FiniteTopology

    def point_index(self, prime: Ideal) -> int:
        for i, p in enumerate(self.points):
            if p.members == prime.members:
                return i
        raise KeyError(f"{prime!r} is not a point of Spec {self.ring.presentation}")


def spec(ring: FiniteRing) -> SpecSpace:
    points = tuple(i for i in enumerate_ideals(ring) if classify_ideal(ring, i).is_prime)
    basis = [frozenset(k for k, p in enumerate(points) if f not in p.members)
             for f in ring.elements]
    top = generate_topology(len(points), basis, name=f"Spec {ring.presentation}")
    return SpecSpace(ring, points, top)


def vanishing_set(space: SpecSpace, a: Ideal) -> frozenset[int]:
    if a.ring is not space.ring:
        raise InvariantError("ideal belongs to a different ring")
    return frozenset(k for k, p in enumerate(space.points) if a.members <= p.members)


def basic_open(space: SpecSpace, f) -> OpenSet:
    f = _index(space.ring, f)
    return OpenSet(space.topology,
                   frozenset(k for k, p in enumerate(space.points) if f not in p.members))


@dataclass(frozen=True)
class SpecMapChecks:
    continuous: bool
    closed_sets_checked: int
    preimage_identity: bool
    ideals_checked: int
    witness: dict | None = None


def spec_map(phi: RingHom, source_spec: SpecSpace | None = None,
             target_spec: SpecSpace | None = None) -> ContinuousMap:
    """The map Spec B -> Spec A, q -> phi^-1(q), for ``phi: A -> B``.

    Continuity is checked over every closed set, and the identity
    f^-1(V(a)) = V(<phi(a)>) over every ideal a of A; both results are kept
    on ``.checks``.
    """
    spec_a = target_spec or spec(phi.source)
    spec_b = source_spec or spec(phi.target)
    pm = []
    for q in spec_b.points:
        pre = preimage_ideal(phi, q)
        if not classify_ideal(phi.source, pre).is_prime:
            raise InvariantError(f"preimage of prime {q!r} is not prime")
        pm.append(spec_a.point_index(pre))
    point_map = tuple(pm)

    def pre(s):
        return frozenset(x for x, y in enumerate(point_map) if y in s)

    witness = None
    closed = spec_a.topology.closed_sets()
    continuous = True
    closed_b = set(spec_b.topology.closed_sets())
    for c in closed:
        if pre(c) not in closed_b:
            continuous = False
            witness = {"closed_set": sorted(c), "preimage": sorted(pre(c))}
            break
    identity = True
    ideals = enumerate_ideals(phi.source)
    for a in ideals:
        lhs = pre(vanishing_set(spec_a, a))
        rhs = vanishing_set(spec_b, image_ideal(phi, a))
        if lhs != rhs:
            identity = False
            witness = witness or {"ideal": [phi.source.format(x) for x in a.key],
                                  "lhs": sorted(lhs), "rhs": sorted(rhs)}
            break
    checks = SpecMapChecks(continuous, len(closed), identity, len(ideals), witness)
    if not continuous:
        raise InvariantError(f"spec map is not continuous: {witness}")
    return ContinuousMap(spec_b.topology, spec_a.topology, point_map, checks)
