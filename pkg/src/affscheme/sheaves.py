"""Presheaves of finite rings on finite spaces, limits, colimits and sheafification.

Sections are ring elements; an element of ``F(U)`` stands for a morphism from
the free ring on one generator into ``F(U)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

from .errors import CapacityError, InvariantError, VerificationError, limits
from .homs import iter_homs
from .rings import (FiniteRing, RingHom, compose, hom_law_violation, identity_hom, ring_hom,
                    tuple_ring, zmod)
from .topology import ContinuousMap, FiniteTopology, _sort_key, members


def _zero_ring() -> FiniteRing:
    return FiniteRing(((0,),), ((0,),), 0, 0, presentation="0", labels=("0",))


def _fmt(u: frozenset) -> str:
    return "{" + ",".join(str(x) for x in sorted(u)) + "}"


# -- presheaves ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Presheaf:
    space: FiniteTopology
    sections: Mapping[frozenset, FiniteRing]
    restrictions: Mapping[tuple[frozenset, frozenset], RingHom]
    name: str = ""

    def section(self, u) -> FiniteRing:
        return self.sections[members(u)]

    def restriction(self, u, v) -> RingHom:
        return self.restrictions[(members(u), members(v))]

    def restrict(self, u, v, s: int) -> int:
        return self.restrictions[(members(u), members(v))].table[s]

    def __repr__(self):
        return f"Presheaf({self.name or '?'} on {self.space!r})"


def make_presheaf(space: FiniteTopology, sections: Mapping, restrictions: Mapping,
                  name: str = "") -> Presheaf:
    """Validate and build a presheaf.

    A missing restriction defaults to the identity when both opens carry the
    same ring object, and to the zero map into a zero-ring section; every
    other pair ``V <= U`` must be supplied.
    """
    secs = {members(u): r for u, r in sections.items()}
    if set(secs) != set(space.opens):
        missing = set(space.opens) - set(secs)
        raise InvariantError(f"sections must be given on every open; missing {[_fmt(m) for m in missing]}")
    res = {(members(u), members(v)): h for (u, v), h in restrictions.items()}
    for u in space.opens:
        for v in space.opens_within(u):
            key = (u, v)
            if key in res:
                continue
            if u == v or secs[u] is secs[v]:
                res[key] = identity_hom(secs[u])
            elif secs[v].is_zero_ring:
                res[key] = RingHom(secs[u], secs[v], (secs[v].zero,) * secs[u].order)
            else:
                raise InvariantError(f"missing restriction {_fmt(u)} -> {_fmt(v)}")
    for (u, v), h in res.items():
        if u not in secs or v not in secs or not v <= u:
            raise InvariantError(f"restriction {_fmt(u)} -> {_fmt(v)} is not along an inclusion of opens")
        if h.source is not secs[u] or h.target is not secs[v]:
            raise InvariantError(f"restriction {_fmt(u)} -> {_fmt(v)} has the wrong domain or codomain")
        bad = hom_law_violation(h.source, h.target, h.table)
        if bad is not None:
            raise InvariantError(f"restriction {_fmt(u)} -> {_fmt(v)} is not a ring hom: {bad}")
        if u == v and h.table != tuple(secs[u].elements):
            raise InvariantError(f"restriction {_fmt(u)} -> {_fmt(u)} is not the identity")
    for u in space.opens:
        for v in space.opens_within(u):
            for w in space.opens_within(v):
                via = compose(res[(v, w)], res[(u, v)])
                if via.table != res[(u, w)].table:
                    raise InvariantError(
                        f"functoriality fails on chain {_fmt(w)} <= {_fmt(v)} <= {_fmt(u)}")
    return Presheaf(space, secs, res, name)


def constant_presheaf(space: FiniteTopology, ring: FiniteRing, *, empty_zero: bool = True,
                      name: str = "") -> Presheaf:
    zero = _zero_ring()
    secs = {u: (zero if (empty_zero and not u) else ring) for u in space.opens}
    return make_presheaf(space, secs, {}, name or f"const {ring.presentation}")


def _reduction(src: FiniteRing, tgt: FiniteRing) -> RingHom:
    return ring_hom(src, tgt, [a % tgt.order for a in src.elements])


def chain_presheaf(space: FiniteTopology, top: FiniteRing, rest: FiniteRing,
                   name: str = "") -> Presheaf:
    """``top`` on the whole space, ``rest`` on nonempty proper opens, 0 on the empty set.

    Both rings must be ``zmod`` rings with ``rest.order`` dividing ``top.order``.
    """
    zero = _zero_ring()
    full = space.full
    secs = {u: zero if not u else (top if u == full else rest) for u in space.opens}
    to_rest = _reduction(top, rest)
    res = {(full, v): to_rest for v in space.opens if v and v != full}
    for u in space.opens:
        for v in space.opens_within(u):
            if u != full and v and u != v:
                res[(u, v)] = identity_hom(rest)
    return make_presheaf(space, secs, res, name or f"chain {top.presentation}->{rest.presentation}")


def tower_presheaf(space: FiniteTopology, prime: int = 2, name: str = "") -> Presheaf:
    """``U -> Z/p^|U|`` with reduction maps."""
    rings = {}
    secs = {}
    for u in space.opens:
        k = len(u)
        if k not in rings:
            rings[k] = _zero_ring() if k == 0 else zmod(prime**k)
        secs[u] = rings[k]
    res = {}
    for u in space.opens:
        for v in space.opens_within(u):
            if u != v and v:
                res[(u, v)] = _reduction(secs[u], secs[v])
    return make_presheaf(space, secs, res, name or f"tower Z/{prime}^|U|")


def functions_sheaf(space: FiniteTopology, ring: FiniteRing, name: str = "") -> Presheaf:
    """``U -> ring^U``, all functions on ``U``, restricted by forgetting points. Always a sheaf."""
    secs = {}
    for u in space.opens:
        pts = sorted(u)
        elems = itertools.product(ring.elements, repeat=len(pts))
        secs[u] = tuple_ring([ring] * len(pts), elems, f"{ring.presentation}^{len(pts)}")
    res = {}
    for u in space.opens:
        pts = sorted(u)
        for v in space.opens_within(u):
            if u == v:
                continue
            keep = [pts.index(x) for x in sorted(v)]
            src, tgt = secs[u], secs[v]
            res[(u, v)] = RingHom(src, tgt, tuple(tgt.index_of(tuple(lab[i] for i in keep))
                                                  for lab in src.labels))
    return make_presheaf(space, secs, res, name or f"functions to {ring.presentation}")


def zero_presheaf(space: FiniteTopology) -> Presheaf:
    zero = _zero_ring()
    return make_presheaf(space, {u: zero for u in space.opens}, {}, "zero")


def _raw_constant(space: FiniteTopology, ring: FiniteRing) -> Presheaf:
    return constant_presheaf(space, ring, empty_zero=False, name=f"const {ring.presentation} (raw)")


PRESETS = {
    "const-Z2": lambda sp: constant_presheaf(sp, zmod(2), name="const-Z2"),
    "const-Z3": lambda sp: constant_presheaf(sp, zmod(3), name="const-Z3"),
    "const-Z4": lambda sp: constant_presheaf(sp, zmod(4), name="const-Z4"),
    "const-Z2-raw": lambda sp: _raw_constant(sp, zmod(2)),
    "const-chain-Z4-Z2": lambda sp: chain_presheaf(sp, zmod(4), zmod(2), name="const-chain-Z4-Z2"),
    "tower-Z2": lambda sp: tower_presheaf(sp, 2, name="tower-Z2"),
    "functions-Z2": lambda sp: functions_sheaf(sp, zmod(2), name="functions-Z2"),
}


def preset_presheaf(name: str, space: FiniteTopology) -> Presheaf:
    try:
        return PRESETS[name](space)
    except KeyError:
        raise KeyError(f"unknown presheaf preset {name!r}; choose from {sorted(PRESETS)}") from None


# -- morphisms -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PresheafMorphism:
    source: Presheaf
    target: Presheaf
    components: Mapping[frozenset, RingHom]

    def __getitem__(self, u) -> RingHom:
        return self.components[members(u)]

    def is_isomorphism(self) -> bool:
        return all(h.is_bijective for h in self.components.values())


def naturality_violation(source: Presheaf, target: Presheaf, components: Mapping):
    for u in source.space.opens:
        for v in source.space.opens_within(u):
            lhs = compose(target.restriction(u, v), components[u])
            rhs = compose(components[v], source.restriction(u, v))
            if lhs.table != rhs.table:
                return (sorted(u), sorted(v))
    return None


def make_morphism(source: Presheaf, target: Presheaf, components: Mapping) -> PresheafMorphism:
    if source.space is not target.space:
        raise InvariantError("presheaf morphisms need a common space")
    comps = {members(u): h for u, h in components.items()}
    for u in source.space.opens:
        h = comps.get(u)
        if h is None:
            raise InvariantError(f"missing component on {_fmt(u)}")
        if h.source is not source.section(u) or h.target is not target.section(u):
            raise InvariantError(f"component on {_fmt(u)} has the wrong domain or codomain")
    bad = naturality_violation(source, target, comps)
    if bad is not None:
        raise InvariantError(f"naturality fails along {bad[1]} <= {bad[0]}")
    return PresheafMorphism(source, target, comps)


def compose_morphisms(g: PresheafMorphism, f: PresheafMorphism) -> PresheafMorphism:
    if f.target is not g.source:
        raise InvariantError("cannot compose presheaf morphisms")
    return PresheafMorphism(f.source, g.target,
                            {u: compose(g.components[u], f.components[u]) for u in f.components})


def identity_morphism(p: Presheaf) -> PresheafMorphism:
    return PresheafMorphism(p, p, {u: identity_hom(r) for u, r in p.sections.items()})


def zero_morphism(p: Presheaf, zero: Presheaf) -> PresheafMorphism:
    return make_morphism(p, zero, {u: RingHom(p.section(u), zero.section(u), (0,) * p.section(u).order)
                                   for u in p.space.opens})


# -- diagrams, limits, colimits ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class Diagram:
    """Rings indexed by a finite preorder; ``arrows[(a, b)]`` maps ``rings[a]`` to ``rings[b]``."""

    nodes: tuple[Hashable, ...]
    rings: Mapping[Hashable, FiniteRing]
    arrows: Mapping[tuple[Hashable, Hashable], RingHom]

    def arrow(self, a, b) -> RingHom:
        if a == b:
            return identity_hom(self.rings[a])
        return self.arrows[(a, b)]

    def leq(self, a, b) -> bool:
        return a == b or (a, b) in self.arrows


def make_diagram(nodes: Sequence, rings: Mapping, arrows: Mapping) -> Diagram:
    nodes = tuple(nodes)
    node_set = set(nodes)
    for (a, b), h in arrows.items():
        if a not in node_set or b not in node_set or a == b:
            raise InvariantError(f"bad arrow {a!r} -> {b!r}")
        if h.source is not rings[a] or h.target is not rings[b]:
            raise InvariantError(f"arrow {a!r} -> {b!r} has the wrong domain or codomain")
    for (a, b), f in arrows.items():
        for c in nodes:
            g = arrows.get((b, c))
            if g is None:
                continue
            via = compose(g, f)
            if a == c:
                if via.table != tuple(rings[a].elements):
                    raise InvariantError(f"arrows {a!r} <-> {b!r} are not mutually inverse")
            elif (a, c) not in arrows:
                raise InvariantError(f"arrows not transitively closed at {a!r} -> {b!r} -> {c!r}")
            elif arrows[(a, c)].table != via.table:
                raise InvariantError(f"arrows do not compose along {a!r} -> {b!r} -> {c!r}")
    return Diagram(nodes, dict(rings), dict(arrows))


def _compatible_families(d: Diagram) -> list[tuple[int, ...]]:
    nodes = d.nodes
    k = len(nodes)
    pos = {n: i for i, n in enumerate(nodes)}
    out: list[list[tuple[int, tuple[int, ...]]]] = [[] for _ in range(k)]
    touching: list[list[tuple[int, int, tuple[int, ...]]]] = [[] for _ in range(k)]
    incoming = [0] * k
    for (a, b), h in d.arrows.items():
        i, j = pos[a], pos[b]
        out[i].append((j, h.table))
        touching[i].append((i, j, h.table))
        touching[j].append((i, j, h.table))
        incoming[j] += 1
    order = sorted(range(k), key=lambda i: (incoming[i], i))

    covered: set[int] = set()
    size = 1
    for i in order:
        if i in covered:
            continue
        size *= d.rings[nodes[i]].order
        stack = [i]
        while stack:
            x = stack.pop()
            if x in covered:
                continue
            covered.add(x)
            stack.extend(j for j, _ in out[x])
    if size > limits().max_product:
        raise CapacityError(f"limit search space {size} exceeds max_product={limits().max_product}")

    vals = [-1] * k
    families: list[tuple[int, ...]] = []

    def assign(i: int, v: int, newly: list[int]) -> bool:
        vals[i] = v
        newly.append(i)
        stack = [i]
        while stack:
            x = stack.pop()
            for j, t in out[x]:
                w = t[vals[x]]
                if vals[j] == -1:
                    vals[j] = w
                    newly.append(j)
                    stack.append(j)
                elif vals[j] != w:
                    return False
        for x in newly:
            for a, b, t in touching[x]:
                if vals[a] != -1 and vals[b] != -1 and t[vals[a]] != vals[b]:
                    return False
        return True

    def rec():
        nxt = next((i for i in order if vals[i] == -1), None)
        if nxt is None:
            families.append(tuple(vals))
            return
        for v in d.rings[nodes[nxt]].elements:
            newly: list[int] = []
            if assign(nxt, v, newly):
                rec()
            for x in newly:
                vals[x] = -1

    rec()
    return families


def diagram_limit(d: Diagram, presentation: str = "") -> tuple[FiniteRing, dict]:
    """Compatible families as a subring of the product, with projection homs."""
    families = _compatible_families(d)
    comps = [d.rings[n] for n in d.nodes]
    lim = tuple_ring(comps, families, presentation or f"lim[{len(d.nodes)} nodes]")
    projections = {n: RingHom(lim, d.rings[n], tuple(fam[i] for fam in lim.labels))
                   for i, n in enumerate(d.nodes)}
    return lim, projections


def filtered_colimit(d: Diagram, presentation: str = "") -> tuple[FiniteRing, dict]:
    """Disjoint union of node rings modulo eventual equality, with injection homs."""
    nodes = d.nodes
    if not nodes:
        raise InvariantError("a filtered colimit needs a nonempty index")
    ubs = {}
    for a in nodes:
        for b in nodes:
            common = [c for c in nodes if d.leq(a, c) and d.leq(b, c)]
            if not common:
                raise InvariantError(f"index is not directed: {a!r}, {b!r} have no upper bound")
            ubs[(a, b)] = common
    items = [(n, s) for n in nodes for s in d.rings[n].elements]
    parent = {it: it for it in items}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in itertools.combinations_with_replacement(nodes, 2):
        for c in ubs[(a, b)]:
            fa, fb = d.arrow(a, c).table, d.arrow(b, c).table
            by_image: dict[int, list] = {}
            for s in d.rings[a].elements:
                by_image.setdefault(fa[s], []).append((a, s))
            for t in d.rings[b].elements:
                by_image.setdefault(fb[t], []).append((b, t))
            for group in by_image.values():
                r = find(group[0])
                for it in group[1:]:
                    parent[find(it)] = r
    roots = sorted({find(it) for it in items}, key=lambda it: (nodes.index(it[0]), it[1]))
    cls = {r: i for i, r in enumerate(roots)}
    klass = {it: cls[find(it)] for it in items}

    def op(i, j, table_name):
        (a, s), (b, t) = roots[i], roots[j]
        c = ubs[(a, b)][0]
        sc, tc = d.arrow(a, c).table[s], d.arrow(b, c).table[t]
        ring = d.rings[c]
        v = getattr(ring, table_name)[sc][tc]
        return klass[(c, v)]

    n = len(roots)
    add = tuple(tuple(op(i, j, "add_table") for j in range(n)) for i in range(n))
    mul = tuple(tuple(op(i, j, "mul_table") for j in range(n)) for i in range(n))
    first = nodes[0]
    colim = FiniteRing(add, mul, klass[(first, d.rings[first].zero)],
                       klass[(first, d.rings[first].one)],
                       presentation=presentation or f"colim[{len(nodes)} nodes]",
                       labels=tuple(f"{d.rings[a].format(s)}@{i}" for i, (a, s) in enumerate(roots)))
    injections = {a: RingHom(d.rings[a], colim, tuple(klass[(a, s)] for s in d.rings[a].elements))
                  for a in nodes}
    return colim, injections


# -- sheaf axioms --------------------------------------------------------------------

@dataclass
class SheafReport:
    identity: bool | None = None
    gluing: bool | None = None
    basis: bool | None = None
    covers_checked: int = 0
    witnesses: list[dict] = field(default_factory=list)

    @property
    def is_sheaf(self) -> bool:
        checks = [c for c in (self.identity, self.gluing, self.basis) if c is not None]
        return bool(checks) and all(checks)

    def to_dict(self) -> dict:
        return {"identity": self.identity, "gluing": self.gluing, "basis": self.basis,
                "covers_checked": self.covers_checked, "is_sheaf": self.is_sheaf,
                "witnesses": self.witnesses}


def _compatible_on_cover(f: Presheaf, cover: Sequence[frozenset]) -> list[tuple[int, ...]]:
    """Families ``(s_i in F(V_i))`` agreeing on all pairwise overlaps."""
    r = len(cover)
    pair_maps = {}
    for i in range(r):
        for j in range(i):
            w = cover[i] & cover[j]
            pair_maps[(i, j)] = (f.restriction(cover[i], w).table, f.restriction(cover[j], w).table)
    out: list[tuple[int, ...]] = []
    vals: list[int] = []

    def rec(i):
        if i == r:
            out.append(tuple(vals))
            return
        for s in f.section(cover[i]).elements:
            ok = True
            for j in range(i):
                ri, rj = pair_maps[(i, j)]
                if ri[s] != rj[vals[j]]:
                    ok = False
                    break
            if ok:
                vals.append(s)
                rec(i + 1)
                vals.pop()

    rec(0)
    return out


def _check_exhaustive(f: Presheaf, report: SheafReport) -> None:
    space = f.space
    if len(space.opens) > limits().max_opens_exhaustive:
        raise CapacityError(f"exhaustive sheaf check refuses spaces with more than "
                            f"{limits().max_opens_exhaustive} opens")
    identity_ok = gluing_ok = True
    for u in space.opens:
        subs = sorted(space.opens_within(u), key=_sort_key, reverse=True)
        fu = f.section(u)
        for r in range(len(subs) + 1):
            for cover in itertools.combinations(subs, r):
                if frozenset().union(*cover) != u:
                    continue
                report.covers_checked += 1
                tables = [f.restriction(u, v).table for v in cover]
                image = {}
                for s in fu.elements:
                    image.setdefault(tuple(t[s] for t in tables), []).append(s)
                zero = tuple(f.section(v).zero for v in cover)
                bad = [s for s in image.get(zero, []) if s != fu.zero]
                if bad and identity_ok:
                    identity_ok = False
                    report.witnesses.append({
                        "axiom": "identity", "open": sorted(u), "cover": [sorted(v) for v in cover],
                        "section": fu.format(bad[0])})
                if gluing_ok:
                    for fam in _compatible_on_cover(f, cover):
                        if fam not in image:
                            gluing_ok = False
                            report.witnesses.append({
                                "axiom": "gluing", "open": sorted(u),
                                "cover": [sorted(v) for v in cover],
                                "family": [f.section(v).format(s) for v, s in zip(cover, fam)]})
                            break
    report.identity, report.gluing = identity_ok, gluing_ok


def _neighbourhood_nodes(space: FiniteTopology, u: frozenset) -> list[frozenset]:
    return sorted({space.minimal_open(x) for x in u}, key=_sort_key, reverse=True)


def _neighbourhood_diagram(f: Presheaf, nodes: Sequence[frozenset]) -> Diagram:
    arrows = {(a, b): f.restriction(a, b) for a in nodes for b in nodes if b < a}
    return make_diagram(nodes, {n: f.section(n) for n in nodes}, arrows)


def _check_basis(f: Presheaf, report: SheafReport) -> None:
    ok = True
    for u in f.space.opens:
        nodes = _neighbourhood_nodes(f.space, u)
        lim, _ = diagram_limit(_neighbourhood_diagram(f, nodes))
        fu = f.section(u)
        tables = [f.restriction(u, n).table for n in nodes]
        images = {lim.index_of(tuple(t[s] for t in tables)) for s in fu.elements}
        if len(images) != fu.order or lim.order != fu.order:
            ok = False
            report.witnesses.append({"axiom": "basis", "open": sorted(u),
                                     "section_order": fu.order, "limit_order": lim.order})
            break
    report.basis = ok


def check_sheaf_axioms(f: Presheaf, strategy: str = "both") -> SheafReport:
    """Identity and gluing over every cover, and/or the minimal-neighbourhood limit test.

    ``strategy`` is ``"exhaustive"``, ``"basis"`` or ``"both"``.
    """
    if strategy not in ("both", "exhaustive", "basis"):
        raise ValueError(f"unknown strategy {strategy!r}")
    report = SheafReport()
    if strategy in ("both", "exhaustive"):
        _check_exhaustive(f, report)
    if strategy in ("both", "basis"):
        _check_basis(f, report)
    return report


def is_sheaf(f: Presheaf) -> bool:
    return check_sheaf_axioms(f, "basis").is_sheaf


# -- sheafification ------------------------------------------------------------------

def _family_restriction(src: FiniteRing, src_nodes: Sequence, tgt: FiniteRing,
                        tgt_nodes: Sequence) -> RingHom:
    where = [list(src_nodes).index(n) for n in tgt_nodes]
    table = tuple(tgt.index_of(tuple(fam[i] for i in where)) for fam in src.labels)
    return RingHom(src, tgt, table)


def sheafify_standard(f: Presheaf) -> tuple[Presheaf, PresheafMorphism]:
    """Sections over ``U`` are compatible families over the minimal neighbourhoods in ``U``."""
    space = f.space
    nodes = {u: _neighbourhood_nodes(space, u) for u in space.opens}
    secs = {}
    for u in space.opens:
        lim, _ = diagram_limit(_neighbourhood_diagram(f, nodes[u]),
                               presentation=f"{f.name or 'F'}+({_fmt(u)})")
        secs[u] = lim
    res = {}
    for u in space.opens:
        for v in space.opens_within(u):
            res[(u, v)] = _family_restriction(secs[u], nodes[u], secs[v], nodes[v])
    out = make_presheaf(space, secs, res, name=f"{f.name or 'F'}+")
    theta = {}
    for u in space.opens:
        tables = [f.restriction(u, n).table for n in nodes[u]]
        theta[u] = RingHom(f.section(u), secs[u],
                           tuple(secs[u].index_of(tuple(t[s] for t in tables))
                                 for s in f.section(u).elements))
    return out, make_morphism(f, out, theta)


def sheafify_proper_limit(f: Presheaf, include_empty: bool = False) -> tuple[Presheaf, PresheafMorphism]:
    """Sections over ``U`` are the limit of ``F(V)`` over opens ``V`` strictly inside ``U``.

    With ``include_empty=False`` the empty open is left out of every index and
    an open with no nonempty proper open subset keeps ``F(U)``; the empty open
    gets the zero ring.  With ``include_empty=True`` the empty open is part of
    every index.
    """
    space = f.space
    zero = _zero_ring()

    def index(u):
        return sorted((v for v in space.opens_within(u) if v != u and (include_empty or v)),
                      key=_sort_key, reverse=True)

    kind, secs, idx = {}, {}, {}
    for u in space.opens:
        idx[u] = index(u)
        if not u and not include_empty:
            kind[u], secs[u] = "zero", zero
        elif u and not idx[u] and not include_empty:
            kind[u], secs[u] = "keep", f.section(u)
        else:
            d = make_diagram(idx[u], {v: f.section(v) for v in idx[u]},
                             {(a, b): f.restriction(a, b) for a in idx[u] for b in idx[u] if b < a})
            kind[u] = "limit"
            secs[u], _ = diagram_limit(d, presentation=f"{f.name or 'F'}^({_fmt(u)})")
    res = {}
    for u in space.opens:
        for w in space.opens_within(u):
            if w == u:
                continue
            if secs[w].is_zero_ring:
                res[(u, w)] = RingHom(secs[u], secs[w], (0,) * secs[u].order)
            elif kind[u] == "keep":
                # only reachable when w is empty, handled above
                raise InvariantError("unreachable restriction")
            elif kind[w] == "keep":
                i = idx[u].index(w)
                res[(u, w)] = RingHom(secs[u], secs[w], tuple(fam[i] for fam in secs[u].labels))
            else:
                res[(u, w)] = _family_restriction(secs[u], idx[u], secs[w], idx[w])
    out = make_presheaf(space, secs, res, name=f"{f.name or 'F'}^")
    theta = {}
    for u in space.opens:
        fu = f.section(u)
        if kind[u] == "zero":
            theta[u] = RingHom(fu, zero, (0,) * fu.order)
        elif kind[u] == "keep":
            theta[u] = identity_hom(fu)
        else:
            tables = [f.restriction(u, v).table for v in idx[u]]
            theta[u] = RingHom(fu, secs[u], tuple(secs[u].index_of(tuple(t[s] for t in tables))
                                                  for s in fu.elements))
    return out, make_morphism(f, out, theta)


# -- natural transformation search -------------------------------------------------

def _natural_families(src: Presheaf, tgt: Presheaf, seeds: Mapping[frozenset, Mapping[int, int]],
                      *, bijective: bool = False, max_solutions: int = 2) -> list[dict]:
    opens = sorted(src.space.opens, key=_sort_key, reverse=True)
    cands = {}
    size = 1
    for u in opens:
        a, b = src.section(u), tgt.section(u)
        if bijective and a.order != b.order:
            return []
        cands[u] = list(iter_homs(a, b, seeds.get(u), injective=bijective,
                                  match_invariants=bijective))
        if not cands[u]:
            return []
        size *= len(cands[u])
    if size > limits().max_search:
        raise CapacityError(f"morphism search space {size} exceeds max_search={limits().max_search}")
    chosen: dict[frozenset, RingHom] = {}
    found: list[dict] = []

    def natural_with_chosen(u, h) -> bool:
        for v, g in chosen.items():
            if v <= u:
                big, small, hb, hs = u, v, h, g
            elif u <= v:
                big, small, hb, hs = v, u, g, h
            else:
                continue
            rt = tgt.restriction(big, small).table
            rs = src.restriction(big, small).table
            if any(rt[hb.table[s]] != hs.table[rs[s]] for s in src.section(big).elements):
                return False
        return True

    def rec(i):
        if len(found) >= max_solutions:
            return
        if i == len(opens):
            found.append(dict(chosen))
            return
        u = opens[i]
        for h in cands[u]:
            if natural_with_chosen(u, h):
                chosen[u] = h
                rec(i + 1)
                del chosen[u]

    rec(0)
    return found


@dataclass
class UniversalPropertyResult:
    status: str  # "none" | "unique" | "several"
    psi: PresheafMorphism | None = None

    def to_dict(self) -> dict:
        return {"status": self.status}


def check_universal_property(f: Presheaf, candidate: Presheaf, theta: PresheafMorphism,
                             g: Presheaf, phi: PresheafMorphism) -> UniversalPropertyResult:
    """Search every family ``psi: candidate -> g`` with ``phi = psi . theta``."""
    if not check_sheaf_axioms(g, "basis").is_sheaf:
        raise InvariantError("the comparison presheaf must be a sheaf")
    seeds = {}
    for u in f.space.opens:
        th, ph = theta[u].table, phi[u].table
        sd: dict[int, int] = {}
        for s in f.section(u).elements:
            t = th[s]
            if sd.get(t, ph[s]) != ph[s]:
                return UniversalPropertyResult("none")
            sd[t] = ph[s]
        seeds[u] = sd
    found = _natural_families(candidate, g, seeds, max_solutions=2)
    if not found:
        return UniversalPropertyResult("none")
    if len(found) > 1:
        return UniversalPropertyResult("several")
    return UniversalPropertyResult("unique", PresheafMorphism(candidate, g, found[0]))


def natural_morphisms(src: Presheaf, tgt: Presheaf, limit: int = 64) -> list[PresheafMorphism]:
    """Up to ``limit`` morphisms ``src -> tgt``, found by exhaustive search."""
    if src.space is not tgt.space:
        raise InvariantError("presheaves live on different spaces")
    return [PresheafMorphism(src, tgt, fam)
            for fam in _natural_families(src, tgt, {}, max_solutions=limit)]


def presheaf_isomorphism(p: Presheaf, q: Presheaf) -> PresheafMorphism | None:
    """A natural isomorphism ``p -> q`` (opens-wise ring isos commuting with restrictions)."""
    if p.space is not q.space:
        raise InvariantError("presheaves live on different spaces")
    found = _natural_families(p, q, {}, bijective=True, max_solutions=1)
    return PresheafMorphism(p, q, found[0]) if found else None


# -- stalks, direct images, restriction ----------------------------------------------

@dataclass(frozen=True, eq=False)
class Stalk:
    presheaf: Presheaf
    point: int
    ring: FiniteRing
    germ_map: Mapping[frozenset, RingHom]
    colimit: FiniteRing

    def germ(self, u, s: int) -> int:
        return self.germ_map[members(u)].table[s]


def stalk(f: Presheaf, x: int) -> Stalk:
    """Colimit over opens containing ``x``, matched against the minimal neighbourhood."""
    space = f.space
    if not 0 <= x < space.point_count:
        raise InvariantError(f"no point {x}")
    opens = sorted(space.opens_containing(x), key=_sort_key, reverse=True)
    arrows = {(a, b): f.restriction(a, b) for a in opens for b in opens if b < a}
    d = make_diagram(opens, {u: f.section(u) for u in opens}, arrows)
    colim, inj = filtered_colimit(d, presentation=f"stalk@{x}")
    ux = space.minimal_open(x)
    if not inj[ux].is_bijective:
        raise VerificationError(f"colimit at point {x} does not collapse to F(U_x)",
                                witness={"point": x, "colimit_order": colim.order,
                                         "minimal_open_order": f.section(ux).order})
    ring = f.section(ux)
    germs = {u: f.restriction(u, ux) for u in opens}
    return Stalk(f, x, ring, germs, colim)


def stalk_map(theta: PresheafMorphism, x: int) -> RingHom:
    """The map induced on stalks at ``x``; on a finite space the component at ``U_x``."""
    return theta[theta.source.space.minimal_open(x)]


def direct_image(cmap: ContinuousMap, f: Presheaf) -> Presheaf:
    if f.space is not cmap.source:
        raise InvariantError("presheaf must live on the map's source")
    pre = {u: cmap.preimage(u) for u in cmap.target.opens}
    secs = {u: f.section(pre[u]) for u in cmap.target.opens}
    res = {(u, v): f.restriction(pre[u], pre[v])
           for u in cmap.target.opens for v in cmap.target.opens_within(u)}
    return make_presheaf(cmap.target, secs, res, name=f"f_*({f.name or 'F'})")


def restrict_presheaf(f: Presheaf, u) -> Presheaf:
    """The presheaf on the open subspace ``u``; points are renumbered in sorted order."""
    u = members(u)
    if not f.space.is_open(u):
        raise InvariantError(f"{sorted(u)} is not open")
    pts = sorted(u)
    renum = {p: i for i, p in enumerate(pts)}
    old_opens = f.space.opens_within(u)
    new = {v: frozenset(renum[p] for p in v) for v in old_opens}
    sub = FiniteTopology(len(pts), tuple(new.values()), name=f"{f.space.name}|{_fmt(u)}")
    secs = {new[v]: f.section(v) for v in old_opens}
    res = {(new[a], new[b]): f.restriction(a, b) for a in old_opens for b in old_opens if b <= a}
    return make_presheaf(sub, secs, res, name=f"{f.name or 'F'}|{_fmt(u)}")
