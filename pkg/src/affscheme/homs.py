"""Exhaustive search over ring homomorphisms between finite rings.

Every search assigns images one element at a time and closes the partial map
under sums and products, so a ring generated by a few elements only branches
on those.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterator, Mapping

from .errors import CapacityError, HomError, limits
from .rings import FiniteRing, RingHom, hom_law_violation


class _Conflict(Exception):
    def __init__(self, law, pair):
        self.law = law
        self.pair = pair


def _propagate(source: FiniteRing, target: FiniteRing, img: list[int], assigned: list[int],
               queue: list[int], used: dict[int, int] | None) -> None:
    SA, SM, TA, TM = source.add_table, source.mul_table, target.add_table, target.mul_table
    while queue:
        x = queue.pop()
        ix = img[x]
        for y in list(assigned):
            iy = img[y]
            for law, s, v in (("preserves +", SA[x][y], TA[ix][iy]),
                              ("preserves *", SM[x][y], TM[ix][iy])):
                cur = img[s]
                if cur == -1:
                    if used is not None:
                        if v in used:
                            raise _Conflict("injective", (used[v], s))
                        used[v] = s
                    img[s] = v
                    assigned.append(s)
                    queue.append(s)
                elif cur != v:
                    raise _Conflict(law, (x, y))


def _seed(source, target, seeds, used):
    img = [-1] * source.order
    assigned: list[int] = []
    queue: list[int] = []
    base = {source.zero: target.zero, source.one: target.one}
    for a, b in list(base.items()) + list(seeds.items()):
        if img[a] == -1:
            if used is not None:
                if b in used:
                    raise _Conflict("injective", (used[b], a))
                used[b] = a
            img[a] = b
            assigned.append(a)
            queue.append(a)
        elif img[a] != b:
            law = "preserves 0" if a == source.zero else "preserves 1" if a == source.one else "seed"
            raise _Conflict(law, (a,))
    _propagate(source, target, img, assigned, queue, used)
    return img, assigned


def _signature(ring: FiniteRing, a: int) -> tuple:
    m = ring.mul_table[a][a]
    return (ring.additive_order(a), m == a, ring.is_nilpotent(a), ring.is_unit(a),
            ring.additive_order(m))


def iter_homs(source: FiniteRing, target: FiniteRing, seeds: Mapping[int, int] | None = None,
              *, injective: bool = False, match_invariants: bool = False) -> Iterator[RingHom]:
    """Yield every unital ring hom ``source -> target`` extending ``seeds``."""
    seeds = dict(seeds or {})
    if injective and target.order < source.order:
        return
    src_sig = tgt_by_sig = None
    if match_invariants:
        src_sig = [_signature(source, a) for a in source.elements]
        tgt_by_sig = {}
        for b in target.elements:
            tgt_by_sig.setdefault(_signature(target, b), []).append(b)
    used = {} if injective else None
    try:
        img, assigned = _seed(source, target, seeds, used)
    except _Conflict:
        return

    def rec(img, assigned, used):
        try:
            x = img.index(-1)
        except ValueError:
            yield RingHom(source, target, tuple(img))
            return
        cands = tgt_by_sig.get(src_sig[x], []) if match_invariants else target.elements
        for v in cands:
            if used is not None and v in used:
                continue
            img2, assigned2 = img[:], assigned[:]
            used2 = dict(used) if used is not None else None
            if used2 is not None:
                used2[v] = x
            img2[x] = v
            assigned2.append(x)
            try:
                _propagate(source, target, img2, assigned2, [x], used2)
            except _Conflict:
                continue
            yield from rec(img2, assigned2, used2)

    yield from rec(img, assigned, used)


def count_homs(source: FiniteRing, target: FiniteRing, seeds=None, *, cap: int | None = None) -> int:
    n = 0
    for _ in iter_homs(source, target, seeds):
        n += 1
        if cap is not None and n >= cap:
            break
    return n


def find_isomorphism(r: FiniteRing, s: FiniteRing) -> RingHom | None:
    """A bijective ring hom ``r -> s`` or ``None``; complete for orders within the bound."""
    bound = limits().max_iso_order
    if r.order > bound or s.order > bound:
        raise CapacityError(f"find_isomorphism is limited to order {bound}")
    if r.order != s.order:
        return None
    if r is s:
        return RingHom(r, s, tuple(r.elements))
    sig_r = Counter(_signature(r, a) for a in r.elements)
    sig_s = Counter(_signature(s, b) for b in s.elements)
    if sig_r != sig_s:
        return None
    for h in iter_homs(r, s, injective=True, match_invariants=True):
        return h
    return None


def is_isomorphic(r: FiniteRing, s: FiniteRing) -> bool:
    return find_isomorphism(r, s) is not None


def make_hom(source: FiniteRing, target: FiniteRing, generator_images: Mapping) -> RingHom:
    """Extend images of generators (indices or generator names) to a validated hom.

    Raises :class:`HomError` with a witness if the images violate a law, or if
    they do not determine the map on every element.
    """
    seeds: dict[int, int] = {}
    for k, v in generator_images.items():
        a = source.generator(k) if isinstance(k, str) else int(k)
        seeds[a] = int(v)
    try:
        img, _ = _seed(source, target, seeds, None)
    except _Conflict as c:
        pair = [source.format(p) for p in c.pair]
        raise HomError(f"images do not extend to a homomorphism {source.presentation} -> "
                       f"{target.presentation}: violates {c.law!r} at {pair}",
                       witness={"law": c.law, "elements": pair}) from None
    missing = [a for a, v in enumerate(img) if v == -1]
    if missing:
        raise HomError(f"generator images leave {len(missing)} elements undetermined "
                       f"(e.g. {source.format(missing[0])})",
                       witness={"law": "determined", "elements": [source.format(missing[0])]})
    bad = hom_law_violation(source, target, img)
    if bad is not None:
        raise HomError(f"violates {bad[0]!r} at {bad[1]}",
                       witness={"law": bad[0], "elements": [source.format(a) for a in bad[1]]})
    return RingHom(source, target, tuple(img))
