"""Structure sheaf of Spec A and the checks that relate it to localizations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .errors import AffSchemeError, InvariantError, VerificationError
from .homs import count_homs, find_isomorphism
from .rings import (FiniteRing, LocalizedRing, RingHom, _index, annihilator, compose,
                    hom_law_violation, localize_at_element, localize_at_prime, radical, ring_hom,
                    tuple_ring)
from .sheaves import (Presheaf, PresheafMorphism, check_sheaf_axioms, diagram_limit, direct_image,
                      make_diagram, make_morphism, make_presheaf, sheafify_standard, stalk)
from .topology import ContinuousMap, SpecSpace, basic_open, members, spec, spec_map, vanishing_set


def _fmt(u) -> str:
    return "{" + ",".join(str(x) for x in sorted(u)) + "}"


def _report(ring: FiniteRing, check: str, ok: bool, **extra) -> dict:
    out: dict[str, Any] = {"ring": ring.presentation, "check": check,
                           "status": "pass" if ok else "fail"}
    out.update({k: v for k, v in extra.items() if v is not None})
    return out


def _iso_table(h: RingHom) -> list[list[str]]:
    return [[h.source.format(a), h.target.format(h.table[a])] for a in h.source.elements]


# -- structure presheaf ---------------------------------------------------------

def _closure(comps: list[FiniteRing], seed: set[tuple[int, ...]]) -> set[tuple[int, ...]]:
    k = len(comps)
    elems = set(seed)
    elems.add(tuple(c.zero for c in comps))
    elems.add(tuple(c.one for c in comps))
    frontier = list(elems)
    while frontier:
        new = []
        current = list(elems)
        for a in frontier:
            for b in current:
                for table in ("add_table", "mul_table"):
                    v = tuple(getattr(comps[t], table)[a[t]][b[t]] for t in range(k))
                    if v not in elems:
                        elems.add(v)
                        new.append(v)
        frontier = new
    return elems


def _build_structure_presheaf(ring: FiniteRing, space: SpecSpace,
                              locs: tuple[LocalizedRing, ...]) -> Presheaf:
    top = space.topology
    secs = {}
    for u in top.opens:
        pts = sorted(u)
        comps = [locs[p].result for p in pts]
        seed = set()
        for a in ring.elements:
            r = tuple(locs[p].map.table[a] for p in pts)
            seed.add(r)
            if all(c.is_unit(x) for c, x in zip(comps, r)):
                seed.add(tuple(c.inverse(x) for c, x in zip(comps, r)))
        secs[u] = tuple_ring(comps, _closure(comps, seed), presentation=f"O({_fmt(u)})")
    res = {}
    for u in top.opens:
        pu = sorted(u)
        for v in top.opens_within(u):
            where = [pu.index(p) for p in sorted(v)]
            table = tuple(secs[v].index_of(tuple(fam[i] for i in where)) for fam in secs[u].labels)
            res[(u, v)] = RingHom(secs[u], secs[v], table)
    return make_presheaf(top, secs, res, name=f"O_Spec {ring.presentation}")


def structure_presheaf(ring: FiniteRing) -> Presheaf:
    """Sections over ``U``: the subring of prod_{p in U} A_p generated by the
    diagonal image of ``A`` and the inverses of its componentwise units."""
    space = spec(ring)
    locs = tuple(localize_at_prime(ring, p) for p in space.points)
    return _build_structure_presheaf(ring, space, locs)


@dataclass(frozen=True, eq=False)
class AffineScheme:
    ring: FiniteRing
    space: SpecSpace
    structure_sheaf: Presheaf
    local_at_prime: tuple[LocalizedRing, ...]
    _local_at_element: dict = field(default_factory=dict, repr=False)

    def localization_at(self, f) -> LocalizedRing:
        f = _index(self.ring, f)
        if f not in self._local_at_element:
            self._local_at_element[f] = localize_at_element(self.ring, f)
        return self._local_at_element[f]

    def section(self, u) -> FiniteRing:
        return self.structure_sheaf.section(u)

    def rho(self, u, a) -> int:
        """Image of ``a`` in the sections over ``u``."""
        a = _index(self.ring, a)
        sec = self.section(u)
        return sec.index_of(tuple(self.local_at_prime[p].map.table[a] for p in sorted(members(u))))

    def normal_forms(self, u) -> dict[int, tuple[int, int]]:
        """Map each section over ``u`` to a pair ``(a, f)`` with it equal to rho(a) rho(f)^-1."""
        pts = sorted(members(u))
        sec = self.section(u)
        comps = [self.local_at_prime[p].result for p in pts]
        out: dict[int, tuple[int, int]] = {}
        for f in self.ring.elements:
            rf = [self.local_at_prime[p].map.table[f] for p in pts]
            if not all(c.is_unit(x) for c, x in zip(comps, rf)):
                continue
            inv = [c.inverse(x) for c, x in zip(comps, rf)]
            for a in self.ring.elements:
                val = tuple(c.mul(self.local_at_prime[p].map.table[a], i)
                            for c, p, i in zip(comps, pts, inv))
                idx = sec.index_of(val)
                out.setdefault(idx, (a, f))
        return out


def structure_sheaf_report(s: AffineScheme) -> dict:
    """Sheaf axioms (both strategies), sheafification unit iso, single-fraction normal form."""
    o = s.structure_sheaf
    axioms = check_sheaf_axioms(o, "both")
    _, theta = sheafify_standard(o)
    non_iso = [_fmt(u) for u in o.space.opens if not theta[u].is_bijective]
    missing = []
    for u in o.space.opens:
        nf = s.normal_forms(u)
        for e in s.section(u).elements:
            if e not in nf:
                missing.append({"open": sorted(u), "section": s.section(u).format(e)})
    ok = axioms.is_sheaf and not non_iso and not missing
    witness = None
    if not ok:
        witness = {"sheaf_axioms": axioms.witnesses, "theta_not_iso": non_iso,
                   "no_single_fraction": missing[:5]}
    return _report(s.ring, "lemma31", ok, sheaf_axioms=axioms.to_dict(),
                   theta_isomorphism=not non_iso, normal_form=not missing,
                   opens=len(o.space.opens), witness=witness)


def affine_scheme(ring: FiniteRing, *, check: bool = True) -> AffineScheme:
    space = spec(ring)
    locs = tuple(localize_at_prime(ring, p) for p in space.points)
    sheaf = _build_structure_presheaf(ring, space, locs)
    s = AffineScheme(ring, space, sheaf, locs)
    if check:
        rep = structure_sheaf_report(s)
        if rep["status"] != "pass":
            raise VerificationError(f"structure presheaf of {ring.presentation} failed its checks",
                                    witness=rep.get("witness"))
    return s


# -- basic opens ----------------------------------------------------------------

def _fraction_map(s: AffineScheme, f: int):
    """The map a/t -> (a/t)_{p in D(f)} on every fraction pair of A_f.

    Returns (localized ring, D(f), table or None, witness).
    """
    loc = s.localization_at(f)
    d = basic_open(s.space, f).members
    pts = sorted(d)
    sec = s.section(d)
    table: list[int | None] = [None] * loc.result.order
    for (a, t), c in sorted(loc.fractions.items()):
        val = []
        for p in pts:
            lp = s.local_at_prime[p]
            val.append(lp.result.mul(lp.map.table[a], lp.result.inverse(lp.map.table[t])))
        val = tuple(val)
        try:
            idx = sec.index_of(val)
        except KeyError:
            return loc, d, None, {"reason": "image outside sections",
                                  "fraction": [s.ring.format(a), s.ring.format(t)]}
        if table[c] is None:
            table[c] = idx
        elif table[c] != idx:
            return loc, d, None, {"reason": "not well defined",
                                  "fraction": [s.ring.format(a), s.ring.format(t)]}
    return loc, d, table, None


def verify_basic_sections(s: AffineScheme, f) -> dict:
    """Check that a/f^n -> (a/f^n)_{p in D(f)} is a ring isomorphism A_f -> O(D(f))."""
    f = _index(s.ring, f)
    ring = s.ring
    loc, d, table, witness = _fraction_map(s, f)
    sec = s.section(d)
    base = {"element": ring.format(f), "basic_open": sorted(d), "localized_order": loc.result.order,
            "section_order": sec.order}
    if table is None:
        return _report(ring, "prop32_2", False, **base, witness=witness)
    bad = hom_law_violation(loc.result, sec, table)
    if bad is not None:
        return _report(ring, "prop32_2", False, **base,
                       witness={"reason": bad[0], "elements": [loc.result.format(x) for x in bad[1]]})
    phi = RingHom(loc.result, sec, tuple(table))
    injective, surjective = phi.is_injective, phi.is_surjective

    # injectivity chain: V(ann a) misses D(f)  =>  f in rad(ann a)  =>  a/1 = 0 in A_f
    chain_ok = True
    chain_witness = None
    for a in ring.elements:
        ann = annihilator(ring, a)
        misses = not (vanishing_set(s.space, ann) & d)
        if not misses:
            continue
        m = next((m for m in range(1, ring.order + 1)
                  if ring.mul(ring.pow(f, m), a) == ring.zero), None)
        if f not in radical(ring, ann).members or m is None or loc.fraction(a, ring.one) != loc.result.zero:
            chain_ok = False
            chain_witness = {"reason": "annihilator chain", "a": ring.format(a)}
            break

    # surjectivity chain: s = a/b with D(f) in D(b) gives f^n = h b and s = h a / f^n
    surj_ok = True
    surj_witness = None
    nf = s.normal_forms(d)
    inverse = {v: k for k, v in enumerate(table)}
    for e in sec.elements:
        if e not in nf:
            surj_ok = False
            surj_witness = {"reason": "no single-fraction form", "section": sec.format(e)}
            break
        a, b = nf[e]
        found = None
        for n in range(0, ring.order + 1):
            fn = ring.pow(f, n)
            h = next((h for h in ring.elements if ring.mul(h, b) == fn), None)
            if h is not None:
                found = (n, h)
                break
        if found is None:
            surj_ok = False
            surj_witness = {"reason": "no f^n = h b", "b": ring.format(b)}
            break
        n, h = found
        pre = loc.fraction(ring.mul(h, a), ring.pow(f, n))
        if table[pre] != e:
            surj_ok = False
            surj_witness = {"reason": "h a / f^n differs", "section": sec.format(e)}
            break
    ok = injective and surjective and chain_ok and surj_ok
    witness = None
    if not ok:
        witness = chain_witness or surj_witness or {"reason": "not bijective",
                                                    "injective": injective,
                                                    "surjective": surjective}
    return _report(ring, "prop32_2", ok, **base, injective=injective, surjective=surjective,
                   annihilator_chain=chain_ok, denominator_chain=surj_ok,
                   isomorphism_table=_iso_table(phi), witness=witness)


def basic_section_iso(s: AffineScheme, f) -> RingHom:
    """The isomorphism A_f -> O(D(f)); raises VerificationError if it is not one."""
    f = _index(s.ring, f)
    loc, d, table, witness = _fraction_map(s, f)
    if table is None:
        raise VerificationError(f"fraction map at {s.ring.format(f)} is not defined", witness)
    h = ring_hom(loc.result, s.section(d), table)
    if not h.is_bijective:
        raise VerificationError(f"fraction map at {s.ring.format(f)} is not bijective")
    return h


def verify_stalk(s: AffineScheme, p: int) -> dict:
    st = stalk(s.structure_sheaf, p)
    lp = s.local_at_prime[p]
    iso = find_isomorphism(lp.result, st.ring)
    return _report(s.ring, "prop32_1", iso is not None, point=p,
                   prime=[s.ring.format(a) for a in s.space.points[p].key],
                   stalk_order=st.ring.order, localized_order=lp.result.order,
                   isomorphism_table=_iso_table(iso) if iso else None,
                   witness=None if iso else {"reason": "no isomorphism",
                                             "orders": [lp.result.order, st.ring.order]})


def _localization_arrow(s: AffineScheme, f: int, g: int) -> RingHom:
    """A_f -> A_g, a/t -> a * t^-1 computed in A_g; needs D(g) in D(f)."""
    lf, lg = s.localization_at(f), s.localization_at(g)
    table: list[int | None] = [None] * lf.result.order
    for (a, t), c in lf.fractions.items():
        tg = lg.map.table[t]
        if not lg.result.is_unit(tg):
            raise VerificationError(
                f"{s.ring.format(t)} is not invertible in A_{s.ring.format(g)}",
                witness={"f": s.ring.format(f), "g": s.ring.format(g), "denominator": s.ring.format(t)})
        v = lg.result.mul(lg.map.table[a], lg.result.inverse(tg))
        if table[c] is None:
            table[c] = v
        elif table[c] != v:
            raise VerificationError("localization arrow is not well defined",
                                    witness={"f": s.ring.format(f), "g": s.ring.format(g)})
    return ring_hom(lf.result, lg.result, table)


def verify_basis_limit(s: AffineScheme, u) -> dict:
    """Compare O(U) with the limit of A_f over all f with D(f) inside U."""
    u = members(u)
    ring = s.ring
    nodes = [f for f in ring.elements if basic_open(s.space, f).members <= u]
    dsets = {f: basic_open(s.space, f).members for f in nodes}
    try:
        arrows = {(f, g): _localization_arrow(s, f, g)
                  for f in nodes for g in nodes if f != g and dsets[g] <= dsets[f]}
    except VerificationError as exc:
        return _report(ring, "corollary", False, open=sorted(u), witness=exc.witness)
    d = make_diagram(nodes, {f: s.localization_at(f).result for f in nodes}, arrows)
    lim, _ = diagram_limit(d, presentation=f"lim A_f, D(f) in {_fmt(u)}")
    sec = s.section(u)
    iso = find_isomorphism(sec, lim)
    # canonical comparison: s -> (phi_f^-1 (s restricted to D(f)))_f
    canonical = True
    inv = {f: basic_section_iso(s, f).inverse() for f in nodes}
    images = set()
    for e in sec.elements:
        fam = tuple(inv[f].table[s.structure_sheaf.restrict(u, dsets[f], e)] for f in nodes)
        if fam not in lim._label_index:
            canonical = False
            break
        images.add(fam)
    canonical = canonical and len(images) == sec.order == lim.order
    ok = iso is not None and canonical
    return _report(ring, "corollary", ok, open=sorted(u), nodes=len(nodes), arrows=len(arrows),
                   section_order=sec.order, limit_order=lim.order, canonical_map_bijective=canonical,
                   isomorphism_table=_iso_table(iso) if iso else None,
                   witness=None if ok else {"orders": [sec.order, lim.order],
                                            "canonical": canonical})


# -- morphisms --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SchemeMorphism:
    source: AffineScheme
    target: AffineScheme
    point_map: ContinuousMap
    sheaf_map: PresheafMorphism
    inducing_hom: RingHom
    report: dict = field(default_factory=dict)


def _local_hom(phi: RingHom, la: LocalizedRing, lb: LocalizedRing) -> RingHom:
    """A_p -> B_q, a/t -> phi(a)/phi(t), for q lying over p."""
    table: list[int | None] = [None] * la.result.order
    for (a, t), c in la.fractions.items():
        tb = lb.map.table[phi.table[t]]
        v = lb.result.mul(lb.map.table[phi.table[a]], lb.result.inverse(tb))
        if table[c] is None:
            table[c] = v
        elif table[c] != v:
            raise VerificationError("local hom is not well defined")
    return ring_hom(la.result, lb.result, table)


def induced_morphism(phi: RingHom, source: AffineScheme | None = None,
                     target: AffineScheme | None = None) -> SchemeMorphism:
    """For ``phi: A -> B``: Spec B -> Spec A with O_{Spec A} -> f_* O_{Spec B}."""
    x = source or affine_scheme(phi.target)
    y = target or affine_scheme(phi.source)
    if x.ring is not phi.target or y.ring is not phi.source:
        raise InvariantError("schemes do not match the homomorphism")
    fmap = spec_map(phi, x.space, y.space)
    pushed = direct_image(fmap, x.structure_sheaf)
    local = {}
    for q, p in enumerate(fmap.point_map):
        local[q] = _local_hom(phi, y.local_at_prime[p], x.local_at_prime[q])
    comps = {}
    for u in y.space.topology.opens:
        ps = sorted(u)
        pre = fmap.preimage(u)
        qs = sorted(pre)
        src, tgt = y.section(u), x.section(pre)
        table = []
        for fam in src.labels:
            table.append(tgt.index_of(tuple(local[q].table[fam[ps.index(fmap.point_map[q])]]
                                            for q in qs)))
        comps[u] = ring_hom(src, tgt, table)
    try:
        sheaf_map = make_morphism(y.structure_sheaf, pushed, comps)
        natural = True
    except InvariantError as exc:
        raise VerificationError(f"induced sheaf map is not natural: {exc}") from None
    full = y.space.topology.full
    glob = comps[full]
    compatible = all(glob.table[y.rho(full, a)] == x.rho(x.space.topology.full, phi.table[a])
                     for a in y.ring.elements)
    # the stated direction f_*O_X -> O_Y would need a hom B -> A on global sections
    reverse = count_homs(x.section(x.space.topology.full), y.section(full), cap=64)
    checks = fmap.checks
    report = _report(y.ring, "morphism",
                     natural and compatible and checks.continuous and checks.preimage_identity,
                     hom=f"{phi.source.presentation} -> {phi.target.presentation}",
                     point_map=list(fmap.point_map), continuous=checks.continuous,
                     closed_sets_checked=checks.closed_sets_checked,
                     preimage_identity=checks.preimage_identity,
                     ideals_checked=checks.ideals_checked, naturality=natural,
                     global_sections_compatible=compatible,
                     pushforward_to_base_global_homs=reverse,
                     witness=checks.witness)
    return SchemeMorphism(x, y, fmap, sheaf_map, phi, report)


def verify_scheme(ring: FiniteRing, checks: str = "all") -> list[dict]:
    """Run the requested checks; never raises on a mathematical failure."""
    want = {"all": ("lemma31", "prop32", "corollary")}.get(checks, (checks,))
    try:
        s = affine_scheme(ring, check=False)
    except AffSchemeError as exc:
        if isinstance(exc, VerificationError):
            return [_report(ring, "lemma31", False, witness={"error": str(exc)})]
        raise
    out = []
    if "lemma31" in want:
        out.append(structure_sheaf_report(s))
    if "prop32" in want:
        for p in range(len(s.space.points)):
            out.append(verify_stalk(s, p))
        for f in ring.elements:
            out.append(verify_basic_sections(s, f))
    if "corollary" in want:
        for u in s.space.topology.opens:
            out.append(verify_basis_limit(s, u))
    return out
