import itertools

import pytest
from hypothesis import given, settings, strategies as st

from affscheme.errors import InvariantError
from affscheme.homs import iter_homs
from affscheme.rings import RingHom, compose, ring_hom, zmod
from affscheme.scheme import affine_scheme, structure_presheaf
from affscheme.sheaves import (chain_presheaf, check_sheaf_axioms, check_universal_property,
                               constant_presheaf, diagram_limit, direct_image, filtered_colimit,
                               functions_sheaf, make_diagram, make_morphism, make_presheaf,
                               natural_morphisms, preset_presheaf, presheaf_isomorphism,
                               restrict_presheaf, sheafify_proper_limit, sheafify_standard, stalk,
                               stalk_map, tower_presheaf, zero_morphism, zero_presheaf)
from affscheme.topology import (builtin_space, discrete_space, generate_topology, identity_map,
                                sierpinski, spec, spec_map)
from affscheme.homs import make_hom

from conftest import SHEAF_INSTANCES


def _instance(space_name, preset):
    return preset_presheaf(preset, builtin_space(space_name))


def _reduce(a, b):
    return ring_hom(a, b, [x % b.order for x in a.elements])


# -- limits and colimits ------------------------------------------------------------

def test_limit_examples():
    z2, z3, z4 = zmod(2), zmod(3), zmod(4)
    lim, _ = diagram_limit(make_diagram(["a", "b"], {"a": z2, "b": z3}, {}))
    assert lim.order == 6
    lim, proj = diagram_limit(make_diagram(["a", "b"], {"a": z4, "b": z2},
                                           {("a", "b"): _reduce(z4, z2)}))
    assert lim.order == 4 and proj["a"].is_bijective
    lim, _ = diagram_limit(make_diagram([], {}, {}))
    assert lim.is_zero_ring


def test_colimit_examples():
    z2, z4 = zmod(2), zmod(4)
    col, inj = filtered_colimit(make_diagram(["a"], {"a": z4}, {}))
    assert col.order == 4
    col, inj = filtered_colimit(make_diagram(["a", "b"], {"a": z4, "b": z2},
                                             {("a", "b"): _reduce(z4, z2)}))
    assert col.order == 2 and inj["b"].is_bijective
    with pytest.raises(InvariantError):
        filtered_colimit(make_diagram(["a", "b"], {"a": z4, "b": z2}, {}))


def test_diagram_rejects_non_composing_arrows():
    z4, z2 = zmod(4), zmod(2)
    bad = RingHom(z4, z4, (0, 3, 2, 1))  # additive but not unital; composition check only
    with pytest.raises(InvariantError):
        make_diagram(["a", "b", "c"], {"a": z4, "b": z4, "c": z2},
                     {("a", "b"): bad, ("b", "c"): _reduce(z4, z2),
                      ("a", "c"): RingHom(z4, z2, (0, 0, 0, 0))})


def test_limit_cone_and_universal_property():
    # a V-shaped diagram Z/4 -> Z/2 <- Z/2 x ... with external cones from small rings
    z8, z4, z2 = zmod(8), zmod(4), zmod(2)
    d = make_diagram(["a", "b", "c"], {"a": z4, "b": z8, "c": z2},
                     {("a", "c"): _reduce(z4, z2), ("b", "c"): _reduce(z8, z2)})
    lim, proj = diagram_limit(d)
    for (a, b), h in d.arrows.items():
        assert compose(h, proj[a]).table == proj[b].table
    for t in (zmod(8), zmod(16), zmod(24), zmod(4)):
        cones = []
        for fa in iter_homs(t, z4):
            for fb in iter_homs(t, z8):
                for fc in iter_homs(t, z2):
                    fam = {"a": fa, "b": fb, "c": fc}
                    if all(compose(h, fam[a]).table == fam[b].table for (a, b), h in d.arrows.items()):
                        cones.append(fam)
        for fam in cones:
            hits = [u for u in iter_homs(t, lim)
                    if all(compose(proj[n], u).table == fam[n].table for n in d.nodes)]
            assert len(hits) == 1


# -- presheaves ----------------------------------------------------------------------

def test_make_presheaf_examples():
    sp = sierpinski()
    f = chain_presheaf(sp, zmod(4), zmod(2))
    assert f.section(sp.full).order == 4
    constant_presheaf(builtin_space("chain3"), zmod(2))
    z4, z2 = zmod(4), zmod(2)
    secs = {frozenset(): zmod(1), frozenset({0}): z2, frozenset({0, 1}): z4}
    with pytest.raises(InvariantError):
        make_presheaf(sp, secs, {(frozenset({0, 1}), frozenset({0})): RingHom(z4, z2, (0, 1, 1, 1))})


def test_sheaf_axiom_examples():
    f = constant_presheaf(builtin_space("discrete2"), zmod(2))
    rep = check_sheaf_axioms(f)
    assert not rep.gluing and not rep.is_sheaf and rep.witnesses
    for preset in ("const-Z2", "const-chain-Z4-Z2", "tower-Z2"):
        assert check_sheaf_axioms(_instance("sierpinski", preset)).is_sheaf
    assert check_sheaf_axioms(structure_presheaf(zmod(12))).is_sheaf


_SMALL_BASES = [
    (2, [{0}]), (2, [{0}, {1}]), (3, [{0}]), (3, [{0}, {1}]), (3, [{0}, {0, 1}]),
    (3, [{0}, {1, 2}]), (3, [{0, 1}, {1, 2}, {1}]), (4, [{0}, {0, 1}, {0, 1, 2}]),
    (4, [{0}, {1}, {0, 1, 2}]), (4, [{0, 1}, {2, 3}]), (4, [{0}, {1}, {2, 3}]),
    (4, [{0}, {1, 2}, {3}]), (4, [{0, 1}, {1, 2}, {2, 3}, {1}, {2}]),
]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(_SMALL_BASES),
       st.sampled_from(["const-Z2", "const-Z2-raw", "const-chain-Z4-Z2", "tower-Z2", "functions-Z2"]))
def test_exhaustive_and_basis_criteria_agree(basis, preset):
    n, b = basis
    sp = generate_topology(n, b)
    if len(sp.opens) > 12:
        return
    f = preset_presheaf(preset, sp)
    ex = check_sheaf_axioms(f, "exhaustive")
    ba = check_sheaf_axioms(f, "basis")
    assert ex.is_sheaf == ba.is_sheaf


# -- sheafification ------------------------------------------------------------------

def test_standard_sheafification_examples():
    g, _ = sheafify_standard(_instance("discrete3", "const-Z2"))
    assert g.section(frozenset({0, 1, 2})).order == 8
    f = _instance("sierpinski", "const-chain-Z4-Z2")
    g, theta = sheafify_standard(f)
    assert theta.is_isomorphism()


def test_proper_limit_examples():
    p, _ = sheafify_proper_limit(_instance("discrete2", "const-Z2"))
    assert p.section(frozenset({0, 1})).order == 4
    p, _ = sheafify_proper_limit(_instance("discrete3", "const-Z2"))
    assert p.section(frozenset({0, 1, 2})).order == 2
    p, _ = sheafify_proper_limit(_instance("sierpinski", "const-chain-Z4-Z2"))
    assert p.section(frozenset({0, 1})).order == 2


def test_include_empty_convention_kills_minimal_opens():
    p, _ = sheafify_proper_limit(_instance("sierpinski", "const-chain-Z4-Z2"), include_empty=True)
    assert p.section(frozenset({0})).is_zero_ring


@pytest.mark.parametrize("space,preset", SHEAF_INSTANCES)
def test_standard_output_is_sheaf_and_idempotent(space, preset):
    f = _instance(space, preset)
    g, theta = sheafify_standard(f)
    assert check_sheaf_axioms(g).is_sheaf
    assert g.section(frozenset()).is_zero_ring
    gg, theta2 = sheafify_standard(g)
    assert theta2.is_isomorphism()
    assert presheaf_isomorphism(g, gg) is not None
    if check_sheaf_axioms(f).is_sheaf:
        assert theta.is_isomorphism()


@pytest.mark.parametrize("space,preset", SHEAF_INSTANCES)
def test_standard_universal_property_against_all_maps_to_a_sheaf(space, preset):
    f = _instance(space, preset)
    g, theta = sheafify_standard(f)
    targets = [g, zero_presheaf(f.space), functions_sheaf(f.space, zmod(2))]
    for h in targets:
        for phi in natural_morphisms(f, h, limit=16):
            res = check_universal_property(f, g, theta, h, phi)
            assert res.status == "unique"


@pytest.mark.parametrize("space,preset", SHEAF_INSTANCES)
def test_stalks_preserved_by_standard_sheafification(space, preset):
    f = _instance(space, preset)
    g, theta = sheafify_standard(f)
    for x in f.space.points:
        assert stalk_map(theta, x).is_bijective
        assert stalk(f, x).ring.order == stalk(g, x).ring.order


def test_proper_limit_breaks_universal_property_and_stalks():
    f = _instance("sierpinski", "const-chain-Z4-Z2")
    p, theta = sheafify_proper_limit(f)
    ident = make_morphism(f, f, {u: RingHom(f.section(u), f.section(u), tuple(f.section(u).elements))
                                 for u in f.space.opens})
    assert check_universal_property(f, p, theta, f, ident).status == "none"
    assert not stalk_map(theta, 1).is_bijective


def test_universal_property_trivial_case():
    f = _instance("sierpinski", "const-chain-Z4-Z2")
    ident = make_morphism(f, f, {u: RingHom(f.section(u), f.section(u), tuple(f.section(u).elements))
                                 for u in f.space.opens})
    assert check_universal_property(f, f, ident, f, ident).status == "unique"


def test_universal_property_requires_sheaf_target():
    f = _instance("discrete2", "const-Z2")
    g, theta = sheafify_standard(f)
    with pytest.raises(InvariantError):
        check_universal_property(f, g, theta, f, make_morphism(
            f, f, {u: RingHom(f.section(u), f.section(u), tuple(f.section(u).elements))
                   for u in f.space.opens}))


# -- stalks, direct images, restriction -------------------------------------------------

def test_stalk_examples():
    f = _instance("sierpinski", "const-chain-Z4-Z2")
    assert stalk(f, 0).ring.order == 2
    assert stalk(f, 1).ring.order == 4
    c = _instance("chain3", "const-Z3")
    assert all(stalk(c, x).ring.order == 3 for x in c.space.points)


def test_direct_image_examples():
    f = _instance("chain3", "tower-Z2")
    same = direct_image(identity_map(f.space), f)
    assert all(same.section(u) is f.section(u) for u in f.space.opens)
    from affscheme.topology import ContinuousMap
    point = discrete_space(1)
    collapse = ContinuousMap(f.space, point, (0, 0, 0))
    assert direct_image(collapse, f).section(point.full) is f.section(f.space.full)
    a, b = zmod(12), zmod(4)
    red = make_hom(a, b, {})
    sa, sb = affine_scheme(a), affine_scheme(b)
    m = spec_map(red, sb.space, sa.space)
    pushed = direct_image(m, sb.structure_sheaf)
    assert check_sheaf_axioms(pushed).is_sheaf
    assert pushed.section(frozenset({0})).order == 4
    assert pushed.section(frozenset({1})).is_zero_ring


def test_restrict_presheaf():
    o = structure_presheaf(zmod(12))
    full = restrict_presheaf(o, o.space.full)
    assert len(full.space.opens) == len(o.space.opens)
    empty = restrict_presheaf(o, frozenset())
    assert len(empty.space.opens) == 1
    sub = restrict_presheaf(o, frozenset({1}))
    assert sub.section(sub.space.full).order == 3
    assert check_sheaf_axioms(sub).is_sheaf
