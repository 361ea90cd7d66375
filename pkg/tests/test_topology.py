import itertools

import pytest

from affscheme.dsl import HOM_CORPUS, build_hom
from affscheme.errors import InvariantError
from affscheme.rings import enumerate_ideals, ideal_intersection, ideal_sum, product, zero_ring, zmod
from affscheme.homs import make_hom
from affscheme.topology import (FiniteTopology, basic_open, builtin_space, chain_space,
                                compose_maps, generate_topology, identity_map, sierpinski, spec,
                                spec_map, vanishing_set)

from conftest import corpus_rings


def test_spec_examples():
    assert len(spec(zmod(7)).points) == 1
    s = spec(zmod(12))
    assert [set(p) for p in s.points] == [set(range(0, 12, 2)), set(range(0, 12, 3))]
    assert s.topology.is_discrete() and len(s.topology.opens) == 4
    assert len(spec(zero_ring()).points) == 0


def test_vanishing_and_basic_open_examples():
    r = zmod(12)
    s = spec(r)
    ideals = {tuple(sorted(i)): i for i in enumerate_ideals(r)}
    assert vanishing_set(s, ideals[(0,)]) == frozenset({0, 1})
    assert vanishing_set(s, ideals[tuple(range(0, 12, 2))]) == frozenset({0})
    assert vanishing_set(s, ideals[tuple(range(12))]) == frozenset()
    assert basic_open(s, 2).members == frozenset({1})
    assert basic_open(s, 1).members == frozenset({0, 1})
    assert basic_open(s, 0).members == frozenset()
    assert basic_open(s, 6).members == frozenset()


def test_generated_topologies():
    assert len(generate_topology(2, [{0}, {1}]).opens) == 4
    sp = generate_topology(2, [{0}])
    assert set(sp.opens) == {frozenset(), frozenset({0}), frozenset({0, 1})}
    assert set(sierpinski().opens) == set(sp.opens)
    assert not sierpinski().is_discrete()
    c = chain_space(3)
    assert len(c.opens) == 4 and c.minimal_open(2) == frozenset({0, 1, 2})


def test_invalid_topology_rejected():
    with pytest.raises(InvariantError):
        FiniteTopology(2, (frozenset(), frozenset({0}), frozenset({1})))


def test_builtin_spaces():
    for name in ("sierpinski", "discrete1", "discrete2", "discrete3", "chain3"):
        sp = builtin_space(name)
        assert sp.is_open(sp.full) and sp.is_open(frozenset())
    with pytest.raises(KeyError):
        builtin_space("nope")


@pytest.mark.parametrize("ring", corpus_rings(), ids=lambda r: r.presentation)
def test_basic_open_and_vanishing_laws(ring):
    s = spec(ring)
    top = s.topology
    assert top.is_discrete()
    for f, g in itertools.product(ring.elements, repeat=2):
        assert basic_open(s, f).members & basic_open(s, g).members == \
            basic_open(s, ring.mul(f, g)).members
    ideals = enumerate_ideals(ring)
    opens_d = {basic_open(s, f).members for f in ring.elements}
    for a, b in itertools.product(ideals, repeat=2):
        va, vb = vanishing_set(s, a), vanishing_set(s, b)
        assert va | vb == vanishing_set(s, ideal_intersection(a, b))
        assert va & vb == vanishing_set(s, ideal_sum(a, b))
    for a in ideals:
        # complement of V(a) is the union of D(f) for f in a
        comp = top.full - vanishing_set(s, a)
        assert comp == frozenset().union(*(basic_open(s, f).members for f in a))
        assert comp in top.opens
    assert opens_d <= set(top.opens)


def test_spec_map_examples():
    red = make_hom(zmod(12), zmod(4), {})
    m = spec_map(red)
    assert m.point_map == (0,)
    assert m.checks.continuous and m.checks.preimage_identity
    ident = make_hom(zmod(6), zmod(6), {})
    assert spec_map(ident).point_map == (0, 1)
    proj = build_hom("Z/2 x Z/3 -> Z/3 : e1 -> 0, e2 -> 1")
    m = spec_map(proj)
    src = spec(proj.source)
    image = src.points[m.point_map[0]]
    # the prime Z/2 x (0): everything whose Z/3 component vanishes
    assert all(proj.source.labels[a][1] == 0 for a in image)


@pytest.mark.parametrize("text", HOM_CORPUS)
def test_spec_map_continuity_and_preimage_identity(text):
    phi = build_hom(text)
    m = spec_map(phi)
    target_space = spec(phi.source)
    assert m.checks.continuous and m.checks.preimage_identity
    assert m.checks.closed_sets_checked == len(target_space.topology.closed_sets())
    assert m.checks.ideals_checked == len(enumerate_ideals(phi.source))


def test_spec_map_composes():
    from affscheme.rings import compose
    a, b, c = zmod(24), zmod(12), zmod(4)
    sa, sb, sc = spec(a), spec(b), spec(c)
    f, g = make_hom(a, b, {}), make_hom(b, c, {})
    composite = compose_maps(spec_map(f, sb, sa), spec_map(g, sc, sb))
    assert spec_map(compose(g, f), sc, sa).point_map == composite.point_map
    sp = sierpinski()
    assert identity_map(sp).point_map == (0, 1)
