import pytest

from affscheme.dsl import HOM_CORPUS, build_hom, build_ring
from affscheme.errors import VerificationError
from affscheme.homs import find_isomorphism, make_hom
from affscheme.rings import compose, poly_quotient, zmod
from affscheme.scheme import (affine_scheme, basic_section_iso, induced_morphism,
                              structure_sheaf_report, structure_presheaf, verify_basic_sections,
                              verify_basis_limit, verify_scheme, verify_stalk)
from affscheme.sheaves import check_sheaf_axioms, stalk
from affscheme.topology import compose_maps

from conftest import corpus_rings


def test_structure_presheaf_examples():
    o = structure_presheaf(zmod(12))
    full = o.space.full
    assert find_isomorphism(o.section(full), zmod(12)) is not None
    assert find_isomorphism(o.section(frozenset({1})), zmod(3)) is not None
    assert o.section(frozenset()).is_zero_ring


def test_affine_scheme_examples():
    s = affine_scheme(zmod(12))
    assert len(s.space.points) == 2 and s.space.topology.is_discrete()
    assert s.section(s.space.topology.full).order == 12
    f = affine_scheme(zmod(7))
    assert len(f.space.points) == 1 and f.section(f.space.topology.full).is_field
    n = affine_scheme(poly_quotient(zmod(2), [0, 0, 1]))
    glob = n.section(n.space.topology.full)
    assert len(n.space.points) == 1 and glob.order == 4
    assert any(glob.is_nilpotent(a) and a != glob.zero for a in glob.elements)


def test_basic_sections_examples():
    s = affine_scheme(zmod(12))
    rep = verify_basic_sections(s, 2)
    assert rep["status"] == "pass" and rep["basic_open"] == [1] and rep["section_order"] == 3
    rep = verify_basic_sections(s, 1)
    assert rep["status"] == "pass" and rep["section_order"] == 12
    rep = verify_basic_sections(s, 6)
    assert rep["status"] == "pass" and rep["basic_open"] == [] and rep["localized_order"] == 1
    iso = basic_section_iso(s, 2)
    assert iso.is_bijective


def test_stalk_examples():
    s = affine_scheme(zmod(12))
    assert verify_stalk(s, 0)["stalk_order"] == 4
    assert verify_stalk(s, 1)["stalk_order"] == 3
    f = affine_scheme(zmod(11))
    assert verify_stalk(f, 0)["stalk_order"] == 11


def test_basis_limit_examples():
    s = affine_scheme(zmod(12))
    top = s.space.topology
    for u, order in ((frozenset({1}), 3), (frozenset(), 1), (top.full, 12)):
        rep = verify_basis_limit(s, u)
        assert rep["status"] == "pass" and rep["limit_order"] == order


@pytest.mark.parametrize("ring", corpus_rings(), ids=lambda r: r.presentation)
def test_verify_scheme_on_corpus(ring):
    reports = verify_scheme(ring)
    assert reports and all(r["status"] == "pass" for r in reports)
    kinds = {r["check"] for r in reports}
    assert kinds == {"lemma31", "prop32_1", "prop32_2", "corollary"}
    s = affine_scheme(ring)
    assert structure_sheaf_report(s)["normal_form"]
    for p in range(len(s.space.points)):
        st = stalk(s.structure_sheaf, p)
        assert find_isomorphism(st.ring, s.local_at_prime[p].result) is not None


def test_affine_scheme_raises_on_broken_check(monkeypatch):
    import affscheme.scheme as sch
    monkeypatch.setattr(sch, "structure_sheaf_report",
                        lambda s: {"status": "fail", "witness": {"open": []}})
    with pytest.raises(VerificationError):
        sch.affine_scheme(zmod(6))


@pytest.mark.parametrize("text", HOM_CORPUS)
def test_induced_morphisms(text):
    m = induced_morphism(build_hom(text))
    r = m.report
    assert r["status"] == "pass"
    assert r["continuous"] and r["preimage_identity"]
    assert r["naturality"] and r["global_sections_compatible"]


def test_induced_morphism_examples():
    a = zmod(12)
    m = induced_morphism(make_hom(a, a, {}))
    assert m.point_map.point_map == (0, 1)
    assert all(h.is_bijective for h in m.sheaf_map.components.values())
    red = make_hom(a, zmod(4), {})
    m = induced_morphism(red)
    glob = m.sheaf_map[m.target.space.topology.full]
    assert glob.source.order == 12 and glob.target.order == 4
    # no unital hom Z/4 -> Z/12 exists, so the morphism can only point from O_Y outward
    assert m.report["pushforward_to_base_global_homs"] == 0


def test_induced_point_maps_compose():
    a, b, c = zmod(24), zmod(12), zmod(4)
    xa, xb, xc = affine_scheme(a), affine_scheme(b), affine_scheme(c)
    f, g = make_hom(a, b, {}), make_hom(b, c, {})
    mf = induced_morphism(f, xb, xa)
    mg = induced_morphism(g, xc, xb)
    mgf = induced_morphism(compose(g, f), xc, xa)
    assert mgf.point_map.point_map == compose_maps(mf.point_map, mg.point_map).point_map
