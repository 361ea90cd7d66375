import pytest
from hypothesis import given, settings, strategies as st

from affscheme.errors import HomError
from affscheme.homs import count_homs, find_isomorphism, is_isomorphic, iter_homs, make_hom
from affscheme.rings import hom_law_violation, poly_quotient, product, zmod

from conftest import corpus_rings


def test_make_hom_reduction():
    h = make_hom(zmod(12), zmod(4), {})
    assert h.table == tuple(a % 4 for a in range(12))


def test_make_hom_rejects_with_witness():
    with pytest.raises(HomError) as exc:
        make_hom(zmod(12), zmod(5), {})
    assert exc.value.witness["law"]
    assert exc.value.witness["elements"]


def test_make_hom_with_generator_images():
    src = poly_quotient(zmod(2), [0, 1, 1])
    h = make_hom(src, zmod(2), {"x": 0})
    assert h.table[src.generator("x")] == 0
    with pytest.raises(HomError):
        # characteristic 2 cannot map unitally into Z/4
        make_hom(src, zmod(4), {"x": 1})


@pytest.mark.parametrize("m,n", [(12, 4), (12, 5), (6, 3), (8, 4), (9, 3), (10, 4), (24, 8)])
def test_homs_between_cyclic_rings(m, n):
    # a unital hom Z/m -> Z/n exists iff n divides m, and it is unique
    assert count_homs(zmod(m), zmod(n)) == (1 if m % n == 0 else 0)


def test_homs_into_products_count_idempotent_splittings():
    # Z/2 x Z/2 -> Z/2 has two homs (the projections)
    assert count_homs(product(zmod(2), zmod(2)), zmod(2)) == 2


@pytest.mark.parametrize("ring", corpus_rings(), ids=lambda r: r.presentation)
def test_every_enumerated_hom_is_lawful(ring):
    for t in (zmod(2), zmod(3), zmod(4)):
        for h in iter_homs(ring, t):
            assert hom_law_violation(ring, t, h.table) is None


@pytest.mark.parametrize("ring", corpus_rings(), ids=lambda r: r.presentation)
def test_self_isomorphism(ring):
    iso = find_isomorphism(ring, ring)
    assert iso is not None and iso.is_bijective


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(2, 6))
def test_crt_products(a, b):
    from math import gcd
    assert is_isomorphic(product(zmod(a), zmod(b)), zmod(a * b)) == (gcd(a, b) == 1)
