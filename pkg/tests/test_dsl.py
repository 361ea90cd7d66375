import pytest
from hypothesis import given, settings, strategies as st

from affscheme.dsl import (CORPUS, HOM_CORPUS, Modular, ParseError, PolyQuotient, Product,
                           SemanticError, build_hom, build_ring, evaluate, format_hom, format_ring,
                           parse_hom, parse_ring)
from affscheme.errors import HomError
from affscheme.homs import find_isomorphism
from affscheme.rings import zmod


def test_parse_examples():
    assert parse_ring("Z/12") == Modular(12)
    assert parse_ring("Z/2[x]/(x^2+x)") == PolyQuotient(2, "x", (0, 1, 1))
    assert parse_ring("Z/4 x Z/3") == Product((Modular(4), Modular(3)))
    assert parse_ring("  Z / 4x(Z/3 x Z/5)") == Product((Modular(4), Product((Modular(3), Modular(5)))))


def test_parse_hom_examples():
    h = build_hom("Z/12 -> Z/4")
    assert h.table == tuple(a % 4 for a in range(12))
    ev = build_hom("Z/2[x]/(x^2+x) -> Z/2 : x -> 0")
    assert ev.table[ev.source.generator("x")] == 0
    assert parse_hom("Z/12 -> Z/5").bindings == ()
    with pytest.raises(HomError):
        build_hom("Z/12 -> Z/5")


@pytest.mark.parametrize("text,exc,offset", [
    ("Z/0", SemanticError, 2),
    ("Z/4 x", ParseError, 5),
    ("Z12", ParseError, 1),
    ("Q/5", ParseError, 0),
    ("Z/2[x]/(2x^2+1)", SemanticError, 8),
    ("Z/2[x]/(3)", SemanticError, 8),
    ("Z/2[x]/(y^2+1)", SemanticError, 8),
    ("Z/4 Z/3", ParseError, 4),
])
def test_ring_errors_carry_offsets(text, exc, offset):
    with pytest.raises(exc) as info:
        build_ring(text)
    assert info.value.offset == offset


def test_parse_error_lists_expected_tokens():
    with pytest.raises(ParseError) as info:
        parse_ring("Z/4 x")
    assert info.value.expected


def test_hom_semantic_errors():
    with pytest.raises(SemanticError):
        build_hom("Z/2 x Z/3 -> Z/6")
    with pytest.raises(SemanticError):
        build_hom("Z/6 -> Z/6 : y -> 1")
    with pytest.raises(SemanticError):
        build_hom("Z/2 x Z/3 -> Z/6 : e1 -> 3, e1 -> 3")
    with pytest.raises(SemanticError):
        build_ring("Z/2[x]/(x^2) x Z/3[x]/(x^2+1)")


def test_products_expose_idempotents():
    r = build_ring("Z/4 x Z/3")
    e1, e2 = r.generator("e1"), r.generator("e2")
    assert r.mul(e1, e1) == e1 and r.mul(e1, e2) == r.zero and r.add(e1, e2) == r.one
    assert find_isomorphism(r, zmod(12)) is not None


def test_evaluate():
    r = build_ring("Z/3[y]/(y^2+1)")
    assert evaluate(r, "y^2 + 1") == r.zero
    assert evaluate(r, "2y") == r.times(2, r.generator("y"))


def test_corpora_build():
    assert all(build_ring(t).order >= 2 for t in CORPUS)
    assert all(build_hom(t) is not None for t in HOM_CORPUS)


_moduli = st.integers(1, 30)


def _polys(var):
    # monic of degree 1..3 with coefficients in a small range, rendered by format_ring
    return st.builds(lambda low, deg: tuple(low[:deg]) + (1,),
                     st.lists(st.integers(-3, 5), min_size=3, max_size=3), st.integers(1, 3))


_atoms = st.one_of(
    st.builds(Modular, _moduli),
    st.builds(lambda n, var, cs: PolyQuotient(n, var, cs),
              st.integers(2, 9), st.sampled_from(["x", "y", "t"]), _polys("x")),
)
_rings = st.recursive(_atoms, lambda inner: st.builds(
    lambda fs: Product(tuple(fs)), st.lists(inner, min_size=2, max_size=3)), max_leaves=5)


@settings(max_examples=200, deadline=None)
@given(_rings)
def test_print_parse_round_trip(expr):
    text = format_ring(expr)
    assert parse_ring(text) == _canonical(expr)
    assert format_ring(parse_ring(text)) == text


def _canonical(expr):
    # nested products print with parentheses and reparse into the same tree
    if isinstance(expr, Product):
        return Product(tuple(_canonical(f) for f in expr.factors))
    return expr


@pytest.mark.parametrize("text", HOM_CORPUS)
def test_hom_round_trip(text):
    expr = parse_hom(text)
    assert parse_hom(format_hom(expr)) == expr
