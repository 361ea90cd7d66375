import json

import pytest

from affscheme.errors import InvariantError
from affscheme.rings import poly_quotient, product, zmod
from affscheme.serialize import (compare_operators, presheaf_from_dict, presheaf_to_dict,
                                 ring_from_dict, ring_to_dict, spec_dot, spec_to_dict,
                                 topology_from_dict, topology_to_dict)
from affscheme.sheaves import preset_presheaf, presheaf_isomorphism
from affscheme.topology import builtin_space, spec


@pytest.mark.parametrize("ring", [zmod(12), poly_quotient(zmod(3), [1, 0, 1]),
                                  product(zmod(2), zmod(2))], ids=repr)
def test_ring_round_trip(ring):
    d = json.loads(json.dumps(ring_to_dict(ring)))
    back = ring_from_dict(d)
    assert back.add_table == ring.add_table and back.mul_table == ring.mul_table
    assert set(d) == {"order", "presentation", "add_table", "mul_table", "zero", "one"}


def test_ring_from_dict_validates():
    d = ring_to_dict(zmod(4))
    d["mul_table"][1][1] = 2
    with pytest.raises(InvariantError):
        ring_from_dict(d)


def test_topology_and_presheaf_round_trip():
    sp = builtin_space("chain3")
    assert topology_from_dict(topology_to_dict(sp)).opens == sp.opens
    f = preset_presheaf("tower-Z2", sp)
    g = presheaf_from_dict(json.loads(json.dumps(presheaf_to_dict(f))), sp)
    assert presheaf_isomorphism(f, g) is not None


def test_spec_json_and_dot():
    s = spec(zmod(12))
    d = spec_to_dict(s)
    assert d["points"] == [[0, 2, 4, 6, 8, 10], [0, 3, 6, 9]]
    assert d["opens"] == [list(o) for o in map(sorted, s.topology.opens)]
    dot = spec_dot(s)
    assert dot.startswith("digraph") and "p0" in dot and "u0 ->" in dot


def test_divergence_report_witnesses_revalidate():
    f = preset_presheaf("const-Z2", builtin_space("discrete3"))
    rep = compare_operators(f)
    assert not rep["agree"] and rep["orders"] == [2, 8] and rep["witness_open"] == [0, 1, 2]
    rep = compare_operators(preset_presheaf("const-Z2", builtin_space("discrete2")))
    assert rep["agree"] and rep["witness_open"] is None
