"""JSON and DOT encodings of rings, spaces, presheaves and comparison reports."""

from __future__ import annotations

import json
from typing import Any

from .errors import InvariantError
from .homs import find_isomorphism
from .rings import FiniteRing, RingHom, ring_axiom_violation
from .sheaves import (Presheaf, check_sheaf_axioms, make_presheaf, presheaf_isomorphism,
                      sheafify_proper_limit, sheafify_standard, stalk_map)
from .topology import FiniteTopology, SpecSpace, _sort_key


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def ring_to_dict(ring: FiniteRing) -> dict:
    return {"order": ring.order, "presentation": ring.presentation,
            "add_table": [list(r) for r in ring.add_table],
            "mul_table": [list(r) for r in ring.mul_table],
            "zero": ring.zero, "one": ring.one}


def ring_from_dict(d: dict) -> FiniteRing:
    add = tuple(tuple(int(x) for x in row) for row in d["add_table"])
    mul = tuple(tuple(int(x) for x in row) for row in d["mul_table"])
    if "order" in d and d["order"] != len(add):
        raise InvariantError("order does not match the table size")
    ring = FiniteRing(add, mul, int(d["zero"]), int(d["one"]), presentation=d.get("presentation", ""))
    bad = ring_axiom_violation(ring)
    if bad is not None:
        raise InvariantError(f"tables fail the ring axiom '{bad[0]}' at {bad[1]}")
    return ring


def topology_to_dict(top: FiniteTopology) -> dict:
    return {"name": top.name, "point_count": top.point_count,
            "opens": [sorted(o) for o in top.opens]}


def topology_from_dict(d: dict) -> FiniteTopology:
    return FiniteTopology(int(d["point_count"]), tuple(frozenset(o) for o in d["opens"]),
                          name=d.get("name", ""))


def spec_to_dict(space: SpecSpace) -> dict:
    ring = space.ring
    return {"ring": ring.presentation,
            "points": [list(p.key) for p in space.points],
            "point_labels": [[ring.format(a) for a in p.key] for p in space.points],
            "opens": [sorted(o) for o in space.topology.opens],
            "discrete": space.topology.is_discrete()}


def hom_to_dict(h: RingHom) -> dict:
    return {"source": h.source.presentation, "target": h.target.presentation,
            "table": list(h.table)}


def presheaf_to_dict(f: Presheaf) -> dict:
    opens = list(f.space.opens)
    return {
        "name": f.name,
        "space": topology_to_dict(f.space),
        "opens": [sorted(o) for o in opens],
        "sections": [ring_to_dict(f.section(o)) for o in opens],
        "restrictions": [{"from": sorted(u), "to": sorted(v), "table": list(h.table)}
                         for (u, v), h in sorted(f.restrictions.items(),
                                                 key=lambda kv: (_sort_key(kv[0][0]), _sort_key(kv[0][1])))],
    }


def presheaf_from_dict(d: dict, space: FiniteTopology | None = None) -> Presheaf:
    if space is None:
        space = topology_from_dict(d["space"])
    opens = [frozenset(o) for o in d["opens"]]
    if set(opens) != set(space.opens):
        raise InvariantError("presheaf opens do not match the space")
    secs = {o: ring_from_dict(r) for o, r in zip(opens, d["sections"])}
    res = {}
    for entry in d.get("restrictions", []):
        u, v = frozenset(entry["from"]), frozenset(entry["to"])
        res[(u, v)] = RingHom(secs[u], secs[v], tuple(int(x) for x in entry["table"]))
    return make_presheaf(space, secs, res, name=d.get("name", ""))


def compare_operators(f: Presheaf, include_empty: bool = False) -> dict:
    """Run both sheafification operators and report where they disagree."""
    proper, theta_p = sheafify_proper_limit(f, include_empty=include_empty)
    standard, theta_s = sheafify_standard(f)
    witness_open = None
    orders = None
    for u in sorted(f.space.opens, key=_sort_key, reverse=True):
        a, b = proper.section(u), standard.section(u)
        if a.order != b.order or find_isomorphism(a, b) is None:
            witness_open, orders = sorted(u), [a.order, b.order]
            break
    agree = witness_open is None and presheaf_isomorphism(proper, standard) is not None
    if witness_open is None and not agree:
        full = f.space.full
        witness_open = sorted(full)
        orders = [proper.section(full).order, standard.section(full).order]
    stalk_violations = [x for x in f.space.points if not stalk_map(theta_p, x).is_bijective]
    return {
        "space": topology_to_dict(f.space),
        "presheaf": f.name,
        "operator_a": "paper",
        "operator_b": "standard",
        "convention": "include-empty" if include_empty else "nonempty-proper, minimal opens kept",
        "agree": agree,
        "witness_open": witness_open,
        "orders": orders,
        "input_is_sheaf": check_sheaf_axioms(f, "basis").is_sheaf,
        "operator_a_is_sheaf": check_sheaf_axioms(proper, "basis").is_sheaf,
        "operator_b_is_sheaf": check_sheaf_axioms(standard, "basis").is_sheaf,
        "operator_a_stalk_violations": stalk_violations,
        "operator_b_stalk_violations": [x for x in f.space.points
                                        if not stalk_map(theta_s, x).is_bijective],
    }


def spec_dot(space: SpecSpace) -> str:
    """Specialization order of the points plus the Hasse diagram of the opens."""
    top = space.topology
    ring = space.ring
    lines = ["digraph spec {", '  rankdir="BT";', "  subgraph cluster_points {",
             '    label="points";']
    for i, p in enumerate(space.points):
        label = "{" + ",".join(ring.format(a) for a in p.key) + "}"
        lines.append(f'    p{i} [label="{label}"];')
    for i in top.points:
        for j in top.points:
            if i != j and top.specializes(i, j):
                lines.append(f"    p{i} -> p{j};")
    lines += ["  }", "  subgraph cluster_opens {", '    label="opens";']
    opens = list(top.opens)
    for k, o in enumerate(opens):
        lines.append(f'    u{k} [label="{{{",".join(str(x) for x in sorted(o))}}}"];')
    for a, o in enumerate(opens):
        for b, q in enumerate(opens):
            if o < q and not any(o < r < q for r in opens):
                lines.append(f"    u{a} -> u{b};")
    lines += ["  }", "}"]
    return "\n".join(lines) + "\n"
