"""Command line driver.

Exit status: 0 all checks pass, 1 a check produced a failure or divergence
witness, 2 parse or semantic error, 3 capacity guard.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .dsl import CORPUS, build_hom, build_ring, evaluate
from .errors import (AffSchemeError, CapacityError, HomError, InvariantError, VerificationError,
                     limits_override)
from .rings import classify_ideal, enumerate_ideals, localize_at_element, localize_at_prime
from .scheme import affine_scheme, induced_morphism, verify_scheme
from .serialize import (compare_operators, dumps, hom_to_dict, presheaf_from_dict,
                        presheaf_to_dict, ring_to_dict, spec_dot, spec_to_dict, topology_from_dict)
from .sheaves import (check_sheaf_axioms, preset_presheaf, sheafify_proper_limit,
                      sheafify_standard, stalk)
from .topology import BUILTIN_SPACES, basic_open, builtin_space, spec

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_CAPACITY = 0, 1, 2, 3


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(dumps({"error": message, "kind": "usage"}))
        sys.exit(EXIT_PARSE)


def _emit(doc) -> None:
    sys.stdout.write(dumps(doc) + "\n")


def _cmd_spec(args) -> int:
    _emit(spec_to_dict(spec(build_ring(args.ring))))
    return EXIT_OK


def _cmd_ideals(args) -> int:
    ring = build_ring(args.ring)
    out = []
    for i in enumerate_ideals(ring):
        c = classify_ideal(ring, i)
        out.append({"members": list(i.key), "labels": [ring.format(a) for a in i.key],
                    "proper": c.is_proper, "prime": c.is_prime, "maximal": c.is_maximal})
    _emit({"ring": ring.presentation, "ideals": out})
    return EXIT_OK


def _cmd_localize(args) -> int:
    ring = build_ring(args.ring)
    if args.at_prime is not None:
        space = spec(ring)
        if not 0 <= args.at_prime < len(space.points):
            raise InvariantError(f"no point {args.at_prime}; Spec has {len(space.points)} points")
        loc = localize_at_prime(ring, space.points[args.at_prime])
    else:
        loc = localize_at_element(ring, evaluate(ring, args.at_element))
    _emit({"base": ring.presentation,
           "denominators": [ring.format(a) for a in sorted(loc.denominators)],
           "result": ring_to_dict(loc.result),
           "elements": [loc.result.format(a) for a in loc.result.elements],
           "map": list(loc.map.table)})
    return EXIT_OK


def _parse_open(s, text: str):
    if text.startswith("f="):
        return basic_open(s.space, evaluate(s.ring, text[2:])).members
    pts = frozenset(int(t) for t in text.split(",") if t.strip()) if text.strip() else frozenset()
    if not s.space.topology.is_open(pts):
        raise InvariantError(f"{sorted(pts)} is not an open of Spec {s.ring.presentation}")
    return pts


def _cmd_sections(args) -> int:
    s = affine_scheme(build_ring(args.ring))
    u = _parse_open(s, args.open)
    sec = s.section(u)
    _emit({"ring": s.ring.presentation, "open": sorted(u), "section": ring_to_dict(sec),
           "elements": [sec.format(a) for a in sec.elements]})
    return EXIT_OK


def _cmd_stalk(args) -> int:
    s = affine_scheme(build_ring(args.ring))
    if not 0 <= args.point < len(s.space.points):
        raise InvariantError(f"no point {args.point}; Spec has {len(s.space.points)} points")
    st = stalk(s.structure_sheaf, args.point)
    _emit({"ring": s.ring.presentation, "point": args.point, "stalk": ring_to_dict(st.ring),
           "colimit_order": st.colimit.order})
    return EXIT_OK


def _cmd_verify(args) -> int:
    rings = list(args.rings) + (list(CORPUS) if args.corpus else [])
    if not rings:
        raise InvariantError("give at least one ring or --corpus")
    reports = []
    for text in rings:
        reports.extend(verify_scheme(build_ring(text), args.check))
    failed = [r for r in reports if r["status"] != "pass"]
    _emit({"reports": reports, "checks": len(reports), "failed": len(failed),
           "status": "pass" if not failed else "fail"})
    return EXIT_OK if not failed else EXIT_FAIL


def _cmd_morphism(args) -> int:
    m = induced_morphism(build_hom(args.hom))
    _emit({**m.report, "inducing_hom": hom_to_dict(m.inducing_hom)})
    return EXIT_OK if m.report["status"] == "pass" else EXIT_FAIL


def _load_space(text: str):
    if text in BUILTIN_SPACES:
        return builtin_space(text)
    return topology_from_dict(json.loads(Path(text).read_text()))


def _cmd_sheafify(args) -> int:
    space = _load_space(args.space)
    if Path(args.presheaf).is_file():
        f = presheaf_from_dict(json.loads(Path(args.presheaf).read_text()), space)
    else:
        f = preset_presheaf(args.presheaf, space)
    if args.operator == "both":
        report = compare_operators(f, include_empty=args.include_empty)
        _emit(report)
        return EXIT_OK if report["agree"] else EXIT_FAIL
    if args.operator == "standard":
        out, _ = sheafify_standard(f)
    else:
        out, _ = sheafify_proper_limit(f, include_empty=args.include_empty)
    _emit({"operator": args.operator, "is_sheaf": check_sheaf_axioms(out, "basis").is_sheaf,
           "presheaf": presheaf_to_dict(out)})
    return EXIT_OK


def _cmd_export(args) -> int:
    space = spec(build_ring(args.ring))
    if args.dot:
        Path(args.dot).write_text(spec_dot(space))
        _emit({"ring": space.ring.presentation, "dot": args.dot})
    else:
        _emit(spec_to_dict(space))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _ArgParser(prog="affscheme", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--max-order", type=int, default=None, help="largest ring order built")
    p.add_argument("--max-ideals", type=int, default=None, help="largest ideal count enumerated")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_ArgParser)

    c = sub.add_parser("spec", help="points and topology of Spec")
    c.add_argument("ring")
    c.set_defaults(func=_cmd_spec)

    c = sub.add_parser("ideals", help="all ideals with their classification")
    c.add_argument("ring")
    c.set_defaults(func=_cmd_ideals)

    c = sub.add_parser("localize", help="localize at a prime (by point index) or an element")
    c.add_argument("ring")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--at-prime", type=int)
    g.add_argument("--at-element")
    c.set_defaults(func=_cmd_localize)

    c = sub.add_parser("sections", help="structure sheaf sections over an open")
    c.add_argument("ring")
    c.add_argument("--open", required=True, help="comma-separated point indices, or f=<element>")
    c.set_defaults(func=_cmd_sections)

    c = sub.add_parser("stalk", help="stalk of the structure sheaf at a point")
    c.add_argument("ring")
    c.add_argument("--point", type=int, required=True)
    c.set_defaults(func=_cmd_stalk)

    c = sub.add_parser("verify", help="run the scheme checks")
    c.add_argument("rings", nargs="*")
    c.add_argument("--corpus", action="store_true", help="also verify the built-in ring corpus")
    c.add_argument("--check", choices=["lemma31", "prop32", "corollary", "all"], default="all")
    c.set_defaults(func=_cmd_verify)

    c = sub.add_parser("morphism", help="induced morphism of affine schemes")
    c.add_argument("hom")
    c.set_defaults(func=_cmd_morphism)

    c = sub.add_parser("sheafify", help="apply a sheafification operator")
    c.add_argument("--space", required=True, help=f"builtin ({', '.join(BUILTIN_SPACES)}) or JSON file")
    c.add_argument("--presheaf", required=True, help="preset name or JSON presheaf dump")
    c.add_argument("--operator", choices=["paper", "standard", "both"], default="both")
    c.add_argument("--include-empty", action="store_true",
                   help="index proper-subset limits by all proper opens, the empty one included")
    c.set_defaults(func=_cmd_sheafify)

    c = sub.add_parser("export", help="export Spec as JSON or DOT")
    c.add_argument("ring")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--dot", metavar="FILE")
    g.add_argument("--json", action="store_true")
    c.set_defaults(func=_cmd_export)
    return p


def run_command(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {}
    if args.max_order is not None:
        overrides["max_order"] = args.max_order
    if args.max_ideals is not None:
        overrides["max_ideals"] = args.max_ideals
    try:
        with limits_override(**overrides):
            return args.func(args)
    except CapacityError as exc:
        _emit({"error": str(exc), "kind": "capacity"})
        return EXIT_CAPACITY
    except VerificationError as exc:
        _emit({"error": str(exc), "kind": "verification", "witness": exc.witness})
        return EXIT_FAIL
    except HomError as exc:
        _emit({"error": str(exc), "kind": "homomorphism", "witness": exc.witness})
        return EXIT_PARSE
    except (AffSchemeError, KeyError, ValueError, OSError) as exc:
        doc = {"error": str(exc), "kind": type(exc).__name__}
        if getattr(exc, "offset", None) is not None:
            doc["offset"] = exc.offset
        _emit(doc)
        return EXIT_PARSE


def main() -> None:
    sys.exit(run_command())
