"""Finite commutative rings, their prime spectra, and structure sheaves."""

__version__ = "0.1.0"

from .errors import (AffSchemeError, CapacityError, HomError, InvariantError, Limits,
                     VerificationError, limits, limits_override, set_limits)
from .rings import (FiniteRing, Ideal, RingHom, annihilator, classify_ideal, compose,
                    enumerate_ideals, ideal_from_generators, localize, localize_at_element,
                    localize_at_prime, poly_quotient, prime_ideals, product, quotient, radical,
                    ring_hom, zero_ring, zmod)
from .homs import count_homs, find_isomorphism, is_isomorphic, iter_homs, make_hom
from .topology import (ContinuousMap, FiniteTopology, SpecSpace, basic_open, builtin_space,
                       spec, spec_map, vanishing_set)
from .sheaves import (Presheaf, check_sheaf_axioms, check_universal_property, diagram_limit,
                      filtered_colimit, is_sheaf, make_presheaf, preset_presheaf,
                      presheaf_isomorphism, sheafify_proper_limit, sheafify_standard, stalk)
from .scheme import AffineScheme, affine_scheme, induced_morphism, verify_scheme
from .dsl import ParseError, SemanticError, build_hom, build_ring, parse_hom, parse_ring
