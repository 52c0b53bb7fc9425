"""Exact computations with equivariant coefficient systems over finite groups.

Subgroup lattices, G-sets and Burnside rings, spans, coefficient systems with
induction/restriction/conjugation, projective modules over coefficient rings
with their isotropy splitting, and chain-level linearization of G-simplicial
complexes.  All arithmetic is over the integers.
"""

from .groups import FiniteGroup, Subgroup, SubgroupLattice, build_group, class_names
from .gsets import GSet, GMap, BurnsideElement, burnside_from_marks, orbit_decomposition, table_of_marks
from .spans import Span, compose_spans, make_span
from .coeff import CoefficientRing, CoefficientSystem, CoeffMorphism, free_system
from .functors import double_coset_iso, frobenius_iso, induce_system, restrict_system, span_functor
from .modules import ProjectiveModule, isotropy_split, k0_class_vector
from .gcw import equivariant_euler_class, euler_marks
from .suites import SUITES, run_suite

__version__ = "0.1.0"

__all__ = [
    "FiniteGroup", "Subgroup", "SubgroupLattice", "build_group", "class_names",
    "GSet", "GMap", "BurnsideElement", "burnside_from_marks", "orbit_decomposition", "table_of_marks",
    "Span", "compose_spans", "make_span",
    "CoefficientRing", "CoefficientSystem", "CoeffMorphism", "free_system",
    "double_coset_iso", "frobenius_iso", "induce_system", "restrict_system", "span_functor",
    "ProjectiveModule", "isotropy_split", "k0_class_vector",
    "equivariant_euler_class", "euler_marks",
    "SUITES", "run_suite",
]
