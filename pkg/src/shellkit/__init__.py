"""Lexicographic shellability toolkit for finite bounded posets."""

from .errors import ShellkitError
from .labelings import (
    ChainEdgeLabeling,
    CheckReport,
    EdgeLabeling,
    LabelAlphabet,
    Witness,
    check_CC,
    check_CL,
    check_EC,
    check_EL,
    check_self_consistency,
    check_topological_CL,
    check_UE,
    lex_chain_order,
)
from .orderings import (
    ChainAtomOrdering,
    check_GRAO,
    check_RAO,
    fg_sets,
    grao_to_cc,
    labeling_to_grao,
    rao_to_cc,
    rao_to_cl,
    reorder,
    restrict_cao,
    search_GRAO,
    search_RAO,
    swap_atoms,
)
from .poset import Poset, build_poset
from .shelling import FacetList, is_shelling, mobius_via_descents, order_complex_facets, reduced_euler

__version__ = "0.1.0"
