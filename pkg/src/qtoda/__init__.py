"""Exact quantum cohomology relations of flag manifolds and the conserved
quantities of the open and periodic Toda lattices."""

from .laxdet import (
    ConservedSet,
    LaxMatrix,
    Variant,
    build_lax,
    char_poly,
    conserved,
    open_char_poly_recursive,
    periodic_from_open,
)
from .operators import Kind, OperatorChain, apply_chain, apply_D, apply_delta
from .polyring import Polynomial, PolyError, VarUniverse
from .quantumrel import (
    Boundary,
    Family,
    RelationFamily,
    ev_c_from_quantum,
    ev_q_normal_form,
    qs_family,
    qs_hat_family,
    s_poly,
    to_y_basis,
)

__version__ = "0.1.0"


def clear_caches() -> None:
    """Drop memoised relation families and determinants."""
    from . import laxdet, quantumrel

    for fn in (
        laxdet._char_poly_cached,
        laxdet.conserved,
        laxdet.open_char_poly_recursive,
        laxdet.periodic_from_open,
        quantumrel.s_poly,
        quantumrel.qs_family,
        quantumrel.qs_hat_family,
    ):
        fn.cache_clear()
