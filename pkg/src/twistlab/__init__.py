"""twistlab: finite twist-structures over Heyting and topological Boolean
algebras, the modal translations between their logics, and exhaustive
small-instance verification of the correspondences connecting them."""

__version__ = "0.1.0"

from . import companions, formula, heyting, kripke, openpairs, order, \
    semantics, tba, twist

__all__ = [
    "__version__", "companions", "formula", "heyting", "kripke",
    "openpairs", "order", "semantics", "tba", "twist",
]
