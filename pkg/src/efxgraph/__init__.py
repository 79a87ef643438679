"""Fair allocation of indivisible items among agents placed on a graph.

Envy constraints apply only along graph edges.  Values are exact rationals.
"""

from .errors import FairDivisionError
from .graphs import Graph, make_complete, make_path, make_star
from .model import (
    Additive,
    Allocation,
    HiddenSet,
    Instance,
    Item,
    Kind,
    Lexicographic,
    Table,
    bundle_value,
    is_efx,
    is_g_efx,
    is_g_hef,
    strong_envy_amount,
)

__all__ = [
    "FairDivisionError",
    "Graph",
    "make_complete",
    "make_path",
    "make_star",
    "Additive",
    "Allocation",
    "HiddenSet",
    "Instance",
    "Item",
    "Kind",
    "Lexicographic",
    "Table",
    "bundle_value",
    "is_efx",
    "is_g_efx",
    "is_g_hef",
    "strong_envy_amount",
]
