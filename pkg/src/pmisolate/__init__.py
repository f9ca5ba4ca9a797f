"""Perfect-matching isolation for bipartite graphs on bounded-genus surfaces."""

from .decider import decide_pm, exact_determinant
from .oracle import enumerate_pms
from .psg import load_psg, parse_psg, save_psg, serialize_psg
from .schema import EmbeddedGraph, Signature, normalize
from .weights import build_family, combine

__all__ = [
    "EmbeddedGraph",
    "Signature",
    "build_family",
    "combine",
    "decide_pm",
    "enumerate_pms",
    "exact_determinant",
    "load_psg",
    "normalize",
    "parse_psg",
    "save_psg",
    "serialize_psg",
]

__version__ = "0.1.0"
