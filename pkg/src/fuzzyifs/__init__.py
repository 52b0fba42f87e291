"""Fuzzy iterated function systems on discretized compact domains."""
from .codespace import Address, attractor_via_projection, grey_limit, project
from .fuzzy_core import (
    CompactFuzzySet,
    FuzzySet,
    GreyLevelMap,
    GreySystem,
    Grid,
    alpha_cut,
    zadeh_image,
)
from .ifs_engine import (
    ComparisonFunction,
    ContractionMap,
    FuzzyIFS,
    fuzzy_hutchinson,
    fuzzy_hutchinson_cuts,
    fuzzy_hutchinson_pointwise,
    iterate_to_fixpoint,
)
from .metrics import (
    distance,
    fuzzy_hausdorff,
    hausdorff,
    hypo0_distance,
    hypo_distance,
    linf_distance,
    parse_metric,
)

__version__ = "0.1.0"
