"""Shearer's measure, the Shearer parameter region and stochastic domination on finite graphs."""

from .bounds import (
    BoundReport,
    closed_forms,
    fp_check,
    kfuzz_halfball_brf,
    lll_check,
    thm2_vector,
)
from .domination import (
    CouplingPlan,
    UpSet,
    conditional_oracle,
    counterexample,
    dominated_value,
    enumerate_upsets,
    min_composition,
    necessary_check,
    russo_sample,
    strassen_dominates,
    upset_dominates,
)
from .errors import (
    CapExceeded,
    GraphError,
    MinorationViolated,
    NoEscape,
    OutsideRegion,
    PreconditionError,
    ShearerError,
)
from .graph import Graph, build_graph, enumerate_independent_sets, induced_subgraph, make_family
from .measure import (
    Dist,
    RegionStatus,
    boundary_crossing,
    construct_measure,
    escaping_order,
    intrinsic_vector,
    membership,
    or_composition,
    product,
    sample,
)
from .xi import XiCache, ovoep, xi_dc, xi_enumerate, xi_grid
from .z2 import GridShape, a_estimate, shape_ovoep, spiral_order, xi_log_density

__version__ = "0.1.0"
