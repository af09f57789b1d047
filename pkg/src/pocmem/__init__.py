"""Poc-sets, their dual median graphs, and observers that update by excitation propagation."""
from .pocset import (
    ClosureError,
    MorphismError,
    PairRelation,
    PocMorphism,
    PocSet,
    PocSetError,
    classify_pair,
    close_order,
    compose,
    neg,
    validate,
)
from .median import (
    Corner,
    MedianGraph,
    SizeGuardError,
    build_dual,
    convex_hull,
    corner,
    distance,
    dual_morphism,
    halfspace_pocset,
    interval,
    is_cut_edge_element,
    median,
)
from .realization import (
    Realization,
    World,
    is_consistent,
    objective_excitation,
    pi_x,
    visible_graph,
)
from .observer import (
    ChargeBudget,
    HopBudget,
    Observer,
    UpdateReport,
    coherence_check,
    misperception_report,
    prob,
    update_dissipative,
    update_idealized,
)
from .deformation import (
    DeformationMove,
    MoveLog,
    Retraction,
    apply_degeneration,
    apply_expansion,
    audit_postulate,
    degenerate,
    degeneration_candidates,
    expand,
    transport_weights,
)
from . import catalog

__version__ = "0.1.0"
