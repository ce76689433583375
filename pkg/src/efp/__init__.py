"""Unit-demand envy-free pricing laboratory.

Market instance generators, five equivalent MIP formulations, a
self-contained LP/MIP solver, and geometric price rounding with proven
profit-loss factors.
"""

from .allocation import (
    Outcome,
    allocation_brute_force,
    best_response,
    envy_free_allocation,
    is_envy_free,
    profit,
)
from .core import (
    Allocation,
    DerivedConstants,
    Instance,
    Pricing,
    derive_constants,
    validate_instance,
)
from .fileio import load_instance, parse_instance, save_instance, serialize_instance
from .formulations import (
    ALL_KINDS,
    FormulationKind,
    MipModel,
    build,
    embed_outcome,
    export_lp_text,
    extract_outcome,
)
from .generators import (
    CharacteristicsConfig,
    NeighborhoodConfig,
    PopularityConfig,
    SeededRng,
    gen_characteristics,
    gen_neighborhood,
    gen_popularity,
    generate,
    preset,
)
from .geometric import (
    GeometricGrid,
    floor_geometric,
    guarantee_factor,
    round_pricing_eps,
    round_pricing_half,
)
from .oracle import brute_force_optimal
from .solver import (
    LpSolution,
    MipResult,
    RelaxationReport,
    compare_relaxations,
    find_strict_instance,
    primal_heuristic,
    solve_lp,
    solve_mip,
)

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "ALL_KINDS",
    "CharacteristicsConfig",
    "DerivedConstants",
    "FormulationKind",
    "GeometricGrid",
    "Instance",
    "LpSolution",
    "MipModel",
    "MipResult",
    "NeighborhoodConfig",
    "Outcome",
    "PopularityConfig",
    "Pricing",
    "RelaxationReport",
    "SeededRng",
    "allocation_brute_force",
    "best_response",
    "brute_force_optimal",
    "build",
    "compare_relaxations",
    "derive_constants",
    "embed_outcome",
    "envy_free_allocation",
    "export_lp_text",
    "extract_outcome",
    "find_strict_instance",
    "floor_geometric",
    "gen_characteristics",
    "gen_neighborhood",
    "gen_popularity",
    "generate",
    "guarantee_factor",
    "is_envy_free",
    "load_instance",
    "parse_instance",
    "preset",
    "primal_heuristic",
    "profit",
    "round_pricing_eps",
    "round_pricing_half",
    "save_instance",
    "serialize_instance",
    "solve_lp",
    "solve_mip",
    "validate_instance",
]
