"""Constructive fixed-point solver for incompressible flow on a space-time box.

The pipeline: an exact reduced tableau for the governing equations, its
frequency-domain certification, potential/heat-kernel operators that carry a
forcing into velocity and pressure tables, a Picard iteration on the
quadratic advection correction, and reconstruction of the flow fields with
an end-to-end residual check.  Everything is driven by explicit envelope
constants: the solve refuses domains where the closing inequalities fail and
offers a partition into small-enough pieces instead.
"""

from .bounds import (BoundConstants, SmallnessReport, bound_constants,
                     heat_derivative_envelopes, smallness_check)
from .config import ConfigError, RunConfig, parse_config
from .dictionary import (BASE_SLOT, EXTENDED_DIM, PRODUCT_FACTORS, STATE_DIM,
                         Z_DESCRIPTORS, describe_slot, lookup_descriptor)
from .domain import Box, Domain, Grid, GridSpec, make_grid
from .engine import (HolderBudget, IterationRecord, IterationTrace,
                     PartitionResult, apply_g, forcing_potentials, g_parts,
                     holder_estimate, lift_h2, partition_domain, picard)
from .fields import NineField, ScalarField
from .heat import (GridHeatContext, HeatPropagator, heat_propagate,
                   heat_residual, phi_functions, phi_quadrature)
from .potential import (PotentialQuadrature, ball_box_union, domain_capacity,
                        newtonian_potential, poisson_residual)
from .presets import PRESETS, make_forcing
from .reconstruction import (FlowFields, PartitionError, PiecewiseFlowFields,
                             ResidualReport, assemble_global, ns_residual,
                             reconstruct)
from .spectral import (build_B, build_G, certify_frequencies, null_eta,
                       particular_Y1)
from .tableau import ConstantTableau, build_tableau, verify_tableau
from .wtables import SupportError, TableContext, W1Table, W2Table

__all__ = [
    "BoundConstants", "SmallnessReport", "bound_constants",
    "heat_derivative_envelopes", "smallness_check",
    "ConfigError", "RunConfig", "parse_config",
    "BASE_SLOT", "EXTENDED_DIM", "PRODUCT_FACTORS", "STATE_DIM",
    "Z_DESCRIPTORS", "describe_slot", "lookup_descriptor",
    "Box", "Domain", "Grid", "GridSpec", "make_grid",
    "HolderBudget", "IterationRecord", "IterationTrace", "PartitionResult",
    "apply_g", "forcing_potentials", "g_parts", "holder_estimate",
    "lift_h2", "partition_domain", "picard",
    "NineField", "ScalarField",
    "GridHeatContext", "HeatPropagator", "heat_propagate", "heat_residual",
    "phi_functions", "phi_quadrature",
    "PotentialQuadrature", "ball_box_union", "domain_capacity",
    "newtonian_potential", "poisson_residual",
    "PRESETS", "make_forcing",
    "FlowFields", "PartitionError", "PiecewiseFlowFields", "ResidualReport",
    "assemble_global", "ns_residual", "reconstruct",
    "build_B", "build_G", "certify_frequencies", "null_eta",
    "particular_Y1",
    "ConstantTableau", "build_tableau", "verify_tableau",
    "SupportError", "TableContext", "W1Table", "W2Table",
]

__version__ = "0.1.0"
