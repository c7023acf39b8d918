"""Pseudo-spectral two-fluid Navier-Stokes-Maxwell simulator on the periodic torus."""

from .dynamics import (
    BULK_CURRENT,
    NORMALIZED,
    PHYSICAL,
    TRUNCATED,
    BulkCurrentState,
    Formulation,
    NsmState,
    PhysicalParams,
    from_bulk_current,
    rhs,
    rhs_bulk_current,
    to_bulk_current,
)
from .integrator import RK4_IF, RK4_PLAIN, StepperConfig, run, step
from .spectral import Grid, SpectralField

__all__ = [
    "BULK_CURRENT", "NORMALIZED", "PHYSICAL", "TRUNCATED",
    "BulkCurrentState", "Formulation", "NsmState", "PhysicalParams",
    "from_bulk_current", "rhs", "rhs_bulk_current", "to_bulk_current",
    "RK4_IF", "RK4_PLAIN", "StepperConfig", "run", "step",
    "Grid", "SpectralField",
]
