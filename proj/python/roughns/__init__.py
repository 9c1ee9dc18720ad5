"""Spectral Galerkin toolkit for Navier-Stokes with rough transport noise."""

from roughns._core import (
    GridPath,
    ModeBasis,
    RoughLift,
    SpectralField,
    Trajectory,
    advect_constant,
    build_divfree_basis,
    build_gradient_basis,
    dyadic_times,
    energy_defect,
    leray_project,
    lift_piecewise_linear,
    mollify_driver,
    nonlinear_term,
    p_variation,
    sample_gaussian_driver,
    sewing_integrate,
    shifted_taylor_green,
    simulate,
    smoothing_apply,
    sobolev_norm,
    taylor_green,
    trilinear_b,
)

__all__ = [
    "GridPath",
    "ModeBasis",
    "RoughLift",
    "SpectralField",
    "Trajectory",
    "advect_constant",
    "build_divfree_basis",
    "build_gradient_basis",
    "dyadic_times",
    "energy_defect",
    "leray_project",
    "lift_piecewise_linear",
    "mollify_driver",
    "nonlinear_term",
    "p_variation",
    "sample_gaussian_driver",
    "sewing_integrate",
    "shifted_taylor_green",
    "simulate",
    "smoothing_apply",
    "sobolev_norm",
    "taylor_green",
    "trilinear_b",
]
