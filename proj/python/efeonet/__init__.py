"""Enriched FEM operator networks for singularly perturbed convection-diffusion."""

from ._efeonet import (
    InvalidArgument,
    IoError,
    NumericalError,
    Oracle,
    __version__,
    assemble_matrix,
    discretize_forcing,
    evaluate_checkpoint,
    forcing_eval,
    relative_l2,
    run_experiment,
    sample_forcing,
    shishkin_mesh,
    shishkin_reference,
    solve_direct,
    swish,
    train,
    uniform_mesh,
)

__all__ = [
    "InvalidArgument",
    "IoError",
    "NumericalError",
    "Oracle",
    "__version__",
    "assemble_matrix",
    "discretize_forcing",
    "evaluate_checkpoint",
    "forcing_eval",
    "relative_l2",
    "run_experiment",
    "sample_forcing",
    "shishkin_mesh",
    "shishkin_reference",
    "solve_direct",
    "swish",
    "train",
    "uniform_mesh",
]
