"""Order book chain, its branching random walk representation and phase studies."""

from ._lobtree import (
    __version__,
    classify,
    coupled_run,
    drift_estimate,
    execute,
    infimum_mgf,
    simulate,
    survival_estimate,
)

__all__ = [
    "__version__",
    "classify",
    "coupled_run",
    "drift_estimate",
    "execute",
    "infimum_mgf",
    "simulate",
    "survival_estimate",
]
