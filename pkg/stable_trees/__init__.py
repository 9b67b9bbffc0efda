"""Stable trees by line-breaking, and conditioned Bienayme trees by codewords."""

__version__ = "0.3.0"

from stable_trees.discrete_trees import (  # noqa: E402
    OffspringLaw,
    grow_tree,
    prufer_decode,
    prufer_encode,
    sample_conditioned_degrees,
    stable_offspring,
    uniform_offspring,
)
from stable_trees.levy_paths import (  # noqa: E402
    importance_estimate,
    sample_subordinator_path,
    sigma_tilde_laplace,
    sigma_tilde_mean,
)
from stable_trees.linebreak import (  # noqa: E402
    LineBreakTree,
    build_tree,
    distance,
    sample_stable_tree_ensemble,
)
from stable_trees.stable_density import StableModel, get_model  # noqa: E402

__all__ = [
    "LineBreakTree",
    "OffspringLaw",
    "StableModel",
    "__version__",
    "build_tree",
    "distance",
    "get_model",
    "grow_tree",
    "importance_estimate",
    "prufer_decode",
    "prufer_encode",
    "sample_conditioned_degrees",
    "sample_stable_tree_ensemble",
    "sample_subordinator_path",
    "sigma_tilde_laplace",
    "sigma_tilde_mean",
    "stable_offspring",
    "uniform_offspring",
]
