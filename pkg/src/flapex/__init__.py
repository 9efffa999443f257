"""Flapped regular simplices, their expansions, and why continuous
expansions between them need twice the dimension."""

from .errors import FlapexError
from .expansion import expansion_report, flap_pair_gap
from .flaps import Configuration, FlapSpec, PointLabel, build_flapped_pair, flap_vertex
from .linalg import embedding_dimension, sym_eigen
from .motion import (
    alexander_motion,
    displacement_field,
    monotonicity_report,
    sample_motion,
    split_displacement,
)
from .obstruction import find_non_obtuse_pair, obstruction_pipeline, parallelogram_rigidity
from .search import optimize_expansion_path, violation_residual
from .simplex import outward_normal, regular_simplex

__version__ = "0.1.0"
