"""Guided projections for structure discovery in high-dimensional data.

Observations are ordered so that consecutive windows of ``q`` observations
span similar subspaces; each observation is then represented by its
orthogonal distance to every window. The package also ships the competing
transforms, cluster validity indices, synthetic benchmark generators, a
grid-search benchmark harness, an SVG diagnostic plot and a command line.
"""

from .baselines import TransformResult, diffusion_map, pca_transform, random_projection
from .data import DataMatrix, read_csv
from .diagnostics import PlotSpec, diagnostic_svg
from .errors import (
    DegenerateKernelError,
    DegenerateSelectionError,
    GuidedProjectionError,
    InvalidConfigError,
    InvalidDataError,
    InvalidSelectionError,
    UndefinedIndexError,
)
from .projection import OSDKind, Projection, fit_projection
from .sequencer import (
    GPMatrix,
    GuidedSequence,
    SequencerConfig,
    build_sequence,
    guided_projections,
    transform,
)
from .simulation import (
    Setup1Spec,
    Setup2Spec,
    expected_group_distance,
    gen_setup1,
    gen_setup2,
    random_covariance,
)
from .validity import (
    ValidationReport,
    WardTree,
    c_index,
    evaluate,
    f_measure,
    gamma_index,
    silhouette_index,
)

__version__ = "0.1.0"
