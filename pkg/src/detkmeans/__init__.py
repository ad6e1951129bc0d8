"""Deterministic, order-invariant k-means seeding and a benchmark harness."""

from .dataset import (
    AttributeStats,
    DataError,
    Dataset,
    attribute_stats,
    centroid,
    load_csv,
    minmax_normalize,
    sq_euclidean,
)
from .datasets import load_breast_cancer_wisconsin, load_builtin, load_iris, load_ruspini, load_wine
from .estimator import DeterministicKMeans, MinMaxNormalizer
from .initdet import (
    METHODS,
    Centers,
    ConvergenceError,
    ProjectionPlan,
    SplitState,
    initialize,
    katsavounidis_init,
    maximin_init,
    maxisum_init,
    pca_part_init,
    pick_projection_axes,
    principal_eigenvector,
    select_split_cluster,
    var_part_init,
)
from .lloyd import Assignment, KMeansConfig, RunResult, assign, kmeans, update_centers
from .metrics import MethodScores, SummaryStats, five_number_summary, normalize_vs_worst, sse, stirling2

__version__ = "0.1.0"
