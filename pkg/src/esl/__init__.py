"""Evolutionary simplicial learning.

Fits bounded, heterogeneously dimensional unions of simplices to data via
constrained sparse coding and an evolutionary search over hypergraph
structures. Applications: one-class outlier detection and multi-class
classification by per-class models.
"""

from .errors import (
    CsvParseError,
    EslError,
    InitializationError,
    InvalidInputError,
    ModelSchemaError,
    UnsupportedDimensionError,
)
from .evolution import EvolutionConfig, Member, Population, breed, evolve, init_population, kmeans, mutate
from .fitness import FitnessConfig, fitness_max, fitness_min
from .geometry import (
    Projection,
    cumulative_content,
    pairwise_sq_distances,
    project_onto_simplex,
    project_points_onto_simplex,
    pseudo_inverse,
    simplex_content,
)
from .model import (
    Dataset,
    Hypergraph,
    Simplicial,
    SparseCodes,
    encode,
    reconstruction_error,
    reconstruction_errors,
    update_vertices,
)
from .tasks import (
    EvalReport,
    MulticlassModel,
    auc_roc,
    classify_benchmark,
    fit_multiclass,
    fit_multiclass_with_history,
    fit_one_class,
    outlier_benchmark,
    outlier_scores,
    precision_at_n,
    predict,
    predict_batch,
    split_train_test,
)

__version__ = "0.1.0"
