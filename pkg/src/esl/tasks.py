"""Task-level APIs: one-class outlier scoring with AUC-ROC / precision-at-n,
per-class simplicial models for multi-class classification, and the
repeated-split evaluation protocols behind the CLI.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from ._util import derive_seed, parallel_map
from .data import apply_normalization, normalize
from .errors import InvalidInputError
from .evolution import EvolutionConfig, evolve
from .model import Dataset, Simplicial, reconstruction_error, reconstruction_errors


@dataclass
class MulticlassModel:
    """One simplicial per class label, trained generatively (each model only
    ever sees its own class)."""

    class_models: dict[int, Simplicial]
    config: EvolutionConfig

    def __post_init__(self):
        if len(self.class_models) < 2:
            raise InvalidInputError("a multiclass model needs at least two classes")
        dims = {m.dim for m in self.class_models.values()}
        if len(dims) != 1:
            raise InvalidInputError("all class models must share the ambient dimension")

    @property
    def labels(self) -> list[int]:
        return sorted(self.class_models)

    @property
    def dim(self) -> int:
        return next(iter(self.class_models.values())).dim


@dataclass
class EvalReport:
    """Aggregated outlier-detection metrics over repeated runs."""

    auc_roc: float
    precision_at_n: float
    runs: int
    per_run_scores: list[dict[str, float]]

    def __post_init__(self):
        if not (0.0 <= self.auc_roc <= 1.0):
            raise InvalidInputError("auc_roc must lie in [0, 1]")
        if self.runs < 1:
            raise InvalidInputError("runs must be >= 1")

    def stdev(self, metric: str) -> float:
        values = [run[metric] for run in self.per_run_scores]
        return statistics.pstdev(values) if len(values) > 1 else 0.0


def fit_one_class(data: Dataset, cfg: EvolutionConfig) -> Simplicial:
    """Learn a single simplicial describing (normalized) data; labels, if
    any, are ignored."""
    best, _ = evolve(data.without_labels(), cfg)
    return best


def outlier_scores(model: Simplicial, data: Dataset) -> np.ndarray:
    """Squared reconstruction error per sample; higher means more outlying."""
    return reconstruction_errors(data.points, model)


def _validate_binary(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(labels).ravel()
    if s.shape[0] != y.shape[0]:
        raise InvalidInputError("scores and labels must have equal length")
    if not np.isin(y, (0, 1)).all():
        raise InvalidInputError("labels must be binary (0 = inlier, 1 = outlier)")
    if (y == 1).sum() == 0 or (y == 0).sum() == 0:
        raise InvalidInputError("both classes must be present")
    return s, y.astype(int)


def auc_roc(scores, labels) -> float:
    """Rank-based (Mann-Whitney) area under the ROC curve; tied scores
    contribute one half through average ranks."""
    s, y = _validate_binary(scores, labels)
    order = np.argsort(s, kind="mergesort")
    sorted_s = s[order]
    new_group = np.r_[True, sorted_s[1:] != sorted_s[:-1]]
    group = np.cumsum(new_group) - 1
    counts = np.bincount(group)
    ends = np.cumsum(counts)
    avg_rank = ends - (counts - 1) / 2.0  # 1-based average rank per tie group
    ranks = np.empty_like(s)
    ranks[order] = avg_rank[group]
    n_pos = int((y == 1).sum())
    n_neg = y.shape[0] - n_pos
    return float((ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def precision_at_n(scores, labels) -> float:
    """Fraction of true outliers among the top-n scored points, n being the
    number of true outliers; ties at the cutoff go by original index."""
    s, y = _validate_binary(scores, labels)
    n_out = int((y == 1).sum())
    order = np.lexsort((np.arange(s.shape[0]), -s))
    return float((y[order[:n_out]] == 1).mean())


def split_train_test(data: Dataset, train_frac: float, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded uniform split; the first floor(train_frac * n) shuffled samples
    form the training side. Labels travel with their samples."""
    if not (0.0 < train_frac < 1.0):
        raise InvalidInputError("train_frac must lie strictly between 0 and 1")
    n = data.n_samples
    n_train = int(train_frac * n)
    if n_train == 0 or n_train == n:
        raise InvalidInputError(f"split of {n} samples at {train_frac} leaves one side empty")
    perm = np.random.default_rng(seed).permutation(n)
    return data.subset(perm[:n_train]), data.subset(perm[n_train:])


def fit_multiclass_with_history(
    data: Dataset, cfg: EvolutionConfig
) -> tuple[MulticlassModel, dict[int, list[float]]]:
    """Fit one simplicial per label, each on its own class subset only.

    Per-class seeds are derived deterministically from the master seed, so
    class fits are independent jobs. Also returns the per-generation
    best-fitness history of every class fit.
    """
    if data.labels is None:
        raise InvalidInputError("multiclass fitting requires labels")
    classes = sorted(int(v) for v in np.unique(data.labels))
    if len(classes) < 2:
        raise InvalidInputError("need at least two distinct labels")

    def fit_class(item):
        index, label = item
        subset = data.subset(data.labels == label).without_labels()
        best, history = evolve(subset, replace(cfg, seed=derive_seed(cfg.seed, index)))
        return label, best, history

    fitted = parallel_map(fit_class, list(enumerate(classes)))
    models = {label: best for label, best, _ in fitted}
    histories = {label: history for label, _, history in fitted}
    return MulticlassModel(models, cfg), histories


def fit_multiclass(data: Dataset, cfg: EvolutionConfig) -> MulticlassModel:
    """Fit one simplicial per label; see ``fit_multiclass_with_history``."""
    return fit_multiclass_with_history(data, cfg)[0]


def predict(model: MulticlassModel, y) -> int:
    """Label of the class model reconstructing y best; ties go to the lowest
    label."""
    best_label, best_err = None, np.inf
    for label in model.labels:
        err = reconstruction_error(y, model.class_models[label])
        if err < best_err:
            best_label, best_err = label, err
    return int(best_label)


def predict_batch(model: MulticlassModel, points) -> np.ndarray:
    """Vectorized ``predict`` over the columns of ``points``."""
    labels = model.labels
    errs = np.vstack([reconstruction_errors(points, model.class_models[c]) for c in labels])
    return np.asarray(labels)[errs.argmin(axis=0)]


def classification_accuracy(model: MulticlassModel, test: Dataset) -> float:
    if test.labels is None:
        raise InvalidInputError("accuracy needs labeled test data")
    return float((predict_batch(model, test.points) == test.labels).mean())


# --- evaluation protocols -----------------------------------------------------


def outlier_benchmark(
    data: Dataset,
    cfg: EvolutionConfig,
    runs: int = 10,
    train_frac: float = 0.6,
) -> EvalReport:
    """Repeated-split outlier detection protocol.

    Each run: split, min-max normalize on the training side, fit one-class
    (labels unseen), score the test side and measure AUC-ROC and
    precision-at-n against the test labels. Runs use seeds derived from
    ``cfg.seed`` and are independent jobs.
    """
    if data.labels is None:
        raise InvalidInputError("outlier evaluation requires labels")
    if runs < 1:
        raise InvalidInputError("runs must be >= 1")

    def one_run(r: int) -> dict[str, float]:
        seed = derive_seed(cfg.seed, r)
        train, test = split_train_test(data, train_frac, seed)
        norm_train, spec = normalize(train.without_labels())
        model = fit_one_class(norm_train, replace(cfg, seed=seed))
        scores = outlier_scores(model, apply_normalization(spec, test))
        return {
            "auc_roc": auc_roc(scores, test.labels),
            "precision_at_n": precision_at_n(scores, test.labels),
        }

    per_run = parallel_map(one_run, list(range(runs)))
    return EvalReport(
        auc_roc=float(np.mean([r["auc_roc"] for r in per_run])),
        precision_at_n=float(np.mean([r["precision_at_n"] for r in per_run])),
        runs=runs,
        per_run_scores=per_run,
    )


def classify_benchmark(
    data: Dataset,
    cfg: EvolutionConfig,
    runs: int = 10,
    train_frac: float = 0.6,
    test_data: Optional[Dataset] = None,
) -> list[float]:
    """Repeated multiclass accuracy protocol; returns one accuracy per run.

    Without an explicit test set each run uses a fresh seeded split;
    normalization is fitted on the training side only.
    """
    if data.labels is None:
        raise InvalidInputError("classification evaluation requires labels")
    if runs < 1:
        raise InvalidInputError("runs must be >= 1")

    def one_run(r: int) -> float:
        seed = derive_seed(cfg.seed, r)
        if test_data is None:
            train, test = split_train_test(data, train_frac, seed)
        else:
            train, test = data, test_data
        norm_points, spec = normalize(train.without_labels())
        norm_train = Dataset(norm_points.points, train.labels)
        model = fit_multiclass(norm_train, replace(cfg, seed=seed))
        return classification_accuracy(model, apply_normalization(spec, test))

    return parallel_map(one_run, list(range(runs)))
