"""FastUMAP: landmark-based dimensionality reduction.

Builds a sparse point-to-landmark fuzzy graph, warm-starts the layout with a
Nystrom spectral projection of the landmark affinity, and refines every
coordinate with role-differentiated negative-sampling SGD. The landmark ratio
r = m/n trades runtime against fidelity.
"""

from __future__ import annotations

import numpy as np

from ._core import (
    __version__,
    default_landmark_budget,
    equivalence_check,
    fit_kernel_params,
    knn_accuracy,
    preprocess,
    run_pipeline,
    sample_landmarks,
)

__all__ = [
    "FastUMAP",
    "__version__",
    "default_landmark_budget",
    "equivalence_check",
    "fit_kernel_params",
    "knn_accuracy",
    "preprocess",
    "run_pipeline",
    "sample_landmarks",
]


class FastUMAP:
    """Scikit-learn style front end for the pipeline.

    Parameters mirror the command-line tool: give either ``landmarks`` or
    ``landmark_ratio`` (or neither for the capped-adaptive default budget).
    With ``deterministic=True`` identical seeds give identical embeddings.
    """

    def __init__(
        self,
        *,
        landmarks: int | None = None,
        landmark_ratio: float | None = None,
        landmark_cap: int = 5000,
        n_neighbors: int = 15,
        init: str = "spectral",
        force_mode: str = "hetero",
        epochs: int | None = None,
        learning_rate: float = 1.0,
        negative_rate: int = 5,
        min_dist_data: float = 0.1,
        min_dist_landmark: float = 0.2,
        deterministic: bool = True,
        threads: int = 1,
        seed: int = 42,
    ):
        if landmarks is not None and landmark_ratio is not None:
            raise ValueError("landmarks and landmark_ratio are mutually exclusive")
        self.landmarks = landmarks
        self.landmark_ratio = landmark_ratio
        self.landmark_cap = landmark_cap
        self.n_neighbors = n_neighbors
        self.init = init
        self.force_mode = force_mode
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.negative_rate = negative_rate
        self.min_dist_data = min_dist_data
        self.min_dist_landmark = min_dist_landmark
        self.deterministic = deterministic
        self.threads = threads
        self.seed = seed
        self.embedding_ = None
        self.timings_ = None
        self.m_ = None

    def fit_transform(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise ValueError("X must be a 2-D array of shape (n, d)")
        result = run_pipeline(
            X,
            landmarks=self.landmarks,
            landmark_ratio=self.landmark_ratio,
            landmark_cap=self.landmark_cap,
            n_neighbors=self.n_neighbors,
            init=self.init,
            force_mode=self.force_mode,
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            negative_rate=self.negative_rate,
            min_dist_data=self.min_dist_data,
            min_dist_landmark=self.min_dist_landmark,
            deterministic=self.deterministic,
            threads=self.threads,
            seed=self.seed,
        )
        self.embedding_ = np.asarray(result["embedding"])
        self.timings_ = dict(result["timings"])
        self.m_ = int(result["m"])
        return self.embedding_

    def fit(self, X: np.ndarray) -> "FastUMAP":
        self.fit_transform(X)
        return self
