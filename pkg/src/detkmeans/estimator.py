"""scikit-learn compatible wrappers around the seeders and Lloyd's algorithm."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from ._validation import check_method, check_n_clusters
from .initdet import Centers, initialize
from .lloyd import KMeansConfig, _nearest, kmeans
from .metrics import sse


class MinMaxNormalizer(TransformerMixin, BaseEstimator):
    """Rescale each feature to [0, 1] using the range seen in ``fit``.

    Features that are constant in the training data map to 0.
    """

    def fit(self, X, y=None):
        X = validate_data(self, X, dtype=np.float64)
        self.data_min_ = X.min(axis=0)
        self.data_range_ = X.max(axis=0) - self.data_min_
        return self

    def transform(self, X):
        check_is_fitted(self, "data_range_")
        X = validate_data(self, X, dtype=np.float64, reset=False)
        const = self.data_range_ == 0
        out = (X - self.data_min_) / np.where(const, 1.0, self.data_range_)
        out[:, const] = 0.0
        return out


class DeterministicKMeans(ClusterMixin, TransformerMixin, BaseEstimator):
    """K-means seeded by one of the deterministic initializers.

    Parameters
    ----------
    n_clusters : int, default=8
    init : {"mm", "kk", "vp", "pp", "ms", "ms+"} or array of shape (n_clusters, n_features)
        Seeding method, or explicit initial centers.
    max_iter : int, default=100
    epsilon : float, default=1e-6
        Relative SSE improvement below which iterations stop.

    Attributes
    ----------
    cluster_centers_ : ndarray of shape (n_clusters, n_features)
    labels_ : ndarray of shape (n_samples,)
    inertia_ : float
        Final SSE.
    init_centers_ : ndarray of shape (n_clusters, n_features)
    init_inertia_ : float
        SSE of the seeds under nearest-center assignment.
    n_iter_ : int
    sse_trace_ : list of float
    converged_by_ : {"epsilon", "max_iterations"}
    """

    def __init__(self, n_clusters=8, init="pp", max_iter=100, epsilon=1e-6):
        self.n_clusters = n_clusters
        self.init = init
        self.max_iter = max_iter
        self.epsilon = epsilon

    def _seed(self, X):
        if isinstance(self.init, str):
            k = check_n_clusters(self.n_clusters, X.shape[0])
            return initialize(X, k, check_method(self.init))
        seeds = np.asarray(self.init, dtype=np.float64)
        if seeds.ndim != 2 or seeds.shape[1] != X.shape[1]:
            raise ValueError(f"init centers must have shape (K, {X.shape[1]}), got {seeds.shape}")
        if seeds.shape[0] != self.n_clusters:
            raise ValueError(f"init has {seeds.shape[0]} centers but n_clusters={self.n_clusters}")
        check_n_clusters(self.n_clusters, X.shape[0])
        return Centers(seeds, "user")

    def fit(self, X, y=None):
        X = validate_data(self, X, dtype=np.float64)
        config = KMeansConfig(max_iterations=self.max_iter, epsilon=self.epsilon)
        seeds = self._seed(X)
        run = kmeans(X, seeds, config)
        self.init_centers_ = np.array(seeds.points)
        self.init_inertia_ = sse(X, seeds)
        self.cluster_centers_ = np.array(run.centers.points)
        self.labels_ = run.assignment.labels
        self.inertia_ = run.final_sse
        self.sse_trace_ = list(run.sse_trace)
        self.n_iter_ = run.iterations
        self.converged_by_ = run.converged_by
        return self

    def predict(self, X):
        check_is_fitted(self, "cluster_centers_")
        X = validate_data(self, X, dtype=np.float64, reset=False)
        labels, _ = _nearest(X, self.cluster_centers_)
        return labels

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_

    def transform(self, X):
        """Euclidean distance from every sample to every center."""
        check_is_fitted(self, "cluster_centers_")
        X = validate_data(self, X, dtype=np.float64, reset=False)
        diff = X[:, None, :] - self.cluster_centers_[None, :, :]
        return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))

    def score(self, X, y=None):
        """Negative SSE of ``X`` against the fitted centers."""
        check_is_fitted(self, "cluster_centers_")
        X = validate_data(self, X, dtype=np.float64, reset=False)
        return -sse(X, self.cluster_centers_)
