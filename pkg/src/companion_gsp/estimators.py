"""scikit-learn style transformers over a fixed shift graph.

Rows of ``X`` are graph signals (n_samples x N).  ``fit`` decomposes the
shift; ``transform`` converts every row between two representations.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils import check_array
from sklearn.utils.validation import check_is_fitted

from .companion import to_representation
from .errors import InputError
from .graph_model import EIG_TOL, GraphSignal, Rep, decompose, lsi_filter_apply


def _validate_rows(X, n: int) -> np.ndarray:
    if np.iscomplexobj(X):
        X = np.asarray(X, dtype=complex)
        if X.ndim == 1:
            raise InputError("expected a 2D array of signals (n_samples, N)")
        if X.ndim != 2 or not np.all(np.isfinite(X)):
            raise InputError("expected a finite 2D array of signals")
    else:
        try:
            X = check_array(X, dtype=float)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    if X.shape[1] != n:
        raise InputError(f"X has {X.shape[1]} features, but the graph has {n} vertices")
    return X


class RepresentationTransformer(TransformerMixin, BaseEstimator):
    """Convert signals from ``source`` to ``target`` coordinates (s, hat, p, q)."""

    def __init__(self, graph=None, source="s", target="p", method="barycentric", order="phase", eig_tol=EIG_TOL):
        self.graph = graph
        self.source = source
        self.target = target
        self.method = method
        self.order = order
        self.eig_tol = eig_tol

    def fit(self, X=None, y=None):
        if self.graph is None:
            raise InputError("RepresentationTransformer needs a graph")
        self.source_ = Rep.parse(self.source)
        self.target_ = Rep.parse(self.target)
        self.model_ = decompose(self.graph, eig_tol=self.eig_tol, order=self.order)
        self.n_features_in_ = self.model_.n
        if X is not None:
            _validate_rows(X, self.n_features_in_)
        return self

    def _convert(self, X, src: Rep, dst: Rep) -> np.ndarray:
        X = _validate_rows(X, self.n_features_in_)
        out = np.empty(X.shape, dtype=complex)
        for i, row in enumerate(X):
            out[i] = to_representation(GraphSignal(row, src, self.model_), dst, method=self.method).values
        return out

    def transform(self, X):
        check_is_fitted(self, "model_")
        return self._convert(X, self.source_, self.target_)

    def inverse_transform(self, X):
        check_is_fitted(self, "model_")
        return self._convert(X, self.target_, self.source_)


class LSIFilter(TransformerMixin, BaseEstimator):
    """Apply the polynomial filter ``sum_k coeffs[k] A^k`` to every row."""

    def __init__(self, graph=None, coeffs=(1.0,)):
        self.graph = graph
        self.coeffs = coeffs

    def fit(self, X=None, y=None):
        if self.graph is None:
            raise InputError("LSIFilter needs a graph")
        self.model_ = decompose(self.graph)
        self.n_features_in_ = self.model_.n
        return self

    def transform(self, X):
        check_is_fitted(self, "model_")
        X = _validate_rows(X, self.n_features_in_)
        out = np.empty(X.shape, dtype=complex)
        for i, row in enumerate(X):
            out[i] = lsi_filter_apply(self.model_, self.coeffs, GraphSignal(row, Rep.VERTEX, self.model_)).values
        return out
