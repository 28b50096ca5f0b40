"""scikit-learn style wrappers around the pipeline stages.

Estimators take a :class:`CompactSetMask` (or a Whitney decomposition)
as ``X``; fitted results live in attributes with a trailing underscore.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import validation as val
from .geometry import rasterize, whitney
from .john import estimate_john_constant
from .potential.capacity import capacity_estimate
from .potential.cauchy import ComplexField, cauchy_transform
from .removability import nonremovability_witness, removability_report
from .simplify import build_graph, certify_graph, cut_slits, verify_simplified


class Rasterizer(BaseEstimator, TransformerMixin):
    """Shape spec -> CompactSetMask."""

    def __init__(self, level=9, half_side=None):
        self.level = level
        self.half_side = half_side

    def fit(self, X=None, y=None):
        val.check_level(self.level)
        return self

    def transform(self, X):
        from .geometry import Box

        box = None if self.half_side is None else Box((0.0, 0.0), self.half_side)
        return rasterize(X, self.level, box)


class WhitneyDecomposer(BaseEstimator, TransformerMixin):
    def __init__(self, deepest_level=None):
        self.deepest_level = deepest_level

    def fit(self, X, y=None):
        val.check_mask(X)
        self.decomposition_ = whitney(X, self.deepest_level)
        self.n_squares_ = len(self.decomposition_)
        return self

    def transform(self, X):
        return whitney(val.check_mask(X), self.deepest_level)


class JohnConstantEstimator(BaseEstimator):
    """Lower estimate of the John constant of one complementary component."""

    def __init__(self, center="inf", n_samples=64, seed=0):
        self.center = center
        self.n_samples = n_samples
        self.seed = seed

    def fit(self, X, y=None):
        w = X if hasattr(X, "side_pix") else whitney(val.check_mask(X))
        center = val.check_center(self.center)
        if self.n_samples is not None:
            val.check_int(self.n_samples, "n_samples", 1)
        self.estimate_ = estimate_john_constant(w, center, self.n_samples, val.check_seed(self.seed))
        self.epsilon_ = self.estimate_.epsilon_lower
        return self

    def predict(self, X=None):
        check_is_fitted(self, "epsilon_")
        return self.epsilon_


class CapacityEstimator(BaseEstimator):
    def __init__(self, method="energy", n_points=None, seed=0):
        self.method = method
        self.n_points = n_points
        self.seed = seed

    def fit(self, X, y=None):
        val.check_mask(X)
        self.estimate_ = capacity_estimate(X, self.method, self.n_points, val.check_seed(self.seed))
        self.capacity_ = self.estimate_.value
        return self

    def predict(self, X=None):
        check_is_fitted(self, "capacity_")
        return self.capacity_


class DomainSimplifier(BaseEstimator, TransformerMixin):
    """Slit surgery on the unbounded complementary component."""

    def __init__(self, A=8.0, delta=0.1, n_max=None, john_samples=32, seed=0):
        self.A = A
        self.delta = delta
        self.n_max = n_max
        self.john_samples = john_samples
        self.seed = seed

    def fit(self, X, y=None):
        w = X if hasattr(X, "side_pix") else whitney(val.check_mask(X))
        val.check_scalar(self.A, "A", 2)
        val.check_scalar(self.delta, "delta", 0, low_open=True)
        self.graph_ = build_graph(w, self.A, self.n_max)
        self.certificate_ = certify_graph(w, self.graph_)
        self.domain_ = cut_slits(w, self.graph_, self.delta)
        return self

    def transform(self, X=None):
        check_is_fitted(self, "domain_")
        return self.domain_

    def verify(self):
        check_is_fitted(self, "domain_")
        return verify_simplified(self.domain_, self.john_samples, val.check_seed(self.seed))


class CauchyTransformer(BaseEstimator, TransformerMixin):
    """ComplexField density -> its Cauchy transform."""

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        if not isinstance(X, ComplexField):
            raise val.ParameterError("expected a ComplexField density")
        return cauchy_transform(X)


class RemovabilityExperiment(BaseEstimator):
    def __init__(self, trace="fourier", n_list=(4, 8, 16, 32), seed=0):
        self.trace = trace
        self.n_list = n_list
        self.seed = seed

    def fit(self, X, y=None):
        val.check_mask(X)
        self.report_ = removability_report(X, self.trace, val.check_n_list(self.n_list),
                                           val.check_seed(self.seed))
        self.verdict_gap_ = list(self.report_.verdict_gap)
        return self

    def predict(self, X=None):
        check_is_fitted(self, "verdict_gap_")
        return self.verdict_gap_


class WitnessEstimator(BaseEstimator):
    def __init__(self, n_list=(4, 8, 16, 32)):
        self.n_list = n_list

    def fit(self, X, y=None):
        val.check_mask(X)
        self.report_ = nonremovability_witness(X, val.check_n_list(self.n_list, 4, 64))
        self.valid_ = self.report_.valid
        return self

    def predict(self, X=None):
        check_is_fitted(self, "valid_")
        return self.valid_
