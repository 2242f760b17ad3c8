"""scikit-learn style front end for the two learners.

Inputs are point ids from the estimator's finite domain, so ``X`` is a flat
sequence (or a single column) of ids and ``y`` holds -1/+1 labels.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .concepts import contains, find_consistent
from .errors import InconsistentSample, ValidationError
from .improper import DEFAULT_ETA, TIE_LABEL, ensemble_train, fit_group_hypotheses, make_experts
from .improper import EnsembleClassifier, split_sample
from .instance import FiniteDomain, GroupFamily, HypothesisClass
from .validation import check_points, check_sample


class _MultiGroupBase(ClassifierMixin, BaseEstimator):

    def __init__(self, domain: FiniteDomain, groups: GroupFamily, hypotheses: HypothesisClass):
        self.domain = domain
        self.groups = groups
        self.hypotheses = hypotheses

    def _check_setup(self):
        if not isinstance(self.domain, FiniteDomain):
            raise ValidationError("domain must be a FiniteDomain")
        self.groups.check_domain(self.domain)
        for h in self.hypotheses:
            h.check_domain(self.domain)

    def _label(self, x: str) -> int:
        raise NotImplementedError

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self)
        pts = check_points(X, self.domain)
        return np.array([self._label(x) for x in pts], dtype=np.int64)

    def group_errors(self, X, y) -> dict[str, float]:
        """Empirical error on each group's share of (X, y); groups with no points are omitted."""
        S = check_sample(X, y, self.domain)
        pred = self.predict([x for x, _ in S])
        out = {}
        for g in self.groups:
            hits = [p != y for (x, y), p in zip(S, pred) if x in g.members]
            if hits:
                out[g.id] = float(np.mean(hits))
        return out


class GroupRealizableERM(_MultiGroupBase):
    """Proper learner for C(G, H): returns a concept consistent with the sample.

    Raises ``InconsistentSample`` when the sample conflicts with itself or
    no member of the class fits it.
    """

    def fit(self, X, y):
        self._check_setup()
        S = check_sample(X, y, self.domain)
        res = find_consistent(self.groups, self.hypotheses, S, self.domain)
        if not res.consistent:
            raise InconsistentSample(f"no consistent concept ({res.status})")
        self.concept_ = res.concept
        self.witness_ = res.witness
        self.classes_ = np.array([-1, 1])
        self.n_features_in_ = 1
        return self

    def _label(self, x):
        return self.concept_[x]

    def in_class(self) -> bool:
        check_is_fitted(self)
        return contains(self.groups, self.hypotheses, self.concept_)


class ImproperMultiGroupClassifier(_MultiGroupBase):
    """Per-group hypotheses combined by a sleeping-experts weighted vote."""

    def __init__(self, domain: FiniteDomain, groups: GroupFamily, hypotheses: HypothesisClass,
                 eta: float = DEFAULT_ETA, tie_label: int = TIE_LABEL):
        super().__init__(domain, groups, hypotheses)
        self.eta = eta
        self.tie_label = tie_label

    def fit(self, X, y):
        self._check_setup()
        S = check_sample(X, y, self.domain)
        first, second = split_sample(S)
        fitted = fit_group_hypotheses(self.groups, self.hypotheses, first, self.domain)
        self.experts_ = ensemble_train(make_experts(self.groups, fitted), second, self.eta)
        self.ensemble_ = EnsembleClassifier(self.experts_, tie_label=self.tie_label)
        self.classes_ = np.array([-1, 1])
        self.n_features_in_ = 1
        return self

    def _label(self, x):
        return self.ensemble_(x)

    @property
    def weights_(self) -> dict[str, float]:
        check_is_fitted(self, "experts_")
        return self.experts_.weights()
