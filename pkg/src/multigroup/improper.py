"""Improper multi-group learner: per-group hypotheses reconciled online.

The sample is split in two. Each group gets the first hypothesis (in class
order) consistent with its examples from the first half. The second half
then drives a sleeping-experts weighted majority: an expert is awake only on
points of its group, and awake experts that err lose a factor (1 - eta).
The final classifier votes with the terminal weights.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

from .errors import NoConsistentHypothesis, ValidationError
from .instance import (
    FiniteDomain,
    FiniteInstance,
    GroupFamily,
    HypothesisClass,
    LabeledSample,
)

TIE_LABEL = 1
DEFAULT_LABEL = 1
DEFAULT_ETA = 0.5


@dataclass(frozen=True)
class Expert:
    group_id: str
    members: frozenset
    hypothesis_id: str
    labels: Mapping[str, int]
    weight: float = 1.0


@dataclass(frozen=True)
class ExpertTable:
    experts: tuple[Expert, ...]

    def __iter__(self):
        return iter(self.experts)

    def __len__(self):
        return len(self.experts)

    def weights(self) -> dict[str, float]:
        return {e.group_id: e.weight for e in self.experts}

    def awake(self, x: str) -> tuple[Expert, ...]:
        return tuple(e for e in self.experts if x in e.members)


@dataclass(frozen=True)
class EnsembleClassifier:
    experts: ExpertTable
    tie_label: int = TIE_LABEL
    default_label: int = DEFAULT_LABEL

    def __call__(self, x: str) -> int:
        return predict(self, x)


def split_sample(S: LabeledSample) -> tuple[LabeledSample, LabeledSample]:
    if len(S) < 2:
        raise ValidationError("need at least two examples to split")
    half = (len(S) + 1) // 2
    return S[:half], S[half:]


def fit_group_hypotheses(G: GroupFamily, H: HypothesisClass, first: LabeledSample,
                         domain: FiniteDomain) -> dict[str, tuple[str, dict]]:
    """Map each group id to (hypothesis id, total labeling).

    Free points of a chosen hypothesis take the in-group sample label when
    there is one and +1 otherwise.
    """
    out = {}
    for g in G:
        seen: dict[str, int] = {}
        clash = False
        for x, y in first:
            if x in g.members and seen.setdefault(x, y) != y:
                clash = True
        h = None if clash else next((h for h in H if h.agrees(seen)), None)
        if h is None:
            raise NoConsistentHypothesis(g.id)
        out[g.id] = (h.id, h.complete(domain, seen))
    return out


def make_experts(G: GroupFamily, fitted: Mapping[str, tuple[str, dict]]) -> ExpertTable:
    return ExpertTable(tuple(
        Expert(g.id, g.members, fitted[g.id][0], fitted[g.id][1]) for g in G))


def ensemble_train(experts: ExpertTable, second: LabeledSample, eta: float = DEFAULT_ETA) -> ExpertTable:
    if not 0.0 < eta < 1.0:
        raise ValidationError("eta must lie in (0, 1)")
    weights = [e.weight for e in experts]
    for x, y in second:
        for i, e in enumerate(experts.experts):
            if x in e.members and e.labels[x] != y:
                weights[i] *= 1.0 - eta
    return ExpertTable(tuple(replace(e, weight=w) for e, w in zip(experts.experts, weights)))


def predict(f: EnsembleClassifier, x: str) -> int:
    awake = f.experts.awake(x)
    if not awake:
        return f.default_label
    score = 0.0
    for e in awake:
        score += e.weight * e.labels[x]
    if score > 0:
        return 1
    if score < 0:
        return -1
    return f.tie_label


def improper_learn(inst: FiniteInstance, S: LabeledSample, eta: float = DEFAULT_ETA) -> EnsembleClassifier:
    S.check_domain(inst.domain)
    first, second = split_sample(S)
    fitted = fit_group_hypotheses(inst.groups, inst.hypotheses, first, inst.domain)
    table = ensemble_train(make_experts(inst.groups, fitted), second, eta)
    return EnsembleClassifier(table)
