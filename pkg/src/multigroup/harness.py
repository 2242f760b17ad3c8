"""Instance generators, exact evaluation and Monte Carlo experiments."""

from __future__ import annotations

import csv
import io
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .bounds import alpha_n, foreach_bound, forall_bound
from .combinatorics import BinaryClassView, shattering_coefficient, vc_dimension
from .concepts import concept_masks, find_consistent, mask_to_concept, sample_mask
from .errors import (
    InconsistentSample,
    InsufficientPositive,
    NoConsistentHypothesis,
    NonRealizableFixture,
    ValidationError,
)
from .improper import DEFAULT_ETA, improper_learn
from .instance import (
    FiniteDomain,
    FiniteInstance,
    Group,
    GroupFamily,
    Hypothesis,
    HypothesisClass,
    LabeledSample,
    group_mass,
)
from .reduction import assignment_concept, build_reduction, exactly_one_sat_bruteforce, random_formula

logger = logging.getLogger(__name__)

KINDS = ("threshold-line", "prop1-singletons", "agnostic-counterexample", "reduction-derived")
LEARNERS = ("erm-concepts", "improper")
PROFILES = ("boundary", "uniform")


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for a synthetic instance.

    ``m`` is the number of points (variables for ``reduction-derived``),
    ``groups`` the number of groups (clauses), ``overlap`` how many points
    each interval group extends past its core on either side. ``profile``
    picks the threshold-line mass: ``boundary`` thins the mass geometrically
    toward the target's sign changes, ``uniform`` spreads it evenly.
    """

    kind: str
    m: int = 10
    groups: int = 3
    overlap: int = 2
    gamma: float = 0.0
    seed: int = 0
    profile: str = "boundary"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown generator kind {self.kind!r}")
        if self.profile not in PROFILES:
            raise ValidationError(f"unknown mass profile {self.profile!r}")

    @classmethod
    def parse(cls, text: str) -> GeneratorSpec:
        """Parse ``kind[:key=value,...]``, e.g. ``threshold-line:m=64,groups=4``."""
        kind, _, rest = text.partition(":")
        kwargs = {}
        for item in filter(None, rest.split(",")):
            key, eq, value = item.partition("=")
            key = key.strip()
            if not eq or key not in ("m", "groups", "overlap", "gamma", "seed", "profile"):
                raise ValidationError(f"bad generator option {item!r}")
            try:
                if key == "profile":
                    kwargs[key] = value.strip()
                else:
                    kwargs[key] = float(value) if key == "gamma" else int(value)
            except ValueError:
                raise ValidationError(f"bad value in {item!r}") from None
        return cls(kind.strip(), **kwargs)

    def __str__(self):
        return (f"{self.kind}:m={self.m},groups={self.groups},overlap={self.overlap},"
                f"gamma={self.gamma!r},seed={self.seed},profile={self.profile}")


def _points(m: int) -> tuple[str, ...]:
    width = len(str(max(m - 1, 0)))
    return tuple(f"p{i:0{width}d}" for i in range(m))


def _uniform(points) -> dict[str, float]:
    return {x: 1.0 / len(points) for x in points}


def threshold_class(points: Sequence[str], two_sided: bool = True) -> HypothesisClass:
    """Step functions on a line: +1 from index t on (t = 0..m).

    With ``two_sided`` the negated steps are added too (the constants are
    not duplicated).
    """
    m = len(points)
    rows = []
    for t in range(m + 1):
        rows.append(tuple(1 if i >= t else -1 for i in range(m)))
    if two_sided:
        for t in range(1, m):
            rows.append(tuple(-1 if i >= t else 1 for i in range(m)))
    return HypothesisClass(tuple(
        Hypothesis(f"t{k}", dict(zip(points, row))) for k, row in enumerate(rows)))


BOUNDARY_LEVELS = 10


def _boundary_mass(m: int, changes: Sequence[int]) -> dict[int, float]:
    """Mass doubling with distance from the nearest sign change, capped.

    The two points straddling a change get weight 1 and weights double per
    step away up to 2**BOUNDARY_LEVELS, so the mass near a boundary spans
    many scales the way a continuous density would on a fine grid.
    """
    if not changes:
        return {i: 1.0 / m for i in range(m)}
    w = []
    for i in range(m):
        d = min(i - c if i >= c else c - 1 - i for c in changes)
        w.append(2.0 ** min(d, BOUNDARY_LEVELS))
    total = math.fsum(w)
    return {i: wi / total for i, wi in enumerate(w)}


def _threshold_line(spec: GeneratorSpec, rng: np.random.Generator) -> FiniteInstance:
    m, k, ov = spec.m, spec.groups, spec.overlap
    if m < 2 or k < 1 or k > m or ov < 0:
        raise ValidationError("threshold-line needs m >= 2 and 1 <= groups <= m")
    pts = _points(m)
    bounds = [round(i * m / k) for i in range(k + 1)]
    intervals = [(max(0, bounds[i] - ov), min(m, bounds[i + 1] + ov)) for i in range(k)]
    groups = GroupFamily(tuple(
        Group(f"g{i + 1}", frozenset(pts[lo:hi])) for i, (lo, hi) in enumerate(intervals)))

    # a change at c flips the label between points c-1 and c. Each group gets
    # one change at the centre of its exclusive core, so no group sees two and
    # the target is a two-sided step on every group.
    changes = []
    for i, (lo, hi) in enumerate(intervals):
        left = max((h for _, h in intervals[:i]), default=0)
        right = min((l for l, _ in intervals[i + 1:]), default=m)
        a, b = max(lo, left) + 1, min(hi, right) - 1
        if a <= b:
            changes.append(min(max((bounds[i] + bounds[i + 1]) // 2, a), b))
    label = 1 if rng.random() < 0.5 else -1
    target = {}
    for i, x in enumerate(pts):
        if i in changes:
            label = -label
        target[x] = label

    if spec.profile == "uniform":
        mass = _uniform(pts)
    else:
        mass = {pts[i]: p for i, p in _boundary_mass(m, changes).items()}
    for g in groups:
        pg = math.fsum(mass[x] for x in g.members)
        if pg < spec.gamma:
            raise ValidationError(f"group {g.id} has mass {pg:.4f} < gamma={spec.gamma}")
    return FiniteInstance(FiniteDomain(pts), groups, threshold_class(pts), mass=mass, target=target)


def _prop1(spec: GeneratorSpec, rng: np.random.Generator) -> FiniteInstance:
    if spec.m < 1:
        raise ValidationError("prop1-singletons needs m >= 1")
    pts = _points(spec.m)
    groups = GroupFamily(tuple(Group(f"g_{x}", frozenset([x])) for x in pts))
    H = HypothesisClass((Hypothesis("neg", {x: -1 for x in pts}),
                         Hypothesis("pos", {x: 1 for x in pts})))
    target = {x: int(rng.choice([-1, 1])) for x in pts}
    return FiniteInstance(FiniteDomain(pts), groups, H, mass=_uniform(pts), target=target)


def agnostic_counterexample() -> FiniteInstance:
    """Two overlapping groups, constant hypotheses, noisy labels.

    Regions g1\\g2, g1&g2, g2\\g1 each have mass 1/3 and +1-label
    probabilities 1/2, 2/3 and 0.
    """
    pts = ("a", "b", "c")
    groups = GroupFamily((Group("g1", frozenset("ab")), Group("g2", frozenset("bc"))))
    H = HypothesisClass((Hypothesis("neg", {x: -1 for x in pts}),
                         Hypothesis("pos", {x: 1 for x in pts})))
    return FiniteInstance(FiniteDomain(pts), groups, H,
                          mass={x: 1.0 / 3.0 for x in pts},
                          label_prob={"a": 1.0 / 2.0, "b": 2.0 / 3.0, "c": 0.0})


def _reduction_derived(spec: GeneratorSpec, rng: np.random.Generator) -> FiniteInstance:
    phi = random_formula(rng, planted=True, num_vars=spec.m, num_clauses=spec.groups)
    red = build_reduction(phi)
    assignment = exactly_one_sat_bruteforce(phi)
    target = assignment_concept(red, assignment)
    inst = red.instance
    return FiniteInstance(inst.domain, inst.groups, inst.hypotheses, mass=inst.mass, target=target)


def generate(spec: GeneratorSpec) -> FiniteInstance:
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "threshold-line":
        return _threshold_line(spec, rng)
    if spec.kind == "prop1-singletons":
        return _prop1(spec, rng)
    if spec.kind == "agnostic-counterexample":
        return agnostic_counterexample()
    return _reduction_derived(spec, rng)


def random_instance(rng: np.random.Generator, max_points: int = 10, max_hypotheses: int = 8,
                    max_groups: int = 6, block_prob: float = 0.2) -> FiniteInstance:
    """Small random instance for property checks; target drawn from C(G, H)."""
    n = int(rng.integers(1, max_points + 1))
    pts = _points(n)
    hyps = []
    for i in range(int(rng.integers(1, max_hypotheses + 1))):
        row = rng.choice([-1, 1], size=n)
        free = frozenset(x for x in pts if rng.random() < block_prob)
        hyps.append(Hypothesis(f"h{i}", {x: int(y) for x, y in zip(pts, row) if x not in free}, free))
    groups = []
    for j in range(int(rng.integers(1, max_groups + 1))):
        members = frozenset(x for x in pts if rng.random() < 0.4)
        groups.append(Group(f"g{j}", members))
    G, H = GroupFamily(tuple(groups)), HypothesisClass(tuple(hyps))
    dom = FiniteDomain(pts)
    masks = concept_masks(G, H, dom)
    # nonempty: every completion of a hypothesis is a concept
    target = mask_to_concept(int(rng.choice(masks)), dom)
    return FiniteInstance(dom, G, H, mass=_uniform(pts), target=target)


# -- evaluation ----------------------------------------------------------------

def as_labeling(f, points: Sequence[str]) -> dict[str, int]:
    """Labels of ``f`` on ``points``; ``f`` is a mapping, a callable or an estimator."""
    if isinstance(f, Mapping):
        return {x: int(f[x]) for x in points}
    if hasattr(f, "predict"):
        return {x: int(y) for x, y in zip(points, f.predict(list(points)))}
    if callable(f):
        return {x: int(f(x)) for x in points}
    raise ValidationError(f"cannot evaluate classifier of type {type(f).__name__}")


def conditional_errors(f, inst: FiniteInstance) -> dict[str, float]:
    """Exact conditional error of ``f`` on every positive-mass group."""
    if not inst.deterministic:
        raise NonRealizableFixture("no deterministic target on this instance")
    inst.require_mass()
    cstar = inst.labels()
    pred = as_labeling(f, inst.support)
    out = {}
    for g in inst.groups:
        pg = group_mass(inst, g)
        if pg <= 0.0:
            continue
        wrong = math.fsum(inst.mass_of(x) for x in inst.domain.ordered(g.members)
                          if inst.mass_of(x) > 0 and pred[x] != cstar[x])
        out[g.id] = wrong / pg
    return out


def worst_group_error(f, inst: FiniteInstance) -> tuple[float, str]:
    errors = conditional_errors(f, inst)
    skipped = len(inst.groups) - len(errors)
    if not errors:
        raise ValidationError("every group has zero mass")
    if skipped:
        warnings.warn(f"{skipped} zero-mass group(s) skipped", RuntimeWarning, stacklevel=2)
    gid = max(errors, key=lambda k: errors[k])  # first maximum in family order
    return errors[gid], gid


def best_constant_per_group(inst: FiniteInstance) -> dict[str, tuple[int, float]]:
    """Per group, the constant label with least expected conditional error.

    Returns ``{group id: (label, error)}``; ties go to +1.
    """
    inst.require_mass()
    if inst.label_prob is not None:
        p_pos = inst.label_prob
    else:
        labels = inst.labels()
        p_pos = {x: 1.0 if labels[x] > 0 else 0.0 for x in labels}
    out = {}
    for g in inst.groups:
        pg = group_mass(inst, g)
        if pg <= 0.0:
            raise ValidationError(f"group {g.id!r} has zero mass")
        pts = [x for x in inst.domain.ordered(g.members) if inst.mass_of(x) > 0]
        err_pos = math.fsum(inst.mass_of(x) * (1.0 - p_pos[x]) for x in pts) / pg
        err_neg = math.fsum(inst.mass_of(x) * p_pos[x] for x in pts) / pg
        out[g.id] = (1, err_pos) if err_pos <= err_neg else (-1, err_neg)
    return out


# -- learning curves -----------------------------------------------------------

@dataclass
class LearningCurveTable:
    rows: list[tuple[int, int, float, str]] = field(default_factory=list)
    failures: list[tuple[int, int, str]] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    COLUMNS = ("n", "trial", "worst_group_error", "worst_group_id")

    def medians(self) -> dict[int, float]:
        by_n: dict[int, list[float]] = {}
        for n, _, err, _ in self.rows:
            by_n.setdefault(n, []).append(err)
        return {n: float(np.median(v)) for n, v in sorted(by_n.items())}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for n, trial, err, gid in self.rows:
            w.writerow((n, trial, repr(err), gid))
        return buf.getvalue()


def draw_sample(inst: FiniteInstance, n: int, rng: np.random.Generator) -> LabeledSample:
    """n i.i.d. points from the instance's mass, labeled by its target."""
    mass = inst.require_mass()
    labels = inst.labels()
    pts = list(inst.domain.points)
    p = np.array([mass.get(x, 0.0) for x in pts])
    idx = rng.choice(len(pts), size=n, p=p / p.sum())
    return LabeledSample(tuple((pts[i], labels[pts[i]]) for i in idx))


def child_rng(seed: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *keys]))


def train(learner: str, inst: FiniteInstance, sample: LabeledSample, eta: float = DEFAULT_ETA):
    """Fit ``learner`` and return something ``as_labeling`` understands."""
    if learner == "erm-concepts":
        res = find_consistent(inst.groups, inst.hypotheses, sample, inst.domain)
        if not res.consistent:
            raise InconsistentSample(f"no consistent concept ({res.status})")
        return res.concept
    if learner == "improper":
        return improper_learn(inst, sample, eta)
    raise ValidationError(f"unknown learner {learner!r}")


def learning_curve(learner: str, spec: GeneratorSpec | FiniteInstance, n_grid: Sequence[int],
                   trials: int, seed: int, eta: float = DEFAULT_ETA) -> LearningCurveTable:
    if learner not in LEARNERS:
        raise ValidationError(f"unknown learner {learner!r}")
    inst = generate(spec) if isinstance(spec, GeneratorSpec) else spec
    if not inst.deterministic:
        raise NonRealizableFixture("learning curves need a deterministic target")
    gamma = min(group_mass(inst, g) for g in inst.groups) if len(inst.groups) else 0.0
    table = LearningCurveTable(metadata={
        "learner": learner, "spec": str(spec) if isinstance(spec, GeneratorSpec) else "instance",
        "seed": seed, "gamma": gamma,
    })
    for n in n_grid:
        for trial in range(trials):
            rng = child_rng(seed, n, trial)
            sample = draw_sample(inst, n, rng)
            try:
                f = train(learner, inst, sample, eta)
            except (NoConsistentHypothesis, ValidationError) as exc:
                logger.info("trial n=%d #%d failed: %s", n, trial, exc)
                table.failures.append((n, trial, str(exc)))
                continue
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                err, gid = worst_group_error(f, inst)
            table.rows.append((n, trial, err, gid))
    return table


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    residual: float
    n_values: tuple[int, ...] = ()


def fit_rate_exponent(table: LearningCurveTable | Mapping[int, float]) -> RateFit:
    """Least-squares slope of log(median error) against log(n)."""
    medians = table.medians() if isinstance(table, LearningCurveTable) else dict(table)
    pos = sorted((n, e) for n, e in medians.items() if e > 0)
    if len(pos) < 3:
        raise InsufficientPositive(f"only {len(pos)} grid values with positive median error")
    x = np.log([n for n, _ in pos])
    y = np.log([e for _, e in pos])
    A = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), res, *_ = np.linalg.lstsq(A, y, rcond=None)
    residual = float(res[0]) if res.size else 0.0
    return RateFit(float(slope), float(intercept), residual, tuple(n for n, _ in pos))


# -- uniform convergence checks ------------------------------------------------

@dataclass(frozen=True)
class FunctionClass:
    """0/1 functions on a finite point set with a probability vector."""

    points: tuple[str, ...]
    values: np.ndarray  # shape (num functions, num points), entries 0/1
    mass: np.ndarray

    def view(self) -> BinaryClassView:
        return BinaryClassView(self.points, frozenset(map(tuple, self.values.tolist())))


def threshold_indicators(m: int = 32, count: int = 16) -> FunctionClass:
    """``count`` indicators 1[i >= t] with t evenly spaced over ``m`` uniform points."""
    if not 1 <= count <= m:
        raise ValidationError("need 1 <= count <= m")
    ts = [round(j * m / count) for j in range(count)]
    vals = np.array([[1 if i >= t else 0 for i in range(m)] for t in ts], dtype=np.int64)
    return FunctionClass(_points(m), vals, np.full(m, 1.0 / m))


def mistake_indicators(inst: FiniteInstance) -> FunctionClass:
    """{x -> g(x) 1[h(x) != c*(x)] : g in G, h in H} on the instance."""
    cstar = inst.labels()
    mass = inst.require_mass()
    pts = inst.domain.points
    hyps = inst.hypotheses.expand(inst.domain)
    rows = set()
    for g in inst.groups:
        gv = [1 if x in g.members else 0 for x in pts]
        for h in hyps:
            rows.add(tuple(gi * int(hx != cstar.get(x, hx)) for gi, hx, x in zip(gv, h, pts)))
    vals = np.array(sorted(rows), dtype=np.int64).reshape(-1, len(pts))
    return FunctionClass(pts, vals, np.array([mass.get(x, 0.0) for x in pts]))


def class_shatter_2n(fc: FunctionClass, n: int) -> int:
    return shattering_coefficient(fc.view(), 2 * n)


def lemma1_coverage(fc: FunctionClass, n: int, delta: float, trials: int, seed: int) -> float:
    """Fraction of trials where some f has (Pf - P_n f)/sqrt(Pf) > sqrt(alpha_n).

    Functions with Pf = 0 never count as violations.
    """
    alpha = alpha_n(n, class_shatter_2n(fc, n), delta)
    Pf = fc.values @ fc.mass
    root = np.sqrt(Pf)
    violated = 0
    for trial in range(trials):
        rng = child_rng(seed, n, trial)
        counts = rng.multinomial(n, fc.mass / fc.mass.sum())
        Pn = fc.values @ counts / n
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(Pf > 0, (Pf - Pn) / np.where(root > 0, root, 1.0), 0.0)
        if np.any(ratio > math.sqrt(alpha)):
            violated += 1
    return violated / trials


def class_dimensions(inst: FiniteInstance) -> dict[str, int | dict[str, int]]:
    """VC dimensions of G, of H restricted to each nonempty group, and their max."""
    d_G = vc_dimension(BinaryClassView.from_groups(inst.groups, inst.domain))
    per_group = {g.id: vc_dimension(BinaryClassView.from_restriction(inst.hypotheses, g, inst.domain))
                 for g in inst.groups if g.members}
    return {"d_G": d_G, "d_g": per_group, "d_GH": max(per_group.values(), default=0)}


def bound_coverage(inst: FiniteInstance, n: int, delta: float, trials: int, seed: int,
                   mode: str = "forall", exhaustive: bool = False,
                   dims: Mapping | None = None) -> dict[str, float]:
    """Monte Carlo check of the joint mistake-mass bounds for consistent concepts.

    For each trial a sample is drawn and each consistent concept (all of them
    when ``exhaustive``, else the one ERM returns) is checked against the bound
    on every group. ``mode="forall"`` reports the fraction of trials with any
    violation; ``mode="foreach"`` reports, per group, the fraction of trials in
    which that group's bound failed.
    """
    if mode not in ("forall", "foreach"):
        raise ValidationError(f"unknown mode {mode!r}")
    dims = dims or class_dimensions(inst)
    cstar = inst.labels()
    pts = inst.domain.points
    mass = np.array([inst.mass_of(x) for x in pts])
    gmat = np.array([[1 if x in g.members else 0 for x in pts] for g in inst.groups], dtype=bool)
    gids = inst.groups.ids()
    if mode == "forall":
        limits = np.full(len(gids), forall_bound(n, dims["d_G"], dims["d_GH"], delta))
    else:
        limits = np.array([foreach_bound(n, dims["d_g"].get(gid, 0), delta) for gid in gids])
    cvec = np.array([cstar.get(x, 1) for x in pts])

    if exhaustive:
        masks = concept_masks(inst.groups, inst.hypotheses, inst.domain)
        shifts = np.arange(len(pts) - 1, -1, -1, dtype=np.int64)
        all_labels = np.where((masks[:, None] >> shifts[None, :]) & 1, 1, -1)

    per_group = np.zeros(len(gids))
    any_violation = 0
    for trial in range(trials):
        rng = child_rng(seed, n, trial)
        sample = draw_sample(inst, n, rng)
        if exhaustive:
            sm, sv = sample_mask(sample, inst.domain)
            ok = ((masks ^ sv) & sm) == 0
            labels = all_labels[ok]
        else:
            res = find_consistent(inst.groups, inst.hypotheses, sample, inst.domain)
            labels = np.array([[res.concept[x] for x in pts]])
        wrong = (labels != cvec[None, :]).astype(float) * mass[None, :]
        joint = wrong @ gmat.T.astype(float)  # (concepts, groups)
        bad = (joint > limits[None, :]).any(axis=0)
        per_group += bad
        any_violation += bool(bad.any())
    if mode == "forall":
        return {"violation_fraction": any_violation / trials}
    return {gid: v / trials for gid, v in zip(gids, per_group)}
