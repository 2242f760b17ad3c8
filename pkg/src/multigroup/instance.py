"""Finite domains, groups, hypothesis classes, samples and instances.

Every object here is immutable after construction. Point identifiers are
opaque strings and anything that enumerates points does so in domain order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import CapExceededError, NonRealizableFixture, ValidationError

LABELS = (-1, 1)
EXPANSION_CAP = 2**20
MASS_TOL = 1e-12

_RESERVED = set(" \t\r\n:=,#[]")


def check_label(y) -> int:
    if isinstance(y, bool) or y not in LABELS:
        raise ValidationError(f"label must be -1 or +1, got {y!r}")
    return int(y)


def _check_token(name: str, what: str) -> str:
    if not isinstance(name, str) or not name or _RESERVED & set(name):
        raise ValidationError(f"invalid {what} identifier {name!r}")
    return name


@dataclass(frozen=True)
class FiniteDomain:
    points: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = tuple(self.points)
        for p in pts:
            _check_token(p, "point")
        if len(set(pts)) != len(pts):
            raise ValidationError("duplicate point identifiers in domain")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(pts)})

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, p):
        return p in self._index

    def index(self, p: str) -> int:
        try:
            return self._index[p]
        except KeyError:
            raise ValidationError(f"point {p!r} not in domain") from None

    def ordered(self, pts: Iterable[str]) -> tuple[str, ...]:
        """Return ``pts`` sorted into domain order."""
        return tuple(sorted(pts, key=self.index))


@dataclass(frozen=True)
class Group:
    id: str
    members: frozenset

    def __post_init__(self):
        _check_token(self.id, "group")
        object.__setattr__(self, "members", frozenset(self.members))

    def __contains__(self, x):
        return x in self.members

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class GroupFamily:
    groups: tuple[Group, ...]

    def __post_init__(self):
        groups = tuple(self.groups)
        ids = [g.id for g in groups]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate group ids")
        object.__setattr__(self, "groups", groups)

    @classmethod
    def from_dict(cls, groups: Mapping[str, Iterable[str]]) -> GroupFamily:
        return cls(tuple(Group(gid, frozenset(m)) for gid, m in groups.items()))

    def __iter__(self) -> Iterator[Group]:
        return iter(self.groups)

    def __len__(self):
        return len(self.groups)

    def __getitem__(self, gid: str) -> Group:
        for g in self.groups:
            if g.id == gid:
                return g
        raise KeyError(gid)

    def ids(self) -> tuple[str, ...]:
        return tuple(g.id for g in self.groups)

    def containing(self, x: str) -> tuple[Group, ...]:
        return tuple(g for g in self.groups if x in g.members)

    def check_domain(self, domain: FiniteDomain) -> None:
        for g in self.groups:
            for x in g.members:
                if x not in domain:
                    raise ValidationError(f"group {g.id!r} member {x!r} not in domain")


@dataclass(frozen=True)
class Hypothesis:
    """A labeling of the domain, possibly with free points.

    ``fixed`` maps points to labels. Points in ``free`` may take either label,
    so a hypothesis with free points stands for all of its completions. With
    ``free`` empty this is an ordinary explicit hypothesis.
    """

    id: str
    fixed: Mapping[str, int]
    free: frozenset = frozenset()

    def __post_init__(self):
        _check_token(self.id, "hypothesis")
        fixed = {x: check_label(y) for x, y in dict(self.fixed).items()}
        free = frozenset(self.free)
        if free & fixed.keys():
            raise ValidationError(f"hypothesis {self.id!r}: point both fixed and free")
        object.__setattr__(self, "fixed", fixed)
        object.__setattr__(self, "free", free)

    @classmethod
    def explicit(cls, hid: str, values: Mapping[str, int]) -> Hypothesis:
        return cls(hid, dict(values))

    @property
    def is_explicit(self) -> bool:
        return not self.free

    def agrees(self, labels: Mapping[str, int], points: Iterable[str] | None = None) -> bool:
        """True iff some completion matches ``labels`` on ``points``.

        ``points`` defaults to every key of ``labels``.
        """
        pts = labels.keys() if points is None else points
        fixed = self.fixed
        for x in pts:
            v = fixed.get(x)
            if v is not None and v != labels[x]:
                return False
        return True

    def complete(self, domain: FiniteDomain, hints: Mapping[str, int] | None = None) -> dict:
        """Total labeling: fixed values, then ``hints`` on free points, else +1."""
        hints = hints or {}
        return {x: self.fixed[x] if x in self.fixed else hints.get(x, 1) for x in domain}

    def check_domain(self, domain: FiniteDomain) -> None:
        for x in itertools.chain(self.fixed, self.free):
            if x not in domain:
                raise ValidationError(f"hypothesis {self.id!r} mentions unknown point {x!r}")
        if len(self.fixed) + len(self.free) != len(domain):
            raise ValidationError(f"hypothesis {self.id!r} does not cover the domain")


@dataclass(frozen=True)
class HypothesisClass:
    members: tuple[Hypothesis, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        members = tuple(self.members)
        index = {h.id: h for h in members}
        if len(index) != len(members):
            raise ValidationError("duplicate hypothesis ids")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_rows(cls, domain: FiniteDomain, rows: Iterable[Iterable[int]], prefix="h") -> HypothesisClass:
        return cls(tuple(
            Hypothesis.explicit(f"{prefix}{i}", dict(zip(domain.points, row)))
            for i, row in enumerate(rows)
        ))

    def __iter__(self) -> Iterator[Hypothesis]:
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __getitem__(self, hid: str) -> Hypothesis:
        return self._index[hid]

    def ids(self) -> tuple[str, ...]:
        return tuple(self._index)

    def denoted_size_bound(self) -> int:
        """Upper bound on the number of distinct hypotheses denoted."""
        return sum(2 ** len(h.free) for h in self.members)

    def check_domain(self, domain: FiniteDomain) -> None:
        for h in self.members:
            h.check_domain(domain)

    def expand(self, domain: FiniteDomain, cap: int = EXPANSION_CAP) -> list[tuple[int, ...]]:
        """All distinct denoted hypotheses as label vectors in domain order."""
        if self.denoted_size_bound() > cap:
            raise CapExceededError(f"hypothesis class denotes more than {cap} members")
        seen = {}
        for h in self.members:
            for row in _completions(h, domain.points):
                seen.setdefault(row, None)
        return list(seen)

    def contains(self, values: Mapping[str, int], domain: FiniteDomain) -> bool:
        return any(h.agrees(values, domain.points) for h in self.members)


def _completions(h: Hypothesis, points: tuple[str, ...]) -> Iterator[tuple[int, ...]]:
    free_pos = [i for i, x in enumerate(points) if x not in h.fixed]
    base = [h.fixed.get(x, 1) for x in points]
    for combo in itertools.product(LABELS, repeat=len(free_pos)):
        for i, y in zip(free_pos, combo):
            base[i] = y
        yield tuple(base)


@dataclass(frozen=True)
class LabeledSample:
    examples: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        ex = tuple((x, check_label(y)) for x, y in self.examples)
        object.__setattr__(self, "examples", ex)

    @classmethod
    def from_arrays(cls, points: Iterable[str], labels: Iterable[int]) -> LabeledSample:
        return cls(tuple(zip(points, (int(y) for y in labels))))

    def __len__(self):
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return LabeledSample(self.examples[item])
        return self.examples[item]

    @property
    def conflicting(self) -> bool:
        seen = {}
        for x, y in self.examples:
            if seen.setdefault(x, y) != y:
                return True
        return False

    def as_dict(self) -> dict[str, int]:
        """Point -> label. Raises on a conflicting sample."""
        seen = {}
        for x, y in self.examples:
            if seen.setdefault(x, y) != y:
                raise ValidationError(f"conflicting labels for point {x!r}")
        return seen

    def check_domain(self, domain: FiniteDomain) -> None:
        for x, _ in self.examples:
            if x not in domain:
                raise ValidationError(f"sample point {x!r} not in domain")


@dataclass(frozen=True)
class FiniteInstance:
    """A finite learning problem.

    ``target`` is a deterministic labeling (the concept ``c*``). Noisy fixtures
    instead carry ``label_prob``, the probability that a point is labeled +1.
    ``mass`` may be omitted for instances that are only used combinatorially
    (for example the output of the SAT reduction); points absent from ``mass``
    have probability zero.
    """

    domain: FiniteDomain
    groups: GroupFamily
    hypotheses: HypothesisClass
    mass: Mapping[str, float] | None = None
    target: Mapping[str, int] | None = None
    label_prob: Mapping[str, float] | None = None

    def __post_init__(self):
        self.groups.check_domain(self.domain)
        self.hypotheses.check_domain(self.domain)
        if self.target is not None and self.label_prob is not None:
            raise ValidationError("give either target or label_prob, not both")
        if self.mass is not None:
            mass = {x: float(p) for x, p in dict(self.mass).items()}
            for x, p in mass.items():
                if x not in self.domain:
                    raise ValidationError(f"mass for unknown point {x!r}")
                if not p >= 0.0 or math.isinf(p):
                    raise ValidationError(f"invalid mass {p!r} at {x!r}")
            total = math.fsum(mass.values())
            if abs(total - 1.0) > MASS_TOL:
                raise ValidationError(f"mass sums to {total!r}, not 1")
            object.__setattr__(self, "mass", mass)
        if self.target is not None:
            target = {x: check_label(y) for x, y in dict(self.target).items()}
            self._check_cover(target, "target")
            object.__setattr__(self, "target", target)
        if self.label_prob is not None:
            probs = {x: float(p) for x, p in dict(self.label_prob).items()}
            for x, p in probs.items():
                if not 0.0 <= p <= 1.0:
                    raise ValidationError(f"label probability {p!r} at {x!r} outside [0, 1]")
            self._check_cover(probs, "label_prob")
            object.__setattr__(self, "label_prob", probs)

    def _check_cover(self, table, name):
        for x in table:
            if x not in self.domain:
                raise ValidationError(f"{name} for unknown point {x!r}")
        missing = [x for x in self.support if x not in table]
        if missing:
            raise ValidationError(f"{name} missing on support point {missing[0]!r}")

    @property
    def support(self) -> tuple[str, ...]:
        if self.mass is None:
            return ()
        return tuple(x for x in self.domain if self.mass.get(x, 0.0) > 0.0)

    def mass_of(self, x: str) -> float:
        return 0.0 if self.mass is None else self.mass.get(x, 0.0)

    @property
    def deterministic(self) -> bool:
        if self.target is not None:
            return True
        if self.label_prob is not None:
            return all(self.label_prob[x] in (0.0, 1.0) for x in self.support)
        return False

    def labels(self) -> dict[str, int]:
        """Deterministic labels on the support (plus any extra target entries)."""
        if self.target is not None:
            return dict(self.target)
        if self.label_prob is None:
            raise NonRealizableFixture("instance carries no labels")
        if not self.deterministic:
            raise NonRealizableFixture("instance has probabilistic labels")
        return {x: 1 if self.label_prob[x] == 1.0 else -1 for x in self.support}

    def require_mass(self) -> dict[str, float]:
        if self.mass is None:
            raise ValidationError("instance has no mass table")
        return self.mass


def restrict_class(H: HypothesisClass, g: Group, domain: FiniteDomain,
                   cap: int = EXPANSION_CAP) -> list[tuple[int, ...]]:
    """Distinct restrictions of ``H`` to the members of ``g``.

    Each pattern lists labels in domain order; the list is sorted.
    """
    if not g.members:
        raise ValidationError("empty restriction")
    pts = domain.ordered(g.members)
    total = sum(2 ** sum(1 for x in pts if x not in h.fixed) for h in H)
    if total > cap:
        raise CapExceededError(f"restriction would enumerate {total} patterns")
    out = set()
    for h in H:
        out.update(_completions(h, pts))
    return sorted(out)


def group_mass(inst: FiniteInstance, g: Group) -> float:
    return math.fsum(inst.mass_of(x) for x in inst.domain.ordered(g.members))


def is_group_realizable(inst: FiniteInstance) -> bool:
    """Whether some concept of C(G, H) labels the support correctly."""
    from .concepts import find_consistent

    if not inst.deterministic:
        return False
    labels = inst.labels()
    pts = inst.support if inst.mass is not None else inst.domain.ordered(labels)
    sample = LabeledSample(tuple((x, labels[x]) for x in pts))
    return find_consistent(inst.groups, inst.hypotheses, sample, inst.domain).consistent
