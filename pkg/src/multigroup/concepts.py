"""Membership, enumeration and consistent-concept search for C(G, H).

A concept belongs to C(G, H) when, on every group, it coincides with some
hypothesis of H. Finding one that fits a labeled sample is a constraint
satisfaction problem whose variables are groups and whose values are the
distinct restrictions of H to each group; two groups constrain each other
only through the points they share.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import CapExceededError, ValidationError
from .instance import (
    FiniteDomain,
    GroupFamily,
    HypothesisClass,
    LabeledSample,
)

CONSISTENT = "consistent"
INCONSISTENT = "inconsistent"
CONFLICTING = "conflicting-sample"

ENUMERATION_CAP = 2**20
FREE_DEFAULT = 1


@dataclass(frozen=True)
class ErmResult:
    status: str
    concept: dict | None = None
    witness: dict | None = None

    @property
    def consistent(self) -> bool:
        return self.status == CONSISTENT


def contains(G: GroupFamily, H: HypothesisClass, f: Mapping[str, int]) -> bool:
    for g in G:
        if not g.members:
            continue
        try:
            if not any(h.agrees(f, g.members) for h in H):
                return False
        except KeyError as exc:
            raise ValidationError(f"concept undefined at {exc.args[0]!r}") from None
    return True


def verify_witness(G: GroupFamily, H: HypothesisClass, concept: Mapping[str, int],
                   witness: Mapping[str, str]) -> bool:
    """Check that each group's witness hypothesis matches ``concept`` on the group."""
    for g in G:
        if g.id not in witness:
            return False
        if not g.members:
            continue
        if witness[g.id] not in H.ids() or not H[witness[g.id]].agrees(concept, g.members):
            return False
    return True


# -- brute force over bitmasks -------------------------------------------------
#
# A labeling of an n-point domain is an integer whose bit (n-1-i) is set iff
# point i is labeled +1, so increasing integers enumerate labelings in
# lexicographic domain order with -1 before +1.

def _bit(domain: FiniteDomain, x: str) -> int:
    return 1 << (len(domain) - 1 - domain.index(x))


def _group_constraints(G, H, domain):
    out = []
    for g in G:
        if not g.members:
            continue
        gmask = 0
        for x in g.members:
            gmask |= _bit(domain, x)
        pats = set()
        for h in H:
            m = v = 0
            for x, y in h.fixed.items():
                b = _bit(domain, x)
                if gmask & b:
                    m |= b
                    if y > 0:
                        v |= b
            pats.add((m, v))
        out.append(sorted(pats))
    return out


def concept_masks(G: GroupFamily, H: HypothesisClass, domain: FiniteDomain,
                  cap: int = ENUMERATION_CAP) -> np.ndarray:
    """Bitmask encodings of every member of C(G, H), ascending."""
    n = len(domain)
    if n > 62 or 2**n > cap:
        raise CapExceededError(f"2^{n} labelings exceeds enumeration cap {cap}")
    F = np.arange(2**n, dtype=np.int64)
    ok = np.ones(F.shape, dtype=bool)
    for pats in _group_constraints(G, H, domain):
        hit = np.zeros(F.shape, dtype=bool)
        for m, v in pats:
            hit |= ((F ^ v) & m) == 0
        ok &= hit
    return F[ok]


def sample_mask(sample: LabeledSample, domain: FiniteDomain) -> tuple[int, int]:
    """(points mask, +1 mask) of a non-conflicting sample."""
    m = v = 0
    for x, y in sample.as_dict().items():
        b = _bit(domain, x)
        m |= b
        if y > 0:
            v |= b
    return m, v


def mask_to_concept(mask: int, domain: FiniteDomain) -> dict[str, int]:
    n = len(domain)
    return {x: 1 if (int(mask) >> (n - 1 - i)) & 1 else -1 for i, x in enumerate(domain)}


def concept_to_mask(f: Mapping[str, int], domain: FiniteDomain) -> int:
    m = 0
    for x in domain:
        if f[x] > 0:
            m |= _bit(domain, x)
    return m


def enumerate_concepts(G: GroupFamily, H: HypothesisClass, domain: FiniteDomain,
                       cap: int = ENUMERATION_CAP) -> list[dict[str, int]]:
    """Every member of C(G, H), in lexicographic domain order."""
    return [mask_to_concept(m, domain) for m in concept_masks(G, H, domain, cap)]


# -- constraint search ---------------------------------------------------------

def find_consistent(G: GroupFamily, H: HypothesisClass, S: LabeledSample,
                    domain: FiniteDomain) -> ErmResult:
    """Search C(G, H) for a concept agreeing with every example of ``S``.

    Each group's candidates are the distinct restrictions of hypotheses that
    fit the group's sampled labels. After arc consistency over intersecting
    groups, backtracking picks the group with the fewest remaining candidates
    (ties: more neighbours first, then family order) and tries candidates in
    class order. Points left undetermined take the sample label if sampled,
    otherwise +1.
    """
    S.check_domain(domain)
    if S.conflicting:
        return ErmResult(CONFLICTING)
    labels = S.as_dict()

    groups = [g for g in G if g.members]
    cands: list[list[tuple[dict, str]]] = []
    for g in groups:
        pts = domain.ordered(g.members)
        sampled = [x for x in pts if x in labels]
        seen: dict[tuple, str] = {}
        for h in H:
            if not h.agrees(labels, sampled):
                continue
            pat = tuple((x, h.fixed[x]) for x in pts if x in h.fixed)
            seen.setdefault(pat, h.id)
        if not seen:
            return ErmResult(INCONSISTENT)
        cands.append([(dict(p), hid) for p, hid in seen.items()])

    k = len(groups)
    shared: dict[int, dict[int, tuple[str, ...]]] = {i: {} for i in range(k)}
    for i in range(k):
        for j in range(i + 1, k):
            common = groups[i].members & groups[j].members
            if common:
                pts = domain.ordered(common)
                shared[i][j] = pts
                shared[j][i] = pts

    domains = [list(range(len(c))) for c in cands]
    if not _arc_consistency(cands, shared, domains):
        return ErmResult(INCONSISTENT)

    choice = _backtrack(cands, shared, domains, {})
    if choice is None:
        return ErmResult(INCONSISTENT)

    concept = {}
    for x in domain:
        if x in labels:
            concept[x] = labels[x]
    for i, a in choice.items():
        for x, y in cands[i][a][0].items():
            concept[x] = y
    concept = {x: concept.get(x, FREE_DEFAULT) for x in domain}
    first = H.members[0].id if len(H) else None
    chosen = {groups[i].id: cands[i][a][1] for i, a in choice.items()}
    witness = {g.id: chosen.get(g.id, first) for g in G}
    return ErmResult(CONSISTENT, concept, witness)


def _compatible(p: dict, q: dict, pts) -> bool:
    for x in pts:
        a = p.get(x)
        if a is not None:
            b = q.get(x)
            if b is not None and a != b:
                return False
    return True


def _arc_consistency(cands, shared, domains) -> bool:
    queue = deque((i, j) for i in shared for j in shared[i])
    while queue:
        i, j = queue.popleft()
        pts = shared[i][j]
        keep = [a for a in domains[i]
                if any(_compatible(cands[i][a][0], cands[j][b][0], pts) for b in domains[j])]
        if len(keep) != len(domains[i]):
            if not keep:
                return False
            domains[i] = keep
            queue.extend((k, i) for k in shared[i] if k != j)
    return True


def _backtrack(cands, shared, domains, assigned):
    if len(assigned) == len(cands):
        return dict(assigned)
    i = min((v for v in range(len(cands)) if v not in assigned),
            key=lambda v: (len(domains[v]), -len(shared[v]), v))
    for a in domains[i]:
        p = cands[i][a][0]
        pruned = {}
        ok = True
        for j, pts in shared[i].items():
            if j in assigned:
                continue
            keep = [b for b in domains[j] if _compatible(p, cands[j][b][0], pts)]
            if not keep:
                ok = False
                break
            pruned[j] = keep
        if not ok:
            continue
        saved = {j: domains[j] for j in pruned}
        for j, keep in pruned.items():
            domains[j] = keep
        assigned[i] = a
        found = _backtrack(cands, shared, domains, assigned)
        if found is not None:
            return found
        del assigned[i]
        for j, old in saved.items():
            domains[j] = old
    return None
