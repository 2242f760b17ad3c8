"""ONE-IN-THREE 3SAT reduced to consistency over C(G, H).

A 3-CNF formula over x1..xn with clauses C1..Cm becomes a domain with one
point per variable and per clause, one group per clause (its three variables
plus the clause point), and for every clause three hypothesis blocks, one per
choice of the single true literal. A block fixes its clause's variables, sets
its own clause point to +1 and every other clause point to -1, and leaves the
remaining variables free. The sample labels every clause point +1, so a
consistent concept exists iff the formula has an exactly-one-true assignment.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .concepts import find_consistent
from .errors import CapExceededError, ValidationError
from .instance import (
    FiniteDomain,
    FiniteInstance,
    Group,
    GroupFamily,
    Hypothesis,
    HypothesisClass,
    LabeledSample,
)

BRUTE_FORCE_MAX_VARS = 24

Literal = tuple[int, bool]  # (variable index from 1, negated)


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[Literal, ...], ...] = ()

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValidationError("negative variable count")
        clauses = tuple(tuple((int(v), bool(neg)) for v, neg in c) for c in self.clauses)
        for c in clauses:
            if len(c) != 3:
                raise ValidationError(f"clause width {len(c)} != 3")
            vs = [v for v, _ in c]
            if len(set(vs)) != 3:
                raise ValidationError(f"repeated variable in clause {_dimacs_clause(c)}")
            for v in vs:
                if not 1 <= v <= self.num_vars:
                    raise ValidationError(f"variable {v} out of range 1..{self.num_vars}")
        object.__setattr__(self, "clauses", clauses)

    @classmethod
    def from_ints(cls, num_vars: int, clauses: Iterable[Sequence[int]]) -> CnfFormula:
        return cls(num_vars, tuple(tuple((abs(l), l < 0) for l in c) for c in clauses))

    def to_ints(self) -> list[list[int]]:
        return [[-v if neg else v for v, neg in c] for c in self.clauses]


def _dimacs_clause(c) -> str:
    return " ".join(str(-v if neg else v) for v, neg in c) + " 0"


def parse_cnf(text: str) -> CnfFormula:
    """Parse DIMACS CNF. Clauses may span lines; each ends with 0."""
    header = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise ValidationError(f"line {lineno}: bad problem line {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ValidationError(f"line {lineno}: bad problem line {line!r}") from None
            if min(header) < 0:
                raise ValidationError(f"line {lineno}: negative counts")
            continue
        if header is None:
            raise ValidationError(f"line {lineno}: clause before problem line")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ValidationError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                current.append(lit)
    if header is None:
        raise ValidationError("missing problem line")
    if current:
        raise ValidationError("last clause not terminated by 0")
    num_vars, num_clauses = header
    if len(clauses) != num_clauses:
        raise ValidationError(f"header declares {num_clauses} clauses, found {len(clauses)}")
    return CnfFormula.from_ints(num_vars, clauses)


def dumps_cnf(phi: CnfFormula) -> str:
    lines = [f"p cnf {phi.num_vars} {len(phi.clauses)}"]
    lines += [_dimacs_clause(c) for c in phi.clauses]
    return "\n".join(lines) + "\n"


def var_point(v: int) -> str:
    return f"x{v}"


def clause_point(i: int) -> str:
    return f"C{i}"


def block_id(i: int, t: int) -> str:
    return f"H{i}_{t}"


@dataclass(frozen=True)
class ReductionInstance:
    formula: CnfFormula
    domain: FiniteDomain
    groups: GroupFamily
    hypotheses: HypothesisClass
    sample: LabeledSample

    @property
    def instance(self) -> FiniteInstance:
        """As a FiniteInstance with uniform mass (no mass on an empty domain)."""
        n = len(self.domain)
        mass = {x: 1.0 / n for x in self.domain} if n else None
        return FiniteInstance(self.domain, self.groups, self.hypotheses, mass=mass)


def build_reduction(phi: CnfFormula) -> ReductionInstance:
    n, m = phi.num_vars, len(phi.clauses)
    var_pts = [var_point(v) for v in range(1, n + 1)]
    clause_pts = [clause_point(i) for i in range(1, m + 1)]
    domain = FiniteDomain(tuple(var_pts + clause_pts))

    groups = []
    blocks = []
    for i, clause in enumerate(phi.clauses, 1):
        used = {v for v, _ in clause}
        groups.append(Group(f"g{i}", frozenset([var_point(v) for v in used] + [clause_point(i)])))
        free = frozenset(var_point(v) for v in range(1, n + 1) if v not in used)
        for t, (vt, _) in enumerate(clause, 1):
            fixed = {}
            for v, neg in clause:
                polarity = -1 if neg else 1
                fixed[var_point(v)] = polarity if v == vt else -polarity
            for j in range(1, m + 1):
                fixed[clause_point(j)] = 1 if j == i else -1
            blocks.append(Hypothesis(block_id(i, t), fixed, free))

    sample = LabeledSample(tuple((c, 1) for c in clause_pts))
    return ReductionInstance(phi, domain, GroupFamily(tuple(groups)), HypothesisClass(tuple(blocks)), sample)


def _literal_true(assignment: dict[int, bool], lit: Literal) -> bool:
    v, neg = lit
    return assignment[v] != neg


def is_one_in_three(phi: CnfFormula, assignment: dict[int, bool]) -> bool:
    return all(sum(_literal_true(assignment, l) for l in c) == 1 for c in phi.clauses)


def exactly_one_sat_bruteforce(phi: CnfFormula, max_vars: int = BRUTE_FORCE_MAX_VARS) -> dict[int, bool] | None:
    """First exactly-one-true assignment in counting order, or None.

    Assignment number ``a`` sets x_v true iff bit (v-1) of ``a`` is set, so
    the all-false assignment comes first and x1 flips fastest.
    """
    n = phi.num_vars
    if n > max_vars:
        raise CapExceededError(f"{n} variables exceeds brute-force cap {max_vars}")
    chunk = 1 << min(n, 20)
    for start in range(0, 1 << n, chunk):
        a = np.arange(start, start + chunk, dtype=np.int64)
        ok = np.ones(a.shape, dtype=bool)
        for c in phi.clauses:
            count = np.zeros(a.shape, dtype=np.int64)
            for v, neg in c:
                count += ((a >> (v - 1)) & 1) ^ int(neg)
            ok &= count == 1
        hits = np.flatnonzero(ok)
        if hits.size:
            first = int(a[hits[0]])
            return {v: bool((first >> (v - 1)) & 1) for v in range(1, n + 1)}
    return None


def assignment_concept(red: ReductionInstance, assignment: dict[int, bool]) -> dict[str, int]:
    """Concept induced by an assignment: variables by truth value, clause points +1."""
    concept = {var_point(v): 1 if val else -1 for v, val in assignment.items()}
    concept.update({clause_point(i): 1 for i in range(1, len(red.formula.clauses) + 1)})
    return {x: concept.get(x, 1) for x in red.domain}


def consistent_hypothesis_search(red: ReductionInstance, sample: LabeledSample) -> Hypothesis | None:
    """Consistent-hypothesis oracle for the reduction's class.

    Clause-point labels decide which clause blocks remain eligible; the
    variable-point labels form a conjunction of literals that each eligible
    block's three fixed variables must agree with. Returns a completion of the
    first compatible block (free points: sample label, else +1).
    """
    sample.check_domain(red.domain)
    if sample.conflicting:
        return None
    labels = sample.as_dict()
    m = len(red.formula.clauses)
    eligible = set(range(1, m + 1))
    term = {}
    for x, y in labels.items():
        if x.startswith("C"):
            i = int(x[1:])
            if y > 0:
                eligible &= {i}
            else:
                eligible.discard(i)
        else:
            term[x] = y
    for i in sorted(eligible):
        for h in (red.hypotheses[block_id(i, t)] for t in (1, 2, 3)):
            if all(h.fixed.get(x, y) == y for x, y in term.items()):
                return Hypothesis(h.id, h.complete(red.domain, term))
    return None


def verify_reduction(phi: CnfFormula) -> dict[str, bool]:
    sat = exactly_one_sat_bruteforce(phi) is not None
    red = build_reduction(phi)
    erm = find_consistent(red.groups, red.hypotheses, red.sample, red.domain).consistent
    return {"sat": sat, "erm_consistent": erm, "agree": sat == erm}


def canonical_clauses(num_vars: int) -> list[tuple[Literal, ...]]:
    """Every 3-literal clause over distinct variables, literals sorted by variable."""
    out = []
    for vs in itertools.combinations(range(1, num_vars + 1), 3):
        for negs in itertools.product((False, True), repeat=3):
            out.append(tuple(zip(vs, negs)))
    return out


def exhaustive_corpus(max_vars: int = 4, max_clauses: int = 3) -> Iterator[CnfFormula]:
    """All formulas with n <= max_vars, m <= max_clauses, up to clause order.

    A formula is a multiset of canonical clauses, so repeated clauses appear.
    """
    for n in range(max_vars + 1):
        pool = canonical_clauses(n)
        for m in range(max_clauses + 1):
            if m and not pool:
                break
            for combo in itertools.combinations_with_replacement(pool, m):
                yield CnfFormula(n, combo)


def random_formula(rng: np.random.Generator, max_vars: int = 10, max_clauses: int = 8,
                   planted: bool = False, num_vars: int | None = None,
                   num_clauses: int | None = None) -> CnfFormula:
    """Random 3-CNF; ``planted`` forces an exactly-one-true assignment.

    Sizes are drawn uniformly (3..max_vars variables, 0..max_clauses clauses)
    unless given explicitly.
    """
    n = int(rng.integers(3, max_vars + 1)) if num_vars is None else num_vars
    m = int(rng.integers(0, max_clauses + 1)) if num_clauses is None else num_clauses
    if n < 3 and m:
        raise ValidationError("clauses need at least 3 variables")
    truth = rng.integers(0, 2, size=n + 1).astype(bool)
    clauses = []
    for _ in range(m):
        vs = [int(v) for v in rng.choice(np.arange(1, n + 1), size=3, replace=False)]
        if planted:
            t = int(rng.integers(0, 3))
            # literal t true, the others false under the planted assignment
            negs = [(not truth[v]) if s == t else bool(truth[v]) for s, v in enumerate(vs)]
        else:
            negs = [bool(b) for b in rng.integers(0, 2, size=3)]
        clauses.append(tuple(zip(vs, negs)))
    return CnfFormula(n, tuple(clauses))


def formula_size(phi: CnfFormula) -> int:
    return phi.num_vars + 3 * len(phi.clauses)


def log2_denoted(red: ReductionInstance) -> float:
    """log2 of the number of hypotheses the blocks denote (before dedup)."""
    sizes = [2 ** len(h.free) for h in red.hypotheses]
    return math.log2(sum(sizes)) if sizes else float("-inf")
