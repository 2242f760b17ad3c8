import math

import pytest

from multigroup.errors import CapExceededError, NonRealizableFixture, ValidationError
from multigroup.harness import agnostic_counterexample
from multigroup.instance import (
    FiniteDomain,
    FiniteInstance,
    Group,
    GroupFamily,
    Hypothesis,
    HypothesisClass,
    LabeledSample,
    group_mass,
    is_group_realizable,
    restrict_class,
)
from multigroup.reduction import CnfFormula, build_reduction

from conftest import all_functions, constants, sample, uniform_instance


class TestDomain:
    def test_duplicates_rejected(self):
        with pytest.raises(ValidationError):
            FiniteDomain(("a", "a"))

    @pytest.mark.parametrize("bad", ["", "a b", "x:y", "p=1", "c#", "[d]"])
    def test_reserved_characters(self, bad):
        with pytest.raises(ValidationError):
            FiniteDomain((bad,))

    def test_ordered_follows_domain(self, abc):
        assert abc.ordered({"c", "a"}) == ("a", "c")
        with pytest.raises(ValidationError):
            abc.index("z")

    def test_empty_domain_allowed(self):
        assert len(FiniteDomain(())) == 0


class TestHypothesis:
    def test_fixed_and_free_disjoint(self):
        with pytest.raises(ValidationError):
            Hypothesis("h", {"a": 1}, frozenset({"a"}))

    def test_labels_checked(self):
        with pytest.raises(ValidationError):
            Hypothesis("h", {"a": 0})
        with pytest.raises(ValidationError):
            Hypothesis("h", {"a": True})

    def test_block_agrees_on_free_points(self, abc):
        h = Hypothesis("blk", {"a": 1}, frozenset({"b", "c"}))
        assert h.agrees({"a": 1, "b": -1, "c": 1})
        assert not h.agrees({"a": -1})
        assert h.complete(abc, {"b": -1}) == {"a": 1, "b": -1, "c": 1}

    def test_coverage_checked(self, abc):
        h = Hypothesis("blk", {"a": 1}, frozenset({"b"}))
        with pytest.raises(ValidationError):
            h.check_domain(abc)

    def test_expand_counts_completions(self, abc):
        H = HypothesisClass((Hypothesis("blk", {"a": 1}, frozenset({"b", "c"})),
                             Hypothesis("h", {"a": 1, "b": 1, "c": 1})))
        assert H.denoted_size_bound() == 5
        assert len(H.expand(abc)) == 4
        with pytest.raises(CapExceededError):
            H.expand(abc, cap=3)

    def test_duplicate_ids(self, abc):
        with pytest.raises(ValidationError):
            HypothesisClass((Hypothesis("h", {x: 1 for x in abc}), Hypothesis("h", {x: -1 for x in abc})))


class TestSample:
    def test_conflicting(self):
        assert sample(("a", 1), ("a", -1)).conflicting
        assert not sample(("a", 1), ("a", 1)).conflicting
        with pytest.raises(ValidationError):
            sample(("a", 1), ("a", -1)).as_dict()

    def test_slicing_and_domain(self, abc):
        S = sample(("a", 1), ("b", -1), ("c", 1))
        assert isinstance(S[:2], LabeledSample) and len(S[:2]) == 2
        with pytest.raises(ValidationError):
            sample(("z", 1)).check_domain(abc)


class TestInstance:
    def test_mass_must_sum_to_one(self, abc):
        G = GroupFamily.from_dict({"g": ["a"]})
        with pytest.raises(ValidationError):
            FiniteInstance(abc, G, constants(abc), mass={"a": 0.5, "b": 0.4})
        with pytest.raises(ValidationError):
            FiniteInstance(abc, G, constants(abc), mass={"a": 1.5, "b": -0.5})

    def test_target_covers_support(self, abc):
        G = GroupFamily.from_dict({"g": ["a"]})
        with pytest.raises(ValidationError):
            FiniteInstance(abc, G, constants(abc), mass={"a": 0.5, "b": 0.5}, target={"a": 1})

    def test_target_and_probs_exclusive(self, abc):
        G = GroupFamily.from_dict({"g": ["a"]})
        with pytest.raises(ValidationError):
            FiniteInstance(abc, G, constants(abc), mass={"a": 1.0}, target={"a": 1}, label_prob={"a": 1.0})

    def test_group_member_outside_domain(self, abc):
        with pytest.raises(ValidationError):
            FiniteInstance(abc, GroupFamily.from_dict({"g": ["z"]}), constants(abc))

    def test_noisy_labels_fenced(self):
        with pytest.raises(NonRealizableFixture):
            agnostic_counterexample().labels()


class TestRestrictClass:
    def test_constants_restrict_to_constants(self, abc):
        pats = restrict_class(constants(abc), Group("g", frozenset(abc)), abc)
        assert pats == [(-1, -1, -1), (1, 1, 1)]

    def test_full_class_two_points(self):
        dom = FiniteDomain(("u", "v"))
        assert len(restrict_class(all_functions(dom), Group("g", frozenset(dom)), dom)) == 4

    def test_reduction_clause_group(self):
        red = build_reduction(CnfFormula.from_ints(3, [[1, 2, -3]]))
        pats = restrict_class(red.hypotheses, red.groups["g1"], red.domain)
        assert len(pats) == 3
        # domain order x1 x2 x3 C1: one pattern per choice of the true literal
        assert pats == sorted([(1, -1, 1, 1), (-1, 1, 1, 1), (-1, -1, -1, 1)])

    def test_empty_group(self, abc):
        with pytest.raises(ValidationError, match="empty restriction"):
            restrict_class(constants(abc), Group("g", frozenset()), abc)

    def test_size_bound(self, rng):
        from multigroup.harness import random_instance
        for _ in range(30):
            inst = random_instance(rng)
            for g in inst.groups:
                if g.members:
                    pats = restrict_class(inst.hypotheses, g, inst.domain)
                    assert len(pats) <= min(inst.hypotheses.denoted_size_bound(), 2 ** len(g))


class TestGroupMass:
    def test_examples(self):
        dom = FiniteDomain(("a", "b", "c", "d"))
        inst = uniform_instance(dom, GroupFamily.from_dict({"g": ["a", "b"], "e": []}),
                                constants(dom), {x: 1 for x in dom})
        assert group_mass(inst, inst.groups["g"]) == 0.5
        assert group_mass(inst, inst.groups["e"]) == 0.0

    def test_counterexample_regions(self):
        inst = agnostic_counterexample()
        assert math.isclose(group_mass(inst, inst.groups["g1"]), 2 / 3, rel_tol=1e-12)

    def test_additive_over_disjoint(self, rng):
        dom = FiniteDomain(tuple(f"q{i}" for i in range(8)))
        w = rng.random(8)
        mass = dict(zip(dom, w / w.sum()))
        G = GroupFamily.from_dict({"a": ["q0", "q1", "q2"], "b": ["q5", "q6"], "ab": ["q0", "q1", "q2", "q5", "q6"]})
        inst = FiniteInstance(dom, G, constants(dom), mass=mass)
        total = group_mass(inst, G["a"]) + group_mass(inst, G["b"])
        assert math.isclose(total, group_mass(inst, G["ab"]), rel_tol=1e-12)
        assert group_mass(inst, G["ab"]) <= 1.0


class TestRealizable:
    def test_single_point(self):
        dom = FiniteDomain(("a",))
        inst = FiniteInstance(dom, GroupFamily.from_dict({"g": ["a"]}), constants(dom),
                              mass={"a": 1.0}, target={"a": -1})
        assert is_group_realizable(inst)

    def test_counterexample_not_realizable(self):
        assert not is_group_realizable(agnostic_counterexample())

    def test_singletons_any_target(self, singletons4, rng):
        dom, G, H = singletons4
        for _ in range(10):
            target = {x: int(rng.choice([-1, 1])) for x in dom}
            assert is_group_realizable(uniform_instance(dom, G, H, target))

    def test_monotone_in_H(self, rng):
        from multigroup.harness import random_instance
        for _ in range(30):
            inst = random_instance(rng)
            assert is_group_realizable(inst)
            extra = Hypothesis("extra", {x: 1 for x in inst.domain})
            H2 = HypothesisClass(inst.hypotheses.members + (extra,))
            bigger = FiniteInstance(inst.domain, inst.groups, H2, mass=inst.mass, target=inst.target)
            assert is_group_realizable(bigger)
