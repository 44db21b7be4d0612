import itertools
import random

import pytest

from ddlab.assignments import (Assignment, AssignmentSet, breaks, cube, product,
                               product_all, project, project_set, restrict_set)
from ddlab.errors import DomainOverlapError, ScopeError, UniformityError


def aset(*dicts):
    return AssignmentSet([Assignment(d) for d in dicts])


class TestAssignment:
    def test_well_formed(self):
        a = Assignment({"x": 1, "y": 0})
        assert a.vars == {"x", "y"}
        assert a["x"] == 1

    def test_conflicting_bits_rejected(self):
        with pytest.raises(ValueError):
            Assignment([("x", 1), ("x", 0)])

    def test_union_and_minus(self):
        a = Assignment({"x": 1})
        b = Assignment({"y": 0})
        assert a.union(b) == Assignment({"x": 1, "y": 0})
        assert a.union(b).minus(b) == a
        with pytest.raises(ValueError):
            a.union(Assignment({"x": 0}))

    def test_render_parse_roundtrip(self):
        a = Assignment({"b": 0, "a": 1})
        assert a.render() == "a=1,b=0"
        assert Assignment.parse(a.render()) == a
        assert Assignment.parse("") == Assignment()

    def test_set_render_is_line_based(self):
        s = aset({"x": 1}, {"x": 0})
        assert s.render() == "x=0\nx=1\n"


class TestProduct:
    def test_worked_example(self):
        h1 = aset({"x1": 1, "x2": 0}, {"x2": 1})
        h2 = aset({"x3": 1}, {"x3": 0, "x4": 0})
        expect = aset(
            {"x1": 1, "x2": 0, "x3": 1},
            {"x1": 1, "x2": 0, "x3": 0, "x4": 0},
            {"x2": 1, "x3": 1},
            {"x2": 1, "x3": 0, "x4": 0},
        )
        assert product(h1, h2) == expect
        assert len(product(h1, h2)) == len(h1) * len(h2)

    def test_unit_and_empty(self):
        h = aset({"x": 1}, {"x": 0, "y": 1})
        assert product(h, AssignmentSet([Assignment()])) == h
        assert product(AssignmentSet(), h) == AssignmentSet()

    def test_overlap_rejected(self):
        with pytest.raises(DomainOverlapError):
            product(aset({"x": 1}), aset({"x": 0}))

    def test_commutative_associative(self):
        rng = random.Random(7)
        for _ in range(30):
            parts = []
            pool = [f"v{i}" for i in range(6)]
            rng.shuffle(pool)
            sizes = [2, 2, 2]
            at = 0
            for s in sizes:
                names = pool[at:at + s]
                at += s
                members = [dict(zip(names, bits))
                           for bits in itertools.product((0, 1), repeat=s)
                           if rng.random() < 0.7]
                parts.append(aset(*members))
            a, b, c = parts
            left = product(product(a, b), c)
            right = product(a, product(b, c))
            swapped = product(product(c, a), b)
            assert left == right == swapped


class TestProjectRestrict:
    def test_project_examples(self):
        a = Assignment({"x1": 1, "x2": 0})
        assert project(a, {"x1"}) == Assignment({"x1": 1})
        assert project(a, a.vars) == a
        assert project(a, set()) == Assignment()

    def test_restrict_worked_example(self):
        h = aset({"x1": 0, "x2": 0, "x3": 1},
                 {"x1": 1, "x2": 0, "x3": 1},
                 {"x1": 1, "x2": 1, "x3": 0})
        out = restrict_set(h, Assignment({"x1": 1}))
        assert out == aset({"x2": 0, "x3": 1}, {"x2": 1, "x3": 0})

    def test_restrict_trivial_cases(self):
        h = aset({"x1": 1}, {"x1": 0})
        assert restrict_set(h, Assignment()) == h
        assert restrict_set(aset({"x1": 1}), Assignment({"x1": 0})) == AssignmentSet()

    def test_restrict_projects_outside_vars(self):
        h = aset({"x1": 1}, {"x1": 0})
        out = restrict_set(h, Assignment({"x1": 1, "zz": 0}))
        assert out == aset({})

    def test_restrict_of_uniform_stays_uniform(self):
        h = cube(["a", "b", "c"])
        out = restrict_set(h, Assignment({"a": 1}))
        assert out.is_uniform and out.universe == {"b", "c"}

    def test_restriction_distributes_over_product(self):
        rng = random.Random(11)
        for _ in range(40):
            h1 = AssignmentSet(
                Assignment({"a": x, "b": y}) for x, y in
                itertools.product((0, 1), repeat=2) if rng.random() < 0.8)
            h2 = AssignmentSet(
                Assignment({"c": x, "d": y}) for x, y in
                itertools.product((0, 1), repeat=2) if rng.random() < 0.8)
            if not h1.elements or not h2.elements:
                continue
            a = Assignment({"a": rng.randint(0, 1), "c": rng.randint(0, 1)})
            r1 = restrict_set(h1, a)
            r2 = restrict_set(h2, a)
            if r1.elements and r2.elements:
                assert restrict_set(product(h1, h2), a) == product(r1, r2)


class TestBreaks:
    def test_full_cube_breaks(self):
        ok, witness = breaks(cube(["x", "y"]), {"x", "y"})
        assert ok
        v1, v2 = witness
        assert {"x", "y"} & v1 and {"x", "y"} & v2

    def test_worked_non_breaking_example(self):
        h1 = aset({"x1": 1, "x2": 0})
        h2 = aset({"x3": 0, "x4": 0}, {"x3": 0, "x4": 1}, {"x3": 1, "x4": 0})
        h = product(h1, h2)
        ok, witness = breaks(h, {"x3", "x4"})
        assert not ok and witness is None

    def test_singleton_never_breaks(self):
        assert breaks(cube(["x", "y"]), {"x"}) == (False, None)

    def test_uniformity_and_scope_errors(self):
        with pytest.raises(UniformityError):
            breaks(aset({"x": 1}, {"x": 0, "y": 1}), {"x"})
        with pytest.raises(ScopeError):
            breaks(cube(["x"]), {"zz"})


class TestNoBreakProposition:
    def test_unbroken_sets_live_inside_one_factor(self):
        rng = random.Random(23)
        nonvacuous = 0
        for _ in range(150):
            m = rng.randint(2, 3)
            pool = [f"v{i}" for i in range(8)]
            rng.shuffle(pool)
            at = 0
            factors = []
            for _ in range(m):
                size = rng.randint(1, 3)
                if at + size > len(pool):
                    size = len(pool) - at
                names = pool[at:at + size]
                at += size
                members = [dict(zip(names, bits))
                           for bits in itertools.product((0, 1), repeat=size)
                           if rng.random() < 0.7]
                if not members:
                    members = [dict(zip(names, (0,) * size))]
                factors.append(aset(*members))
            h = product_all(factors)
            if not h.elements or len(h.universe) < 2:
                continue
            # half the draws sit inside one factor, half spread across them
            wide = [f for f in factors if len(f.universe) >= 2]
            if rng.random() < 0.5 and wide:
                src = sorted(rng.choice(wide).universe)
                y = frozenset(rng.sample(src, rng.randint(2, len(src))))
            else:
                universe = sorted(h.universe)
                y = frozenset(rng.sample(universe, rng.randint(2, len(universe))))
            ok, _ = breaks(h, y)
            if not ok:
                nonvacuous += 1
                assert any(y <= f.universe for f in factors)
        assert nonvacuous >= 20


def test_project_set_shrinks_universe():
    h = cube(["a", "b"])
    assert project_set(h, {"a"}) == cube(["a"])
