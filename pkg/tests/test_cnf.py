import itertools
import random

import pytest

from ddlab import cnf as C
from ddlab.assignments import Assignment, AssignmentSet, cube, product, restrict_set
from ddlab.errors import FormatError, ScaleError, ScopeError
from ddlab.graphs import treewidth_exact

from conftest import random_cnf


def phi_example():
    # (x1 v x2) & (x2 v -x3 v -x4)
    return C.Cnf([[("x1", 1), ("x2", 1)], [("x2", 1), ("x3", 0), ("x4", 0)]])


class TestConstruction:
    def test_vars_are_union(self):
        phi = phi_example()
        assert phi.vars == {"x1", "x2", "x3", "x4"}

    def test_duplicate_clauses_collapse(self):
        phi = C.Cnf([[("x", 1), ("y", 1)], [("y", 1), ("x", 1)]])
        assert len(phi) == 1

    def test_tautological_clause_rejected(self):
        with pytest.raises(ValueError):
            C.Cnf([[("x", 1), ("x", 0)]])

    def test_empty_clause_is_legal(self):
        assert len(C.Cnf([[]])) == 1


class TestEvaluate:
    def test_example_all_ones(self):
        a = Assignment({v: 1 for v in "x1 x2 x3 x4".split()})
        assert C.evaluate(phi_example(), a) == 1

    def test_vacuous_and_contradictory(self):
        a = Assignment({"x": 1})
        assert C.evaluate(C.Cnf([]), a) == 1
        assert C.evaluate(C.Cnf([[]]), a) == 0

    def test_partial_assignment_rejected(self):
        with pytest.raises(ScopeError):
            C.evaluate(phi_example(), Assignment({"x1": 1}))


class TestModels:
    def test_single_edge_three_models(self):
        phi = C.Cnf([[("u", 1), ("v", 1)]])
        assert len(C.models(phi, {"u", "v"})) == 3

    def test_p3_five_models(self):
        phi = C.Cnf([[("x1", 1), ("x2", 1)], [("x2", 1), ("x3", 1)]])
        got = C.models(phi, phi.vars)
        assert len(got) == 5
        # cross-check against direct evaluation over the cube
        expect = AssignmentSet(a for a in cube(phi.vars) if C.evaluate(phi, a))
        assert got == expect

    def test_universe_lifts(self):
        phi = C.Cnf([[("u", 1)]])
        assert len(C.models(phi, {"u", "z"})) == 2

    def test_cap(self):
        with pytest.raises(ScaleError):
            C.models(C.Cnf([]), {f"v{i}" for i in range(25)})
        with pytest.raises(ScopeError):
            C.models(phi_example(), {"x1"})


class TestReduce:
    def test_satisfied_clause_dropped(self):
        phi = C.Cnf([[("x", 1), ("y", 1)]])
        assert C.reduce(phi, Assignment({"x": 1})) == C.Cnf([])

    def test_occurrence_deleted(self):
        phi = C.Cnf([[("x", 1), ("y", 1)]])
        assert C.reduce(phi, Assignment({"x": 0})) == C.Cnf([[("y", 1)]])

    def test_empty_clause_kept(self):
        phi = C.Cnf([[("x", 1)]])
        out = C.reduce(phi, Assignment({"x": 0}))
        assert frozenset() in out.clauses

    def test_p3_reduction_count(self):
        phi = C.Cnf([[("x1", 1), ("x2", 1)], [("x2", 1), ("x3", 1)]])
        out = C.reduce(phi, Assignment({"x2": 1}))
        assert out == C.Cnf([])
        # the reduction equation then lifts the model count over the cube
        assert len(product(C.models(out, out.vars), cube({"x1", "x3"}))) == 4

    def test_reduction_equation_on_random_cnfs(self):
        rng = random.Random(5)
        for _ in range(60):
            phi = random_cnf(rng, rng.randint(2, 5), rng.randint(1, 6))
            if not phi.vars:
                continue
            chosen = rng.sample(sorted(phi.vars), rng.randint(0, len(phi.vars)))
            g = Assignment({v: rng.randint(0, 1) for v in chosen})
            left = restrict_set(C.models(phi, phi.vars), g)
            reduced = C.reduce(phi, g)
            lifted = (phi.vars - g.vars) - reduced.vars
            right = product(C.models(reduced, reduced.vars), cube(lifted))
            assert left == right


class TestGraphs:
    def test_p3_primal_is_path(self):
        phi = C.Cnf([[("x1", 1), ("x2", 1)], [("x2", 1), ("x3", 1)]])
        primal, incidence = C.graphs_of(phi)
        assert primal.edges == {frozenset(("x1", "x2")), frozenset(("x2", "x3"))}
        clause_vertices = incidence.vertices - phi.vars
        assert all(incidence.degree(cv) == 2 for cv in clause_vertices)

    def test_single_clause_gives_clique(self):
        phi = C.Cnf([[("a", 1), ("b", 0), ("c", 1)]])
        primal, _ = C.graphs_of(phi)
        assert len(primal.edges) == 3

    def test_incidence_leq_primal_treewidth_on_pairwise_binary_cnfs(self):
        # the inequality's regime: one binary clause per distinct variable
        # pair (the incidence graph is then the subdivided primal graph)
        rng = random.Random(3)
        done = 0
        for _ in range(40):
            n = rng.randint(2, 5)
            names = [f"x{i}" for i in range(n)]
            pairs = [p for p in itertools.combinations(names, 2) if rng.random() < 0.6]
            if not pairs:
                continue
            phi = C.Cnf([[(a, rng.randint(0, 1)), (b, rng.randint(0, 1))]
                         for a, b in pairs])
            primal, incidence = C.graphs_of(phi)
            if len(incidence.vertices) > 10:
                continue
            assert treewidth_exact(incidence) <= treewidth_exact(primal)
            done += 1
        assert done >= 15

    def test_incidence_primal_gap_boundary(self):
        # outside that regime the inequality genuinely fails; the general
        # bound is one more than the primal treewidth
        phi = C.Cnf([[("a", 1), ("b", 1), ("c", 1)],
                     [("a", 0), ("b", 1), ("c", 1)],
                     [("a", 1), ("b", 0), ("c", 1)]])
        primal, incidence = C.graphs_of(phi)
        assert treewidth_exact(primal) == 2
        assert treewidth_exact(incidence) == 3
        rng = random.Random(9)
        for _ in range(25):
            phi = random_cnf(rng, rng.randint(2, 4), rng.randint(1, 4))
            if not phi.vars:
                continue
            primal, incidence = C.graphs_of(phi)
            if len(incidence.vertices) > 10:
                continue
            assert treewidth_exact(incidence) <= treewidth_exact(primal) + 1


class TestDimacs:
    def test_roundtrip_preserves_names(self):
        phi = phi_example()
        text = C.write_dimacs(phi)
        assert "p cnf 4 2" in text
        assert C.read_dimacs(text) == phi

    def test_unnamed_indices_get_default_names(self):
        phi = C.read_dimacs("p cnf 2 1\n1 -2 0\n")
        assert phi.vars == {"x1", "x2"}

    def test_malformed_inputs(self):
        with pytest.raises(FormatError):
            C.read_dimacs("p cnf 1 1\n1\n")  # missing terminator
        with pytest.raises(FormatError):
            C.read_dimacs("1 0\n")  # clause before header
        with pytest.raises(FormatError):
            C.read_dimacs("p cnf 1 2\n1 0\n")  # clause count mismatch
