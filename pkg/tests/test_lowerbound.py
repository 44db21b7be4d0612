import itertools
import json
import random

import pytest

from ddlab import cnf as C
from ddlab import diagrams as D
from ddlab import lowerbound as LB
from ddlab.assignments import Assignment, restrict_set, breaks
from ddlab.errors import PreconditionError, SoundnessError
from ddlab.formulas import psi_formula, vc_formula
from ddlab.graphs import Graph, LinearOrder

from conftest import matching_graph


def worked_example_experiment():
    """The three-edge matching with the explicit order from the walkthrough."""
    g = matching_graph(3)
    order = LinearOrder(["u1#1", "u2#1", "u1#2", "u2#2", "w1#1", "w2#1", "u3#1",
                         "w1#2", "w2#2", "w3#2", "u3#2", "w3#1"])
    return LB.make_experiment(g, [("u1", "w1"), ("u2", "w2"), ("u3", "w3")],
                              "and-obdd", order)


class TestExperiments:
    def test_canonical_bad_order(self):
        exp = LB.make_experiment(matching_graph(3),
                                 [("u1", "w1"), ("u2", "w2"), ("u3", "w3")],
                                 "and-obdd")
        assert exp.order.names[:3] == ("u1#1", "u2#1", "u3#1")
        assert exp.prefix_len == 3

    def test_worked_example_prefix(self):
        exp = worked_example_experiment()
        assert exp.prefix_len == 7
        assert exp.prefix_vars == {"u1#1", "u2#1", "u1#2", "u2#2",
                                   "w1#1", "w2#1", "u3#1"}

    def test_non_induced_matching_rejected(self):
        g = Graph(["a", "b", "c", "d"], [("a", "b"), ("b", "c"), ("c", "d")])
        with pytest.raises(PreconditionError):
            LB.make_experiment(g, [("a", "b"), ("c", "d")], "obdd")

    def test_w_before_u_rejected(self):
        g = matching_graph(2)
        order = LinearOrder(["w1", "u1", "u2", "w2"])
        with pytest.raises(PreconditionError):
            LB.make_experiment(g, [("u1", "w1"), ("u2", "w2")], "obdd", order)


class TestFoolingSet:
    def test_and_obdd_counts(self):
        for q in (3, 4):
            exp = LB.make_experiment(
                matching_graph(q),
                [(f"u{i}", f"w{i}") for i in range(1, q + 1)], "and-obdd")
            assert len(LB.fooling_set(exp)) == 2 ** q - q - 2

    def test_and_obdd_worked_example_shape(self):
        exp = worked_example_experiment()
        fs = LB.fooling_set(exp)
        assert len(fs) == 3
        for g in fs:
            assert all(g[v] == 1 for v in ["u1#2", "u2#2", "w1#1", "w2#1"])
            assert sum(g[v] for v in ["u1#1", "u2#1", "u3#1"]) == 2

    def test_obdd_counts(self):
        for q in (1, 2, 3, 4):
            exp = LB.make_experiment(
                matching_graph(q),
                [(f"u{i}", f"w{i}") for i in range(1, q + 1)], "obdd")
            assert len(LB.fooling_set(exp)) == 2 ** q - 1

    def test_q_too_small_for_and_engine(self):
        exp_small = LB.make_experiment(matching_graph(2),
                                       [("u1", "w1"), ("u2", "w2")], "and-obdd")
        with pytest.raises(PreconditionError):
            LB.fooling_set(exp_small)


class TestUnbreakable:
    def test_worked_example_values(self):
        exp = worked_example_experiment()
        g = Assignment({"u1#1": 0, "u2#1": 1, "u3#1": 1,
                        "u1#2": 1, "u2#2": 1, "w1#1": 1, "w2#1": 1})
        index_set, ub, extend = LB.unbreakable(exp, g)
        assert index_set == (2, 3)
        assert ub == {"w2#2", "w3#2"}
        h = extend(index_set)
        assert h["w1#2"] == 1 and h["w2#2"] == 0 and h["w3#2"] == 0
        assert h.vars == exp.formula().vars

    def test_empty_subset_falsifies_the_second_long_clause(self):
        exp = worked_example_experiment()
        g = sorted(LB.fooling_set(exp), key=lambda a: a.render())[0]
        _, _, extend = LB.unbreakable(exp, g)
        h0 = extend(())
        psi = exp.formula()
        assert C.evaluate(psi, h0) == 0
        falsified = [c for c in psi.clauses
                     if not any(h0[n] == s for n, s in c)]
        assert falsified == [frozenset((f"{v}#2", 0) for v in exp.graph.vertices)]

    def test_singletons_satisfy(self):
        exp = worked_example_experiment()
        psi = exp.formula()
        for g in LB.fooling_set(exp):
            index_set, _, extend = LB.unbreakable(exp, g)
            for i in index_set:
                assert C.evaluate(psi, extend((i,))) == 1

    def test_wrong_engine_rejected(self):
        exp = LB.make_experiment(matching_graph(3),
                                 [(f"u{i}", f"w{i}") for i in range(1, 4)], "obdd")
        with pytest.raises(PreconditionError):
            LB.unbreakable(exp, sorted(LB.fooling_set(exp), key=lambda a: a.render())[0])


class TestLocateAndCertify:
    def test_and_obdd_certificate_q3(self):
        exp = LB.make_experiment(matching_graph(3),
                                 [(f"u{i}", f"w{i}") for i in range(1, 4)], "and-obdd")
        diagram = LB.obdd_for_order(exp.formula(), exp.order)
        cert = LB.certify(diagram, exp.order, exp)
        assert cert.fooling_size == 3 == cert.bound
        assert cert.injective
        assert cert.diagram_size == diagram.size >= 3
        doc = json.loads(cert.to_json())
        assert doc["bound"] == 3 and doc["wall_clock_ms"] is None
        assert len(doc["u_map"]) == 3

    def test_obdd_certificates(self):
        for q in (3, 4):
            exp = LB.make_experiment(
                matching_graph(q),
                [(f"u{i}", f"w{i}") for i in range(1, q + 1)], "obdd")
            diagram = LB.obdd_for_order(exp.formula(), exp.order)
            cert = LB.certify(diagram, exp.order, exp)
            assert cert.bound == 2 ** q - 1
            assert diagram.size >= 2 ** q - 1

    def test_certify_conjunction_bearing_diagram(self):
        # a component-splitting trace gives a true and-decomposable ordered
        # diagram; the locator must pick the owner among its frontier nodes
        from conftest import component_and_obdd
        exp = LB.make_experiment(matching_graph(3),
                                 [(f"u{i}", f"w{i}") for i in range(1, 4)],
                                 "and-obdd")
        diagram = component_and_obdd(exp.formula(), exp.order)
        cls = D.validate(diagram, exp.order)
        assert cls.is_and_obdd and not cls.is_fbdd
        cert = LB.certify(diagram, exp.order, exp)
        assert cert.bound == 3 and cert.injective

    def test_locate_returns_owning_frontier_node(self):
        exp = worked_example_experiment()
        diagram = LB.obdd_for_order(exp.formula(), exp.order)
        for g in sorted(LB.fooling_set(exp), key=lambda a: a.render()):
            node = LB.locate(diagram, exp.order, exp, g)
            _, ub, _ = LB.unbreakable(exp, g)
            assert ub <= diagram.vars_below(node)

    def test_ill_classed_diagram_rejected(self):
        exp = LB.make_experiment(matching_graph(3),
                                 [(f"u{i}", f"w{i}") for i in range(1, 4)], "obdd")
        b = D.DiagramBuilder()
        t = b.sink(1)
        f = b.sink(0)
        left = b.decision("u1", f, t)
        right = b.decision("w1", f, t)
        bad = b.finalize(b.conj(left, right))  # has a conjunction: not an OBDD
        with pytest.raises(SoundnessError):
            LB.locate(bad, LinearOrder(sorted(bad.vars)), exp,
                      Assignment({}), check_input=False)

    def test_wrong_function_rejected(self):
        exp = LB.make_experiment(matching_graph(3),
                                 [(f"u{i}", f"w{i}") for i in range(1, 4)], "obdd")
        wrong = LB.obdd_for_order(C.Cnf([[(v, 1)] for v in exp.formula().vars]),
                                  exp.order)
        with pytest.raises(SoundnessError):
            LB.certify(wrong, exp.order, exp)

    def test_mutated_diagram_caught(self):
        # flipping one edge must trip validation, equivalence, or injectivity
        exp = LB.make_experiment(matching_graph(3),
                                 [(f"u{i}", f"w{i}") for i in range(1, 4)], "obdd")
        good = LB.obdd_for_order(exp.formula(), exp.order)
        rng = random.Random(3)
        mutated = 0
        for _ in range(12):
            nodes = list(good.nodes)
            picks = [i for i, n in enumerate(nodes) if n.kind == "decision"]
            i = rng.choice(picks)
            n = nodes[i]
            nodes[i] = D.decision(n.var, n.hi, n.lo)  # swap the branches
            try:
                bad = D.Diagram(nodes, good.source)
            except Exception:
                continue
            mutated += 1
            with pytest.raises((SoundnessError, Exception)):
                LB.certify(bad, exp.order, exp)
        assert mutated >= 5


class TestNeatcrossChecks:
    def test_restricted_models_never_break_the_unbreakable_set(self):
        exp = worked_example_experiment()
        diagram = LB.obdd_for_order(exp.formula(), exp.order)
        sats = D.satisfying_set(diagram)
        for g in LB.fooling_set(exp):
            _, ub, _ = LB.unbreakable(exp, g)
            restricted = restrict_set(sats, g)
            ok, _ = breaks(restricted, ub)
            assert not ok


class TestMinObdd:
    def test_constant_true(self):
        assert LB.min_obdd(C.Cnf([]), verify=True)[0] == 1

    def test_single_edge_is_order_independent(self):
        phi = vc_formula(Graph(["u", "v"], [("u", "v")]))
        assert LB.obdd_size(phi, LinearOrder(("u", "v"))) == \
            LB.obdd_size(phi, LinearOrder(("v", "u"))) == 4
        assert LB.min_obdd(phi, verify=True)[0] == 4

    def test_matching3_bad_order_lower_bound(self):
        exp = LB.make_experiment(matching_graph(3),
                                 [(f"u{i}", f"w{i}") for i in range(1, 4)], "obdd")
        assert LB.obdd_size(exp.formula(), exp.order) >= 7

    def test_sampled_deterministic(self):
        phi = psi_formula(matching_graph(2))
        a = LB.min_obdd(phi, search="sampled", count=40, seed=9)
        b = LB.min_obdd(phi, search="sampled", count=40, seed=9)
        assert a == b

    def test_min_never_beats_any_fixed_order(self):
        phi = vc_formula(matching_graph(2))
        best, _ = LB.min_obdd(phi)
        for perm in itertools.permutations(sorted(phi.vars)):
            assert best <= LB.obdd_size(phi, LinearOrder(perm))

    def test_reduced_size_never_beats_compiler_obdds(self):
        # the oracle is minimal per order, so compiler-built OBDDs on the
        # same order can only be at least as large
        from ddlab import compile as CP
        from ddlab.formulas import psi_formula
        from ddlab.graphs import Graph, grid
        for n in (2, 3):
            gg = grid(n)
            built = CP.psi_layer_obdd(n, "hor")
            phi = psi_formula(gg.graph.subgraph_of_edges(gg.hor))
            order = CP.psi_interleaved_order(n, "hor")
            assert LB.obdd_size(phi, order) <= built.size

    def test_construction_matches_kernel_size(self):
        rng = random.Random(13)
        from conftest import random_cnf
        for _ in range(25):
            phi = random_cnf(rng, rng.randint(1, 5), rng.randint(1, 5))
            if not phi.vars:
                continue
            names = sorted(phi.vars)
            rng.shuffle(names)
            order = LinearOrder(names)
            built = LB.obdd_for_order(phi, order)
            assert built.size == LB.obdd_size(phi, order)
            assert D.validate(built, order.names).is_obdd
