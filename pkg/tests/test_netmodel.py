import random
from fractions import Fraction

import numpy as np
import pytest

from helpers import (
    butterfly,
    butterfly_linear_code,
    butterfly_mod_code,
    butterfly_without_bottleneck,
    random_dag_network,
    random_linear_code,
    shared_edge_network,
)

from cinet.exactprob import is_ci, is_function_of, is_uniform
from cinet.finalg import Field, FieldMatrix
from cinet.netmodel import (
    Code,
    Edge,
    LinearCode,
    Message,
    Network,
    NetworkError,
    Node,
    brute_force_solve,
    edge_domain_keys,
    eval_code,
    linear_value_report,
    product_code,
    solve_cost_estimate,
    to_code,
    to_joint_dist,
    verify_linear,
)

GF2 = Field(2)
GF3 = Field(3)


# ---------------------------------------------------------------------------
# validation


def test_butterfly_is_valid():
    assert butterfly().validate() == []


def test_missing_head_defect():
    net = Network([Message("M", 1)], [Node("a", has=frozenset({"M"}))], [Edge("e", "a", "ghost")])
    assert any("missing head" in d for d in net.validate())


def test_cycle_defect():
    net = Network(
        [Message("M", 1)],
        [Node("a", has=frozenset({"M"})), Node("b")],
        [Edge("e1", "a", "b"), Edge("e2", "b", "a")],
    )
    assert any("cycle" in d for d in net.validate())


def test_unknown_message_defect():
    net = Network([], [Node("a", has=frozenset({"M"}))], [])
    assert any("unknown message" in d for d in net.validate())


def test_json_round_trip(tmp_path):
    net = butterfly()
    p = tmp_path / "net.json"
    net.save(str(p))
    again = Network.load(str(p))
    assert again.to_json_dict() == net.to_json_dict()


def test_dot_export_doubles_wide_edges():
    net = Network(
        [Message("M", 2)],
        [Node("a", has=frozenset({"M"})), Node("b", demands=frozenset({"M"}))],
        [Edge("e", "a", "b", m=2)],
    )
    dot = net.to_dot()
    assert "black:black" in dot
    assert "wants M" in dot


# ---------------------------------------------------------------------------
# code evaluation


def test_butterfly_xor_code_valid():
    assert eval_code(butterfly(), butterfly_mod_code(2))


def test_butterfly_forward_only_middle_fails():
    code = butterfly_mod_code(2)
    code.tables["e5"] = {(a, b): a for a in range(2) for b in range(2)}
    assert not eval_code(butterfly(), code)


def test_self_demand_trivial():
    net = Network(
        [Message("M", 1)],
        [Node("a", has=frozenset({"M"}), demands=frozenset({"M"}))],
        [],
    )
    assert eval_code(net, Code(2, {}))


def test_table_domain_mismatch_raises():
    code = butterfly_mod_code(2)
    del code.tables["e5"][(0, 0)]
    with pytest.raises(NetworkError):
        eval_code(butterfly(), code)


def test_missing_table_raises():
    code = butterfly_mod_code(2)
    del code.tables["e5"]
    with pytest.raises(NetworkError):
        eval_code(butterfly(), code)


# ---------------------------------------------------------------------------
# brute-force search


def test_butterfly_solvable_at_two():
    res = brute_force_solve(butterfly(), 2)
    assert res.status == "solvable"
    assert eval_code(butterfly(), res.code)


def test_butterfly_deterministic_result():
    a = brute_force_solve(butterfly(), 2)
    b = brute_force_solve(butterfly(), 2)
    assert a.code.tables == b.code.tables


def test_no_bottleneck_unsolvable():
    net = butterfly_without_bottleneck()
    for q in (2, 3):
        res = brute_force_solve(net, q)
        assert res.status == "unsolvable-at-q"


def test_shared_edge_unsolvable_by_counting():
    net = shared_edge_network()
    for q in (2, 3, 4):
        res = brute_force_solve(net, q)
        assert res.status == "unsolvable-at-q"
        assert "capacity" in res.reason
    # the counting bound is real: every code fails the evaluation
    for t in range(16):
        table = {(a, b): (a * 2 + b + t) % 2 for a in range(2) for b in range(2)}
        assert not eval_code(net, Code(2, {"c": table}))


def test_budget_refusal_never_guesses():
    net = butterfly()
    res = brute_force_solve(net, 4, budget=10)
    assert res.status == "budget-exceeded"
    assert res.estimate > 10
    assert res.code is None


def test_fixed_tables_constrain_search():
    net = butterfly()
    # pin the bottleneck to forward M1 only: the rest cannot fix r1's demand
    fixed = {"e5": {(a, b): a for a in range(2) for b in range(2)}}
    res = brute_force_solve(net, 2, fixed_tables=fixed)
    assert res.status == "unsolvable-at-q"
    free = brute_force_solve(net, 2)
    assert free.status == "solvable"


def test_estimate_monotone_in_q():
    net = butterfly()
    assert solve_cost_estimate(net, 3) > solve_cost_estimate(net, 2)


# ---------------------------------------------------------------------------
# joint distribution bridge


def test_to_joint_dist_butterfly():
    net = butterfly()
    d = to_joint_dist(net, butterfly_mod_code(2))
    assert d.atom_count() == 4
    assert is_function_of(d, {"e5"}, {"M1", "M2"})
    assert is_function_of(d, {"M2"}, {"e3", "e6"})


def test_to_joint_dist_messages_independent_uniform():
    net = butterfly()
    d = to_joint_dist(net, butterfly_mod_code(3))
    assert is_ci(d, {"M1"}, {"M2"}, set())
    assert is_uniform(d, {"M1"}) and is_uniform(d, {"M2"})


def test_to_joint_dist_edges_deterministic():
    net = butterfly()
    d = to_joint_dist(net, butterfly_mod_code(2))
    for e in net.edges:
        assert is_function_of(d, {e.id}, {"M1", "M2"})


def test_to_joint_dist_atom_cap():
    with pytest.raises(NetworkError):
        to_joint_dist(butterfly(), butterfly_mod_code(2), atom_cap=3)


# ---------------------------------------------------------------------------
# linear verifier


def test_identity_relay_linear():
    net = Network(
        [Message("M", 1)],
        [Node("a", has=frozenset({"M"})), Node("b", demands=frozenset({"M"}))],
        [Edge("e", "a", "b")],
    )
    lc = LinearCode(GF2, Fraction(1), {"e": FieldMatrix(GF2, [[1]])})
    assert verify_linear(net, lc).holds
    assert linear_value_report(net, lc).holds


def test_butterfly_linear_code_verifies():
    net = butterfly()
    for f in (GF2, GF3):
        lc = butterfly_linear_code(f)
        assert verify_linear(net, lc).holds
        assert linear_value_report(net, lc).holds


def test_tampered_linear_code_diagnosed():
    net = butterfly()
    lc = butterfly_linear_code(GF2)
    lc.matrices["e6"] = FieldMatrix(GF2, [[0, 0]])
    rep = verify_linear(net, lc)
    assert not rep.holds
    assert "not decodable" in rep.failing_clause
    assert "span rank" in rep.failing_clause
    assert not linear_value_report(net, lc).holds


def test_non_computable_matrix_rejected():
    net = butterfly()
    lc = butterfly_linear_code(GF2)
    # e3 leaves s1, which cannot see M2
    lc.matrices["e3"] = FieldMatrix(GF2, [[0, 1]])
    rep = verify_linear(net, lc)
    assert not rep.holds
    assert "not computable" in rep.failing_clause
    with pytest.raises(NetworkError):
        to_code(net, lc)


def test_row_capacity_enforced():
    net = butterfly()
    lc = butterfly_linear_code(GF2)
    lc.matrices["e5"] = FieldMatrix(GF2, [[1, 0], [0, 1]])
    rep = verify_linear(net, lc)
    assert not rep.holds
    assert "exceed capacity" in rep.failing_clause


def test_cross_backend_agreement_randomized():
    # value-evaluation of the table form agrees with the row-space verdict
    rng = random.Random(41)
    agreements = 0
    for f in (GF2, GF3):
        for _ in range(8):
            net = random_dag_network(rng)
            lc = random_linear_code(net, f, rng)
            linear_verdict = verify_linear(net, lc).holds
            table_verdict = eval_code(net, to_code(net, lc))
            assert linear_verdict == table_verdict
            assert linear_value_report(net, lc).holds == linear_verdict
            agreements += 1
    assert agreements >= 10


# ---------------------------------------------------------------------------
# product codes


def test_product_of_mod_codes_solves_at_six():
    net = butterfly()
    c = product_code(net, butterfly_mod_code(2), butterfly_mod_code(3))
    assert c.q == 6
    assert eval_code(net, c)


def test_product_with_itself():
    net = butterfly()
    c2 = butterfly_mod_code(2)
    c = product_code(net, c2, c2)
    assert c.q == 4
    assert eval_code(net, c)


def test_product_valid_with_invalid_fails():
    net = butterfly()
    good = butterfly_mod_code(2)
    bad = butterfly_mod_code(2)
    bad.tables["e5"] = {(a, b): a for a in range(2) for b in range(2)}
    assert not eval_code(net, bad)
    assert not eval_code(net, product_code(net, good, bad))
    assert not eval_code(net, product_code(net, bad, good))


def test_product_validity_equals_conjunction_randomized():
    net = butterfly()
    rng = random.Random(13)
    edges = [e.id for e in net.edges]
    for _ in range(30):
        codes = []
        verdicts = []
        for q in (2, 3):
            c = butterfly_mod_code(q)
            if rng.random() < 0.5:
                eid = rng.choice(edges)
                keys = edge_domain_keys(net, net.edge(eid), q)
                c.tables[eid] = {k: rng.randrange(q) for k in keys}
            codes.append(c)
            verdicts.append(eval_code(net, c))
        combined = eval_code(net, product_code(net, *codes))
        assert combined == (verdicts[0] and verdicts[1])
