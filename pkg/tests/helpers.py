"""Shared network fixtures for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from cinet.finalg import Field, FieldMatrix
from cinet.netmodel import Code, Edge, LinearCode, Message, Network, Node


def butterfly() -> Network:
    return Network(
        messages=[Message("M1", 1), Message("M2", 1)],
        nodes=[
            Node("s1", has=frozenset({"M1"})),
            Node("s2", has=frozenset({"M2"})),
            Node("mix"),
            Node("relay"),
            Node("r1", demands=frozenset({"M1", "M2"})),
            Node("r2", demands=frozenset({"M1", "M2"})),
        ],
        edges=[
            Edge("e1", "s1", "mix"),
            Edge("e2", "s2", "mix"),
            Edge("e3", "s1", "r1"),
            Edge("e4", "s2", "r2"),
            Edge("e5", "mix", "relay"),
            Edge("e6", "relay", "r1"),
            Edge("e7", "relay", "r2"),
        ],
    )


def butterfly_without_bottleneck() -> Network:
    b = butterfly()
    return Network(b.messages, b.nodes, [e for e in b.edges if e.id != "e5"])


def butterfly_mod_code(q: int) -> Code:
    """Forward both sources and send their sum mod q through the bottleneck."""
    r = range(q)
    fwd = {(v,): v for v in r}
    return Code(
        q,
        {
            "e1": fwd,
            "e2": fwd,
            "e3": fwd,
            "e4": fwd,
            "e5": {(a, b): (a + b) % q for a in r for b in r},
            "e6": fwd,
            "e7": fwd,
        },
    )


def shared_edge_network() -> Network:
    """Two unit messages forced through one unit edge; unsolvable by counting."""
    return Network(
        messages=[Message("M1", 1), Message("M2", 1)],
        nodes=[
            Node("s", has=frozenset({"M1", "M2"})),
            Node("r", demands=frozenset({"M1", "M2"})),
        ],
        edges=[Edge("c", "s", "r")],
    )


def butterfly_linear_code(field: Field) -> LinearCode:
    """The classical sum code as matrices over a prime field (d = 1)."""
    one = [[1, 0]], [[0, 1]]
    m1 = FieldMatrix(field, [[1, 0]])
    m2 = FieldMatrix(field, [[0, 1]])
    s = FieldMatrix(field, [[1, 1]])
    return LinearCode(
        field,
        Fraction(1),
        {"e1": m1, "e2": m2, "e3": m1, "e4": m2, "e5": s, "e6": s, "e7": s},
    )


def random_dag_network(rng: random.Random) -> Network:
    """A small layered DAG with random access sets and demands."""
    n_msgs = rng.choice([1, 2])
    messages = [Message(f"M{i+1}", 1) for i in range(n_msgs)]
    names = [m.name for m in messages]
    nodes = [Node("src", has=frozenset(names))]
    mids = []
    for i in range(rng.choice([1, 2])):
        mids.append(Node(f"mid{i}", has=frozenset(rng.sample(names, rng.randrange(len(names) + 1)))))
    nodes += mids
    sink_demands = frozenset(rng.sample(names, rng.randrange(1, len(names) + 1)))
    nodes.append(Node("sink", demands=sink_demands))
    edges = []
    eid = 0
    for mid in mids:
        edges.append(Edge(f"f{eid}", "src", mid.id))
        eid += 1
        edges.append(Edge(f"f{eid}", mid.id, "sink"))
        eid += 1
    edges.append(Edge(f"f{eid}", "src", "sink"))
    return Network(messages, nodes, edges)


def random_linear_code(net: Network, field: Field, rng: random.Random) -> LinearCode:
    """Random access-measurable matrices: every edge row is a combination of
    the tail's accessible rows, so only decodability varies."""
    from cinet.netmodel import message_blocks

    lc = LinearCode(field, Fraction(1), {})
    total, spans = message_blocks(net, lc)
    mats: dict[str, FieldMatrix] = {}
    for e in net.topo_edges():
        tail = net.node(e.tail)
        rows = []
        for m in net.messages:
            if m.name in tail.has:
                st, dim = spans[m.name]
                for i in range(dim):
                    row = np.zeros(total, dtype=np.int64)
                    row[st + i] = 1
                    rows.append(row)
        for inc in net.in_edges(e.tail):
            rows.extend(mats[inc.id].a)
        out = np.zeros((e.m, total), dtype=np.int64)
        for r in range(e.m):
            for row in rows:
                coeff = rng.randrange(field.order)
                out[r] = field.add(out[r], field.mul(row, np.int64(coeff)))
        mats[e.id] = FieldMatrix(field, out)
    lc.matrices = mats
    return lc
