"""Network-coding model: DAG multigraph networks, table codes, the coding
constraint, exhaustive solvability search, and an exact linear-code verifier.

Messages and edges carry alphabet exponents in {1, 2}: an exponent-2
component transmits pairs over the base alphabet (two parallel edges).  All
decisions are exact integer comparisons; numpy is used only to evaluate
signals in bulk.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exactprob import JointDistribution
from .finalg import Field, FieldMatrix, rowspace_contains
from .predicates import PredicateReport


class NetworkError(ValueError):
    """Malformed network, code, or query."""


@dataclass(frozen=True)
class Message:
    name: str
    m: int  # alphabet exponent

    def __post_init__(self):
        if self.m not in (1, 2):
            raise NetworkError(f"message {self.name}: exponent must be 1 or 2")


@dataclass(frozen=True)
class Node:
    id: str
    has: frozenset[str] = frozenset()
    demands: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    m: int = 1

    def __post_init__(self):
        if self.m not in (1, 2):
            raise NetworkError(f"edge {self.id}: exponent must be 1 or 2")


class Network:
    """Directed acyclic multigraph with per-node message access and demands."""

    def __init__(self, messages: Sequence[Message], nodes: Sequence[Node], edges: Sequence[Edge]):
        self.messages = list(messages)
        self.nodes = list(nodes)
        self.edges = list(edges)
        self._msg = {m.name: m for m in self.messages}
        self._node = {n.id: n for n in self.nodes}
        self._edge = {e.id: e for e in self.edges}

    def require_valid(self) -> None:
        defects = self.validate()
        if defects:
            raise NetworkError("; ".join(defects))

    def validate(self) -> list[str]:
        defects = []
        if len(self._msg) != len(self.messages):
            defects.append("duplicate message names")
        if len(self._node) != len(self.nodes):
            defects.append("duplicate node ids")
        if len(self._edge) != len(self.edges):
            defects.append("duplicate edge ids")
        for n in self.nodes:
            for m in n.has | n.demands:
                if m not in self._msg:
                    defects.append(f"node {n.id}: unknown message {m}")
        for e in self.edges:
            if e.tail not in self._node:
                defects.append(f"edge {e.id}: missing tail {e.tail}")
            if e.head not in self._node:
                defects.append(f"edge {e.id}: missing head {e.head}")
        if not defects and self._topo_nodes() is None:
            defects.append("graph contains a directed cycle")
        return defects

    # -- structure -----------------------------------------------------------
    def message(self, name: str) -> Message:
        return self._msg[name]

    def node(self, node_id: str) -> Node:
        return self._node[node_id]

    def edge(self, edge_id: str) -> Edge:
        return self._edge[edge_id]

    def in_edges(self, node_id: str) -> list[Edge]:
        return sorted((e for e in self.edges if e.head == node_id), key=lambda e: e.id)

    def out_edges(self, node_id: str) -> list[Edge]:
        return sorted((e for e in self.edges if e.tail == node_id), key=lambda e: e.id)

    def _topo_nodes(self) -> list[str] | None:
        indeg = {n.id: 0 for n in self.nodes}
        for e in self.edges:
            if e.head in indeg:
                indeg[e.head] += 1
        ready = sorted(nid for nid, dg in indeg.items() if dg == 0)
        order = []
        while ready:
            nid = ready.pop(0)
            order.append(nid)
            touched = False
            for e in self.out_edges(nid):
                indeg[e.head] -= 1
                if indeg[e.head] == 0:
                    ready.append(e.head)
                    touched = True
            if touched:
                ready.sort()
        return order if len(order) == len(self.nodes) else None

    def topo_edges(self) -> list[Edge]:
        """Edges in topological order of their tails, ties by edge id."""
        depth = {nid: i for i, nid in enumerate(self._topo_nodes())}
        return sorted(self.edges, key=lambda e: (depth[e.tail], e.id))

    # -- file formats ----------------------------------------------------------
    def to_json_dict(self) -> dict:
        return {
            "messages": [{"name": m.name, "m": m.m} for m in self.messages],
            "nodes": [
                {"id": n.id, "has": sorted(n.has), "demands": sorted(n.demands)}
                for n in self.nodes
            ],
            "edges": [
                {"id": e.id, "tail": e.tail, "head": e.head, "m": e.m} for e in self.edges
            ],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "Network":
        try:
            messages = [Message(m["name"], int(m.get("m", 1))) for m in doc["messages"]]
            nodes = [
                Node(n["id"], frozenset(n.get("has", [])), frozenset(n.get("demands", [])))
                for n in doc["nodes"]
            ]
            edges = [
                Edge(e["id"], e["tail"], e["head"], int(e.get("m", 1))) for e in doc["edges"]
            ]
        except (KeyError, TypeError) as exc:
            raise NetworkError(f"malformed network document: {exc}") from exc
        return cls(messages, nodes, edges)

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=1)

    @classmethod
    def load(cls, path: str) -> "Network":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))

    def to_dot(self) -> str:
        lines = ["digraph network {", "  rankdir=LR;"]
        for n in self.nodes:
            label = n.id
            if n.has:
                label += "\\nhas " + ",".join(sorted(n.has))
            if n.demands:
                label += "\\nwants " + ",".join(sorted(n.demands))
            lines.append(f'  "{n.id}" [label="{label}"];')
        for e in self.edges:
            style = ' [color="black:black"]' if e.m == 2 else ""
            lines.append(f'  "{e.tail}" -> "{e.head}"{style}; // {e.id}')
        lines.append("}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# table codes


class Code:
    """Per-edge function tables over a base alphabet q.

    An edge's table maps (accessible message values at the tail, incoming
    signal values at the tail) to the edge's value.  Keys flatten those two
    groups: messages in declaration order, then in-edges by id.
    """

    def __init__(self, q: int, tables: Mapping[str, Mapping[tuple, int]]):
        if q < 2:
            raise NetworkError("alphabet size must be at least 2")
        self.q = q
        self.tables = {k: dict(v) for k, v in tables.items()}

    def __repr__(self) -> str:
        return f"Code(q={self.q}, edges={len(self.tables)})"


def edge_key_spec(net: Network, e: Edge) -> tuple[list[str], list[str]]:
    """Message names then in-edge ids forming an edge table's key."""
    tail = net.node(e.tail)
    msgs = [m.name for m in net.messages if m.name in tail.has]
    ins = [x.id for x in net.in_edges(e.tail)]
    return msgs, ins


def edge_domain_cards(net: Network, e: Edge, q: int) -> list[int]:
    msgs, ins = edge_key_spec(net, e)
    return [q ** net.message(m).m for m in msgs] + [q ** net.edge(i).m for i in ins]


def edge_domain_keys(net: Network, e: Edge, q: int) -> list[tuple]:
    return list(product(*[range(c) for c in edge_domain_cards(net, e, q)]))


def _message_value_arrays(net: Network, q: int) -> tuple[int, dict[str, np.ndarray]]:
    cards = [q**m.m for m in net.messages]
    n = math.prod(cards)
    arrays = {}
    stride = n
    for m, card in zip(net.messages, cards):
        stride //= card
        idx = np.arange(n, dtype=np.int64)
        arrays[m.name] = (idx // stride) % card
    return n, arrays


def signal_arrays(net: Network, code: Code, q: int | None = None) -> tuple[int, dict[str, np.ndarray], dict[str, np.ndarray]]:
    """Evaluate every edge signal over the full source space.

    Returns (source count, message value arrays, edge value arrays).
    """
    net.require_valid()
    q = code.q if q is None else q
    n, msg_vals = _message_value_arrays(net, q)
    edge_vals: dict[str, np.ndarray] = {}
    for e in net.topo_edges():
        msgs, ins = edge_key_spec(net, e)
        cards = edge_domain_cards(net, e, q)
        cols = [msg_vals[m] for m in msgs] + [edge_vals[i] for i in ins]
        table = code.tables.get(e.id)
        if table is None:
            raise NetworkError(f"code missing table for edge {e.id}")
        keys = edge_domain_keys(net, e, q)
        if set(table) != set(keys):
            raise NetworkError(f"table domain mismatch on edge {e.id}")
        flat = np.array([table[k] for k in keys], dtype=np.int64)
        if flat.size and (flat.min() < 0 or flat.max() >= q**e.m):
            raise NetworkError(f"table value out of range on edge {e.id}")
        idx = np.zeros(n, dtype=np.int64)
        for col, card in zip(cols, cards):
            idx = idx * card + col
        edge_vals[e.id] = flat[idx] if len(keys) else np.zeros(n, dtype=np.int64)
    return n, msg_vals, edge_vals


def _functional(keys: list[np.ndarray], vals: list[np.ndarray]) -> bool:
    """Exact check that the value columns are a function of the key columns."""
    if not vals:
        return True
    n = len(vals[0]) if keys == [] else len((keys + vals)[0])

    def encode(cols):
        if not cols:
            return np.zeros(n, dtype=np.int64)
        acc = np.zeros(n, dtype=object)
        for c in cols:
            acc = acc * (int(c.max()) + 1 if len(c) else 1) + c.astype(object)
        return acc

    k = encode(keys)
    v = encode(vals)
    pairs = {}
    for ki, vi in zip(k.tolist(), v.tolist()):
        if pairs.setdefault(ki, vi) != vi:
            return False
    return True


def eval_code(net: Network, code: Code) -> bool:
    """The coding constraint: at every node the demanded messages are a
    function of the accessible messages and incoming signals."""
    _, msg_vals, edge_vals = signal_arrays(net, code)
    for node in net.nodes:
        if not node.demands:
            continue
        keys = [msg_vals[m.name] for m in net.messages if m.name in node.has]
        keys += [edge_vals[e.id] for e in net.in_edges(node.id)]
        vals = [msg_vals[m.name] for m in net.messages if m.name in node.demands]
        if not _functional(keys, vals):
            return False
    return True


def to_joint_dist(net: Network, code: Code, atom_cap: int = 1_000_000) -> JointDistribution:
    """Messages i.i.d. uniform with every edge signal as a derived variable."""
    n, msg_vals, edge_vals = signal_arrays(net, code)
    if n > atom_cap:
        raise NetworkError(f"{n} atoms exceed cap {atom_cap}")
    q = code.q
    variables = [(m.name, q**m.m) for m in net.messages]
    variables += [(e.id, q**e.m) for e in net.edges]
    cols = [msg_vals[m.name] for m in net.messages] + [edge_vals[e.id] for e in net.edges]
    stacked = np.stack(cols, axis=1)
    p = Fraction(1, n)
    atoms = {tuple(int(x) for x in row): p for row in stacked}
    return JointDistribution(variables, atoms)


# ---------------------------------------------------------------------------
# brute-force solvability search


@dataclass
class SolveResult:
    status: str  # "solvable" | "unsolvable-at-q" | "budget-exceeded"
    q: int
    reason: str = ""
    code: Code | None = None
    estimate: int = 0


def _static_infeasibility(net: Network) -> str | None:
    """Exact q-independent obstructions: unreachable demanded messages and
    the counting bound (demanded exponent beyond accessible exponent)."""
    holders = {m.name: {n.id for n in net.nodes if m.name in n.has} for m in net.messages}
    reach: dict[str, set[str]] = {n.id: {n.id} for n in net.nodes}
    for e in net.topo_edges():
        reach[e.head] |= reach[e.tail]
    for node in net.nodes:
        for m in sorted(node.demands - node.has):
            if not (holders[m] & reach[node.id]):
                return f"node {node.id}: no path carries message {m}"
    for node in net.nodes:
        needed = sum(net.message(m).m for m in node.demands - node.has)
        capacity = sum(e.m for e in net.in_edges(node.id))
        if needed > capacity:
            return (
                f"node {node.id}: demands exponent {needed} exceed incoming "
                f"capacity exponent {capacity}"
            )
    return None


def solve_cost_estimate(net: Network, q: int) -> int:
    total = 1
    for e in net.edges:
        dom = math.prod(edge_domain_cards(net, e, q))
        total *= (q**e.m) ** dom
        if total > 10**30:
            return total
    n = math.prod(q**m.m for m in net.messages)
    return total * n * max(1, len(net.edges))


def brute_force_solve(
    net: Network,
    q: int,
    budget: int = 10**9,
    fixed_tables: Mapping[str, Mapping[tuple, int]] | None = None,
) -> SolveResult:
    """Enumerate all per-edge tables (topological edge order, lexicographic
    tables), short-circuiting on the first satisfying code.

    Exact static obstructions are applied first; an affirmative result is a
    concrete code, a negative one means no code exists at this q.  Searches
    whose pre-estimated cost exceeds the budget are refused, never guessed.
    """
    net.require_valid()
    obstruction = _static_infeasibility(net)
    if obstruction is not None:
        return SolveResult("unsolvable-at-q", q, reason=obstruction + " (holds for every q)")

    estimate = solve_cost_estimate(net, q)
    if fixed_tables is None and estimate > budget:
        return SolveResult(
            "budget-exceeded", q, reason=f"estimated cost {estimate} exceeds budget {budget}",
            estimate=estimate,
        )

    edges = net.topo_edges()
    pos = {e.id: i for i, e in enumerate(edges)}
    n_src, msg_vals = _message_value_arrays(net, q)
    msg_cols = {m.name: msg_vals[m.name].tolist() for m in net.messages}

    dom_keys = [edge_domain_keys(net, e, q) for e in edges]
    dom_index = [{k: i for i, k in enumerate(keys)} for keys in dom_keys]
    cods = [q**e.m for e in edges]
    key_specs = [edge_key_spec(net, e) for e in edges]

    # ancestor edge positions (edges able to influence a given edge's input)
    anc: list[tuple[int, ...]] = []
    for i, e in enumerate(edges):
        s: set[int] = set()
        for inc in net.in_edges(e.tail):
            s.add(pos[inc.id])
            s.update(anc[pos[inc.id]])
        anc.append(tuple(sorted(s)))
    node_anc: dict[str, tuple[int, ...]] = {}
    for node in net.nodes:
        s = set()
        for inc in net.in_edges(node.id):
            s.add(pos[inc.id])
            s.update(anc[pos[inc.id]])
        node_anc[node.id] = tuple(sorted(s))

    # nodes checked as soon as their last relevant edge is assigned
    triggers: list[list[Node]] = [[] for _ in edges]
    for node in net.nodes:
        if not node.demands:
            continue
        if not node_anc[node.id]:
            if not node.demands <= node.has:
                return SolveResult(
                    "unsolvable-at-q", q,
                    reason=f"node {node.id} demands messages with no inputs",
                )
            continue
        triggers[max(node_anc[node.id])].append(node)

    tables: list[tuple[int, ...] | None] = [None] * len(edges)
    table_idx: list[int] = [0] * len(edges)
    row_cache: list[dict] = [dict() for _ in edges]
    check_cache: dict[str, dict] = {node.id: {} for node in net.nodes}

    fixed = {}
    if fixed_tables:
        for eid, table in fixed_tables.items():
            i = pos[eid]
            if set(table) != set(dom_keys[i]):
                raise NetworkError(f"fixed table domain mismatch on edge {eid}")
            fixed[i] = tuple(table[k] for k in dom_keys[i])

    def row_of(i: int) -> list[int]:
        cache_key = tuple(table_idx[j] for j in anc[i]) + (table_idx[i],)
        row = row_cache[i].get(cache_key)
        if row is not None:
            return row
        msgs, ins = key_specs[i]
        in_rows = [row_of(pos[eid]) for eid in ins]
        mc = [msg_cols[m] for m in msgs]
        table = tables[i]
        index = dom_index[i]
        row = [
            table[index[tuple(c[s] for c in mc) + tuple(r[s] for r in in_rows)]]
            for s in range(n_src)
        ]
        row_cache[i][cache_key] = row
        return row

    def check_node(node: Node) -> bool:
        cache_key = tuple(table_idx[j] for j in node_anc[node.id])
        cached = check_cache[node.id].get(cache_key)
        if cached is not None:
            return cached
        in_rows = [row_of(pos[e.id]) for e in net.in_edges(node.id)]
        mc = [msg_cols[m.name] for m in net.messages if m.name in node.has]
        dem = [msg_cols[m.name] for m in net.messages if m.name in node.demands]
        seen: dict[tuple, tuple] = {}
        ok = True
        for s in range(n_src):
            key = tuple(c[s] for c in mc) + tuple(r[s] for r in in_rows)
            val = tuple(c[s] for c in dem)
            if seen.setdefault(key, val) != val:
                ok = False
                break
        check_cache[node.id][cache_key] = ok
        return ok

    def table_from_index(i: int, t: int) -> tuple[int, ...]:
        digits = []
        for _ in dom_keys[i]:
            digits.append(t % cods[i])
            t //= cods[i]
        return tuple(reversed(digits))

    n_edges = len(edges)

    def dfs(i: int) -> bool:
        if i == n_edges:
            return True
        if i in fixed:
            options: Iterable[int] = (0,)
        else:
            options = range(cods[i] ** len(dom_keys[i]))
        for t in options:
            tables[i] = fixed[i] if i in fixed else table_from_index(i, t)
            table_idx[i] = t
            if all(check_node(v) for v in triggers[i]):
                if dfs(i + 1):
                    return True
        return False

    if dfs(0):
        code = Code(
            q,
            {e.id: dict(zip(dom_keys[i], tables[i])) for i, e in enumerate(edges)},
        )
        assert eval_code(net, code)
        return SolveResult("solvable", q, code=code, estimate=estimate)
    return SolveResult("unsolvable-at-q", q, reason="exhaustive search", estimate=estimate)


# ---------------------------------------------------------------------------
# linear codes


@dataclass
class LinearCode:
    """Per-edge matrices over a field mapping the stacked source vector to
    edge signal vectors.

    `d` is the block dimension per alphabet-exponent unit; it may be a
    half-integer (the base alphabet is then |F|^d = p^(2d)).  A component of
    exponent m carries floor(m*d) field coordinates.
    """

    field: Field
    d: Fraction
    matrices: dict[str, FieldMatrix]

    def block_dim(self, m: int) -> int:
        return int(self.d * m)  # floor for half-integral d

    def q(self) -> int:
        exp = Fraction(self.field.degree) * self.d
        if exp.denominator != 1:
            raise NetworkError(f"base alphabet |F|^d is not an integer for d={self.d}")
        return self.field.p ** int(exp)


def message_blocks(net: Network, lc: LinearCode) -> tuple[int, dict[str, tuple[int, int]]]:
    """Total dimension and the (start, dim) slice of each message block."""
    spans = {}
    offset = 0
    for m in net.messages:
        dim = Fraction(m.m) * lc.d
        if dim.denominator != 1:
            raise NetworkError(f"message {m.name}: block dimension {dim} not integral")
        spans[m.name] = (offset, int(dim))
        offset += int(dim)
    return offset, spans


def _block_selector(f: Field, total: int, start: int, dim: int) -> FieldMatrix:
    rows = np.zeros((dim, total), dtype=np.int64)
    for i in range(dim):
        rows[i, start + i] = 1
    return FieldMatrix(f, rows)


def verify_linear(net: Network, lc: LinearCode) -> PredicateReport:
    """Row-space verification of every coding constraint, with rank
    diagnostics on the first failure."""
    f = lc.field
    total, spans = message_blocks(net, lc)
    for e in net.edges:
        m = lc.matrices.get(e.id)
        if m is None:
            return PredicateReport("verify_linear", False, failing_clause=f"edge {e.id}: no matrix")
        if m.field != f or m.cols != total:
            return PredicateReport(
                "verify_linear", False, failing_clause=f"edge {e.id}: dimension mismatch"
            )
        if m.rows > lc.block_dim(e.m):
            return PredicateReport(
                "verify_linear", False,
                failing_clause=f"edge {e.id}: {m.rows} rows exceed capacity {lc.block_dim(e.m)}",
            )
    for node in net.nodes:
        parts = [
            _block_selector(f, total, *spans[m.name])
            for m in net.messages
            if m.name in node.has
        ]
        parts += [lc.matrices[e.id] for e in net.in_edges(node.id)]
        span = (
            FieldMatrix.vstack(parts) if parts else FieldMatrix.zeros(f, 0, total)
        )
        for e in net.out_edges(node.id):
            if not rowspace_contains(span, lc.matrices[e.id]):
                return PredicateReport(
                    "verify_linear", False,
                    failing_clause=(
                        f"node {node.id}: edge {e.id} not computable from inputs "
                        f"(span rank {span.rank()})"
                    ),
                )
        for m in net.messages:
            if m.name not in node.demands:
                continue
            sel = _block_selector(f, total, *spans[m.name])
            if not rowspace_contains(span, sel):
                have = span.rank()
                need = FieldMatrix.vstack([span, sel]).rank()
                return PredicateReport(
                    "verify_linear", False,
                    failing_clause=(
                        f"node {node.id}: message {m.name} not decodable "
                        f"(span rank {have} of {need})"
                    ),
                )
    return PredicateReport("verify_linear", True)


def _field_matmul_arrays(f: Field, a: np.ndarray, x: np.ndarray) -> np.ndarray:
    p = f.p
    if f.degree == 1:
        return (a @ x) % p
    a0, a1 = a % p, a // p
    x0, x1 = x % p, x // p
    hi = a1 @ x1
    c0 = (a0 @ x0 - f.quad_c * hi) % p
    c1 = (a0 @ x1 + a1 @ x0 - f.quad_b * hi) % p
    return c0 + p * c1


def linear_value_report(
    net: Network, lc: LinearCode, atom_cap: int = 1_000_000, chunk: int = 1 << 15
) -> PredicateReport:
    """Value-level (distribution-style) check of every coding constraint.

    Evaluates every signal on every source vector and verifies, by exact
    grouping of integer values, that each node's demanded messages and
    outgoing signals are functions of its accessible messages and incoming
    signals.  Independent of the row-space backend.
    """
    f = lc.field
    total, spans = message_blocks(net, lc)
    n = f.order**total
    if n > atom_cap:
        return PredicateReport(
            "linear_value_check", False,
            failing_clause=f"source space {n} exceeds atom cap {atom_cap}",
            details={"skipped": True},
        )
    order = [e.id for e in net.edges]
    stacked = FieldMatrix.vstack([lc.matrices[eid] for eid in order]).a
    row_of = {}
    at = 0
    for eid in order:
        r = lc.matrices[eid].rows
        row_of[eid] = (at, r)
        at += r

    node_seen: dict[str, dict] = {node.id: {} for node in net.nodes}

    def encode_cols(cols: list[np.ndarray]) -> np.ndarray:
        acc = np.zeros(cols[0].shape[0] if cols else 0, dtype=object) if cols else None
        if not cols:
            return np.zeros(1, dtype=object)
        acc = np.zeros(len(cols[0]), dtype=object)
        for c in cols:
            acc = acc * (int(c.max(initial=0)) + 1) + c.astype(object)
        return acc

    base = f.order
    for start in range(0, n, chunk):
        idx = np.arange(start, min(start + chunk, n), dtype=np.int64)
        digits = np.empty((total, len(idx)), dtype=np.int64)
        rem = idx.copy()
        for coord in range(total):
            digits[coord] = rem % base
            rem //= base
        sig = _field_matmul_arrays(f, stacked, digits)
        edge_val: dict[str, np.ndarray] = {}
        for eid in order:
            at, r = row_of[eid]
            v = np.zeros(len(idx), dtype=np.int64)
            for j in range(r - 1, -1, -1):
                v = v * base + sig[at + j]
            edge_val[eid] = v
        msg_val: dict[str, np.ndarray] = {}
        for m in net.messages:
            st, dim = spans[m.name]
            v = np.zeros(len(idx), dtype=np.int64)
            for j in range(dim - 1, -1, -1):
                v = v * base + digits[st + j]
            msg_val[m.name] = v
        for node in net.nodes:
            outs = net.out_edges(node.id)
            if not node.demands and not outs:
                continue
            keys = [msg_val[m.name] for m in net.messages if m.name in node.has]
            keys += [edge_val[e.id] for e in net.in_edges(node.id)]
            vals = [msg_val[m.name] for m in net.messages if m.name in node.demands]
            vals += [edge_val[e.id] for e in outs]
            k = encode_cols(keys)
            v = encode_cols(vals)
            seen = node_seen[node.id]
            if len(k) == 1 and len(v) != 1:
                k = np.repeat(k, len(v))
            for ki, vi in zip(k.tolist(), v.tolist()):
                if seen.setdefault(ki, vi) != vi:
                    return PredicateReport(
                        "linear_value_check", False,
                        failing_clause=(
                            f"node {node.id}: outputs not a function of inputs "
                            f"(conflict at key {ki})"
                        ),
                    )
    return PredicateReport("linear_value_check", True)


def to_code(net: Network, lc: LinearCode, atom_cap: int = 1 << 16) -> Code:
    """Convert a linear code into an equivalent table code (exact; raises if
    some edge matrix is not computable from its tail's accessible values)."""
    f = lc.field
    total, spans = message_blocks(net, lc)
    n = f.order**total
    if n > atom_cap:
        raise NetworkError(f"{n} source vectors exceed cap {atom_cap}")
    q = lc.q()
    base = f.order

    idx = np.arange(n, dtype=np.int64)
    digits = np.empty((total, n), dtype=np.int64)
    rem = idx.copy()
    for coord in range(total):
        digits[coord] = rem % base
        rem //= base
    msg_val = {}
    for m in net.messages:
        st, dim = spans[m.name]
        v = np.zeros(n, dtype=np.int64)
        for j in range(dim - 1, -1, -1):
            v = v * base + digits[st + j]
        msg_val[m.name] = v
    edge_val = {}
    for e in net.edges:
        sig = _field_matmul_arrays(f, lc.matrices[e.id].a, digits)
        v = np.zeros(n, dtype=np.int64)
        for j in range(sig.shape[0] - 1, -1, -1):
            v = v * base + sig[j]
        edge_val[e.id] = v

    tables: dict[str, dict[tuple, int]] = {}
    for e in net.edges:
        msgs, ins = edge_key_spec(net, e)
        cols = [msg_val[m] for m in msgs] + [edge_val[i] for i in ins]
        table: dict[tuple, int] = {}
        out = edge_val[e.id]
        for s in range(n):
            key = tuple(int(c[s]) for c in cols)
            v = int(out[s])
            if table.setdefault(key, v) != v:
                raise NetworkError(
                    f"edge {e.id}: matrix is not a function of the tail's inputs"
                )
        # complete unreached keys deterministically
        for key in edge_domain_keys(net, e, q):
            table.setdefault(key, 0)
        tables[e.id] = table
    return Code(q, tables)


def product_code(net: Network, c1: Code, c2: Code) -> Code:
    """Componentwise pairing of two codes; value v encodes (v1, v2) as
    v1 * q2^m + v2 per component of exponent m."""
    if set(c1.tables) != set(c2.tables):
        raise NetworkError("codes cover different edges")
    q1, q2 = c1.q, c2.q
    q = q1 * q2

    def exps(e: Edge) -> list[int]:
        msgs, ins = edge_key_spec(net, e)
        return [net.message(m).m for m in msgs] + [net.edge(i).m for i in ins]

    tables: dict[str, dict[tuple, int]] = {}
    for e in net.edges:
        es = exps(e)
        table: dict[tuple, int] = {}
        for key in edge_domain_keys(net, e, q):
            k1 = tuple(v // q2**m for v, m in zip(key, es))
            k2 = tuple(v % q2**m for v, m in zip(key, es))
            table[key] = c1.tables[e.id][k1] * q2**e.m + c2.tables[e.id][k2]
        tables[e.id] = table
    return Code(q, tables)
