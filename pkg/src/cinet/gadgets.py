"""Constraint-level gadget subnetworks and their compiler.

Every gadget is a list of two constraint kinds over the three messages
A1, A2, A3 and named signals:

  Generate(signal, access)   -- the signal is produced at a node seeing
                                exactly `access` (messages and/or signals);
  Demand(messages, access)   -- a node seeing `access` must decode the
                                listed messages.

A Generate additionally carries a witness recipe: the linear combination,
with optional endomorphism coefficients, that realizes the signal in the
solvable direction.  Endomorphism coefficients are symbolic slot
expressions resolved to matrices only when a witness is built.

The derived-equality pattern (pin a generated signal to one of A12, A13,
A23) expands to exactly one Generate plus one chk gadget.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .finalg import Field, FieldMatrix
from .netmodel import Edge, LinearCode, Message, Network, NetworkError, Node

MESSAGES = ("A1", "A2", "A3")

# an endomorphism expression: composition factors, outermost first
EndoExpr = tuple[tuple[object, bool], ...]

IDENTITY: EndoExpr = ()


def inv_expr(expr: EndoExpr) -> EndoExpr:
    return tuple((key, not inv) for key, inv in reversed(expr))


def compose_expr(outer: EndoExpr, inner: EndoExpr) -> EndoExpr:
    return outer + inner


@dataclass(frozen=True)
class RecipeTerm:
    source: str
    sign: int = 1
    endo: EndoExpr = IDENTITY


@dataclass(frozen=True)
class Generate:
    signal: str
    access: tuple[str, ...]
    recipe: tuple[RecipeTerm, ...] | None = None
    exponent: int = 2


@dataclass(frozen=True)
class Demand:
    messages: tuple[str, ...]
    access: tuple[str, ...]


@dataclass
class GadgetFragment:
    ns: str
    constraints: list = field(default_factory=list)
    exports: tuple[str, ...] = ()

    def generate(self, signal, access, recipe=None, exponent=2):
        self.constraints.append(Generate(signal, tuple(access), recipe, exponent))
        return signal

    def demand(self, messages, access):
        self.constraints.append(Demand(tuple(messages), tuple(access)))

    def extend(self, other: "GadgetFragment"):
        self.constraints.extend(other.constraints)

    def generated_signals(self) -> list[str]:
        return [c.signal for c in self.constraints if isinstance(c, Generate)]


class GadgetError(ValueError):
    pass


def _terms(*parts) -> tuple[RecipeTerm, ...]:
    out = []
    for part in parts:
        if isinstance(part, RecipeTerm):
            out.append(part)
        else:
            out.append(RecipeTerm(part))
    return tuple(out)


# ---------------------------------------------------------------------------
# index permutations over constraint templates


def _perm_for(i: int, j: int) -> dict[str, str]:
    k = ({1, 2, 3} - {i, j}).pop()
    return {"1": str(i), "2": str(j), "3": str(k)}


def _pvar(name: str, perm: Mapping[str, str]) -> str:
    if not name.startswith("A") or not set(name[1:]) <= set("123"):
        return name  # signal names pass through untouched
    digits = sorted((perm[ch] for ch in name[1:]), key="123".index)
    return "A" + "".join(digits)


# ---------------------------------------------------------------------------
# gadget builders


def base_network(ns: str = "base") -> GadgetFragment:
    """The seven-variable system as a network: generate the four sums, demand
    each source from the complementary pair."""
    f = GadgetFragment(ns, exports=("A12", "A13", "A23", "A123"))
    f.generate("A12", ("A1", "A2"), _terms("A1", "A2"))
    f.generate("A13", ("A1", "A3"), _terms("A1", "A3"))
    f.generate("A23", ("A2", "A3"), _terms("A2", "A3"))
    f.generate("A123", ("A12", "A3"), _terms("A12", "A3"))
    f.demand(("A3",), ("A12", "A123"))
    f.demand(("A2",), ("A13", "A123"))
    f.demand(("A1",), ("A23", "A123"))
    return f


CHK_PERMS = {"A12": (1, 2), "A13": (1, 3), "A23": (3, 2)}


def chk(target: str, u: str, ns: str) -> GadgetFragment:
    """Verify that a signal carries exactly the information of the target sum
    (one of A12, A13, A23), via three message demands."""
    if target not in CHK_PERMS:
        raise GadgetError(f"unsupported chk target {target}")
    perm = _perm_for(*CHK_PERMS[target])
    f = GadgetFragment(ns)
    f.demand((_pvar("A1", perm),), (_pvar("A2", perm), u))
    f.demand((_pvar("A2", perm),), (_pvar("A1", perm), u))
    f.demand((_pvar("A3", perm),), ("A123", u))
    return f


def end_gadget(indices: tuple[int, int], u: str, ns: str, g: EndoExpr) -> GadgetFragment:
    """Verify that u sits in endomorphism position (i, j): u has the same
    information as Ai - g(Aj) for some endomorphism g.

    The witness recipe realizes v = u - g(Ak), w = u + Ak, x = w + g(Aj),
    with x pinned to the sum A(ik)."""
    i, j = indices
    if i == j or not {i, j} <= {1, 2, 3}:
        raise GadgetError(f"invalid end indices {indices}")
    perm = _perm_for(i, j)
    ai, aj, ak = (_pvar(a, perm) for a in ("A1", "A2", "A3"))
    ajk = _pvar("A23", perm)
    aik = _pvar("A13", perm)
    v, w, x = f"{ns}.v", f"{ns}.w", f"{ns}.x"
    f = GadgetFragment(ns)
    f.demand((ai,), (aj, u))
    f.generate(v, (ak, u), _terms(u, RecipeTerm(ak, -1, g)))
    f.demand((ai,), (ajk, v))
    f.generate(w, (ak, u), _terms(u, ak))
    f.generate(x, (aj, w), _terms(w, RecipeTerm(aj, 1, g)))
    f.extend(chk(aik, x, f"{ns}.chk"))
    return f


def identity_pin(z: str, ns: str) -> GadgetFragment:
    """Force an end-position-(1,2) signal to the identity endomorphism: a
    fresh signal from (z, A23) must carry exactly A13."""
    f = GadgetFragment(ns)
    y = f"{ns}.y"
    f.generate(y, (z, "A23"), _terms(z, "A23"))
    f.extend(chk("A13", y, f"{ns}.chk"))
    return f


def conv13_gadget(u: str, ns: str, g: EndoExpr) -> tuple[GadgetFragment, str]:
    """Convert u from end-position (1,2) to a fresh v in position (1,3),
    preserving the endomorphism."""
    f = GadgetFragment(ns)
    w, y, v = f"{ns}.w", f"{ns}.y", f"{ns}.v"
    f.generate(w, ("A2", "A3"), _terms("A2", RecipeTerm("A3", -1)))
    f.extend(end_gadget((2, 3), w, f"{ns}.endw", IDENTITY))
    f.generate(y, ("A12", w), _terms("A12", RecipeTerm(w, -1)))
    f.extend(chk("A13", y, f"{ns}.chky"))
    f.generate(v, (u, w), _terms(u, RecipeTerm(w, 1, g)))
    f.extend(end_gadget((1, 3), v, f"{ns}.endv", g))
    f.exports = (v,)
    return f, v


def conv32_gadget(u: str, ns: str, g: EndoExpr) -> tuple[GadgetFragment, str]:
    """Convert u from end-position (1,2) to a fresh v in position (3,2)."""
    f = GadgetFragment(ns)
    w, y, v = f"{ns}.w", f"{ns}.y", f"{ns}.v"
    f.generate(w, ("A1", "A3"), _terms("A1", RecipeTerm("A3", -1)))
    f.extend(end_gadget((1, 3), w, f"{ns}.endw", IDENTITY))
    f.generate(y, (w, "A23"), _terms(w, "A23"))
    f.extend(chk("A12", y, f"{ns}.chky"))
    f.generate(v, (w, u), _terms(u, RecipeTerm(w, -1)))
    f.extend(end_gadget((3, 2), v, f"{ns}.endv", g))
    f.exports = (v,)
    return f, v


def comp_gadget(u1: str, u2: str, ns: str, g1: EndoExpr, g2: EndoExpr) -> tuple[GadgetFragment, str]:
    """Produce u3 in end-position (1,2) carrying the composition of the
    endomorphisms of u1 and u2."""
    f = GadgetFragment(ns)
    c13, v1 = conv13_gadget(u1, f"{ns}.c13", g1)
    c32, v2 = conv32_gadget(u2, f"{ns}.c32", g2)
    f.extend(c13)
    f.extend(c32)
    u3 = f"{ns}.u3"
    f.generate(u3, (v1, v2), _terms(v1, RecipeTerm(v2, 1, g1)))
    f.extend(end_gadget((1, 2), u3, f"{ns}.endu3", compose_expr(g1, g2)))
    f.exports = (u3,)
    return f, u3


def inv_gadget(u: str, v: str, ns: str, gu: EndoExpr, gv: EndoExpr) -> GadgetFragment:
    """The endomorphisms of u and v are automorphisms inverse to each other:
    their composition is pinned to the identity."""
    f = GadgetFragment(ns)
    comp, z = comp_gadget(u, v, f"{ns}.comp", gu, gv)
    f.extend(comp)
    f.extend(identity_pin(z, f"{ns}.pin"))
    return f


def iend_gadget(u: str, ns: str, g: EndoExpr) -> GadgetFragment:
    """The endomorphism of u is an automorphism: an inverse candidate is
    generated directly from the sources and checked to invert u."""
    f = GadgetFragment(ns)
    vinv = f"{ns}.vinv"
    gi = inv_expr(g)
    f.generate(vinv, ("A1", "A2"), _terms("A1", RecipeTerm("A2", -1, gi)))
    f.extend(end_gadget((1, 2), vinv, f"{ns}.endv", gi))
    f.extend(inv_gadget(u, vinv, f"{ns}.inv", g, gi))
    return f


def ieq_gadget(u: str, v: str, ns: str, gu: EndoExpr, gv: EndoExpr) -> GadgetFragment:
    """u and v carry the same automorphism: both are inverted by one shared
    inverse candidate."""
    f = GadgetFragment(ns)
    w = f"{ns}.w"
    gi = inv_expr(gu)
    f.generate(w, ("A1", "A2"), _terms("A1", RecipeTerm("A2", -1, gi)))
    f.extend(end_gadget((1, 2), w, f"{ns}.endw", gi))
    f.extend(inv_gadget(u, w, f"{ns}.invu", gu, gi))
    f.extend(inv_gadget(v, w, f"{ns}.invv", gv, gi))
    return f


def icomp_gadget(
    u1: str, u2: str, u3: str, ns: str, g1: EndoExpr, g2: EndoExpr, g3: EndoExpr
) -> GadgetFragment:
    """The three signals carry automorphisms with g3 the composition of g1
    and g2: compose u1, u2 and require equality with u3."""
    f = GadgetFragment(ns)
    comp, z = comp_gadget(u1, u2, f"{ns}.comp", g1, g2)
    f.extend(comp)
    f.extend(ieq_gadget(z, u3, f"{ns}.eq", compose_expr(g1, g2), g3))
    return f


# ---------------------------------------------------------------------------
# compilation to networks


@dataclass
class CompiledNetwork:
    network: Network
    generators: dict[str, Generate]
    gen_node: dict[str, str]
    edge_signal: dict[str, str]
    signal_order: list[str]
    census: dict[str, int]
    fragment_sizes: dict[str, int]

    def signal_var(self, signal: str) -> str:
        """The joint-distribution variable carrying a signal: its first edge."""
        for e in self.network.edges:
            if self.edge_signal[e.id] == signal:
                return e.id
        raise GadgetError(f"signal {signal} has no consuming edge")


def compile_fragments(
    fragments: Sequence[GadgetFragment],
    message_exponents: Mapping[str, int] | None = None,
) -> CompiledNetwork:
    """One node per constraint, one edge per signal use; ids are derived from
    fragment namespaces and constraint positions, so identical input compiles
    to byte-identical output."""
    message_exponents = dict(message_exponents or {m: 2 for m in MESSAGES})
    messages = [Message(name, m) for name, m in message_exponents.items()]
    msg_names = set(message_exponents)

    generators: dict[str, Generate] = {}
    gen_node: dict[str, str] = {}
    nodes: list[Node] = []
    node_constraints: list[tuple[str, object]] = []
    seen_ns = set()
    for frag in fragments:
        if frag.ns in seen_ns:
            raise GadgetError(f"duplicate fragment namespace {frag.ns}")
        seen_ns.add(frag.ns)
        for idx, c in enumerate(frag.constraints):
            node_id = f"{frag.ns}:{idx}"
            if isinstance(c, Generate):
                if c.signal in generators or c.signal in msg_names:
                    raise GadgetError(f"signal {c.signal} generated twice")
                generators[c.signal] = c
                gen_node[c.signal] = node_id
                nodes.append(Node(node_id, has=frozenset(set(c.access) & msg_names)))
            elif isinstance(c, Demand):
                nodes.append(
                    Node(
                        node_id,
                        has=frozenset(set(c.access) & msg_names),
                        demands=frozenset(c.messages),
                    )
                )
            else:
                raise GadgetError(f"unknown constraint {c!r}")
            node_constraints.append((node_id, c))

    edges: list[Edge] = []
    edge_signal: dict[str, str] = {}
    for node_id, c in node_constraints:
        for s in c.access:
            if s in msg_names:
                continue
            if s not in generators:
                raise GadgetError(f"unresolved import {s!r} at {node_id}")
            eid = f"{s}->{node_id}"
            edges.append(Edge(eid, gen_node[s], node_id, m=generators[s].exponent))
            edge_signal[eid] = s

    net = Network(messages, nodes, edges)
    defects = net.validate()
    if defects:
        raise GadgetError("compiled network invalid: " + "; ".join(defects))

    signal_order = []
    done: set[str] = set()
    for node_id, c in node_constraints:
        if isinstance(c, Generate) and c.signal not in done:
            for s in c.access:
                if s not in msg_names and s not in done:
                    raise GadgetError(f"signal {c.signal} uses {s} before generation")
            done.add(c.signal)
            signal_order.append(c.signal)

    fragment_sizes = {f.ns: len(f.constraints) for f in fragments}
    census = {
        "fragments": len(fragments),
        "nodes": len(nodes),
        "edges": len(edges),
        "generates": len(generators),
        "demands": sum(1 for _, c in node_constraints if isinstance(c, Demand)),
    }
    assert census["nodes"] == sum(fragment_sizes.values())
    return CompiledNetwork(net, generators, gen_node, edge_signal, signal_order, census, fragment_sizes)


# ---------------------------------------------------------------------------
# linear witnesses from recipes


def resolve_expr(expr: EndoExpr, bindings: Mapping[object, FieldMatrix], field: Field, dim: int) -> FieldMatrix:
    acc = FieldMatrix.identity(field, dim)
    for key, inverted in expr:
        m = bindings.get(key)
        if m is None:
            raise GadgetError(f"no binding for endomorphism slot {key!r}")
        acc = acc @ (m.inverse() if inverted else m)
    return acc


def linear_witness(
    compiled: CompiledNetwork,
    field: Field,
    d: Fraction,
    bindings: Mapping[object, FieldMatrix],
    special: Mapping[str, FieldMatrix] | None = None,
) -> LinearCode:
    """Evaluate every Generate recipe into an edge matrix over the field.

    `special` supplies matrices for recipe-free signals.  Messages occupy
    blocks of dimension 2d in declaration order; an endomorphism slot binds
    to a (2d x 2d) matrix.
    """
    from .netmodel import message_blocks

    special = dict(special or {})
    lc = LinearCode(field, d, {})
    total, spans = message_blocks(compiled.network, lc)
    dim = int(2 * d)

    sig_matrix: dict[str, FieldMatrix] = {}

    def source_matrix(name: str) -> FieldMatrix:
        if name in spans:
            start, ln = spans[name]
            rows = np.zeros((ln, total), dtype=np.int64)
            for r in range(ln):
                rows[r, start + r] = 1
            return FieldMatrix(field, rows)
        return sig_matrix[name]

    for signal in compiled.signal_order:
        gen = compiled.generators[signal]
        if gen.recipe is None:
            if signal not in special:
                raise GadgetError(f"signal {signal} has no recipe and no special matrix")
            sig_matrix[signal] = special[signal]
            continue
        acc = FieldMatrix.zeros(field, dim, total)
        for term in gen.recipe:
            if term.source not in gen.access:
                raise GadgetError(f"recipe for {signal} uses {term.source} outside access")
            part = resolve_expr(term.endo, bindings, field, dim) @ source_matrix(term.source)
            acc = acc + part if term.sign > 0 else acc - part
        sig_matrix[signal] = acc

    matrices = {
        e.id: sig_matrix[compiled.edge_signal[e.id]] for e in compiled.network.edges
    }
    return LinearCode(field, d, matrices)
