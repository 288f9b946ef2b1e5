"""The predicate family over Fano/non-Fano systems: tri, uniform-equal,
endomorphism membership, index conversion, composition, and equality.

Each existential predicate comes in two forms.  The witness-checked form
takes every existentially quantified variable as an explicit argument.  The
semantic form decides the predicate through the recovered group labeling and
endomorphism recovery, which the corresponding equivalence results prove to
be the predicate's meaning.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .exactprob import (
    JointDistribution,
    iota_eq_given,
    is_ci,
    is_function_of,
    is_uniform,
    mutual_indep3,
    support_size,
    uniform_functional_dist,
)
from .finalg import Endo


@dataclass
class PredicateReport:
    """Outcome of a predicate check with the first failing clause named."""

    name: str
    holds: bool
    failing_clause: str | None = None
    recovered: Endo | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.holds and self.failing_clause is not None:
            raise ValueError("failing clause present on a holding report")
        if not self.holds and self.failing_clause is None:
            raise ValueError("failing report must name a clause")

    def render(self) -> str:
        if self.holds:
            return f"{self.name}: holds"
        return f"{self.name}: fails at {self.failing_clause}"


def _evaluate(name: str, clauses: list[tuple[str, Callable[[], bool]]], **extra) -> PredicateReport:
    for clause, check in clauses:
        if not check():
            return PredicateReport(name, False, failing_clause=clause, **extra)
    return PredicateReport(name, True, **extra)


# ---------------------------------------------------------------------------
# tri and uniform-equal


def tri(d: JointDistribution, y1: Iterable[str], y2: Iterable[str], y3: Iterable[str]) -> PredicateReport:
    """Each variable set is a function of the other two and the three are
    pairwise independent."""
    y1, y2, y3 = set(y1), set(y2), set(y3)
    clauses = [
        ("functional Y1 <= Y2 Y3", lambda: is_function_of(d, y1, y2 | y3)),
        ("functional Y2 <= Y1 Y3", lambda: is_function_of(d, y2, y1 | y3)),
        ("functional Y3 <= Y1 Y2", lambda: is_function_of(d, y3, y1 | y2)),
        ("independence Y1 _|_ Y2", lambda: is_ci(d, y1, y2, set())),
        ("independence Y1 _|_ Y3", lambda: is_ci(d, y1, y3, set())),
        ("independence Y2 _|_ Y3", lambda: is_ci(d, y2, y3, set())),
    ]
    return _evaluate("tri", clauses)


def ueq_semantic(d: JointDistribution, x: Iterable[str], y: Iterable[str]) -> bool:
    """Both uniform over their supports with the same support size.

    This is the stated meaning of the existential uniform-equal predicate;
    the existential (tri-witness) form is only ever emitted symbolically by
    the reduction compiler, never evaluated on a distribution.
    """
    x, y = set(x), set(y)
    return is_uniform(d, x) and is_uniform(d, y) and support_size(d, x) == support_size(d, y)


# ---------------------------------------------------------------------------
# index permutations

E_ORDER = ("1", "2", "3", "12", "13", "23", "123")


def index_permutation(i: int, j: int) -> dict[str, str]:
    """The permutation of {1,2,3} sending 1 -> i and 2 -> j."""
    if i == j or not {i, j} <= {1, 2, 3}:
        raise ValueError(f"invalid index pair ({i}, {j})")
    k = ({1, 2, 3} - {i, j}).pop()
    return {"1": str(i), "2": str(j), "3": str(k)}


def permute_key(key: str, perm: Mapping[str, str]) -> str:
    digits = sorted((perm[ch] for ch in key), key="123".index)
    return "".join(digits)


def permute_var(name: str, perm: Mapping[str, str]) -> str:
    return "A" + permute_key(name[1:], perm)


# ---------------------------------------------------------------------------
# endomorphism predicate


def end_check_witness(
    d: JointDistribution,
    u: Iterable[str],
    v: Iterable[str],
    w: Iterable[str],
    indices: tuple[int, int] = (1, 2),
) -> PredicateReport:
    """Witness-checked endomorphism predicate with V, W supplied explicitly."""
    from . import labeling  # deferred: labeling imports this module

    perm = index_permutation(*indices)
    ai = permute_var("A1", perm)
    aj = permute_var("A2", perm)
    ak = permute_var("A3", perm)
    ajk = permute_var("A23", perm)
    aik = permute_var("A13", perm)
    u, v, w = set(u), set(v), set(w)
    name = f"end_{indices[0]},{indices[1]}"
    clauses = [
        ("fnf", lambda: labeling.check_fnf(d)),
        (f"ueq(U, {ai})", lambda: ueq_semantic(d, u, {ai})),
        (f"ueq(V, {ai})", lambda: ueq_semantic(d, v, {ai})),
        (f"ueq(W, {ai})", lambda: ueq_semantic(d, w, {ai})),
        (f"U has the information of {ai} given {aj}", lambda: iota_eq_given(d, u, {ai}, {aj})),
        (f"V has the information of {ai} given {ajk}", lambda: iota_eq_given(d, v, {ai}, {ajk})),
        (f"U has the information of V given {ak}", lambda: iota_eq_given(d, u, v, {ak})),
        (f"W has the information of {aik} given {aj}", lambda: iota_eq_given(d, w, {aik}, {aj})),
        (f"U has the information of W given {ak}", lambda: iota_eq_given(d, u, w, {ak})),
    ]
    return _evaluate(name, clauses)


def make_end_witnesses(labeling_obj, g: Endo) -> tuple[Callable, Callable, Callable]:
    """Derived-variable tables (over raw source value triples) for the
    canonical witnesses: U = A1 - g(A2), V = A1 - g(A2 + A3),
    W = A1 - g(A2) + A3, expressed through the labeling's bijections."""
    L = labeling_obj.group
    g_lbl = L.label_map_of(g)
    t1, t2, t3 = (labeling_obj.thetas[k] for k in ("1", "2", "3"))

    def u_fn(t):
        return L.sub(t1[t[0]], g_lbl[t2[t[1]]])

    def v_fn(t):
        return L.sub(t1[t[0]], g_lbl[L.add(t2[t[1]], t3[t[2]])])

    def w_fn(t):
        return L.add(L.sub(t1[t[0]], g_lbl[t2[t[1]]]), t3[t[2]])

    return u_fn, v_fn, w_fn


def extend_with_endo_witnesses(labeling_obj, g: Endo) -> JointDistribution:
    """The labeled system extended with the canonical U, V, W witnesses.

    Reconstructs the seven variables from three i.i.d. uniform sources using
    the labeling equations, so the marginal over the A-variables equals the
    distribution the labeling came from.
    """
    L = labeling_obj.group
    thetas = labeling_obj.thetas
    n = len(L)
    inv = {k: labeling_obj.theta_inv(k) for k in ("12", "13", "23", "123")}
    t1, t2, t3 = (thetas[k] for k in ("1", "2", "3"))
    for t in (t1, t2, t3):
        if set(t) != set(range(n)):
            raise ValueError("witness extension requires dense source supports")

    u_fn, v_fn, w_fn = make_end_witnesses(labeling_obj, g)
    derived = [
        ("A12", lambda t: inv["12"][L.add(t1[t[0]], t2[t[1]])]),
        ("A13", lambda t: inv["13"][L.add(t1[t[0]], t3[t[2]])]),
        ("A23", lambda t: inv["23"][L.add(t2[t[1]], t3[t[2]])]),
        ("A123", lambda t: inv["123"][L.add(L.add(t1[t[0]], t2[t[1]]), t3[t[2]])]),
        ("U", u_fn),
        ("V", v_fn),
        ("W", w_fn),
    ]
    return uniform_functional_dist([("A1", n), ("A2", n), ("A3", n)], derived)


def endo_from_mu(L, mu: Mapping[tuple[int, int], int]):
    """Recover (g, phi) from the table mu[(label_i, label_j)] = U-value, i.e.
    the unique endomorphism g and bijection phi with phi(U) = Ai - g(Aj),
    or None when no such pair exists.  Runs in O(|A|^2)."""
    labels = L.labels
    if set(mu) != {(a, b) for a in labels for b in labels}:
        return None
    zero = L.zero
    phi_of_label = {li: mu[(li, zero)] for li in labels}
    if len(set(phi_of_label.values())) != len(labels):
        return None
    phi = {u: li for li, u in phi_of_label.items()}
    g = {}
    for lj in labels:
        uval = mu[(zero, lj)]
        if uval not in phi:
            return None
        g[lj] = L.neg(phi[uval])
    for a in labels:
        for b in labels:
            if g[L.add(a, b)] != L.add(g[a], g[b]):
                return None
    for (li, lj), uval in mu.items():
        if uval not in phi or phi[uval] != L.sub(li, g[lj]):
            return None
    return g, phi


def _mu_table(d, u_var: str, labeling_obj, indices: tuple[int, int]):
    perm = index_permutation(*indices)
    ai = permute_var("A1", perm)
    aj = permute_var("A2", perm)
    ti = labeling_obj.thetas[permute_key("1", perm)]
    tj = labeling_obj.thetas[permute_key("2", perm)]
    pi, pj, pu = (d.names.index(n) for n in (ai, aj, u_var))
    mu: dict[tuple[int, int], int] = {}
    for values, _ in d.atoms():
        key = (ti[values[pi]], tj[values[pj]])
        if mu.setdefault(key, values[pu]) != values[pu]:
            return None
    return mu


def recover_endo(d, u_var: str, labeling_obj, indices: tuple[int, int] = (1, 2)):
    """Direct algebraic recovery of the endomorphism label map for U, without
    enumerating the endomorphism monoid.  Returns a label->label dict or None."""
    mu = _mu_table(d, u_var, labeling_obj, indices)
    if mu is None:
        return None
    got = endo_from_mu(labeling_obj.group, mu)
    return None if got is None else got[0]


def end_semantic(
    d: JointDistribution,
    u: Iterable[str],
    labeling_obj,
    indices: tuple[int, int] = (1, 2),
) -> Endo | None:
    """Search the endomorphism monoid for the unique g admitting a bijection
    phi with phi(U) = Ai - g(Aj) almost surely; asserts uniqueness."""
    (u_var,) = tuple(u) if not isinstance(u, str) else (u,)
    mu = _mu_table(d, u_var, labeling_obj, indices)
    if mu is None:
        return None
    L = labeling_obj.group
    labels = L.labels
    if set(mu) != {(a, b) for a in labels for b in labels}:
        return None
    matches = []
    for endo, g_lbl in L.endos_on_labels():
        phi: dict[int, int] = {}
        ok = True
        for (li, lj), uval in mu.items():
            target = L.sub(li, g_lbl[lj])
            if phi.setdefault(uval, target) != target:
                ok = False
                break
        if ok and len(set(phi.values())) == len(labels) == len(phi):
            matches.append(endo)
    if len(matches) > 1:
        raise AssertionError("endomorphism recovery is not unique; labeling is inconsistent")
    return matches[0] if matches else None


# ---------------------------------------------------------------------------
# conversion, composition, equality


def conv13_check(
    d: JointDistribution, u: str, v: str, w: str, labeling_obj
) -> PredicateReport:
    """Conversion of the second index: U in end-position (1,2) and V in
    (1,3) carry the same endomorphism, witnessed by W in (2,3)."""
    gs: dict[str, Endo | None] = {}

    def end_at(var, idx, slot):
        gs[slot] = end_semantic(d, var, labeling_obj, idx)
        return gs[slot] is not None

    clauses = [
        ("end_1,2(U)", lambda: end_at(u, (1, 2), "U")),
        ("end_1,3(V)", lambda: end_at(v, (1, 3), "V")),
        ("end_2,3(W)", lambda: end_at(w, (2, 3), "W")),
        ("A13 determined by A12 W", lambda: is_function_of(d, {"A13"}, {"A12", w})),
        ("V determined by U W", lambda: is_function_of(d, {v}, {u, w})),
    ]
    report = _evaluate("conv13", clauses)
    report.details = gs
    report.recovered = gs.get("U")
    return report


def conv32_check(
    d: JointDistribution, u: str, v: str, w: str, labeling_obj
) -> PredicateReport:
    """Conversion of the first index: U in (1,2) and V in (3,2) carry the
    same endomorphism, witnessed by W in (1,3)."""
    gs: dict[str, Endo | None] = {}

    def end_at(var, idx, slot):
        gs[slot] = end_semantic(d, var, labeling_obj, idx)
        return gs[slot] is not None

    clauses = [
        ("end_1,2(U)", lambda: end_at(u, (1, 2), "U")),
        ("end_3,2(V)", lambda: end_at(v, (3, 2), "V")),
        ("end_1,3(W)", lambda: end_at(w, (1, 3), "W")),
        ("A12 determined by W A23", lambda: is_function_of(d, {"A12"}, {w, "A23"})),
        ("V determined by W U", lambda: is_function_of(d, {v}, {w, u})),
    ]
    report = _evaluate("conv32", clauses)
    report.details = gs
    report.recovered = gs.get("U")
    return report


def comp_check(
    d: JointDistribution,
    u1: str,
    u2: str,
    u3: str,
    v1: str,
    v2: str,
    labeling_obj,
) -> PredicateReport:
    """Composition: with U1, U2, U3 all in end-position (1,2), V1 converts U1
    to position (1,3), V2 converts U2 to (3,2), and U3 is determined by
    (V1, V2).  Holds exactly when g(U3) = g(U1) composed with g(U2).

    The embedded conversion predicates are decided semantically (endomorphism
    equality), which the conversion equivalences establish as their meaning.
    """
    gs: dict[str, Endo | None] = {}

    def end_at(var, idx, slot):
        gs[slot] = end_semantic(d, var, labeling_obj, idx)
        return gs[slot] is not None

    clauses = [
        ("end_1,2(U1)", lambda: end_at(u1, (1, 2), "U1")),
        ("end_1,2(U2)", lambda: end_at(u2, (1, 2), "U2")),
        ("end_1,2(U3)", lambda: end_at(u3, (1, 2), "U3")),
        ("conv13(U1 -> V1)", lambda: end_at(v1, (1, 3), "V1") and gs["V1"] == gs["U1"]),
        ("conv32(U2 -> V2)", lambda: end_at(v2, (3, 2), "V2") and gs["V2"] == gs["U2"]),
        ("U3 determined by V1 V2", lambda: is_function_of(d, {u3}, {v1, v2})),
    ]
    report = _evaluate("comp", clauses)
    report.details = gs
    report.recovered = gs.get("U3")
    return report


def eq_check(d: JointDistribution, u: Iterable[str], v: Iterable[str]) -> bool:
    """U determined by V; for two end-position-(1,2) variables this is
    exactly equality of their endomorphisms."""
    return is_function_of(d, u, v)
