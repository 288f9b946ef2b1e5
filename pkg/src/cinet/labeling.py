"""Fano/non-Fano variable systems and abelian group labelings.

Seven variables A1, A2, A3, A12, A13, A23, A123 satisfy the Fano-non-Fano
condition when the non-Fano dependent triples each satisfy the tri predicate
and the Fano independent triples are mutually independent.  Such a system
carries an abelian group structure; this module synthesizes instances from a
given group and recovers the group (with relabeling bijections) from any
instance, verifying every recovered identity instead of trusting it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Iterable, Sequence

from . import predicates
from .exactprob import (
    DistributionError,
    JointDistribution,
    mutual_indep3,
    uniform_functional_dist,
)
from .finalg import AbelianGroup, AlgebraError, Endo, enumerate_endos

E_KEYS = ("1", "2", "3", "12", "13", "23", "123")
FNF_VARS = tuple("A" + k for k in E_KEYS)

# Dependent three-element sets of the non-Fano matroid.
DN_TRIPLES = (
    frozenset({"1", "2", "12"}),
    frozenset({"1", "3", "13"}),
    frozenset({"2", "3", "23"}),
    frozenset({"1", "23", "123"}),
    frozenset({"2", "13", "123"}),
    frozenset({"3", "12", "123"}),
)
# The Fano matroid adds the circle {12, 13, 23} to the dependent sets.
DF_TRIPLES = DN_TRIPLES + (frozenset({"12", "13", "23"}),)
# Independent three-element sets of the Fano matroid, in a fixed order.
IF_TRIPLES = tuple(
    frozenset(t)
    for t in combinations(E_KEYS, 3)
    if frozenset(t) not in DF_TRIPLES
)


class LabelingError(ValueError):
    """Raised when an input is not a valid Fano/non-Fano system."""


def _var(key: str) -> str:
    return "A" + key


def _sorted_keys(keys: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(keys, key=E_KEYS.index))


def _support(d: JointDistribution, name: str) -> list[int]:
    seen = sorted({values[d.names.index(name)] for values, _ in d.atoms()})
    return seen


# ---------------------------------------------------------------------------
# the Fano-non-Fano predicate


def check_fnf_full(d: JointDistribution) -> bool:
    """Literal form: tri on the six dependent triples, mutual independence
    on all 28 independent triples."""
    for t in DN_TRIPLES:
        i, j, k = _sorted_keys(t)
        if not predicates.tri(d, {_var(i)}, {_var(j)}, {_var(k)}).holds:
            return False
    for t in IF_TRIPLES:
        i, j, k = _sorted_keys(t)
        if not mutual_indep3(d, {_var(i)}, {_var(j)}, {_var(k)}):
            return False
    return True


def check_fnf_reduced(d: JointDistribution) -> bool:
    """Reduced form: the six tri triples plus A1, A2, A3 mutually independent."""
    for t in DN_TRIPLES:
        i, j, k = _sorted_keys(t)
        if not predicates.tri(d, {_var(i)}, {_var(j)}, {_var(k)}).holds:
            return False
    return mutual_indep3(d, {"A1"}, {"A2"}, {"A3"})


def check_fnf(d: JointDistribution) -> bool:
    """Decide the Fano-non-Fano condition; the two equivalent forms are both
    evaluated and must agree."""
    for name in FNF_VARS:
        if name not in d.names:
            raise DistributionError(f"missing variable {name!r}")
    full = check_fnf_full(d)
    reduced = check_fnf_reduced(d)
    if full != reduced:
        raise AssertionError(
            f"full ({full}) and reduced ({reduced}) forms disagree; "
            "this indicates an implementation bug"
        )
    return full


@dataclass(frozen=True)
class FnfDistribution:
    """A joint distribution validated to satisfy the Fano-non-Fano condition."""

    dist: JointDistribution

    @classmethod
    def from_joint(cls, d: JointDistribution) -> "FnfDistribution":
        if not check_fnf(d):
            raise LabelingError("distribution does not satisfy the Fano-non-Fano condition")
        sizes = {len(_support(d, n)) for n in FNF_VARS}
        if len(sizes) != 1:
            raise LabelingError("variables do not share a common support size")
        return cls(d)

    @property
    def support_size(self) -> int:
        return len(_support(self.dist, "A123"))


# ---------------------------------------------------------------------------
# function tables


@dataclass(frozen=True)
class FTable:
    codomain: str
    domain: tuple[str, ...]
    table: dict


class FTableSet:
    """Lazy extraction of the deterministic tables among the seven variables.

    Two-argument tables exist exactly for the dependent triples; three-argument
    tables for the independent triples.  Extraction verifies totality and
    single-valuedness, reporting the violating triple otherwise.
    """

    def __init__(self, d: JointDistribution):
        self.d = d
        self._pos = {k: d.names.index(_var(k)) for k in E_KEYS}
        self._supports = {k: _support(d, _var(k)) for k in E_KEYS}
        self._two: dict[tuple, dict] = {}
        self._three: dict[tuple, dict] = {}

    def two_arg(self, codomain: str, i: str, j: str) -> dict:
        key = (codomain, i, j)
        if key in self._two:
            return self._two[key]
        if frozenset({codomain, i, j}) not in DN_TRIPLES:
            raise LabelingError(f"no two-argument table for {{{i},{j}}} -> {codomain}")
        pi, pj, pk = self._pos[i], self._pos[j], self._pos[codomain]
        table: dict = {}
        for values, _ in self.d.atoms():
            dk = (values[pi], values[pj])
            if table.setdefault(dk, values[pk]) != values[pk]:
                raise LabelingError(
                    f"variables A{codomain} not determined by (A{i}, A{j}) at {dk}"
                )
        expected = {(a, b) for a in self._supports[i] for b in self._supports[j]}
        if set(table) != expected:
            raise LabelingError(f"table ({i},{j}) -> {codomain} is not total")
        self._two[key] = table
        return table

    def three_arg(self, codomain: str, i: str, j: str, k: str) -> dict:
        key = (codomain, i, j, k)
        if key in self._three:
            return self._three[key]
        if frozenset({i, j, k}) not in IF_TRIPLES or codomain in {i, j, k}:
            raise LabelingError(f"no three-argument table for {{{i},{j},{k}}} -> {codomain}")
        pi, pj, pk, pl = (self._pos[x] for x in (i, j, k, codomain))
        table: dict = {}
        for values, _ in self.d.atoms():
            dk = (values[pi], values[pj], values[pk])
            if table.setdefault(dk, values[pl]) != values[pl]:
                raise LabelingError(
                    f"variable A{codomain} not determined by (A{i}, A{j}, A{k})"
                )
        expected = set(product(self._supports[i], self._supports[j], self._supports[k]))
        if set(table) != expected:
            raise LabelingError(f"table ({i},{j},{k}) -> {codomain} is not total")
        self._three[key] = table
        return table

    def catalog(self) -> list[FTable]:
        """Every two-argument table (all codomain choices and argument orders)
        and every three-argument table (ascending arguments, all codomains)."""
        out: list[FTable] = []
        for t in DN_TRIPLES:
            for codomain in _sorted_keys(t):
                rest = _sorted_keys(t - {codomain})
                for dom in (rest, rest[::-1]):
                    out.append(FTable(codomain, dom, self.two_arg(codomain, *dom)))
        for t in IF_TRIPLES:
            dom = _sorted_keys(t)
            for codomain in E_KEYS:
                if codomain not in t:
                    out.append(FTable(codomain, dom, self.three_arg(codomain, *dom)))
        return out


def extract_f_tables(src: FnfDistribution | JointDistribution) -> list[FTable]:
    d = src.dist if isinstance(src, FnfDistribution) else src
    return FTableSet(d).catalog()


# ---------------------------------------------------------------------------
# label groups


class LabelGroup:
    """A finite abelian group whose elements are integer labels.

    Stores the operation functionally; `abelian_model` lazily identifies the
    isomorphism type (invariant-factor form) together with an explicit
    isomorphism, which is what endomorphism enumeration runs on.
    """

    def __init__(
        self,
        labels: Sequence[int],
        zero: int,
        add_fn: Callable[[int, int], int],
        neg_fn: Callable[[int], int],
        model: AbelianGroup | None = None,
        model_iso: dict | None = None,
    ):
        self.labels = tuple(labels)
        self.zero = zero
        self._add = add_fn
        self._neg = neg_fn
        self._model = model
        self._iso = model_iso  # label -> model element tuple
        self._endos: list[tuple[Endo, dict]] | None = None

    def __len__(self) -> int:
        return len(self.labels)

    def add(self, a: int, b: int) -> int:
        return self._add(a, b)

    def neg(self, a: int) -> int:
        return self._neg(a)

    def sub(self, a: int, b: int) -> int:
        return self._add(a, self._neg(b))

    def scalar(self, k: int, a: int) -> int:
        acc = self.zero
        for _ in range(k):
            acc = self._add(acc, a)
        return acc

    def label_order(self, a: int) -> int:
        x, n = a, 1
        while x != self.zero:
            x = self._add(x, a)
            n += 1
        return n

    @classmethod
    def from_abelian(cls, g: AbelianGroup) -> "LabelGroup":
        iso = {g.index(e): e for e in g.elements()}
        return cls(
            range(g.order),
            0,
            lambda a, b: g.index(g.add(g.unindex(a), g.unindex(b))),
            lambda a: g.index(g.neg(g.unindex(a))),
            model=g,
            model_iso=iso,
        )

    def abelian_model(self, max_order: int = 16) -> tuple[AbelianGroup, dict]:
        if self._model is None:
            if len(self.labels) > max_order:
                raise AlgebraError(
                    f"model search capped at order {max_order}; group has {len(self.labels)}"
                )
            self._model, self._iso = _find_abelian_model(self)
        return self._model, self._iso

    def endos_on_labels(self) -> list[tuple[Endo, dict]]:
        """All endomorphisms, each as (model Endo, label -> label map)."""
        if self._endos is None:
            model, iso = self.abelian_model()
            inv = {e: lbl for lbl, e in iso.items()}
            out = []
            for endo in enumerate_endos(model):
                out.append((endo, {lbl: inv[endo(iso[lbl])] for lbl in self.labels}))
            self._endos = out
        return self._endos

    def label_map_of(self, endo: Endo) -> dict:
        model, iso = self.abelian_model()
        if endo.group != model:
            raise AlgebraError("endomorphism is over a different group")
        inv = {e: lbl for lbl, e in iso.items()}
        return {lbl: inv[endo(iso[lbl])] for lbl in self.labels}


def _invariant_factor_chains(n: int) -> list[tuple[int, ...]]:
    """Divisor chains n_1 | n_2 | ... with product n, each factor >= 2."""
    out: list[tuple[int, ...]] = []

    def rec(remaining: int, prefix: tuple[int, ...]):
        if remaining == 1:
            out.append(prefix)
            return
        start = prefix[-1] if prefix else 2
        for d in range(start, remaining + 1):
            if remaining % d == 0 and (not prefix or d % prefix[-1] == 0):
                rec(remaining // d, prefix + (d,))

    rec(n, ())
    return sorted(set(out))


def _find_abelian_model(lg: LabelGroup) -> tuple[AbelianGroup, dict]:
    n = len(lg.labels)
    orders = {lbl: lg.label_order(lbl) for lbl in lg.labels}
    for chain in _invariant_factor_chains(n):
        group = AbelianGroup(chain)
        candidates = [
            [lbl for lbl in lg.labels if f % orders[lbl] == 0] for f in chain
        ]
        for images in product(*candidates):
            table: dict = {}
            ok = True
            for coeffs in group.elements():
                acc = lg.zero
                for c, img in zip(coeffs, images):
                    acc = lg.add(acc, lg.scalar(c, img))
                table[coeffs] = acc
            if len(set(table.values())) == n:
                iso = {lbl: coeffs for coeffs, lbl in table.items()}
                return group, iso
    raise AlgebraError("no abelian model found; operation is not an abelian group")


# ---------------------------------------------------------------------------
# labelings


@dataclass
class GroupLabeling:
    """An abelian group over labels plus the seven relabeling bijections."""

    group: LabelGroup
    thetas: dict[str, dict[int, int]]  # E key -> (variable value -> label)
    _inv: dict[str, dict[int, int]] = field(default_factory=dict, repr=False)

    def theta(self, key: str, value: int) -> int:
        return self.thetas[key][value]

    def theta_inv(self, key: str) -> dict[int, int]:
        if key not in self._inv:
            self._inv[key] = {lbl: v for v, lbl in self.thetas[key].items()}
        return self._inv[key]

    def verify(self, d: JointDistribution) -> None:
        """Assert the four labeling equations on every positive atom."""
        pos = {k: d.names.index(_var(k)) for k in E_KEYS}
        g = self.group
        for values, _ in d.atoms():
            lab = {k: self.thetas[k][values[pos[k]]] for k in E_KEYS}
            if lab["12"] != g.add(lab["1"], lab["2"]):
                raise LabelingError(f"A12 labeling fails at atom {values}")
            if lab["13"] != g.add(lab["1"], lab["3"]):
                raise LabelingError(f"A13 labeling fails at atom {values}")
            if lab["23"] != g.add(lab["2"], lab["3"]):
                raise LabelingError(f"A23 labeling fails at atom {values}")
            if lab["123"] != g.add(g.add(lab["1"], lab["2"]), lab["3"]):
                raise LabelingError(f"A123 labeling fails at atom {values}")

    def export_text(self) -> str:
        lines = [f"labels: {list(self.group.labels)}", f"zero: {self.group.zero}", "add:"]
        for a in self.group.labels:
            lines.append("  " + " ".join(str(self.group.add(a, b)) for b in self.group.labels))
        lines.append("neg: " + " ".join(str(self.group.neg(a)) for a in self.group.labels))
        for k in E_KEYS:
            pairs = " ".join(f"{v}->{lbl}" for v, lbl in sorted(self.thetas[k].items()))
            lines.append(f"theta A{k}: {pairs}")
        return "\n".join(lines) + "\n"


def synthesize_fnf(g: AbelianGroup) -> tuple[FnfDistribution, GroupLabeling]:
    """Three i.i.d. uniform group elements and their partial sums.

    Values are element indices; every theta is the identity.
    """
    if g.order < 2:
        raise LabelingError("group must have at least two elements")

    def add_of(*slots):
        def fn(t):
            acc = g.zero()
            for s in slots:
                acc = g.add(acc, g.unindex(t[s]))
            return g.index(acc)

        return fn

    n = g.order
    d = uniform_functional_dist(
        [("A1", n), ("A2", n), ("A3", n)],
        [
            ("A12", add_of(0, 1)),
            ("A13", add_of(0, 2)),
            ("A23", add_of(1, 2)),
            ("A123", add_of(0, 1, 2)),
        ],
    )
    fnf = FnfDistribution.from_joint(d)
    ident = {k: {v: v for v in range(n)} for k in E_KEYS}
    labeling = GroupLabeling(LabelGroup.from_abelian(g), ident)
    labeling.verify(d)
    return fnf, labeling


def recover_labeling(src: FnfDistribution | JointDistribution) -> GroupLabeling:
    """Recover an abelian group labeling from a Fano/non-Fano system.

    Anchors: the lexicographically smallest support values of A1, A2, A3 are
    designated zero; the support of A123 (native order) becomes the label
    set.  Every defining identity of the recovered operation is verified and
    a violation aborts with the identity named.
    """
    d = src.dist if isinstance(src, FnfDistribution) else src
    if not isinstance(src, FnfDistribution):
        if not check_fnf(d):
            raise LabelingError("input does not satisfy the Fano-non-Fano condition")
    ft = FTableSet(d)

    zero1 = min(ft._supports["1"])
    zero2 = min(ft._supports["2"])
    zero3 = min(ft._supports["3"])
    labels = tuple(sorted(ft._supports["123"]))
    z = ft.three_arg("123", "1", "2", "3")[(zero1, zero2, zero3)]

    thetas: dict[str, dict[int, int]] = {"123": {v: v for v in labels}}
    thetas["12"] = {ft.two_arg("12", "123", "3")[(a, zero3)]: a for a in labels}
    thetas["13"] = {ft.two_arg("13", "123", "2")[(a, zero2)]: a for a in labels}
    thetas["23"] = {ft.two_arg("23", "123", "1")[(a, zero1)]: a for a in labels}
    v23_0 = ft.two_arg("23", "123", "1")[(z, zero1)]
    v13_0 = ft.two_arg("13", "123", "2")[(z, zero2)]
    v12_0 = ft.two_arg("12", "123", "3")[(z, zero3)]
    thetas["1"] = {ft.two_arg("1", "123", "23")[(a, v23_0)]: a for a in labels}
    thetas["2"] = {ft.two_arg("2", "123", "13")[(a, v13_0)]: a for a in labels}
    thetas["3"] = {ft.two_arg("3", "123", "12")[(a, v12_0)]: a for a in labels}

    for k in E_KEYS:
        if sorted(thetas[k].values()) != sorted(labels) or set(thetas[k]) != set(
            ft._supports[k]
        ):
            raise LabelingError(f"relabeling of A{k} is not a bijection onto the labels")
    inv = {k: {lbl: v for v, lbl in thetas[k].items()} for k in E_KEYS}

    def relabeled2(codomain: str, i: str, j: str) -> Callable[[int, int], int]:
        t = ft.two_arg(codomain, i, j)
        ti, tj, tk = inv[i], inv[j], thetas[codomain]
        return lambda a, b: tk[t[(ti[a], tj[b])]]

    plus = relabeled2("12", "1", "2")
    f_2_1_12 = relabeled2("2", "1", "12")

    # zero-anchor identities for the sum tables
    for (i, j) in (("1", "2"), ("1", "3"), ("2", "3")):
        ij = i + j
        fij = relabeled2(ij, i, j)
        fijk = relabeled2("123", ij, _sorted_keys({"1", "2", "3"} - {i, j})[0])
        for a in labels:
            if fij(a, z) != a:
                raise LabelingError(f"zero identity fails: f[{ij}]({i},{j})({a},0) != {a}")
            if fijk(a, z) != a:
                raise LabelingError(f"zero identity fails: f[123]({ij},k)({a},0) != {a}")

    # the twelve coinciding sum functions
    same = [
        relabeled2("12", "1", "2"),
        relabeled2("12", "2", "1"),
        relabeled2("13", "1", "3"),
        relabeled2("13", "3", "1"),
        relabeled2("23", "2", "3"),
        relabeled2("23", "3", "2"),
        relabeled2("123", "1", "23"),
        relabeled2("123", "2", "13"),
        relabeled2("123", "3", "12"),
        relabeled2("123", "23", "1"),
        relabeled2("123", "13", "2"),
        relabeled2("123", "12", "3"),
    ]
    for a in labels:
        for b in labels:
            vals = {fn(a, b) for fn in same}
            if len(vals) != 1:
                raise LabelingError(f"sum functions disagree at ({a},{b}): {vals}")
            if plus(a, b) != plus(b, a):
                raise LabelingError(f"commutativity fails at ({a},{b})")

    for a in labels:
        if plus(a, z) != a:
            raise LabelingError(f"identity law fails at {a}")
        if plus(a, f_2_1_12(a, z)) != z:
            raise LabelingError(f"inverse law fails at {a}")
    for a in labels:
        for b in labels:
            for c in labels:
                if plus(plus(a, b), c) != plus(a, plus(b, c)):
                    raise LabelingError(f"associativity fails at ({a},{b},{c})")

    add_table = {(a, b): plus(a, b) for a in labels for b in labels}
    neg_table = {a: f_2_1_12(a, z) for a in labels}
    group = LabelGroup(
        labels, z, lambda a, b: add_table[(a, b)], lambda a: neg_table[a]
    )
    labeling = GroupLabeling(group, thetas)
    labeling.verify(d)
    return labeling


# ---------------------------------------------------------------------------
# brute-force isomorphism (independent oracle for round-trip tests)


def brute_force_isomorphic(lg: LabelGroup, g: AbelianGroup) -> bool:
    """Exhaustive isomorphism search over all bijections (orders <= 9)."""
    n = len(lg.labels)
    if g.order != n:
        return False
    if n > 9:
        raise AlgebraError("brute-force isomorphism capped at order 9")
    from itertools import permutations

    els = g.elements()
    labels = list(lg.labels)
    for perm in permutations(range(n)):
        # map labels[i] -> els[perm[i]]
        m = {labels[i]: els[perm[i]] for i in range(n)}
        if all(
            m[lg.add(a, b)] == g.add(m[a], m[b]) for a in labels for b in labels
        ):
            return True
    return False
