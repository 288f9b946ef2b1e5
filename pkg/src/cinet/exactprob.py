"""Exact finite joint distributions and the primitive information relations.

Every decision procedure here (conditional independence, functional
dependence, uniformity) compares exact rational probabilities.  Floating
point appears only in entropy values, which are reporting outputs and are
never used to decide a predicate.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Mapping, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)

Atom = tuple  # value tuple, one entry per variable, in declaration order


class DistributionError(ValueError):
    """Malformed distribution, unknown variable, or invalid query."""


class JointDistribution:
    """Sparse exact pmf over named finite variables.

    Atoms with zero probability are omitted.  Instances are immutable;
    all operations return new values.
    """

    def __init__(self, variables: Sequence[tuple[str, int]], atoms: Mapping[Atom, Fraction]):
        names = [n for n, _ in variables]
        if len(set(names)) != len(names):
            raise DistributionError("duplicate variable names")
        self._vars = tuple((str(n), int(c)) for n, c in variables)
        self._pos = {n: i for i, (n, _) in enumerate(self._vars)}
        clean: dict[Atom, Fraction] = {}
        for values, p in atoms.items():
            p = Fraction(p)
            if p < 0:
                raise DistributionError(f"negative probability {p}")
            if p == 0:
                continue
            values = tuple(int(v) for v in values)
            if len(values) != len(self._vars):
                raise DistributionError(f"atom arity {len(values)} != {len(self._vars)}")
            for v, (n, c) in zip(values, self._vars):
                if not 0 <= v < c:
                    raise DistributionError(f"value {v} out of range for {n} (cardinality {c})")
            if values in clean:
                raise DistributionError(f"duplicate atom {values}")
            clean[values] = p
        if sum(clean.values(), ZERO) != ONE:
            raise DistributionError("probabilities do not sum to 1")
        self._atoms = clean

    @property
    def variables(self) -> tuple[tuple[str, int], ...]:
        return self._vars

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self._vars)

    def cardinality(self, name: str) -> int:
        return self._vars[self._position(name)][1]

    def atoms(self) -> Iterable[tuple[Atom, Fraction]]:
        return self._atoms.items()

    def atom_count(self) -> int:
        return len(self._atoms)

    def _position(self, name: str) -> int:
        try:
            return self._pos[name]
        except KeyError:
            raise DistributionError(f"unknown variable {name!r}") from None

    def _positions(self, names: Iterable[str]) -> tuple[int, ...]:
        return tuple(sorted(self._position(n) for n in set(names)))

    def _marginal_map(self, positions: tuple[int, ...]) -> dict[Atom, Fraction]:
        out: dict[Atom, Fraction] = {}
        for values, p in self._atoms.items():
            key = tuple(values[i] for i in positions)
            out[key] = out.get(key, ZERO) + p
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, JointDistribution)
            and self._vars == other._vars
            and self._atoms == other._atoms
        )

    def __repr__(self) -> str:
        return f"JointDistribution({[n for n, _ in self._vars]}, {len(self._atoms)} atoms)"


# ---------------------------------------------------------------------------
# construction helpers


def uniform_functional_dist(
    sources: Sequence[tuple[str, int]],
    derived: Sequence[tuple[str, Mapping[Atom, int] | Callable[[Atom], int]]] = (),
) -> JointDistribution:
    """Product of i.i.d. uniform sources extended with deterministic variables.

    Each derived entry maps every full source value tuple to a value; tables
    must be total over the source product space.
    """
    if not sources:
        raise DistributionError("at least one source required")
    cards = [int(c) for _, c in sources]
    if any(c < 1 for c in cards):
        raise DistributionError("source cardinality must be positive")
    total = math.prod(cards)
    p = Fraction(1, total)

    derived_vals: list[list[int]] = [[] for _ in derived]
    src_tuples = list(product(*[range(c) for c in cards]))
    for j, (name, table) in enumerate(derived):
        fn = table if callable(table) else None
        for t in src_tuples:
            if fn is not None:
                v = fn(t)
            else:
                if t not in table:
                    raise DistributionError(f"table for {name!r} missing entry for {t}")
                v = table[t]
            if v is None or int(v) < 0:
                raise DistributionError(f"table for {name!r} produced invalid value {v!r}")
            derived_vals[j].append(int(v))

    variables = list(sources) + [
        (name, max(vals) + 1) for (name, _), vals in zip(derived, derived_vals)
    ]
    atoms = {
        t + tuple(derived_vals[j][i] for j in range(len(derived))): p
        for i, t in enumerate(src_tuples)
    }
    return JointDistribution(variables, atoms)


def marginal(d: JointDistribution, s: Iterable[str]) -> JointDistribution:
    """Exact marginal onto the variables in `s` (distribution order kept)."""
    names = set(s)
    if not names:
        raise DistributionError("marginal over empty set")
    positions = d._positions(names)
    variables = [d.variables[i] for i in positions]
    return JointDistribution(variables, d._marginal_map(positions))


def rename_variables(d: JointDistribution, mapping: Mapping[str, str]) -> JointDistribution:
    """Rename variables (values untouched); names not mapped are kept."""
    variables = [(mapping.get(n, n), c) for n, c in d.variables]
    return JointDistribution(variables, dict(d.atoms()))


def relabel_values(d: JointDistribution, perms: Mapping[str, Sequence[int]]) -> JointDistribution:
    """Apply per-variable value permutations; CI structure is unchanged."""
    for name, perm in perms.items():
        if sorted(perm) != list(range(d.cardinality(name))):
            raise DistributionError(f"bad permutation for {name!r}")
    maps = [perms.get(n) for n, _ in d.variables]
    atoms = {
        tuple(v if m is None else m[v] for v, m in zip(values, maps)): p
        for values, p in d.atoms()
    }
    return JointDistribution(d.variables, atoms)


# ---------------------------------------------------------------------------
# exact relational predicates


def is_ci(d: JointDistribution, u: Iterable[str], v: Iterable[str], w: Iterable[str]) -> bool:
    """Exact conditional independence: p(uvw)p(w) == p(uw)p(vw) everywhere.

    `w` may be empty (p of the empty set is 1); the three sets need not be
    disjoint.  The check enumerates every assignment of the union variables
    that has positive probability on both the (u,w) and (v,w) marginals;
    all other assignments satisfy the identity trivially.
    """
    pu, pv, pw = set(u), set(v), set(w)
    pos_uw = d._positions(pu | pw)
    pos_vw = d._positions(pv | pw)
    pos_w = d._positions(pw)
    pos_t = d._positions(pu | pv | pw)

    m_uw = d._marginal_map(pos_uw)
    m_vw = d._marginal_map(pos_vw)
    m_w = d._marginal_map(pos_w) if pos_w else {(): ONE}
    m_t = d._marginal_map(pos_t)

    # Coordinates shared by the uw- and vw-keys: (u & v) | w.
    shared = tuple(sorted(set(pos_uw) & set(pos_vw)))
    uw_shared = tuple(pos_uw.index(i) for i in shared)
    vw_shared = tuple(pos_vw.index(i) for i in shared)
    w_of_shared = tuple(shared.index(i) for i in pos_w)

    by_shared_u: dict[Atom, list[tuple[Atom, Fraction]]] = {}
    for key, p in m_uw.items():
        by_shared_u.setdefault(tuple(key[i] for i in uw_shared), []).append((key, p))
    by_shared_v: dict[Atom, list[tuple[Atom, Fraction]]] = {}
    for key, p in m_vw.items():
        by_shared_v.setdefault(tuple(key[i] for i in vw_shared), []).append((key, p))

    # Position of each union coordinate inside the uw/vw keys.
    t_from: list[tuple[bool, int]] = []
    for i in pos_t:
        if i in pos_uw:
            t_from.append((True, pos_uw.index(i)))
        else:
            t_from.append((False, pos_vw.index(i)))

    for sk, lst_u in by_shared_u.items():
        lst_v = by_shared_v.get(sk)
        if lst_v is None:
            continue
        p_w = m_w[tuple(sk[i] for i in w_of_shared)]
        for ku, p_uw in lst_u:
            for kv, p_vw in lst_v:
                t = tuple(ku[j] if side else kv[j] for side, j in t_from)
                if m_t.get(t, ZERO) * p_w != p_uw * p_vw:
                    return False
    return True


def is_function_of(d: JointDistribution, y: Iterable[str], x: Iterable[str]) -> bool:
    """True iff Y is determined by X with probability 1 (exact check).

    Equivalent to is_ci(d, y, y, x); the test suite asserts that equivalence.
    """
    ys, xs = set(y), set(x)
    if not ys:
        return True
    pos_xy = d._positions(ys | xs)
    pos_x = d._positions(xs)
    x_in_xy = tuple(pos_xy.index(i) for i in pos_x)
    seen: dict[Atom, Atom] = {}
    for key in d._marginal_map(pos_xy):
        xk = tuple(key[i] for i in x_in_xy)
        if seen.setdefault(xk, key) != key:
            return False
    return True


def iota_eq(d: JointDistribution, x: Iterable[str], y: Iterable[str]) -> bool:
    """X and Y carry the same information: each is a function of the other."""
    return is_function_of(d, x, y) and is_function_of(d, y, x)


def iota_eq_given(d: JointDistribution, x: Iterable[str], y: Iterable[str], z: Iterable[str]) -> bool:
    """Given Z, X and Y carry the same information."""
    xs, ys, zs = set(x), set(y), set(z)
    return is_function_of(d, xs, zs | ys) and is_function_of(d, ys, zs | xs)


def mutual_indep3(d: JointDistribution, x: Iterable[str], y: Iterable[str], z: Iterable[str]) -> bool:
    """Three-way mutual independence via X indep Y and (X,Y) indep Z."""
    xs, ys, zs = set(x), set(y), set(z)
    return is_ci(d, xs, ys, set()) and is_ci(d, xs | ys, zs, set())


def support_size(d: JointDistribution, x: Iterable[str]) -> int:
    xs = set(x)
    if not xs:
        raise DistributionError("support of empty set")
    return len(d._marginal_map(d._positions(xs)))


def is_uniform(d: JointDistribution, x: Iterable[str]) -> bool:
    """Uniform over the positive-probability support, compared exactly."""
    xs = set(x)
    if not xs:
        raise DistributionError("uniformity of empty set")
    probs = set(d._marginal_map(d._positions(xs)).values())
    return len(probs) == 1


# ---------------------------------------------------------------------------
# entropy reporting (float; never used for decisions)


def entropy(d: JointDistribution, s: Iterable[str]) -> float:
    """Shannon entropy (bits) of the marginal on `s`."""
    ss = set(s)
    if not ss:
        raise DistributionError("entropy of empty set")
    h = 0.0
    for p in d._marginal_map(d._positions(ss)).values():
        fp = float(p)
        h -= fp * math.log2(fp)
    return h


def subset_order(order: Sequence[str]) -> list[frozenset[str]]:
    """Canonical nonempty-subset order: binary counter, bit i = i-th name."""
    out = []
    for mask in range(1, 1 << len(order)):
        out.append(frozenset(order[i] for i in range(len(order)) if mask >> i & 1))
    return out


def entropic_vector(d: JointDistribution, order: Sequence[str]) -> list[float]:
    """Joint entropies of all nonempty subsets of `order`, counter-indexed."""
    if len(set(order)) != len(order):
        raise DistributionError("duplicate names in order")
    return [entropy(d, s) for s in subset_order(order)]


# ---------------------------------------------------------------------------
# file format


def to_json_dict(d: JointDistribution) -> dict:
    return {
        "variables": [{"name": n, "cardinality": c} for n, c in d.variables],
        "atoms": [
            {"values": list(values), "p": f"{p.numerator}/{p.denominator}"}
            for values, p in sorted(d.atoms())
        ],
    }


def from_json_dict(doc: dict) -> JointDistribution:
    try:
        variables = [(v["name"], int(v["cardinality"])) for v in doc["variables"]]
        atoms = {tuple(a["values"]): Fraction(a["p"]) for a in doc["atoms"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise DistributionError(f"malformed distribution document: {exc}") from exc
    return JointDistribution(variables, atoms)


def save(d: JointDistribution, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(to_json_dict(d), fh, indent=1)


def load(path: str) -> JointDistribution:
    with open(path) as fh:
        return from_json_dict(json.load(fh))
