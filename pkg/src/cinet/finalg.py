"""Finite fields GF(p) and GF(p^2), exact matrix algebra over them, finite
groups via Cayley tables, abelian groups with their endomorphisms, and the
left regular representation with its rank law.

Field elements are integers 0..|F|-1.  For GF(p^2) the element c0 + c1*x is
encoded as c0 + c1*p, where x^2 + bx + c is the lexicographically smallest
monic irreducible quadratic over GF(p).  All field operations accept plain
ints or numpy integer arrays.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

import numpy as np


class AlgebraError(ValueError):
    """Invalid algebraic construction or query."""


class CapExceeded(AlgebraError):
    """An enumeration would exceed its configured cap."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in range(2, int(n**0.5) + 1):
        if n % q == 0:
            return False
    return True


# ---------------------------------------------------------------------------
# fields


class Field:
    """GF(p) or GF(p^2) with integer-encoded elements."""

    def __init__(self, p: int, degree: int = 1):
        if not _is_prime(p):
            raise AlgebraError(f"{p} is not prime")
        if degree not in (1, 2):
            raise AlgebraError("only degree 1 and 2 supported")
        self.p = p
        self.degree = degree
        self.order = p**degree
        if degree == 2:
            self.quad_b, self.quad_c = self._smallest_irreducible(p)
        else:
            self.quad_b = self.quad_c = 0
        self._inv = self._inverse_table()

    @staticmethod
    def _smallest_irreducible(p: int) -> tuple[int, int]:
        # x^2 + bx + c is irreducible over GF(p) iff it has no root.
        for b in range(p):
            for c in range(p):
                if all((t * t + b * t + c) % p for t in range(p)):
                    return b, c
        raise AlgebraError("no irreducible quadratic found")  # unreachable

    def _inverse_table(self) -> list[int]:
        inv = [0] * self.order
        for a in range(1, self.order):
            x = a
            # Fermat: a^(order-2) is the inverse in any finite field.
            acc, e = self.one, self.order - 2
            while e:
                if e & 1:
                    acc = int(self.mul(acc, x))
                x = int(self.mul(x, x))
                e >>= 1
            inv[a] = acc
        return inv

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    def add(self, a, b):
        p = self.p
        if self.degree == 1:
            return (a + b) % p
        return (a % p + b % p) % p + p * ((a // p + b // p) % p)

    def neg(self, a):
        p = self.p
        if self.degree == 1:
            return (-a) % p
        return (-(a % p)) % p + p * ((-(a // p)) % p)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        p = self.p
        if self.degree == 1:
            return (a * b) % p
        a0, a1 = a % p, a // p
        b0, b1 = b % p, b // p
        hi = a1 * b1
        c0 = (a0 * b0 - self.quad_c * hi) % p
        c1 = (a0 * b1 + a1 * b0 - self.quad_b * hi) % p
        return c0 + p * c1

    def inv(self, a: int) -> int:
        if a == 0:
            raise AlgebraError("zero has no inverse")
        return self._inv[a]

    def elements(self) -> range:
        return range(self.order)

    def spec(self) -> str:
        return f"gf({self.p})" if self.degree == 1 else f"gf({self.p}^2)"

    @classmethod
    def parse(cls, spec: str) -> "Field":
        m = re.fullmatch(r"\s*gf\(\s*(\d+)\s*(\^\s*2\s*)?\)\s*", spec.lower())
        if not m:
            raise AlgebraError(f"bad field spec {spec!r}; expected gf(p) or gf(p^2)")
        return cls(int(m.group(1)), 2 if m.group(2) else 1)

    def __eq__(self, other) -> bool:
        return isinstance(other, Field) and (self.p, self.degree) == (other.p, other.degree)

    def __hash__(self) -> int:
        return hash((self.p, self.degree))

    def __repr__(self) -> str:
        return f"Field({self.spec()})"


# ---------------------------------------------------------------------------
# matrices


class FieldMatrix:
    """Dense matrix with integer-encoded entries over a Field."""

    def __init__(self, field: Field, data):
        self.field = field
        arr = np.array(data, dtype=np.int64)
        if arr.ndim != 2:
            raise AlgebraError("matrix data must be 2-dimensional")
        if arr.size and (arr.min() < 0 or arr.max() >= field.order):
            raise AlgebraError("entry out of field range")
        self.a = arr

    # -- constructors ------------------------------------------------------
    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "FieldMatrix":
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, field: Field, n: int) -> "FieldMatrix":
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def vstack(cls, mats: Sequence["FieldMatrix"]) -> "FieldMatrix":
        if not mats:
            raise AlgebraError("vstack of nothing")
        f = mats[0].field
        if any(m.field != f for m in mats):
            raise AlgebraError("field mismatch")
        cols = {m.cols for m in mats}
        if len(cols) != 1:
            raise AlgebraError("column mismatch")
        return cls(f, np.vstack([m.a for m in mats]))

    # -- shape -------------------------------------------------------------
    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    def copy(self) -> "FieldMatrix":
        return FieldMatrix(self.field, self.a.copy())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldMatrix)
            and self.field == other.field
            and self.a.shape == other.a.shape
            and bool((self.a == other.a).all())
        )

    def __repr__(self) -> str:
        return f"FieldMatrix({self.field.spec()}, {self.a.tolist()})"

    # -- arithmetic ----------------------------------------------------------
    def _same(self, other: "FieldMatrix") -> None:
        if not isinstance(other, FieldMatrix) or other.field != self.field:
            raise AlgebraError("field mismatch")

    def __add__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._same(other)
        return FieldMatrix(self.field, self.field.add(self.a, other.a))

    def __sub__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._same(other)
        return FieldMatrix(self.field, self.field.sub(self.a, other.a))

    def __neg__(self) -> "FieldMatrix":
        return FieldMatrix(self.field, self.field.neg(self.a))

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._same(other)
        if self.cols != other.rows:
            raise AlgebraError("shape mismatch in product")
        f = self.field
        p = f.p
        if f.degree == 1:
            return FieldMatrix(f, (self.a @ other.a) % p)
        a0, a1 = self.a % p, self.a // p
        b0, b1 = other.a % p, other.a // p
        hi = a1 @ b1
        c0 = (a0 @ b0 - f.quad_c * hi) % p
        c1 = (a0 @ b1 + a1 @ b0 - f.quad_b * hi) % p
        return FieldMatrix(f, c0 + p * c1)

    def scale(self, s: int) -> "FieldMatrix":
        return FieldMatrix(self.field, self.field.mul(self.a, np.int64(int(s))))

    # -- elimination ---------------------------------------------------------
    def row_echelon(self) -> tuple["FieldMatrix", list[int]]:
        """Reduced row-echelon form and pivot column indices."""
        f = self.field
        m = self.a.copy()
        rows, cols = m.shape
        pivots: list[int] = []
        r = 0
        for col in range(cols):
            if r == rows:
                break
            hit = -1
            for i in range(r, rows):
                if m[i, col]:
                    hit = i
                    break
            if hit < 0:
                continue
            if hit != r:
                m[[r, hit]] = m[[hit, r]]
            m[r] = f.mul(m[r], np.int64(f.inv(int(m[r, col]))))
            for i in range(rows):
                if i != r and m[i, col]:
                    m[i] = f.sub(m[i], f.mul(m[r], np.int64(int(m[i, col]))))
            pivots.append(col)
            r += 1
        return FieldMatrix(f, m), pivots

    def rank(self) -> int:
        return len(self.row_echelon()[1])

    def inverse(self) -> "FieldMatrix":
        if self.rows != self.cols:
            raise AlgebraError("inverse of non-square matrix")
        n = self.rows
        aug = FieldMatrix(self.field, np.hstack([self.a, np.eye(n, dtype=np.int64)]))
        red, pivots = aug.row_echelon()
        if pivots[:n] != list(range(n)):
            raise AlgebraError("matrix is singular")
        return FieldMatrix(self.field, red.a[:, n:])


def rank(m: FieldMatrix) -> int:
    return m.rank()


def rowspace_contains(big: FieldMatrix, candidate: FieldMatrix) -> bool:
    """True iff every row of `candidate` lies in the row space of `big`."""
    if big.field != candidate.field:
        raise AlgebraError("field mismatch")
    if big.cols != candidate.cols:
        raise AlgebraError("column mismatch")
    f = big.field
    basis, pivots = big.row_echelon()
    b = basis.a
    for row in candidate.a:
        row = row.copy()
        for r, col in enumerate(pivots):
            if row[col]:
                row = f.sub(row, f.mul(b[r], np.int64(int(row[col]))))
        if row.any():
            return False
    return True


# ---------------------------------------------------------------------------
# finite groups via Cayley tables


class CayleyGroup:
    """Finite group given by a multiplication table on indices 0..n-1.

    The identity law, associativity, and existence of inverses are all
    verified at construction; a corrupted table is rejected.
    """

    def __init__(self, table: Sequence[Sequence[int]], name: str = "group"):
        t = [list(map(int, row)) for row in table]
        n = len(t)
        if any(len(row) != n for row in t):
            raise AlgebraError("table is not square")
        if any(not 0 <= v < n for row in t for v in row):
            raise AlgebraError("table entry out of range")
        identity = None
        for e in range(n):
            if all(t[e][a] == a and t[a][e] == a for a in range(n)):
                identity = e
                break
        if identity is None:
            raise AlgebraError("no identity element")
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if t[t[a][b]][c] != t[a][t[b][c]]:
                        raise AlgebraError(f"associativity fails at ({a},{b},{c})")
        inv = [None] * n
        for a in range(n):
            for b in range(n):
                if t[a][b] == identity and t[b][a] == identity:
                    inv[a] = b
                    break
            if inv[a] is None:
                raise AlgebraError(f"element {a} has no inverse")
        self.table = t
        self.order = n
        self.identity = identity
        self._inv = inv
        self.name = name

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self._inv[a]

    def elements(self) -> range:
        return range(self.order)

    def element_order(self, a: int) -> int:
        x, n = a, 1
        while x != self.identity:
            x = self.mul(x, a)
            n += 1
        return n

    def __repr__(self) -> str:
        return f"CayleyGroup({self.name}, order={self.order})"

    # -- constructors ------------------------------------------------------
    @classmethod
    def cyclic(cls, n: int) -> "CayleyGroup":
        return cls([[(a + b) % n for b in range(n)] for a in range(n)], name=f"Z{n}")

    @classmethod
    def direct_product(cls, g: "CayleyGroup", h: "CayleyGroup") -> "CayleyGroup":
        n, m = g.order, h.order

        def enc(a, b):
            return a * m + b

        table = [
            [
                enc(g.mul(a1, a2), h.mul(b1, b2))
                for a2 in range(n)
                for b2 in range(m)
            ]
            for a1 in range(n)
            for b1 in range(m)
        ]
        return cls(table, name=f"{g.name}x{h.name}")

    @classmethod
    def symmetric(cls, n: int) -> "CayleyGroup":
        """S_n on lexicographically sorted permutation tuples; (s*t)(i) = s[t[i]]."""
        if n > 4:
            raise AlgebraError("symmetric groups supported up to n = 4")
        perms = sorted(product(*[range(n)] * n))
        perms = [p for p in perms if len(set(p)) == n]
        index = {p: i for i, p in enumerate(perms)}
        table = [
            [index[tuple(s[t[i]] for i in range(n))] for t in perms]
            for s in perms
        ]
        return cls(table, name=f"S{n}")

    # -- file format ---------------------------------------------------------
    def to_json_dict(self) -> dict:
        return {
            "order": self.order,
            "identity": self.identity,
            "table": [v for row in self.table for v in row],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "CayleyGroup":
        n = int(doc["order"])
        raw = doc["table"]
        if raw and isinstance(raw[0], list):
            table = raw
        else:
            if len(raw) != n * n:
                raise AlgebraError("row-major table has wrong length")
            table = [raw[i * n : (i + 1) * n] for i in range(n)]
        g = cls(table, name=doc.get("name", "group"))
        if "identity" in doc and int(doc["identity"]) != g.identity:
            raise AlgebraError("declared identity does not match the table")
        return g

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh)

    @classmethod
    def load(cls, path: str) -> "CayleyGroup":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


# ---------------------------------------------------------------------------
# abelian groups and endomorphisms


class AbelianGroup:
    """Direct sum of cyclic groups Z_{n_1} x ... x Z_{n_r}; elements are tuples."""

    def __init__(self, factors: Sequence[int]):
        fs = tuple(int(n) for n in factors)
        if not fs or any(n < 2 for n in fs):
            raise AlgebraError("factors must all be >= 2")
        self.factors = fs
        self.order = math.prod(fs)

    @property
    def rank(self) -> int:
        return len(self.factors)

    def zero(self) -> tuple[int, ...]:
        return (0,) * len(self.factors)

    def add(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        return tuple((x + y) % n for x, y, n in zip(a, b, self.factors))

    def neg(self, a: tuple[int, ...]) -> tuple[int, ...]:
        return tuple((-x) % n for x, n in zip(a, self.factors))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def scalar(self, k: int, a: tuple[int, ...]) -> tuple[int, ...]:
        return tuple((k * x) % n for x, n in zip(a, self.factors))

    def elements(self) -> list[tuple[int, ...]]:
        return list(product(*[range(n) for n in self.factors]))

    def index(self, a: tuple[int, ...]) -> int:
        i = 0
        for x, n in zip(a, self.factors):
            i = i * n + x
        return i

    def unindex(self, i: int) -> tuple[int, ...]:
        out = []
        for n in reversed(self.factors):
            out.append(i % n)
            i //= n
        return tuple(reversed(out))

    def element_order(self, a: tuple[int, ...]) -> int:
        return math.lcm(*[n // math.gcd(x, n) for x, n in zip(a, self.factors)]) if any(a) else 1

    def generators(self) -> list[tuple[int, ...]]:
        gens = []
        for i in range(len(self.factors)):
            e = [0] * len(self.factors)
            e[i] = 1
            gens.append(tuple(e))
        return gens

    def to_cayley(self) -> CayleyGroup:
        els = self.elements()
        idx = {e: i for i, e in enumerate(els)}
        return CayleyGroup(
            [[idx[self.add(a, b)] for b in els] for a in els],
            name="x".join(f"Z{n}" for n in self.factors),
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, AbelianGroup) and self.factors == other.factors

    def __hash__(self) -> int:
        return hash(self.factors)

    def __repr__(self) -> str:
        return "AbelianGroup(%s)" % "x".join(f"Z{n}" for n in self.factors)


class Endo:
    """Additive map of an abelian group, stored as a full function table."""

    def __init__(self, group: AbelianGroup, table: dict):
        self.group = group
        els = group.elements()
        if set(table) != set(els):
            raise AlgebraError("endomorphism table must be total")
        for a in els:
            for b in els:
                if table[group.add(a, b)] != group.add(table[a], table[b]):
                    raise AlgebraError(f"not additive at {a}+{b}")
        if table[group.zero()] != group.zero():
            raise AlgebraError("does not fix zero")
        self.table = dict(table)

    def __call__(self, a: tuple[int, ...]) -> tuple[int, ...]:
        return self.table[a]

    @classmethod
    def from_generator_images(cls, group: AbelianGroup, images: Sequence[tuple[int, ...]]) -> "Endo":
        if len(images) != group.rank:
            raise AlgebraError("one image per generator required")
        for img, n in zip(images, group.factors):
            if group.scalar(n, img) != group.zero():
                raise AlgebraError(f"image {img} has order not dividing {n}")
        table = {}
        for a in group.elements():
            acc = group.zero()
            for coeff, img in zip(a, images):
                acc = group.add(acc, group.scalar(coeff, img))
            table[a] = acc
        return cls(group, table)

    @classmethod
    def zero(cls, group: AbelianGroup) -> "Endo":
        return cls(group, {a: group.zero() for a in group.elements()})

    @classmethod
    def identity(cls, group: AbelianGroup) -> "Endo":
        return cls(group, {a: a for a in group.elements()})

    def is_automorphism(self) -> bool:
        return len(set(self.table.values())) == self.group.order

    def inverse(self) -> "Endo":
        if not self.is_automorphism():
            raise AlgebraError("not invertible")
        return Endo(self.group, {v: k for k, v in self.table.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, Endo) and self.group == other.group and self.table == other.table

    def __hash__(self) -> int:
        return hash((self.group.factors, tuple(sorted(self.table.items()))))

    def __repr__(self) -> str:
        imgs = [self.table[g] for g in self.group.generators()]
        return f"Endo({self.group!r}, gens->{imgs})"


def compose(g1: Endo, g2: Endo) -> Endo:
    """g1 after g2: a -> g1(g2(a))."""
    if g1.group != g2.group:
        raise AlgebraError("group mismatch")
    return Endo(g1.group, {a: g1.table[g2.table[a]] for a in g1.group.elements()})


def is_automorphism(g: Endo) -> bool:
    return g.is_automorphism()


def enumerate_endos(group: AbelianGroup, cap: int = 64, endo_cap: int = 1 << 17) -> list[Endo]:
    """All endomorphisms, ordered lexicographically by generator images."""
    if group.order > cap:
        raise CapExceeded(f"group order {group.order} exceeds cap {cap}")
    els = group.elements()
    choices = []
    for n in group.factors:
        choices.append([a for a in els if group.scalar(n, a) == group.zero()])
    count = math.prod(len(c) for c in choices)
    if count > endo_cap:
        raise CapExceeded(f"{count} candidate endomorphisms exceed cap {endo_cap}")
    out = []
    seen = set()
    for images in product(*choices):
        e = Endo.from_generator_images(group, images)
        key = tuple(sorted(e.table.items()))
        if key not in seen:
            seen.add(key)
            out.append(e)
    return out


def endo_matrix(e: Endo, field: Field) -> FieldMatrix:
    """Matrix of an endomorphism of Z_p^r over GF(p) (columns = generator images)."""
    g = e.group
    if field.degree != 1 or any(n != field.p for n in g.factors):
        raise AlgebraError("endo_matrix needs an elementary abelian group over GF(p)")
    cols = [e(gen) for gen in g.generators()]
    return FieldMatrix(field, [[cols[j][i] for j in range(g.rank)] for i in range(g.rank)])


# ---------------------------------------------------------------------------
# left regular representation


def lrr(b_group: CayleyGroup, b: int, field: Field) -> FieldMatrix:
    """Permutation matrix of left translation: entry (a, b^{-1}a) is one."""
    if not 0 <= b < b_group.order:
        raise AlgebraError(f"invalid element {b}")
    n = b_group.order
    binv = b_group.inv(b)
    m = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        m[a, b_group.mul(binv, a)] = 1
    return FieldMatrix(field, m)


@dataclass
class RankReport:
    group: str
    field: str
    entries: list[tuple[int, int, int, int]]  # (element, order, rank, expected)
    all_ok: bool


def lrr_rank_check(b_group: CayleyGroup, field: Field) -> RankReport:
    """Check rank(lrr(b) - I) == (ord(b)-1)|B|/ord(b) >= ceil(|B|/2) for b != e."""
    n = b_group.order
    ident = FieldMatrix.identity(field, n)
    entries = []
    ok = True
    for b in b_group.elements():
        if b == b_group.identity:
            continue
        o = b_group.element_order(b)
        r = (lrr(b_group, b, field) - ident).rank()
        expected = (o - 1) * n // o
        entries.append((b, o, r, expected))
        if r != expected or r < math.ceil(n / 2):
            ok = False
    return RankReport(b_group.name, field.spec(), entries, ok)


def completion_map(b_group: CayleyGroup, x1: int, field: Field) -> FieldMatrix:
    """A floor(|B|/2) x |B| matrix t with stack(lrr(x1) - I, t) of full rank.

    Rows are the lexicographically first standard basis vectors that raise
    the rank, padded with zero rows up to floor(|B|/2).
    """
    if x1 == b_group.identity:
        raise AlgebraError("no completion for the identity element")
    n = b_group.order
    budget = n // 2
    base = lrr(b_group, x1, field) - FieldMatrix.identity(field, n)
    current = base
    r = current.rank()
    rows = []
    for j in range(n):
        if r == n:
            break
        e = np.zeros((1, n), dtype=np.int64)
        e[0, j] = 1
        cand = FieldMatrix.vstack([current, FieldMatrix(field, e)])
        cr = cand.rank()
        if cr > r:
            rows.append(e[0])
            current, r = cand, cr
    if r != n or len(rows) > budget:
        raise AlgebraError("completion budget exceeded")
    while len(rows) < budget:
        rows.append(np.zeros(n, dtype=np.int64))
    t = FieldMatrix(field, np.array(rows, dtype=np.int64).reshape(budget, n))
    assert FieldMatrix.vstack([base, t]).rank() == n
    return t


# ---------------------------------------------------------------------------
# word-problem relation checks


def check_relations(
    b_group: CayleyGroup, assignment: Sequence[int], relations: Iterable[tuple[int, int, int]]
) -> bool:
    """Verify x_a * x_b == x_c for each 1-indexed triple (a, b, c)."""
    k = len(assignment)
    for a, b, c in relations:
        if not (1 <= a <= k and 1 <= b <= k and 1 <= c <= k):
            raise AlgebraError(f"relation index out of range in {(a, b, c)}")
        if b_group.mul(assignment[a - 1], assignment[b - 1]) != assignment[c - 1]:
            return False
    return True


def goal_is_identity(b_group: CayleyGroup, assignment: Sequence[int]) -> bool:
    return assignment[0] == b_group.identity
