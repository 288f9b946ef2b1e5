import math
import random
from fractions import Fraction
from itertools import product

import pytest

from cinet.exactprob import (
    DistributionError,
    JointDistribution,
    entropic_vector,
    entropy,
    from_json_dict,
    iota_eq,
    iota_eq_given,
    is_ci,
    is_function_of,
    is_uniform,
    marginal,
    mutual_indep3,
    subset_order,
    support_size,
    to_json_dict,
    uniform_functional_dist,
)

F = Fraction


def uniform_bit(name="X"):
    return JointDistribution([(name, 2)], {(0,): F(1, 2), (1,): F(1, 2)})


def two_bits_xor():
    # X, W i.i.d. uniform bits, Y = X xor W
    return uniform_functional_dist([("X", 2), ("W", 2)], [("Y", lambda t: t[0] ^ t[1])])


def fnf_z2():
    add = lambda *ix: (lambda t: sum(t[i] for i in ix) % 2)
    return uniform_functional_dist(
        [("A1", 2), ("A2", 2), ("A3", 2)],
        [
            ("A12", add(0, 1)),
            ("A13", add(0, 2)),
            ("A23", add(1, 2)),
            ("A123", add(0, 1, 2)),
        ],
    )


def random_dist(rng, names_cards):
    keys = list(product(*[range(c) for _, c in names_cards]))
    weights = [rng.randrange(0, 4) for _ in keys]
    if sum(weights) == 0:
        weights[0] = 1
    total = sum(weights)
    atoms = {k: F(w, total) for k, w in zip(keys, weights) if w}
    return JointDistribution(names_cards, atoms)


# ---------------------------------------------------------------------------
# construction and validation


def test_atoms_must_sum_to_one():
    with pytest.raises(DistributionError):
        JointDistribution([("X", 2)], {(0,): F(1, 2)})


def test_value_range_checked():
    with pytest.raises(DistributionError):
        JointDistribution([("X", 2)], {(2,): F(1)})


def test_unknown_variable_raises():
    d = uniform_bit()
    with pytest.raises(DistributionError):
        entropy(d, {"missing"})
    with pytest.raises(DistributionError):
        is_ci(d, {"X"}, {"missing"}, set())


def test_uniform_functional_requires_total_table():
    with pytest.raises(DistributionError):
        uniform_functional_dist([("X", 2)], [("Y", {(0,): 0})])


# ---------------------------------------------------------------------------
# entropy


def test_entropy_uniform_bit():
    assert entropy(uniform_bit(), {"X"}) == pytest.approx(1.0)


def test_entropy_constant_is_zero():
    d = JointDistribution([("C", 3)], {(1,): F(1)})
    assert entropy(d, {"C"}) == pytest.approx(0.0)


def test_entropy_three_iid_quaternary():
    d = uniform_functional_dist([("X", 4), ("Y", 4), ("Z", 4)])
    assert entropy(d, {"X", "Y", "Z"}) == pytest.approx(6.0)


def test_entropy_additive_for_products():
    for k, c in [(2, 3), (3, 2), (2, 5)]:
        d = uniform_functional_dist([(f"S{i}", c) for i in range(k)])
        got = entropy(d, {f"S{i}" for i in range(k)})
        assert abs(got - k * math.log2(c)) < 1e-9


def test_entropic_vector_single_bit():
    assert entropic_vector(uniform_bit(), ["X"]) == pytest.approx([1.0])


def test_entropic_vector_copy():
    d = uniform_functional_dist([("X", 2)], [("Y", lambda t: t[0])])
    assert entropic_vector(d, ["X", "Y"]) == pytest.approx([1.0, 1.0, 1.0])


def test_entropic_vector_independent_bits():
    d = uniform_functional_dist([("X", 2), ("Y", 2)])
    assert entropic_vector(d, ["X", "Y"]) == pytest.approx([1.0, 1.0, 2.0])


def test_subset_order_is_binary_counter():
    order = subset_order(["a", "b"])
    assert order == [frozenset({"a"}), frozenset({"b"}), frozenset({"a", "b"})]


def test_entropic_vector_rejects_duplicates():
    with pytest.raises(DistributionError):
        entropic_vector(uniform_bit(), ["X", "X"])


# ---------------------------------------------------------------------------
# conditional independence


def test_ci_three_independent_bits():
    d = uniform_functional_dist([("X", 2), ("Y", 2), ("Z", 2)])
    assert is_ci(d, {"X"}, {"Y"}, {"Z"})


def test_ci_copy_is_dependent():
    d = uniform_functional_dist([("X", 2)], [("Y", lambda t: t[0])])
    assert not is_ci(d, {"X"}, {"Y"}, set())


def test_ci_xor_conditioning_breaks_independence():
    # Independent oracle: enumerate all 8 assignments of (X, Y, Z) and test
    # the factorization identity directly.
    d = uniform_functional_dist([("X", 2), ("Y", 2)], [("Z", lambda t: t[0] ^ t[1])])
    m = {(x, y, x ^ y): F(1, 4) for x in range(2) for y in range(2)}

    def p(sel):
        return lambda x, y, z: sum(
            pr for (a, b, c), pr in m.items() if all(s == t for s, t in zip(sel((a, b, c)), sel((x, y, z))))
        )

    violated = False
    for x, y, z in product(range(2), repeat=3):
        pxyz = m.get((x, y, z), F(0))
        pz = sum(pr for (a, b, c), pr in m.items() if c == z)
        pxz = sum(pr for (a, b, c), pr in m.items() if a == x and c == z)
        pyz = sum(pr for (a, b, c), pr in m.items() if b == y and c == z)
        if pxyz * pz != pxz * pyz:
            violated = True
    assert violated
    assert not is_ci(d, {"X"}, {"Y"}, {"Z"})


def test_ci_symmetry_randomized():
    rng = random.Random(7)
    for _ in range(40):
        d = random_dist(rng, [("A", 2), ("B", 2), ("C", 3)])
        for u, v, w in [({"A"}, {"B"}, {"C"}), ({"A"}, {"C"}, set()), ({"B"}, {"C"}, {"A"})]:
            assert is_ci(d, u, v, w) == is_ci(d, v, u, w)


def test_ci_handles_overlapping_sets():
    d = two_bits_xor()
    # Y is a function of {X, W}: self-CI given the pair.
    assert is_ci(d, {"Y"}, {"Y"}, {"X", "W"})
    assert not is_ci(d, {"Y"}, {"Y"}, {"X"})


# ---------------------------------------------------------------------------
# functional dependence


def test_function_of_xor():
    d = two_bits_xor()
    assert is_function_of(d, {"Y"}, {"X", "W"})


def test_function_of_independent_fails():
    d = uniform_functional_dist([("X", 2), ("Y", 2)])
    assert not is_function_of(d, {"Y"}, {"X"})


def test_function_of_mod3_sum():
    d = uniform_functional_dist(
        [("A1", 3), ("A2", 3)], [("A12", lambda t: (t[0] + t[1]) % 3)]
    )
    assert is_function_of(d, {"A12"}, {"A1", "A2"})
    # all atoms really do determine A12
    for values, _ in d.atoms():
        assert values[2] == (values[0] + values[1]) % 3


def test_function_of_equals_self_ci_randomized():
    rng = random.Random(21)
    for _ in range(60):
        d = random_dist(rng, [("A", 2), ("B", 3), ("C", 2)])
        for y, x in [({"A"}, {"B"}), ({"B"}, {"A", "C"}), ({"C"}, set()), ({"A", "B"}, {"C"})]:
            assert is_function_of(d, y, x) == is_ci(d, y, y, x)


# ---------------------------------------------------------------------------
# iota relations


def test_iota_eq_reflexive():
    d = uniform_functional_dist([("X", 3)])
    assert iota_eq(d, {"X"}, {"X"})


def test_iota_eq_bijection():
    d = uniform_functional_dist([("X", 3)], [("Y", lambda t: (t[0] + 1) % 3)])
    assert iota_eq(d, {"X"}, {"Y"})


def test_iota_eq_given_difference():
    d = uniform_functional_dist(
        [("A1", 2), ("A2", 2)], [("U", lambda t: (t[0] - t[1]) % 2)]
    )
    assert iota_eq_given(d, {"U"}, {"A1"}, {"A2"})


# ---------------------------------------------------------------------------
# mutual independence, uniformity, support


def test_mutual_indep3_iid():
    d = uniform_functional_dist([("X", 2), ("Y", 2), ("Z", 2)])
    assert mutual_indep3(d, {"X"}, {"Y"}, {"Z"})


def test_mutual_indep3_xor_fails():
    d = uniform_functional_dist([("X", 2), ("Y", 2)], [("Z", lambda t: t[0] ^ t[1])])
    assert not mutual_indep3(d, {"X"}, {"Y"}, {"Z"})


def test_mutual_indep3_copy_fails():
    d = uniform_functional_dist([("X", 2), ("Y", 2)], [("Z", lambda t: t[1])])
    assert not mutual_indep3(d, {"X"}, {"Y"}, {"Z"})


def test_uniform_over_z5():
    d = uniform_functional_dist([("X", 5)])
    assert is_uniform(d, {"X"})
    assert support_size(d, {"X"}) == 5


def test_bernoulli_third_not_uniform():
    d = JointDistribution([("X", 2)], {(0,): F(1, 3), (1,): F(2, 3)})
    assert not is_uniform(d, {"X"})
    assert support_size(d, {"X"}) == 2


def test_pair_with_xor_uniform():
    d = two_bits_xor()
    assert is_uniform(d, {"X", "Y"})
    assert support_size(d, {"X", "Y"}) == 4


# ---------------------------------------------------------------------------
# marginals


def test_marginal_of_product():
    d = uniform_functional_dist([("X", 2), ("Y", 3)])
    m = marginal(d, {"Y"})
    assert m == uniform_functional_dist([("Y", 3)])


def test_marginal_onto_everything():
    d = two_bits_xor()
    assert marginal(d, {"X", "W", "Y"}) == d


def test_marginal_fnf_pair_uniform():
    m = marginal(fnf_z2(), {"A1", "A12"})
    assert m.atom_count() == 4
    assert all(p == F(1, 4) for _, p in m.atoms())


def test_fnf_construction_matches_atom_count():
    d = fnf_z2()
    assert d.atom_count() == 8
    assert is_function_of(d, {"A12"}, {"A1", "A2"})


# ---------------------------------------------------------------------------
# supports-and-cardinality fact used throughout (finite random variables)


def test_flip_property_randomized():
    # For Z = pi_X(Y) with per-x support-preserving permutations:
    # X indep Z, Z determined by (X, Y); then |supp Y| == |supp Z| and
    # Y is determined by (X, Z); with Y uniform, Z is uniform and indep of X.
    rng = random.Random(5)
    for _ in range(25):
        nx, ny = rng.choice([2, 3]), rng.choice([2, 3, 4])
        perms = []
        for _ in range(nx):
            p = list(range(ny))
            rng.shuffle(p)
            perms.append(p)
        d = uniform_functional_dist(
            [("X", nx), ("Y", ny)], [("Z", lambda t, P=perms: P[t[0]][t[1]])]
        )
        assert is_ci(d, {"X"}, {"Z"}, set())
        assert is_function_of(d, {"Z"}, {"X", "Y"})
        assert support_size(d, {"Y"}) == support_size(d, {"Z"})
        assert is_function_of(d, {"Y"}, {"X", "Z"})
        assert is_uniform(d, {"Z"})
        assert is_ci(d, {"Z"}, {"X"}, set())


def test_semigraphoid_decomposition_randomized():
    # Construct p(x, y, w, z) = p(z) p(x|z) p(yw|z) so X indep (Y,W) | Z holds,
    # then decomposition must give X indep Y | Z.
    rng = random.Random(11)
    for _ in range(25):
        atoms = {}
        weights_z = [rng.randrange(1, 4) for _ in range(2)]
        tz = sum(weights_z)
        for z in range(2):
            wx = [rng.randrange(0, 3) for _ in range(2)]
            wyw = [[rng.randrange(0, 3) for _ in range(2)] for _ in range(2)]
            if sum(wx) == 0:
                wx[0] = 1
            if sum(sum(r) for r in wyw) == 0:
                wyw[0][0] = 1
            tx, tyw = sum(wx), sum(sum(r) for r in wyw)
            for x in range(2):
                for y in range(2):
                    for w in range(2):
                        p = F(weights_z[z], tz) * F(wx[x], tx) * F(wyw[y][w], tyw)
                        if p:
                            atoms[(x, y, w, z)] = atoms.get((x, y, w, z), F(0)) + p
        d = JointDistribution([("X", 2), ("Y", 2), ("W", 2), ("Z", 2)], atoms)
        assert is_ci(d, {"X"}, {"Y", "W"}, {"Z"})
        assert is_ci(d, {"X"}, {"Y"}, {"Z"})


# ---------------------------------------------------------------------------
# file format


def test_json_round_trip():
    d = fnf_z2()
    assert from_json_dict(to_json_dict(d)) == d


def test_json_parses_exact_fractions():
    doc = {
        "variables": [{"name": "X", "cardinality": 2}],
        "atoms": [
            {"values": [0], "p": "1/3"},
            {"values": [1], "p": "2/3"},
        ],
    }
    d = from_json_dict(doc)
    assert dict(d.atoms())[(0,)] == F(1, 3)
