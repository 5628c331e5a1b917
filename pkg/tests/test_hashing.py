import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mlpit.acceptance import preimage_oracle, random_parts
from mlpit.hashing import (HashExhaustedError, HashFamily, HashFn, canonical_partition, ceil_tol,
                           check_hash_conditions, clamp, construction_k, construction_k_raw,
                           construction_m, construction_m_raw, find_good_hash, hash_eval,
                           set_partitions)


def test_constant_polynomial_sends_everything_to_one_bucket():
    for c in range(7):
        h = HashFn((c,), 7, 4)
        assert len({hash_eval(h, x) for x in range(1, 8)}) == 1


def test_bucket_arithmetic_example():
    h = HashFn((0, 1), 5, 3)  # poly(x) = x
    assert hash_eval(h, 4) == (4 % 5) % 3 + 1 == 2


def test_family_size():
    fam = HashFamily(5, 5, 2, 5)
    assert len(fam) == 25 == len(list(fam))
    assert len(set(fam)) == 25


def test_family_default_q_is_next_prime():
    assert HashFamily(8, 3, 2).q == 11
    assert HashFamily(4, 6, 1).q == 7
    with pytest.raises(ValueError):
        HashFamily(8, 3, 2, q=7)
    with pytest.raises(ValueError):
        HashFamily(0, 1, 1)


def test_buckets_partition_the_variables():
    h = HashFn((1, 2, 3), 11, 4)
    b = h.buckets(10)
    assert len(b) == 4
    assert sorted(v for T in b for v in T) == list(range(10))
    for j, T in enumerate(b, 1):
        assert all(h(v + 1) == j for v in T)


# -- k-wise independence ---------------------------------------------------

@pytest.mark.parametrize("q,k", [(3, 1), (3, 2), (5, 2), (5, 3), (7, 2)])
def test_polynomials_are_k_wise_independent_before_reduction(q, k):
    members = list(HashFamily(q, q, k, q))
    for xs in itertools.permutations(range(q), k):
        counts = {}
        for h in members:
            key = tuple(h.raw(x) for x in xs)
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == q ** k
        assert all(Fraction(c, len(members)) == Fraction(1, q ** k) for c in counts.values())


# -- hash conditions -------------------------------------------------------

def test_injective_hash_passes_any_parts():
    n = 7
    h = HashFn((0, 1), 7, 7)  # x -> x mod 7, injective on 1..7
    assert len({h(x) for x in range(1, n + 1)}) == n
    rng = random.Random(3)
    for _ in range(50):
        assert check_hash_conditions(h, random_parts(rng, n), 1, n)


def test_single_bucket_fails_condition_one():
    h = HashFn((0,), 5, 1)
    res = check_hash_conditions(h, [[(0, 1, 2)]], 2, 5)
    assert not res
    assert res.witness == (0, 1, (0, 1, 2), 1)


def test_condition_two_counts_heavy_sets():
    # four disjoint pairs, all in bucket 1
    h = HashFn((0,), 11, 1)
    parts = [[(0, 1), (2, 3), (4, 5), (6, 7)]]
    assert check_hash_conditions(h, parts, 2, 8)  # limit 2 * log2 8 = 6
    res = check_hash_conditions(h, parts, 1, 8)
    assert not res and res.witness[3] == 1
    res = check_hash_conditions(h, parts, 2, 2)  # limit 2 * log2 2 = 2 < 4
    assert not res and res.witness[3] == 2


@given(st.integers(0, 2 ** 30))
def test_verifier_matches_preimage_oracle(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 14)
    m = rng.randint(1, n)
    k = rng.randint(1, 4)
    fam = HashFamily(n, m, k)
    h = HashFn(tuple(rng.randrange(fam.q) for _ in range(k)), fam.q, m)
    parts = random_parts(rng, n)
    assert bool(check_hash_conditions(h, parts, k, n)) == preimage_oracle(h, parts, k, n)


def test_find_good_hash_singletons_take_first_member():
    parts = [[(v,) for v in range(6)]]
    h = find_good_hash(parts, 2, 3, 6)
    assert h == next(iter(HashFamily(6, 3, 2)))


def test_find_good_hash_exhausts():
    with pytest.raises(HashExhaustedError):
        find_good_hash([[(0, 1, 2)]], 1, 1, 3)


def test_find_good_hash_limit():
    parts = [[(0, 1, 2, 3)]]
    with pytest.raises(HashExhaustedError):
        find_good_hash(parts, 1, 4, 4, limit=1)


def test_find_good_hash_medium_instance():
    n, k, eps = 16, 10, 0.5
    rng = random.Random(16)
    cap = int(n ** (1 - eps))
    parts = []
    for _ in range(3):
        vs = list(range(n))
        rng.shuffle(vs)
        fam, i = [], 0
        while i < n:
            size = rng.randint(1, cap)
            fam.append(tuple(sorted(vs[i:i + size])))
            i += size
        parts.append(fam)
    h = find_good_hash(parts, k, 4, n)
    assert check_hash_conditions(h, parts, k, n)
    assert preimage_oracle(h, parts, k, n)


# -- bucketings ------------------------------------------------------------

def bell_bounded(n, m):
    # Stirling numbers of the second kind, summed over block counts <= m
    S = [[0] * (n + 1) for _ in range(n + 1)]
    S[0][0] = 1
    for i in range(1, n + 1):
        for j in range(1, i + 1):
            S[i][j] = j * S[i - 1][j] + S[i - 1][j - 1]
    return sum(S[n][j] for j in range(0, min(n, m) + 1))


@pytest.mark.parametrize("n,m", [(0, 1), (1, 1), (3, 2), (4, 4), (5, 3), (6, 2)])
def test_set_partitions_count(n, m):
    parts = list(set_partitions(n, m))
    assert len(parts) == len(set(parts)) == bell_bounded(n, m)
    for P in parts:
        assert len(P) <= m
        assert sorted(v for b in P for v in b) == list(range(n))


@pytest.mark.parametrize("n,m,k", [(3, 2, 3), (4, 3, 4), (4, 4, 5), (5, 2, 5)])
def test_saturated_family_gives_all_partitions(n, m, k):
    fam = HashFamily(n, m, k)
    assert fam.saturated
    brute = {canonical_partition(h.buckets(n)) for h in fam}
    assert set(fam.bucketings()) == brute == {canonical_partition(P) for P in set_partitions(n, m)}


@pytest.mark.parametrize("n,m,k", [(5, 3, 2), (6, 4, 1), (7, 7, 3)])
def test_unsaturated_bucketings_match_members(n, m, k):
    fam = HashFamily(n, m, k)
    got = list(fam.bucketings())
    assert len(got) == len(set(got))
    assert set(got) == {canonical_partition(h.buckets(n)) for h in fam}


# -- parameters ------------------------------------------------------------

def test_construction_parameters():
    assert construction_k_raw(16, 0.5) == 12
    assert construction_k(16, 0.5) == 12
    assert construction_m_raw(16, 0.5, 0.5) == 40
    assert construction_m(16, 0.5, 0.5) == 16
    assert construction_m_raw(256, 0.5, 0.25) == pytest.approx(320)
    assert construction_m(256, 0.5, 0.25) == 256
    assert construction_m_raw(2 ** 20, 0.75, 0.25) == 10240
    assert construction_k(4, 0.5) == 4


@given(st.integers(2, 10 ** 6), st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_clamped_parameters_stay_in_range(n, delta, eps):
    assert 1 <= construction_k(n, delta) <= n
    assert 1 <= construction_m(n, eps, delta) <= n


def test_ceil_tol_absorbs_float_noise():
    assert ceil_tol(3.0000000000000004) == 3
    assert ceil_tol(3.01) == 4
    assert ceil_tol(math.log2(8)) == 3
    assert clamp(9, 1, 4) == 4 and clamp(-1, 1, 4) == 1
