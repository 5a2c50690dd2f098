import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from explab.arith import (arithmetic_functions, factorize, is_prime, mobius_table, phi_table, prime_pi,
                          primes_between, sieve_primes, unit_group)
from explab.errors import DomainError


def trial_primes(n):
    return [k for k in range(2, n + 1) if all(k % d for d in range(2, math.isqrt(k) + 1))]


def test_sieve_small_examples():
    assert sieve_primes(10).tolist() == [2, 3, 5, 7]
    assert sieve_primes(2).tolist() == [2]
    assert len(sieve_primes(100)) == 25


def test_sieve_matches_trial_division():
    assert sieve_primes(5000).tolist() == trial_primes(5000)


def test_segmented_sieve_counts():
    # pi(10^7) = 664579 is a classical count
    assert sieve_primes(10**7 + 1000).size == prime_pi(10**7 + 1000)
    assert prime_pi(10**7) == 664579


def test_primes_between_is_half_open():
    assert primes_between(2, 11).tolist() == [3, 5, 7, 11]


@pytest.mark.parametrize("n, factors", [(12, ((2, 2), (3, 1))), (1, ()),
                                        (30030, ((2, 1), (3, 1), (5, 1), (7, 1), (11, 1), (13, 1)))])
def test_factorize_examples(n, factors):
    assert factorize(n).factors == factors


def test_factorize_rejects_zero():
    with pytest.raises(DomainError):
        factorize(0)


@given(st.integers(1, 10**12))
def test_factorize_round_trip(n):
    f = factorize(n)
    assert math.prod(p**e for p, e in f.factors) == n
    assert all(is_prime(p) for p in f.primes)
    assert list(f.primes) == sorted(set(f.primes))


def test_factorize_large_composite_cofactor():
    n = 1000003 * 1000033 * 1000037
    assert factorize(n).factors == ((1000003, 1), (1000033, 1), (1000037, 1))


def test_arithmetic_function_examples():
    a30 = arithmetic_functions(factorize(30))
    assert (a30.phi, a30.mobius, a30.omega) == (8, -1, 3)
    assert a30.phi == sum(1 for k in range(30) if math.gcd(k, 30) == 1)
    a1 = arithmetic_functions(factorize(1))
    assert (a1.phi, a1.mobius, a1.omega) == (1, 1, 0)
    a12 = arithmetic_functions(factorize(12))
    assert a12.mobius == 0 and a12.divisors == (1, 2, 3, 4, 6, 12)


def test_divisor_sums_of_phi_and_mu():
    N = 10**5
    ph, mu = phi_table(N), mobius_table(N)
    s_phi = np.zeros(N + 1, dtype=np.int64)
    s_mu = np.zeros(N + 1, dtype=np.int64)
    for d in range(1, N + 1):
        s_phi[d::d] += ph[d]
        s_mu[d::d] += mu[d]
    n = np.arange(N + 1)
    assert np.array_equal(s_phi[1:], n[1:])
    assert s_mu[1] == 1 and not s_mu[2:].any()


def test_unit_group_examples():
    g5 = unit_group(5)
    assert g5.orders == (4,) and pow(g5.generators[0], 2, 5) != 1
    g8 = unit_group(8)
    assert sorted(g8.orders) == [2, 2]
    assert {g8.exp(v) for v in [(0, 0), (0, 1), (1, 0), (1, 1)]} == {1, 3, 5, 7}
    g1 = unit_group(1)
    assert g1.phi == 1 and g1.rank == 0


def test_unit_group_round_trip_random():
    rng = random.Random(7)
    for _ in range(200):
        q = rng.randint(2, 10**4)
        g = unit_group(q)
        assert math.prod(g.orders) == g.phi
        for _ in range(5):
            u = rng.randrange(1, q)
            if math.gcd(u, q) == 1:
                assert g.exp(g.dlog(u)) == u % q


def test_dlog_table_matches_scalar():
    g = unit_group(720)
    tab = g.dlog_table()
    for u in g.units().tolist():
        assert tuple(tab[u]) == g.dlog(u)


def test_large_modulus_uses_bsgs():
    q = 1_000_003 * 2
    g = unit_group(q)
    u = 123457
    assert g.exp(g.dlog(u)) == u
