import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from explab.arith import factorize, primes_up_to
from explab.characters import enumerate_characters, gauss_sum, primitive_characters
from explab.constructions import example_2_3
from explab.errors import DomainError
from explab.multfun import (MultiplicativeFunction, archimedean, cm_remainder, constant_one,
                            convolve, cor19_main_term, dirichlet_convolve, euler_factor, evaluate,
                            from_character, from_prime_values, kappa_decompose, liouville,
                            min_distance_t, min_over_characters, mobius_function,
                            order_primitive_characters, pretentious_distance, rank_characters,
                            steinhaus)


def brute_values(f, N):
    """f(n) from the factorisation of each n, one at a time."""
    out = np.zeros(N + 1, dtype=complex)
    for n in range(1, N + 1):
        v = 1 + 0j
        for p, k in factorize(n).factors:
            v *= f.value(p, k)
        out[n] = v
    return out


def test_evaluate_examples():
    assert evaluate(constant_one(), 17) == 1
    chi5 = enumerate_characters(5)[1]
    assert evaluate(from_character(chi5), 10) == 0
    f = from_prime_values({2: 1j})
    assert evaluate(f, 8) == pytest.approx(-1j)


def test_limit_is_enforced():
    f = steinhaus(1, limit=100)
    f(97 * 89)
    with pytest.raises(DomainError):
        f(101)


@pytest.mark.parametrize("f", [steinhaus(3), steinhaus(4, completely=False), mobius_function(),
                               liouville(), archimedean(0.7)], ids=lambda f: f.name)
def test_vectorised_values_match_factorisation(f):
    N = 3000
    assert np.allclose(f.values(N), brute_values(f, N), atol=1e-13)
    assert np.allclose(f.values_range(1000, 1500), brute_values(f, 1499)[1000:1500], atol=1e-13)
    n = np.array([1, 2, 97, 1024, 2999, 2310])
    assert np.allclose(f.values_at(n), brute_values(f, N)[n], atol=1e-13)


def test_mobius_values():
    mu = mobius_function().values(30).real.round().astype(int)
    assert mu[1:].tolist() == [factorize(n).mobius for n in range(1, 31)]


def test_seed_reproducibility_and_unimodularity():
    p = primes_up_to(10**5)
    a, b, c = steinhaus(11), steinhaus(11), steinhaus(12)
    assert np.array_equal(a.prime_values(p), b.prime_values(p))
    assert not np.array_equal(a.prime_values(p), c.prime_values(p))
    assert np.allclose(np.abs(a.prime_values(p)), 1.0)
    assert np.allclose(np.abs(a.values(10**4)[1:]), 1.0)


def test_independent_powers_and_disc_option():
    f = steinhaus(5, completely=False)
    assert f.value(3, 2) != pytest.approx(f.value(3, 1) ** 2)
    d = steinhaus(5, disc=True)
    assert np.all(np.abs(d.prime_values(primes_up_to(1000))) <= 1.0)


def test_kappa_examples():
    chi = enumerate_characters(7)[2]
    k = kappa_decompose(from_character(chi), chi)
    assert all(abs(k.value(p, j)) < 1e-15 for p in (2, 3, 11) for j in (1, 2, 3))
    f = steinhaus(2)
    k = kappa_decompose(f, chi)
    assert k.value(11) == pytest.approx(f.value(11) - chi(11))


def test_kappa_example_2_3_small_primes():
    c = example_2_3(5)
    chi = c.info["chi"]
    k = kappa_decompose(c.f, chi)
    for p in (2, 3):
        assert k.value(p, 1) == -2 * chi(p)
        assert all(k.value(p, j) == 0 for j in range(2, 6))


@pytest.mark.parametrize("seed", range(4))
def test_kappa_reconstructs(seed):
    N = 4000
    chi = enumerate_characters(12)[seed % 4]
    f = steinhaus(seed, completely=bool(seed % 2))
    k = kappa_decompose(f, chi)
    rebuilt = dirichlet_convolve(k.values(N), from_character(chi).values(N))
    assert np.max(np.abs(rebuilt - f.values(N))) < 1e-12


def test_cm_remainder_examples_and_reconstruction():
    f = from_prime_values({2: 1.0}, default=0.5, powers={(2, 2): 0.0})
    g, h = cm_remainder(f)
    assert h.value(2, 2) == -1
    assert h.value(7) == 0
    cm = steinhaus(9)
    assert all(cm_remainder(cm)[1].value(p, k) == pytest.approx(0) for p in (2, 5) for k in (2, 3))
    f = steinhaus(9, completely=False)
    g, h = cm_remainder(f)
    N = 10**4
    assert np.max(np.abs(dirichlet_convolve(g.values(N), h.values(N)) - f.values(N))) < 1e-12
    assert h.check_bound(primes_up_to(200), kmax=4)


def test_convolve_agrees_with_array_convolution():
    a, b = steinhaus(1), steinhaus(2, completely=False)
    N = 2000
    assert np.allclose(convolve(a, b).values(N), dirichlet_convolve(a.values(N), b.values(N)))


def test_distance_examples():
    one, neg = constant_one(), liouville()
    assert pretentious_distance(one, one, 1000).value == 0
    assert pretentious_distance(one, neg, 10).value == pytest.approx(2 * (1/2 + 1/3 + 1/5 + 1/7))
    chi3 = enumerate_characters(3)[1]
    p = primes_up_to(100)
    direct = sum((1 - chi3(int(q)).real) / q for q in p)
    assert pretentious_distance(one, from_character(chi3), 100).value == pytest.approx(direct)


@given(st.integers(0, 10**6), st.integers(0, 10**6), st.integers(0, 10**6))
def test_distance_triangle_inequality(s1, s2, s3):
    f, g, h = steinhaus(s1), steinhaus(s2 + 1), steinhaus(s3 + 2)
    d = lambda a, b: math.sqrt(pretentious_distance(a, b, 10**4).value)
    assert d(f, h) <= d(f, g) + d(g, h) + 1e-9


def test_min_distance_examples():
    r = min_distance_t(constant_one(), 10**4, 1.0)
    assert r.t == pytest.approx(0, abs=1e-6) and r.value == pytest.approx(0, abs=1e-10)
    r = min_distance_t(archimedean(0.1), 10**4, 1.0)
    assert r.t == pytest.approx(0.1, abs=1e-6) and r.value < 1e-10


@pytest.mark.parametrize("seed", [0, 1])
def test_min_distance_against_dense_grid(seed):
    f = steinhaus(seed)
    x, T = 10**4, 1.0
    p = primes_up_to(x)
    fp = f.prime_values(p)
    ts = np.arange(-T, T + 1e-12, 1e-4)
    logp = np.log(p.astype(float))
    grid = np.array([np.sum((1 - (fp * np.exp(-1j * t * logp)).real) / p) for t in ts])
    r = min_distance_t(f, x, T)
    assert r.value <= grid.min() + 1e-6
    assert abs(r.value - grid.min()) < 1e-6


def test_min_over_characters_examples():
    q = 12
    chi = enumerate_characters(q)[3]
    fit = min_over_characters(from_character(chi), q, 10**4, 1.0)
    assert fit.best_chi == chi and fit.M < 1e-10
    fit = min_over_characters(from_character(enumerate_characters(q)[0]), q, 10**4, 1.0)
    assert fit.best_chi.is_principal and abs(fit.t_star) < 1e-6


def test_min_over_characters_exhaustive_oracle():
    f, q, x, T = steinhaus(21), 12, 10**4, 1.0
    p = primes_up_to(x)
    p = p[np.gcd(p, q) == 1]
    fp = f.prime_values(p)
    ts = np.arange(-T, T + 1e-12, 1e-4)
    logp = np.log(p.astype(float))
    best = math.inf
    for chi in enumerate_characters(q):
        g = fp * np.conj(chi.values[p % q])
        for t in ts:
            best = min(best, np.sum((1 - (g * np.exp(-1j * t * logp)).real) / p))
    assert abs(min_over_characters(f, q, x, T).M - best) < 1e-6


def test_ranking_is_sorted_with_index_ties():
    chars = enumerate_characters(5)
    dup = [chars[1], chars[1], chars[2]]
    ranked = rank_characters(from_character(chars[1]), dup, 1000, 0.5)
    assert [r.chi_position for r in ranked[:2]] == [0, 1]
    ordered = order_primitive_characters(steinhaus(1), 12, 1000, 0.5)
    vals = [r.value for r in ordered]
    assert vals == sorted(vals)
    assert len(ordered) == sum(len(primitive_characters(d)) for d in (1, 2, 3, 4, 6, 12))


def test_euler_factor_bound_and_trivial_case():
    chi = enumerate_characters(7)[1]
    assert euler_factor(from_character(chi), chi, 7, 1) == 0
    f = steinhaus(3, completely=False)
    assert abs(euler_factor(f, chi, 7, 1)) <= 2 + 1e-12


def test_cor19_main_term_for_the_character_itself():
    q, x = 7, 5000
    chi = primitive_characters(q)[1]
    n = np.arange(1, x + 1)
    expected = np.conj(chi(3)) * gauss_sum(chi) / 6 * np.sum(np.abs(chi.values[n % q]) ** 2 / n)
    assert cor19_main_term(from_character(chi), chi, q, 3, x) == pytest.approx(expected, abs=1e-12)
