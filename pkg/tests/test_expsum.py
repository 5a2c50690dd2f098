import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from explab.arith import prime_pi, primes_between, primes_up_to
from explab.characters import enumerate_characters, gauss_sum, primitive_characters
from explab.errors import DomainError
from explab.expsum import (_Alpha, abel_check, best_approx, char_identity_check, char_identity_sides,
                           decompose_log, decompose_thm_unweighted, e_of, exp_sum, gauss_residuals,
                           log_witness, minor_arc_range, prefix_sums, prime_sum,
                           smooth_character_sum, smooth_character_sum_by_classes, transfer_check,
                           witness_search)
from explab.multfun import MultiplicativeFunction, constant_one, from_character, steinhaus

GOLDEN = (math.sqrt(5) - 1) / 2


def zero_above_one():
    return MultiplicativeFunction(lambda p: np.zeros(p.shape, dtype=complex), name="delta")


def naive(f, x, alpha, log=False, lo=0):
    """Term-by-term sum with phases from exact rational arithmetic."""
    frac = Fraction(alpha)
    tot = 0j
    for n in range(lo + 1, int(x) + 1):
        v = f(n)
        if v:
            ph = float((n * frac) % 1)
            tot += v * cmath.exp(2j * math.pi * ph) / (n if log else 1)
    return tot


def test_e_of_examples():
    assert e_of(0) == 1
    assert e_of(0.5) == -1
    assert e_of(Fraction(1, 2)) == -1
    assert e_of(Fraction(3, 4)) == -1j
    assert e_of(10**9 + Fraction(1, 3)) == e_of(Fraction(1, 3))
    assert e_of(1e9 + 1 / 3) == pytest.approx(e_of(Fraction(1, 3)), abs=1e-6)


@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_e_of_unimodular(theta):
    assert abs(abs(e_of(theta)) - 1) < 1e-15


def test_best_approx_examples():
    r = best_approx(Fraction(1, 3), 100)
    assert (r.a, r.q) == (1, 3)
    r = best_approx(0.14159265, 100)
    assert (r.a, r.q) == (1, 7) and r.error == pytest.approx(1.26e-3, abs=1e-5)
    r = best_approx(0.0, 10**6)
    assert (r.a, r.q) == (0, 1)


@given(st.floats(0, 1, exclude_max=True, allow_nan=False), st.floats(1, 1e9))
def test_best_approx_certificate(alpha, Q):
    r = best_approx(alpha, Q)
    assert r.q <= Q and math.gcd(r.a, r.q) == 1
    assert abs(Fraction(alpha) - Fraction(r.a, r.q)) <= Fraction(1) / (Fraction(r.q) * Fraction(Q))


@given(st.integers(0, 2**32 - 1), st.integers(1, 2**40))
def test_fixed_point_phase_exact(n, k):
    # alpha = k / 2^62 is representable exactly, so the phase must match Fraction arithmetic
    alpha = Fraction(k, 1 << 62)
    got = _Alpha.of(alpha).phases(np.array([n]))[0]
    assert got == float((n * alpha) % 1)


def test_exp_sum_examples():
    one = constant_one()
    for q in (2, 7, 30):
        assert abs(exp_sum(one, q, Fraction(3 if q > 3 else 1, q)).value) < 1e-12
    assert exp_sum(one, 1000, 0).value == 1000
    chi = primitive_characters(7)[0]
    S = exp_sum(from_character(chi), 10**5, Fraction(3, 7)).value
    main = np.conj(chi(3)) * gauss_sum(chi) * 10**5 / 7
    assert abs(S - main) <= 3 * 7


@pytest.mark.parametrize("alpha", [GOLDEN, Fraction(5, 97), 0.3])
@pytest.mark.parametrize("log", [False, True])
def test_exp_sum_against_naive(alpha, log):
    f = steinhaus(4, completely=False)
    got = exp_sum(f, 3000, alpha, mode="log" if log else "unweighted", lo=10).value
    assert got == pytest.approx(naive(f, 3000, alpha, log, lo=10), abs=1e-9)


def test_exp_sum_bounds_and_caps():
    f = steinhaus(8)
    r = exp_sum(f, 5000, GOLDEN)
    assert abs(r) <= r.n_terms == 5000
    r = exp_sum(f, 5000, GOLDEN, mode="log")
    assert abs(r) <= sum(1 / n for n in range(1, 5001))
    assert exp_sum(f, 5000, GOLDEN, y=5000).value == exp_sum(f, 5000, GOLDEN).value
    assert exp_sum(f, 5000, GOLDEN, y=10**6).value == exp_sum(f, 5000, GOLDEN).value
    with pytest.raises(DomainError):
        exp_sum(f, 10, 0.1, mode="square")


def test_smooth_restricted_sum_against_filter():
    f = steinhaus(6, completely=False)
    x, y = 20000, 50
    got = exp_sum(f, x, GOLDEN, y=y).value
    n = np.arange(1, x + 1)
    from explab.smooth import largest_prime_factor_range
    keep = largest_prime_factor_range(1, x + 1) <= y
    terms = f.values(x)[1:] * _Alpha.of(GOLDEN).unit(n)
    assert got == pytest.approx(terms[keep].sum(), abs=1e-9)


def test_prime_sum_and_prefix_sums():
    f = steinhaus(2)
    p = primes_between(100, 2000)
    direct = sum(f.value(int(q)) * e_of(2 * int(q) * Fraction(3, 11)) / q for q in p)
    assert prime_sum(f, 100, 2000, Fraction(3, 11), h=2, mode="log") == pytest.approx(direct)
    S = prefix_sums(f, 3000, GOLDEN)
    assert S[3000] == pytest.approx(exp_sum(f, 3000, GOLDEN).value, abs=1e-9)


def test_decompose_thm_trivial_examples():
    d = decompose_thm_unweighted(zero_above_one(), 10**4, GOLDEN, 8)
    assert d.lhs == pytest.approx(e_of(GOLDEN)) and d.rhs == 0 and d.residual == pytest.approx(1)
    x, M = 10**4, 8
    top = MultiplicativeFunction(lambda p: np.where(p > x / M, 1.0, 0.0).astype(complex),
                                 lambda p, k: 0.0)
    d = decompose_thm_unweighted(top, x, GOLDEN, M)
    assert d.residual == pytest.approx(1, abs=1e-9)


def test_decompose_thm_against_brute_force():
    f, x, M, alpha = steinhaus(3), 20000, 8, Fraction(123, 1009)
    d = decompose_thm_unweighted(f, x, alpha, M)
    rhs = 0j
    for m in range(1, M + 1):
        for p in primes_between(x / M, x / m).tolist():
            rhs += f(m) * f(p) * e_of(Fraction(m * p) * alpha)
    assert d.rhs == pytest.approx(rhs, abs=1e-9)
    assert d.lhs == pytest.approx(naive(f, x, alpha), abs=1e-8)
    assert d.benchmark == pytest.approx(x / (math.sqrt(M) * math.log(x)))


def test_decompose_log_examples():
    d = decompose_log(zero_above_one(), 10**5, Fraction(1, 101))
    assert (d.lhs, d.rhs, d.residual) == (0, 0, 0)
    x, q = 10**6, 101  # q^4 > x, so f supported on primes in (q^2, x] leaves only prime terms
    f = MultiplicativeFunction(lambda p: np.where(p > q * q, steinhaus(1).prime_values(p), 0),
                               lambda p, k: 0.0)
    d = decompose_log(f, x, Fraction(17, q))
    assert d.residual < 1e-13


def test_decompose_log_with_rational_approx_and_range():
    x = 10**6
    r = best_approx(GOLDEN, math.sqrt(x))
    d = decompose_log(steinhaus(2), x, r)
    assert d.params["q"] == r.q
    assert d.params["M"] == pytest.approx(math.log(math.log(x)) ** 3)
    assert math.isfinite(d.residual)
    with pytest.raises(DomainError):
        decompose_log(steinhaus(2), 1000, Fraction(1, 50), q=50)


def test_minor_arc_range_flag():
    x = 1e6
    assert minor_arc_range(x, 1000)
    assert not minor_arc_range(x, 10)
    assert not minor_arc_range(x, 10**6)


def test_char_identity_examples():
    assert char_identity_check(constant_one(), 10**4, 1, 6) < 1e-8
    lhs, rhs = char_identity_sides(steinhaus(1), 3000, 0, 1)
    assert abs(lhs - rhs) < 1e-12
    for q in (6, 12, 15):
        for seed in range(3):
            assert char_identity_check(steinhaus(seed), 10**4, 5 if q != 15 else 7, q) < 1e-8


def test_char_identity_errors():
    with pytest.raises(DomainError):
        char_identity_check(constant_one(), 10**4, 2, 6)
    with pytest.raises(DomainError):
        char_identity_check(constant_one(), 100, 1, 6)
    with pytest.raises(DomainError):
        char_identity_check(steinhaus(1, completely=False), 10**4, 1, 6)


def test_gauss_residuals_small_modulus():
    for q in (5, 7, 11):
        for chi in primitive_characters(q):
            assert gauss_residuals(chi, 2, 10**4).max() <= 3 * q


def test_smooth_character_sum_two_routes():
    chi = primitive_characters(7)[1]
    a = smooth_character_sum(chi, 10**5, 100, 3)
    b = smooth_character_sum_by_classes(chi, 10**5, 100, 3)
    assert a == pytest.approx(b, abs=1e-6)


@pytest.mark.parametrize("seed", range(20))
def test_abel_consistency(seed):
    rng = np.random.default_rng(seed)
    x = int(rng.integers(100, 10**5))
    alpha = float(rng.random())
    direct, parts = abel_check(steinhaus(seed, completely=bool(seed % 2)), x, alpha)
    assert abs(direct - parts) <= 1e-8 * max(1.0, abs(direct))


@given(st.integers(0, 500), st.integers(2, 60), st.floats(-1, 1))
def test_transfer_bound(seed, q, s):
    x = 3000
    lhs, rhs = transfer_check(steinhaus(seed), x, 1, q, s / x)
    assert lhs <= rhs + 1e-9


def test_witness_examples():
    x, alpha = 10**4, GOLDEN
    al = _Alpha.of(alpha)
    f = MultiplicativeFunction(
        lambda p: np.where(p > x / 2, np.exp(-2j * np.pi * al.phases(p)), 0), lambda p, k: 0.0)
    w = witness_search(f, x, alpha, 0.3, z_min=x / 2)
    assert w.h == 1 and w.z == x / 2
    assert w.prime_sum == pytest.approx(prime_pi(x) - prime_pi(x / 2))
    assert witness_search(zero_above_one(), x, alpha, 0.3) is None
    with pytest.raises(DomainError):
        witness_search(f, x, alpha, 1.5)


def test_witness_is_exact_maximum():
    f, x, alpha, c = steinhaus(5), 5000, GOLDEN, 0.4
    w = witness_search(f, x, alpha, c, h_max=3)
    z_min = c * c * x / math.log(1 / c)
    best = 0.0
    p = primes_up_to(x)
    for h in range(1, 4):
        zs = {float(v) for v in p} | {v / 2 for v in p} | {x / (2 * h)}
        for z in zs:
            if z_min <= z <= x / (2 * h):
                s = prime_sum(f, z, 2 * z, alpha, h)
                best = max(best, abs(s) * math.log(z) / z)
    assert w is not None and w.score == pytest.approx(best, rel=1e-12)


def test_log_witness_lengths():
    out = log_witness(steinhaus(1), 1000, GOLDEN, 4)
    assert [h for h, _ in out] == [1, 2, 3, 4]
