"""Dirichlet characters, Gauss sums and Ramanujan sums."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from .arith import UnitGroup, factorize, unit_group
from .errors import DomainError


@lru_cache(maxsize=256)
def _roots_of_unity(m: int) -> np.ndarray:
    k = np.arange(m)
    roots = np.exp(2j * np.pi * k / m)
    # quarter turns are exact so real and imaginary characters stay exact
    quarter = (4 * k) % m == 0
    roots[quarter] = np.array([1, 1j, -1, -1j])[(4 * k[quarter]) // m]
    return roots


def _e_exact(num: int, den: int) -> complex:
    """``exp(2 pi i num/den)`` with the fraction reduced mod 1 first."""
    num %= den
    g = math.gcd(num, den)
    num, den = num // g, den // g
    if den == 1:
        return 1.0 + 0.0j
    if den == 2:
        return -1.0 + 0.0j
    if den == 4:
        return 1j if num == 1 else -1j
    ang = 2.0 * math.pi * num / den
    return complex(math.cos(ang), math.sin(ang))


class DirichletCharacter:
    """A Dirichlet character modulo ``q``.

    The character is fixed by an exponent vector ``index`` against the
    generators of :class:`~explab.arith.UnitGroup`: the value at the j-th
    generator is ``e(index[j] / orders[j])``. Values are stored as exact
    integer phases ``k`` in ``Z/mZ`` (``m`` the group exponent) so that
    ``chi(n) = e(k/m)``.
    """

    def __init__(self, q: int, index=(), group: UnitGroup | None = None) -> None:
        self.group = group if group is not None else unit_group(q)
        self.q = self.group.q
        index = tuple(int(i) for i in index) or (0,) * self.group.rank
        if len(index) != self.group.rank:
            raise DomainError(f"index {index} has wrong length for modulus {self.q}")
        self.index = tuple(i % o for i, o in zip(index, self.group.orders))
        m = self.group.exponent
        self.exponent = m
        dl = self.group.dlog_table()
        weights = np.array([i * (m // o) for i, o in zip(self.index, self.group.orders)],
                           dtype=np.int64)
        phases = np.full(self.q, -1, dtype=np.int64)
        units = self.group.units()
        if self.group.rank:
            phases[units] = (dl[units] @ weights) % m
        else:
            phases[units] = 0
        self.phases = phases
        values = np.zeros(self.q, dtype=np.complex128)
        values[units] = _roots_of_unity(m)[phases[units]]
        self.values = values

    def __repr__(self) -> str:
        return f"DirichletCharacter(q={self.q}, index={self.index})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, DirichletCharacter) and other.q == self.q
                and other.index == self.index)

    def __hash__(self) -> int:
        return hash((self.q, self.index))

    def __call__(self, n):
        if isinstance(n, np.ndarray):
            return self.values[np.asarray(n, dtype=np.int64) % self.q]
        return complex(self.values[int(n) % self.q])

    def phase(self, n: int) -> Fraction | None:
        """Exact ``theta`` in ``[0, 1)`` with ``chi(n) = e(theta)``; None if chi(n)=0."""
        k = int(self.phases[int(n) % self.q])
        return None if k < 0 else Fraction(k, self.exponent)

    @property
    def modulus(self) -> int:
        return self.q

    @property
    def is_principal(self) -> bool:
        return not any(self.index)

    @cached_property
    def order(self) -> int:
        g = self.exponent
        for k in np.unique(self.phases[self.phases >= 0]).tolist():
            g = math.gcd(g, k)
        return self.exponent // g

    @property
    def is_real(self) -> bool:
        return self.order <= 2

    def conj(self) -> DirichletCharacter:
        return DirichletCharacter(self.q, tuple(-i for i in self.index), self.group)

    @cached_property
    def conductor(self) -> int:
        """Least ``l | q`` such that chi is constant on unit classes mod ``l``."""
        units = self.group.units()
        for ell in factorize(self.q).divisors:
            kernel = units[units % ell == 1 % ell]
            if np.all(self.phases[kernel] == 0):
                return ell
        raise AssertionError("unreachable: q itself always works")

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.q

    @cached_property
    def primitive(self) -> DirichletCharacter:
        """The primitive character modulo the conductor that induces this one."""
        ell = self.conductor
        if ell == self.q:
            return self
        target = unit_group(ell)
        idx = []
        for g, o in zip(target.generators, target.orders):
            n = g
            while math.gcd(n, self.q) != 1:
                n += ell
            k = int(self.phases[n % self.q])
            num = k * o
            if num % self.exponent:
                raise AssertionError("character does not factor through its conductor")
            idx.append(num // self.exponent)
        return DirichletCharacter(ell, tuple(idx), target)


def enumerate_characters(q: int) -> tuple[DirichletCharacter, ...]:
    """All ``phi(q)`` characters modulo ``q``, principal character first."""
    return _enumerate(int(q))


@lru_cache(maxsize=128)
def _enumerate(q: int) -> tuple[DirichletCharacter, ...]:
    if q < 1:
        raise DomainError(f"modulus must be positive, got {q}")
    group = unit_group(q)
    return tuple(DirichletCharacter(q, idx, group)
                 for idx in itertools.product(*(range(o) for o in group.orders)))


def primitive_characters(q: int) -> tuple[DirichletCharacter, ...]:
    return tuple(c for c in enumerate_characters(q) if c.is_primitive)


def conductor(chi: DirichletCharacter) -> tuple[int, DirichletCharacter]:
    """Return ``(l, chi*)`` with chi* primitive modulo ``l`` inducing ``chi``."""
    return chi.conductor, chi.primitive


def legendre_character(p: int) -> DirichletCharacter:
    """The real non-principal character modulo an odd prime ``p``."""
    for chi in enumerate_characters(p):
        if chi.order == 2:
            return chi
    raise DomainError(f"no quadratic character modulo {p}")


# --------------------------------------------------------------------------
# Gauss sums


def gauss_sum(chi: DirichletCharacter, a: int = 1) -> complex:
    """``sum_{j=1}^{q} chi(j) e(a j / q)`` by direct, correctly rounded summation.

    Each summand's phase ``k/m + a j/q`` is combined in exact integer
    arithmetic before a single trigonometric evaluation.
    """
    q, m = chi.q, chi.exponent
    j = np.arange(1, q + 1, dtype=np.int64)
    k = chi.phases[j % q]
    keep = k >= 0
    j, k = j[keep], k[keep]
    den = m * q
    num = (k * q + (a % q) * j * m) % den
    ang = 2.0 * np.pi * (num / den)
    return complex(math.fsum(np.cos(ang)), math.fsum(np.sin(ang)))


def gauss_sum_induced(chi: DirichletCharacter) -> complex:
    """Gauss sum through the primitive character inducing ``chi``:
    ``tau(chi) = mu(q/l) chi*(q/l) tau(chi*)``.
    """
    ell, prim = chi.conductor, chi.primitive
    r = chi.q // ell
    mu = factorize(r).mobius
    if mu == 0:
        return 0j
    return mu * prim(r) * gauss_sum(prim)


# --------------------------------------------------------------------------
# Ramanujan sums


def ramanujan_sum_exp(q: int, ell: int) -> complex:
    """``c_q(l)`` from its definition, the sum of ``e(b l/q)`` over reduced ``b``."""
    b = np.arange(1, q + 1, dtype=np.int64)
    b = b[np.gcd(b, q) == 1]
    ang = 2.0 * np.pi * (((b * (ell % q)) % q) / q)
    return complex(math.fsum(np.cos(ang)), math.fsum(np.sin(ang)))


def ramanujan_sum_divisor(q: int, ell: int) -> int:
    """``c_q(l) = sum_{d | (q, l)} d mu(q/d)``."""
    g = math.gcd(q, ell)
    return sum(d * factorize(q // d).mobius for d in factorize(g).divisors)


def ramanujan_sum_closed(q: int, ell: int) -> int:
    """``c_q(l) = mu(q/(q,l)) phi(q) / phi(q/(q,l))``."""
    r = q // math.gcd(q, ell)
    fr = factorize(r)
    return fr.mobius * factorize(q).phi // fr.phi


def ramanujan_sum(q: int, ell: int) -> int:
    """Ramanujan's sum ``c_q(l)`` as an exact integer."""
    if q < 1:
        raise DomainError(f"q must be positive, got {q}")
    return ramanujan_sum_divisor(q, ell)


def ramanujan_double_sum(q: int) -> int:
    """``sum_{b1, b2 mod q} |c_q(b1 - b2)|``; equals ``q phi(q) 2^omega(q)``."""
    return q * sum(abs(ramanujan_sum_closed(q, h)) for h in range(q))
