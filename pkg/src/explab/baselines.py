"""Bound shapes used as comparison curves, all with implied constant 1.

None of these is asserted; experiments report ``computed / baseline``.
"""

from __future__ import annotations

import math

from .arith import phi


def conjectured(x: float, q: int) -> float:
    """``x/log x + x/sqrt(q)``."""
    return x / math.log(x) + x / math.sqrt(q)


def minor_arc(x: float, q: int) -> float:
    """``x / sqrt(q)``."""
    return x / math.sqrt(q)


def montgomery_vaughan_bound(x: float, q: int) -> float:
    """``x/log x + x/sqrt(phi(q))``."""
    return x / math.log(x) + x / math.sqrt(phi(q))


def smooth_minor(x: float, y: float, q: int, psi_xy: float) -> float:
    """``sqrt(xy)/log x + Psi(x, y)/sqrt(q)``."""
    return math.sqrt(x * y) / math.log(x) + psi_xy / math.sqrt(q)


def logarithmic(x: float, q: int) -> float:
    """``log q + log x / sqrt(q)``."""
    return math.log(q) + math.log(x) / math.sqrt(q)


def example_2_3(x: float, q: int) -> float:
    """``(4/sqrt 6) log x / sqrt(q)``."""
    return 4.0 / math.sqrt(6.0) * math.log(x) / math.sqrt(q)


def vinogradov(N: float, q: int, eps: float = 0.05) -> float:
    """``(N/sqrt q + sqrt(N q log q)) (log N)^{3/4} sqrt(log log N) + N exp(-(1/2-eps) sqrt(log N))``."""
    L = math.log(N)
    main = (N / math.sqrt(q) + math.sqrt(N * q * math.log(max(q, 2)))) * L ** 0.75 * math.sqrt(math.log(L))
    return main + N * math.exp(-(0.5 - eps) * math.sqrt(L))


def thm1_residual(x: float, M: float) -> float:
    """``x / (sqrt(M) log x)``."""
    return x / (math.sqrt(M) * math.log(x))


def smooth_major(psi_xy: float, q: int) -> float:
    """``Psi(x, y) / sqrt(q)``."""
    return psi_xy / math.sqrt(q)
