"""Mittag-Leffler function by power series, second-family Mittag-Leffler
moments, and the fractional Poisson moment generating function.

Only the series is used. Arguments beyond ``|z| <= 700**mu`` are refused
rather than continued asymptotically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

MAX_TERMS = 100_000
REL_TOL = 1e-16


class SeriesNotConverged(ArithmeticError):
    pass


@dataclass(frozen=True)
class MlfEval:
    mu: float
    z: float
    value: float
    terms_used: int


def _check_order(mu: float) -> None:
    if not 0 < mu <= 1:
        raise ValueError(f"Mittag-Leffler order must lie in (0, 1], got {mu!r}")


def mittag_leffler_eval(mu: float, z: float) -> MlfEval:
    """``E_mu(z) = sum_k z^k / Gamma(mu k + 1)`` with bookkeeping.

    Terms are formed in log space. Summation stops once the terms are
    decreasing and the latest one is below ``1e-16`` of the partial sum.
    """
    _check_order(mu)
    z = float(z)
    if not math.isfinite(z) or abs(z) > 700.0**mu:
        raise OverflowError(f"|z| = {abs(z)!r} exceeds the series guard 700**mu = {700.0**mu:.6g}")
    if z == 0.0:
        return MlfEval(mu, z, 1.0, 1)
    logz = math.log(abs(z))
    neg = z < 0
    terms = [1.0]
    prev = 1.0
    running = 1.0
    for k in range(1, MAX_TERMS):
        t = math.exp(k * logz - math.lgamma(mu * k + 1))
        if neg and k % 2:
            t = -t
        terms.append(t)
        running += t
        a = abs(t)
        if a < prev and a < REL_TOL * abs(running):
            return MlfEval(mu, z, math.fsum(terms), k + 1)
        prev = a
    raise SeriesNotConverged(f"E_{mu}({z}) did not converge in {MAX_TERMS} terms")


def mittag_leffler(mu: float, z: float) -> float:
    """One-parameter Mittag-Leffler function ``E_mu(z)``."""
    return mittag_leffler_eval(mu, z).value


def mlf2_moment(mu: float, nu: float, k: int) -> float:
    """``k``-th moment of the second-family Mittag-Leffler law whose mgf is
    ``E_mu(nu t)``: ``k! nu^k / Gamma(mu k + 1)``."""
    _check_order(mu)
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return 1.0
    return math.exp(math.lgamma(k + 1) + k * math.log(nu) - math.lgamma(mu * k + 1))


def fpp_mgf(mu: float, nu: float, s: float, t: float) -> float:
    """``E exp(s N(t))`` for the fractional Poisson process of order ``mu``
    and rate ``nu``: ``E_mu((e^s - 1) nu t^mu)``."""
    if t < 0:
        raise ValueError("t must be >= 0")
    return mittag_leffler(mu, math.expm1(s) * nu * t**mu)
