"""Return-time laws, first-passage laws and tail-index fits.

Both GBP families are renewal sequences: given a one at time 0, the chance
of a one at time ``k`` is ``u_k`` (``p + c*k**(2H-2)`` for GBP-I,
``c*k**(2H-2)`` for the starred GBP-II limit). The return-time pmf solves

    f_k = u_k - sum_{j<k} f_j u_{k-j}.

Evaluated literally, that recursion subtracts numbers of size ``p`` to
produce ``f_k ~ k**(2H-4)``, losing most digits far in the tail. Multiplying
the generating function by ``(1 - z)`` gives an equivalent recursion for the
survival ``r_k = P(T > k)`` whose terms are all nonnegative:

    r_k = (1 - u_1) r_{k-1} + sum_{j=2..k} (u_{j-1} - u_j) r_{k-j},

which keeps full relative accuracy. ``f_k = r_{k-1} - r_k``. The literal
recursion is kept as ``method="direct"`` for cross-checks.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.stats import linregress

from .exact import Pmf
from .params import Gbp1Params, Gbp2Params

NEG_TOL = 1e-12


class NumericFailure(ArithmeticError):
    """A probability came out negative beyond roundoff."""


@dataclass(frozen=True)
class ReturnTimeTable:
    """Return-time law on ``1..kmax``.

    ``pmf[k]`` and ``survival[k]`` are indexed by lag; ``pmf[0] = 0`` and
    ``survival[0] = 1``.
    """

    process: str
    pmf: np.ndarray
    survival: np.ndarray
    H: float
    clamped: int = 0
    params: dict = field(default_factory=dict)

    @property
    def kmax(self) -> int:
        return len(self.pmf) - 1

    def partial_mean(self) -> float:
        """``sum_{k <= kmax} k f_k``."""
        k = np.arange(self.kmax + 1, dtype=float)
        return math.fsum(k * self.pmf)

    @property
    def theory_slope(self) -> float:
        """Log-log survival slope predicted for this table's process."""
        if self.process == "gbp1":
            return 2 * self.H - 3
        return 1 - 2 * self.H

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "pmf", "survival"])
            for k in range(1, self.kmax + 1):
                w.writerow([k, repr(float(self.pmf[k])), repr(float(self.survival[k]))])


def _power_decrements(H: float, K: int) -> np.ndarray:
    # d[j] = (j-1)**a - j**a for j >= 2, computed without cancellation
    a = 2 * H - 2
    j = np.arange(2, K + 1, dtype=float)
    d = np.zeros(K + 1)
    d[2:] = -np.exp(a * np.log(j - 1)) * np.expm1(a * np.log1p(1.0 / (j - 1)))
    return d


def _survival_from_kernel(p: float, c: float, H: float, K: int) -> np.ndarray:
    # u_k = p + c k^(2H-2); weights w_1 = 1 - u_1, w_j = u_{j-1} - u_j >= 0
    w = c * _power_decrements(H, K)
    if K >= 1:
        w[1] = 1.0 - p - c
    if np.any(w[1:] < 0):
        raise NumericFailure(f"1 - p - c = {1 - p - c} < 0: parameters outside the admissible region")
    wr = w[::-1].copy()
    r = np.empty(K + 1)
    r[0] = 1.0
    for k in range(1, K + 1):
        r[k] = np.dot(wr[K - k : K], r[:k])
    return r


def _direct_recursion(u: np.ndarray) -> tuple[np.ndarray, int]:
    K = len(u) - 1
    ur = u[::-1].copy()  # ur[K - j] = u[j]
    f = np.zeros(K + 1)
    clamped = 0
    for k in range(1, K + 1):
        fk = u[k] - np.dot(f[1:k], ur[K - k + 1 : K])
        if fk < -NEG_TOL:
            raise NumericFailure(f"negative return-time probability f_{k} = {fk:.3e}")
        if fk < 0:
            fk = 0.0
            clamped += 1
        f[k] = fk
    return f, clamped


def _table(process: str, r: np.ndarray, H: float, params: dict) -> ReturnTimeTable:
    f = np.zeros_like(r)
    f[1:] = r[:-1] - r[1:]
    clamped = 0
    bad = f < -NEG_TOL
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise NumericFailure(f"negative return-time probability f_{k} = {f[k]:.3e}")
    neg = f < 0
    clamped = int(neg.sum())
    f[neg] = 0.0
    return ReturnTimeTable(process, f, r, H, clamped, params)


def _direct_table(process: str, u: np.ndarray, H: float, params: dict) -> ReturnTimeTable:
    f, clamped = _direct_recursion(u)
    surv = 1.0 - np.cumsum(f)
    surv[0] = 1.0
    return ReturnTimeTable(process, f, surv, H, clamped, params)


def _kernel(p: float, c: float, H: float, K: int) -> np.ndarray:
    u = np.empty(K + 1)
    u[0] = 1.0
    u[1:] = p + c * np.exp((2 * H - 2) * np.log(np.arange(1, K + 1, dtype=float)))
    return u


def interarrival_pmf_gbp1(params: Gbp1Params, kmax: int, *, method: str = "survival") -> ReturnTimeTable:
    """Return-time law of GBP-I (and GBP-I*) up to lag ``kmax``.

    ``method="direct"`` evaluates ``f_k = u_k - sum f_j u_{k-j}`` literally;
    the default survival recursion is algebraically identical and keeps
    relative accuracy in the far tail.
    """
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    p, H, c = params.p, params.H, params.c
    meta = {"p": p, "H": H, "c": c}
    if method == "direct":
        return _direct_table("gbp1", _kernel(p, c, H, kmax), H, meta)
    if method != "survival":
        raise ValueError(f"unknown method {method!r}")
    return _table("gbp1", _survival_from_kernel(p, c, H, kmax), H, meta)


def interarrival_pmf_gbp2star(H: float, c: float, kmax: int, *, method: str = "survival") -> ReturnTimeTable:
    """Return-time law with kernel ``u_k = c*k**(2H-2)``: the gaps of GBP-II*
    and the large-``n`` gaps of GBP-II."""
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    if not (0.5 < H < 1 and 0 < c < 2.0 ** (2 * H - 2)):
        raise ValueError(f"(H={H}, c={c}) outside the GBP-II admissible region")
    meta = {"H": H, "c": c}
    if method == "direct":
        return _direct_table("gbp2star", _kernel(0.0, c, H, kmax), H, meta)
    if method != "survival":
        raise ValueError(f"unknown method {method!r}")
    return _table("gbp2star", _survival_from_kernel(0.0, c, H, kmax), H, meta)


def first_one_pmf_gbp2(params: Gbp2Params, *, star_table: Optional[ReturnTimeTable] = None) -> Pmf:
    """Law of the position of the first one in a GBP-II window ``1..n``.

    ``h_j = p_n - sum_{t<j} h_t c (j-t)**(2H-2)`` has the closed solution
    ``h_j = p_n * P(T > j-1)`` with ``T`` the GBP-II* return time, which is
    what is evaluated. ``residual`` is the all-zero probability.
    """
    n = params.n
    if n is None or params.lam is None:
        raise ValueError("first_one_pmf_gbp2 needs a GBP-II spec with lambda and n")
    if star_table is None or star_table.kmax < n:
        star_table = interarrival_pmf_gbp2star(params.H, params.c, n)
    h = np.zeros(n + 1)
    h[1:] = params.p_n * star_table.survival[:n]
    residual = 1.0 - math.fsum(h)
    if residual < -NEG_TOL:
        raise NumericFailure(f"first-one masses exceed 1 by {-residual:.3e}")
    return Pmf(h, max(residual, 0.0))


def stationary_delay_gbp1(params: Gbp1Params, kmax: int, *, table: Optional[ReturnTimeTable] = None) -> Pmf:
    """Law of the first one of GBP-I: ``P(first one at j) = p P(T >= j)``.

    ``residual`` is the mass beyond ``kmax``.
    """
    if table is None or table.kmax < kmax:
        table = interarrival_pmf_gbp1(params, kmax)
    d = np.zeros(kmax + 1)
    d[1:] = params.p * table.survival[:kmax]
    return Pmf(d, max(1.0 - math.fsum(d), 0.0))


@dataclass(frozen=True)
class TailFit:
    slope: float
    stderr: float
    kmin: int
    kmax: int
    npoints: int
    theory_slope: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "slope": self.slope,
                "stderr": self.stderr,
                "range": [self.kmin, self.kmax],
                "npoints": self.npoints,
                "theory_slope": self.theory_slope,
            },
            sort_keys=True,
        )


def tail_index_fit(table: ReturnTimeTable, fit_range: tuple[int, int], *, points: int = 40) -> TailFit:
    """Least-squares slope of ``log P(T > k)`` against ``log k``.

    Abscissae are geometrically spaced over ``fit_range`` so that the many
    small lags do not dominate the fit.
    """
    kmin, kmax = int(fit_range[0]), int(fit_range[1])
    if not 1 <= kmin < kmax <= table.kmax:
        raise ValueError(f"fit range {fit_range} must lie inside 1..{table.kmax}")
    ks = np.unique(np.round(np.geomspace(kmin, kmax, points)).astype(int))
    surv = table.survival[ks]
    ok = surv > 0
    if ok.sum() < 8:
        raise ValueError(f"only {int(ok.sum())} usable points in the fit range (need 8)")
    res = linregress(np.log(ks[ok]), np.log(surv[ok]))
    return TailFit(float(res.slope), float(res.stderr), kmin, kmax, int(ok.sum()), table.theory_slope)
