"""Moment reports against the asymptotic constants, empirical mgfs,
histograms, total variation and growth-exponent fits."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy.special import gammaln
from scipy.stats import linregress

from .exact import Pmf, central_from_raw, exact_raw_moments
from .params import Process, ProcessSpec
from .sample import sample_batch

EXACT_AUTO_N = 12
N_BATCHES = 20
MGF_GUARD = 700.0


# --- asymptotic constants -------------------------------------------------


def c_k(k: int, H: float, c: float, lam: float) -> float:
    """GBP-II: ``E(B_n^k) ~ c_k n^((2H-1)k)`` with
    ``c_k = k! lam (c Gamma(2H-1))^(k-1) / Gamma((2H-1)(k-1) + 2)``."""
    a = 2 * H - 1
    return math.exp(
        gammaln(k + 1) + math.log(lam) + (k - 1) * (math.log(c) + gammaln(a)) - gammaln(a * (k - 1) + 2)
    )


def c_k_star(k: int, H: float, c: float) -> float:
    """GBP-II*: ``E(B_n^k) ~ c_k* n^((2H-1)k)`` with
    ``c_k* = k! (c Gamma(2H-1))^k / Gamma((2H-1)k + 1)``, the ``k``-th
    moment of the Mittag-Leffler limit."""
    a = 2 * H - 1
    return math.exp(gammaln(k + 1) + k * (math.log(c) + gammaln(a)) - gammaln(a * k + 1))


def gbp1_central_constant(k: int, p: float, H: float, c: float) -> float:
    """Leading constant of ``E((B_n - np)^k) ~ C n^(2H-2+k)`` for GBP-I with
    ``1/2 < H < 1``."""
    if not 0.5 < H < 1:
        raise ValueError("closed-form constant only for 1/2 < H < 1")
    total = 0.0
    for j in range(2, k + 1):
        mag = math.exp(gammaln(k + 1) + gammaln(2 * H - 1) - gammaln(k - j + 1) - gammaln(2 * H + j - 1))
        total += (-1) ** (k - j) * (j - 1) * mag
    return total * c * p ** (k - 1)


def gbp1star_central_constant(k: int, p: float, H: float, c: float) -> float:
    """Same as :func:`gbp1_central_constant` for GBP-I* (weights ``j``
    instead of ``j - 1``)."""
    if not 0.5 < H < 1:
        raise ValueError("closed-form constant only for 1/2 < H < 1")
    total = 0.0
    for j in range(2, k + 1):
        mag = math.exp(gammaln(k + 1) + gammaln(2 * H - 1) - gammaln(k - j + 1) - gammaln(2 * H + j - 1))
        total += (-1) ** (k - j) * j * mag
    return total * c * p ** (k - 1)


def central_order(k: int, H: float, n: int) -> float:
    """Growth order of the ``k``-th central moment of GBP-I / GBP-I*.

    ``n^(2H-2+k)`` for ``H > 1/2``, ``n^(k-1) ln n`` at ``H = 1/2`` and
    ``n^floor(k/2)`` for ``H < 1/2``.
    """
    if H > 0.5:
        return n ** (2 * H - 2 + k)
    if H == 0.5:
        return n ** (k - 1) * math.log(n)
    return float(n ** (k // 2))


def theory_value(spec: ProcessSpec, n: int, k: int, central: bool) -> tuple[Optional[float], str]:
    """Asymptotic comparison value and a short label.

    Returns ``(None, label)`` when only an order, not a constant, is known;
    the label then names the order.
    """
    pr = spec.params
    proc = spec.process
    if proc is Process.GBP2 and not central:
        return c_k(k, pr.H, pr.c, pr.lam) * n ** ((2 * pr.H - 1) * k), "c_k n^((2H-1)k)"
    if proc is Process.GBP2STAR and not central:
        return c_k_star(k, pr.H, pr.c) * n ** ((2 * pr.H - 1) * k), "c_k* n^((2H-1)k)"
    if proc.family == "gbp1":
        if not central:
            return (n * pr.p) ** k, "(np)^k"
        if k == 1:
            return None, "0"
        if pr.H > 0.5:
            const = gbp1_central_constant if proc is Process.GBP1 else gbp1star_central_constant
            return const(k, pr.p, pr.H, pr.c) * n ** (2 * pr.H - 2 + k), "C n^(2H-2+k)"
        if pr.H == 0.5:
            return None, "order n^(k-1) ln n"
        return None, "order n^floor(k/2)"
    return None, "none"


# --- reports --------------------------------------------------------------


@dataclass(frozen=True)
class MomentReport:
    """One moment of the window sum, exact or simulated, beside its
    asymptotic target.

    ``reps == 0`` marks an exact row; ``stderr`` and ``batch_median`` are
    then ``0`` and the exact value.
    """

    process: str
    n: int
    k: int
    central: bool
    value: float
    theory: Optional[float]
    theory_label: str
    ratio: Optional[float]
    reps: int
    stderr: float
    batch_median: float
    method: str

    def to_dict(self) -> dict:
        return asdict(self)


def _row(spec, n, k, central, value, reps, stderr, med, method) -> MomentReport:
    th, label = theory_value(spec, n, k, central)
    ratio = value / th if th else None
    return MomentReport(spec.process.value, n, k, central, float(value), th, label, ratio, reps,
                        float(stderr), float(med), method)


def batch_medians(values: np.ndarray, n_batches: int = N_BATCHES) -> float:
    """Median over ``n_batches`` contiguous batches of the batch means."""
    parts = np.array_split(np.asarray(values, dtype=float), min(n_batches, len(values)))
    return float(np.median([p.mean() for p in parts]))


def empirical_moments(samples: np.ndarray, kmax: int, spec: ProcessSpec, n: int) -> list[MomentReport]:
    x = np.asarray(samples, dtype=float)
    N = len(x)
    mean = x.mean()
    rows = []
    for central in (False, True):
        y = x - mean if central else x
        for k in range(1, kmax + 1):
            yk = y**k
            se = yk.std(ddof=1) / math.sqrt(N) if N > 1 else 0.0
            rows.append(_row(spec, n, k, central, yk.mean(), N, se, batch_medians(yk), "monte-carlo"))
    return rows


def moment_report(
    spec: ProcessSpec,
    n: int,
    kmax: int,
    reps: int = 0,
    seed: int = 0,
    *,
    method: str = "auto",
) -> list[MomentReport]:
    """Raw and central moments ``k = 1..kmax`` of the window sum.

    ``method="auto"`` uses the exact engine for ``n <= 12`` and simulation
    otherwise; ``"exact"`` and ``"mc"`` force one or the other.
    """
    if spec.process is Process.FPP:
        raise ValueError("moment_report covers the GBP kinds; use fpp_counts for the fractional Poisson process")
    if method == "auto":
        method = "exact" if n <= EXACT_AUTO_N else "mc"
    if method == "exact":
        raw = exact_raw_moments(spec, n, kmax)
        cen = central_from_raw(raw)
        rows = [_row(spec, n, k, False, raw[k - 1], 0, 0.0, raw[k - 1], "exact") for k in range(1, kmax + 1)]
        rows += [_row(spec, n, k, True, cen[k - 1], 0, 0.0, cen[k - 1], "exact") for k in range(1, kmax + 1)]
        return rows
    if method != "mc":
        raise ValueError(f"unknown method {method!r}")
    if reps < 2:
        raise ValueError("Monte Carlo moments need reps >= 2")
    counts = sample_batch(spec, n, reps, seed).counts
    return empirical_moments(counts, kmax, spec, n)


def reports_to_json(rows: Sequence[MomentReport]) -> str:
    return json.dumps([r.to_dict() for r in rows], sort_keys=True, indent=2)


# --- mgf, histograms, distances -------------------------------------------


def empirical_mgf(samples: np.ndarray, t_grid: Union[float, Sequence[float]]) -> np.ndarray:
    """Sample averages of ``exp(t x)`` for each ``t`` in ``t_grid``.

    Raises
    ------
    OverflowError
        If some ``t * x`` exceeds 700.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("empty samples")
    ts = np.atleast_1d(np.asarray(t_grid, dtype=float))
    top = np.max(np.abs(x))
    for t in ts:
        if abs(t) * top > MGF_GUARD:
            raise OverflowError(f"t*x = {abs(t) * top:.4g} exceeds the guard {MGF_GUARD}")
    return np.array([np.exp(t * x).mean() for t in ts])


def batch_median_mgf(samples: np.ndarray, t_grid, n_batches: int = N_BATCHES) -> np.ndarray:
    """Median across batches of the batch empirical mgf."""
    parts = np.array_split(np.asarray(samples, dtype=float), n_batches)
    return np.median(np.array([empirical_mgf(p, t_grid) for p in parts]), axis=0)


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    scale: float
    process: str = ""
    seed: Optional[int] = None

    @property
    def reps(self) -> int:
        return int(self.counts.sum())

    def probabilities(self) -> np.ndarray:
        return self.counts / self.counts.sum()

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["bin_left", "bin_right", "count"])
            for lo, hi, ct in zip(self.edges[:-1], self.edges[1:], self.counts):
                w.writerow([repr(float(lo)), repr(float(hi)), int(ct)])


def common_edges(samples: Sequence[np.ndarray], bins: int, scale: float = 1.0) -> np.ndarray:
    """Bin edges spanning the pooled, scaled samples."""
    pooled = np.concatenate([np.asarray(s, dtype=float) for s in samples]) / scale
    if pooled.size == 0:
        raise ValueError("empty samples")
    return np.histogram_bin_edges(pooled, bins=bins)


def histogram(
    samples: np.ndarray,
    bins: Union[int, np.ndarray],
    scale: float = 1.0,
    *,
    process: str = "",
    seed: Optional[int] = None,
) -> Histogram:
    """Histogram of ``samples / scale``; ``bins`` is a count (at least 2) or
    explicit edges. Values outside explicit edges are clipped into the end
    bins so the counts always sum to the number of samples."""
    x = np.asarray(samples, dtype=float) / scale
    if x.size == 0:
        raise ValueError("empty samples")
    if np.ndim(bins) == 0:
        if bins < 2:
            raise ValueError("need at least 2 bins")
        edges = np.histogram_bin_edges(x, bins=int(bins))
    else:
        edges = np.asarray(bins, dtype=float)
        if len(edges) < 3 or np.any(np.diff(edges) <= 0):
            raise ValueError("edges must be strictly increasing with at least 2 bins")
        x = np.clip(x, edges[0], edges[-1])
    counts, _ = np.histogram(x, bins=edges)
    return Histogram(edges, counts.astype(np.int64), float(scale), process, seed)


def tv_distance(a: Union[Pmf, Histogram, np.ndarray], b: Union[Pmf, Histogram, np.ndarray]) -> float:
    """Total variation ``0.5 * sum |a_i - b_i|`` over the union support.

    Histograms are normalized first and must share edges.
    """

    def probs(x) -> np.ndarray:
        if isinstance(x, Pmf):
            return np.asarray(x.probs, dtype=float)
        if isinstance(x, Histogram):
            return x.probabilities()
        return np.asarray(x, dtype=float)

    if isinstance(a, Histogram) and isinstance(b, Histogram) and not np.array_equal(a.edges, b.edges):
        raise ValueError("histograms must share bin edges")
    pa, pb = probs(a), probs(b)
    m = max(len(pa), len(pb))
    pa = np.pad(pa, (0, m - len(pa)))
    pb = np.pad(pb, (0, m - len(pb)))
    return 0.5 * math.fsum(np.abs(pa - pb))


def growth_exponent(ns: Sequence[float], values: Sequence[float]) -> tuple[float, float]:
    """Least-squares slope (and its standard error) of ``log values`` on
    ``log ns``."""
    res = linregress(np.log(np.asarray(ns, dtype=float)), np.log(np.asarray(values, dtype=float)))
    return float(res.slope), float(res.stderr)
