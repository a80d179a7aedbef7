"""Seeded Monte Carlo samplers.

Every GBP kind is a (possibly delayed) renewal sequence, so a path is built
from a first-one position followed by i.i.d. gaps, each drawn by inverse CDF
from tables computed in :mod:`fracbern.renewal`:

* GBP-I: first one from the stationary delay ``p P(T >= j)``, gaps from the
  GBP-I return-time law.
* GBP-I*, GBP-II*: a one is pinned at position 0; gaps from the matching
  return-time law.
* GBP-II: first one from ``p_n P(T° >= j)``, gaps from the GBP-II* law.

Tables are built to lag ``n``, which is exact for a window of length ``n``:
a gap longer than what is left of the window simply ends the path. Such
draws are counted as ``censored``.

Randomness comes from Philox, a counter-based generator keyed by
``(seed, stream)``. Batches are cut into fixed-size chunks with one stream
per chunk, so output depends only on ``(seed, reps, chunk)`` and never on
how chunks are scheduled across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .params import FppParams, Process, ProcessSpec
from .renewal import interarrival_pmf_gbp1, interarrival_pmf_gbp2star

DEFAULT_CHUNK = 1 << 14
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngSeed:
    """A 64-bit seed plus a stream index; each pair is an independent
    Philox substream."""

    seed: int
    stream: int = 0

    def __post_init__(self):
        if not (0 <= self.seed <= _MASK64 and 0 <= self.stream <= _MASK64):
            raise ValueError("seed and stream must be unsigned 64-bit integers")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=self.seed | (self.stream << 64)))


RngLike = Union[RngSeed, np.random.Generator, int]


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngSeed):
        return rng.generator()
    return RngSeed(int(rng)).generator()


@dataclass(frozen=True)
class _Tables:
    # first[j]: P(first one <= j) for j = 1..n (stationary kinds); None for starred
    first_cdf: Optional[np.ndarray]
    # gap_surv[k-1] = P(T > k), k = 1..n
    gap_surv: np.ndarray


def _build_tables(spec: ProcessSpec, n: int) -> _Tables:
    pr = spec.params
    if spec.process.family == "gbp1":
        table = interarrival_pmf_gbp1(pr, n)
        first = None
        if spec.process is Process.GBP1:
            first = pr.p * np.cumsum(table.survival[:n])
    elif spec.process.family == "gbp2":
        table = interarrival_pmf_gbp2star(pr.H, pr.c, n)
        first = None
        if spec.process is Process.GBP2:
            if pr.n != n:
                raise ValueError(f"GBP-II horizon is n={pr.n}, cannot sample a window of {n}")
            first = pr.p_n * np.cumsum(table.survival[:n])
    else:
        raise ValueError("binary paths exist only for the GBP kinds; use sample_fpp")
    return _Tables(first, table.survival[1 : n + 1])


def _draw_gaps(gen: np.random.Generator, surv_neg: np.ndarray, size: int) -> np.ndarray:
    # T > k  <=>  V < P(T > k); surv_neg = -P(T > k) is nondecreasing in k
    v = gen.random(size)
    return np.searchsorted(surv_neg, -v, side="left") + 1


@dataclass
class _ChunkResult:
    counts: np.ndarray
    codes: Optional[np.ndarray]
    paths: Optional[np.ndarray]
    censored: int


def _simulate_chunk(
    tables: _Tables, n: int, reps: int, gen: np.random.Generator, *, codes: bool, paths: bool
) -> _ChunkResult:
    counts = np.zeros(reps, dtype=np.int64)
    code = np.zeros(reps, dtype=np.int64) if codes else None
    mat = np.zeros((reps, n), dtype=np.uint8) if paths else None
    surv_neg = -tables.gap_surv
    censored = 0

    if tables.first_cdf is None:
        pos = np.zeros(reps, dtype=np.int64)
        idx = np.arange(reps)
    else:
        u = gen.random(reps)
        pos = np.searchsorted(tables.first_cdf, u, side="right") + 1
        idx = np.flatnonzero(pos <= n)
        pos = pos[idx]
        rows, at = idx, pos
        counts[rows] += 1
        if code is not None:
            code[rows] |= np.left_shift(1, at - 1)
        if mat is not None:
            mat[rows, at - 1] = 1

    while idx.size:
        gap = _draw_gaps(gen, surv_neg, idx.size)
        censored += int(np.count_nonzero(gap > n))
        pos = pos + gap
        live = pos <= n
        idx, pos = idx[live], pos[live]
        counts[idx] += 1
        if code is not None:
            code[idx] |= np.left_shift(1, pos - 1)
        if mat is not None:
            mat[idx, pos - 1] = 1
    return _ChunkResult(counts, code, mat, censored)


@dataclass(frozen=True)
class SampleBatch:
    """Results of ``reps`` independent windows of length ``n``.

    ``counts`` are the window sums; ``codes`` the bitmask of each pattern
    (bit ``i-1`` = position ``i``, only for ``n <= 62``); ``paths`` the
    dense 0/1 matrix when requested.
    """

    spec: ProcessSpec
    n: int
    seed: int
    counts: np.ndarray
    codes: Optional[np.ndarray]
    paths: Optional[np.ndarray]
    censored: int

    @property
    def reps(self) -> int:
        return len(self.counts)


def _chunk_sizes(reps: int, chunk: int) -> list[int]:
    full, rest = divmod(reps, chunk)
    return [chunk] * full + ([rest] if rest else [])


def sample_batch(
    spec: ProcessSpec,
    n: int,
    reps: int,
    seed: int,
    *,
    codes: bool = False,
    paths: bool = False,
    chunk: int = DEFAULT_CHUNK,
    workers: int = 1,
) -> SampleBatch:
    """Simulate ``reps`` windows of length ``n``.

    Chunk ``i`` (of ``chunk`` replications) draws from stream ``i`` of
    ``seed``; the result is identical for any ``workers``.
    """
    if n < 1 or reps < 1:
        raise ValueError("n and reps must be >= 1")
    if codes and n > 62:
        raise ValueError("pattern codes need n <= 62")
    tables = _build_tables(spec, n)
    sizes = _chunk_sizes(reps, chunk)

    def run(i: int) -> _ChunkResult:
        gen = RngSeed(seed, i).generator()
        return _simulate_chunk(tables, n, sizes[i], gen, codes=codes, paths=paths)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]
    return SampleBatch(
        spec,
        n,
        seed,
        np.concatenate([p.counts for p in parts]),
        np.concatenate([p.codes for p in parts]) if codes else None,
        np.concatenate([p.paths for p in parts]) if paths else None,
        sum(p.censored for p in parts),
    )


def sample_path(spec: ProcessSpec, n: int, rng: RngLike) -> np.ndarray:
    """One realization ``X_1..X_n`` as a uint8 array."""
    if n < 1:
        raise ValueError("n must be >= 1")
    tables = _build_tables(spec, n)
    res = _simulate_chunk(tables, n, 1, as_generator(rng), codes=False, paths=True)
    return res.paths[0]


def path_counts(spec: ProcessSpec, n: int, reps: int, seed: int, **kw) -> np.ndarray:
    """Window sums ``B_n`` of ``reps`` simulated paths."""
    return sample_batch(spec, n, reps, seed, **kw).counts


def sample_mittag_leffler_wait(
    mu: float, nu: float, rng: RngLike, size: Optional[int] = None
) -> Union[float, np.ndarray]:
    """First-family Mittag-Leffler waiting times (survival ``E_mu(-nu t^mu)``).

    Uses the two-uniform inversion
    ``w = -nu**(-1/mu) ln U (sin(mu pi)/tan(mu pi V) - cos(mu pi))**(1/mu)``,
    written as ``sin(mu pi (1-V)) / sin(mu pi V)`` for the bracket, which is
    the same quantity without the cancellation near ``V -> 1``. ``mu = 1``
    gives exponential waits with rate ``nu``.
    """
    if not 0 < mu <= 1:
        raise ValueError(f"mu must lie in (0, 1], got {mu!r}")
    if not nu > 0:
        raise ValueError("nu must be > 0")
    gen = as_generator(rng)
    m = 1 if size is None else size
    u = 1.0 - gen.random(m)  # (0, 1]
    scale = nu ** (-1.0 / mu)
    if mu == 1.0:
        w = -scale * np.log(u)
    else:
        v = 1.0 - gen.random(m)
        bracket = np.sin(mu * np.pi * (1.0 - v)) / np.sin(mu * np.pi * v)
        w = -scale * np.log(u) * bracket ** (1.0 / mu)
    return float(w[0]) if size is None else w


def sample_fpp(params: FppParams, t: float, rng: RngLike) -> np.ndarray:
    """Event times of the fractional Poisson process on ``(0, t]``."""
    if not t > 0:
        raise ValueError("horizon t must be > 0")
    gen = as_generator(rng)
    times = []
    now = 0.0
    while True:
        now += sample_mittag_leffler_wait(params.mu, params.nu, gen)
        if now > t:
            return np.array(times)
        times.append(now)


def _fpp_chunk(params: FppParams, t: float, reps: int, gen: np.random.Generator) -> np.ndarray:
    counts = np.zeros(reps, dtype=np.int64)
    now = np.zeros(reps)
    idx = np.arange(reps)
    while idx.size:
        now = now + sample_mittag_leffler_wait(params.mu, params.nu, gen, size=idx.size)
        live = now <= t
        idx, now = idx[live], now[live]
        counts[idx] += 1
    return counts


def fpp_counts(
    params: FppParams, t: float, reps: int, seed: int, *, chunk: int = DEFAULT_CHUNK, workers: int = 1
) -> np.ndarray:
    """``N(t)`` for ``reps`` independent fractional Poisson processes."""
    if not t > 0:
        raise ValueError("horizon t must be > 0")
    sizes = _chunk_sizes(reps, chunk)

    def run(i: int) -> np.ndarray:
        return _fpp_chunk(params, t, sizes[i], RngSeed(seed, i).generator())

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return np.concatenate(list(ex.map(run, range(len(sizes)))))
    return np.concatenate([run(i) for i in range(len(sizes))])


def expected_fpp_count(params: FppParams, t: float) -> float:
    """``E N(t) = nu t^mu / Gamma(mu + 1)``."""
    return params.nu * t**params.mu / math.gamma(params.mu + 1)
