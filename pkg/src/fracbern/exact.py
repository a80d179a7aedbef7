"""Exact probabilities for the generalized Bernoulli processes.

Every joint law here is a product over the gaps between successive ones.
For GBP-I the gap weight is ``p + c*m**(2H-2)``; for GBP-II it is
``m**(2H-2)`` with the powers of ``c`` and the marginal ``p_n`` pulled out
front. Probabilities of full 0/1 patterns follow by signed subset sums over
the zero positions (:func:`d_h`, :func:`d_h_circ`).

Index sets are sorted tuples of positive integers. Position ``0`` is
accepted only as the anchor of the starred processes.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import stirling2

from .params import Gbp1Params, Process, ProcessSpec

#: Largest zero-set handled by the signed subset sums (2**24 terms).
MAX_ZEROS = 24
#: Largest window for exhaustive enumeration over all patterns.
MAX_ENUM_N = 20
MAX_MOMENT_ORDER = 6
MAX_MOMENT_N = 100_000
# direct np.convolve up to here, FFT beyond
_DIRECT_CONV_MAX = 20_000

Pattern = Union[str, Sequence[int], np.ndarray]


class EnumerationTooLarge(ValueError):
    """Raised instead of truncating an inclusion-exclusion or enumeration."""


@dataclass(frozen=True)
class Pmf:
    """Probability mass function on ``0..len(probs)-1``.

    ``residual`` holds mass that is not assigned to any listed value, e.g.
    the all-zero window of a first-passage law or the mass beyond a
    truncation horizon.
    """

    probs: np.ndarray
    residual: float = 0.0

    @property
    def support_max(self) -> int:
        return len(self.probs) - 1

    def __getitem__(self, k: int) -> float:
        if 0 <= k < len(self.probs):
            return float(self.probs[k])
        return 0.0

    def total(self) -> float:
        return math.fsum(self.probs) + self.residual

    def moment(self, k: int) -> float:
        x = np.arange(len(self.probs), dtype=float)
        return math.fsum(x**k * self.probs)

    def to_dict(self) -> dict[int, float]:
        return {i: float(v) for i, v in enumerate(self.probs)}

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["value", "probability"])
            for i, v in enumerate(self.probs):
                w.writerow([i, repr(float(v))])


def as_index_set(A: Iterable[int], *, allow_zero: bool = False) -> tuple[int, ...]:
    s = tuple(sorted(int(i) for i in A))
    if len(set(s)) != len(s):
        raise ValueError(f"index set has repeated elements: {s}")
    lo = 0 if allow_zero else 1
    if s and s[0] < lo:
        raise ValueError(f"index set elements must be >= {lo}: {s}")
    return s


def parse_pattern(pattern: Pattern) -> np.ndarray:
    """Coerce ``"0110"``, a 0/1 sequence or array into a uint8 array."""
    if isinstance(pattern, str):
        if set(pattern) - {"0", "1"}:
            raise ValueError(f"pattern must contain only 0/1, got {pattern!r}")
        arr = np.frombuffer(pattern.encode(), dtype=np.uint8) - ord("0")
    else:
        arr = np.asarray(pattern, dtype=np.int64)
        if arr.ndim != 1 or np.any((arr != 0) & (arr != 1)):
            raise ValueError("pattern must be a 1-d sequence of 0/1")
        arr = arr.astype(np.uint8)
    return arr


def ones_positions(pattern: Pattern) -> tuple[int, ...]:
    """1-based positions of the ones in a path."""
    return tuple(int(i) + 1 for i in np.flatnonzero(parse_pattern(pattern)))


def _gap_power(m: int, H: float) -> float:
    return math.exp((2 * H - 2) * math.log(m))


def gap_power_table(n: int, H: float) -> np.ndarray:
    """``g[m] = m**(2H-2)`` for ``m = 1..n``; ``g[0] = 0``."""
    g = np.zeros(n + 1)
    if n >= 1:
        g[1:] = np.exp((2 * H - 2) * np.log(np.arange(1, n + 1, dtype=float)))
    return g


def l_h(A: Iterable[int], params: Gbp1Params) -> float:
    """Product of ``p + c*gap**(2H-2)`` over consecutive gaps of ``A``.

    ``|A| = 1`` gives 1 and the empty set gives ``1/p``.
    """
    A = as_index_set(A, allow_zero=True)
    if not A:
        return 1.0 / params.p
    out = 1.0
    for a, b in zip(A, A[1:]):
        out *= params.p + params.c * _gap_power(b - a, params.H)
    return out


def l_h_circ(A: Iterable[int], H: float, *, empty: Optional[float] = None) -> float:
    """Product of ``gap**(2H-2)`` over consecutive gaps of ``A``.

    A singleton gives 1. The empty set has the value ``c/p_n`` in GBP-II,
    which the caller supplies through ``empty``.
    """
    A = as_index_set(A, allow_zero=True)
    if not A:
        if empty is None:
            raise ValueError("l_h_circ of the empty set needs empty=c/p_n")
        return float(empty)
    out = 1.0
    for a, b in zip(A, A[1:]):
        out *= _gap_power(b - a, H)
    return out


def _check_disjoint(A: tuple[int, ...], B: tuple[int, ...]) -> None:
    if set(A) & set(B):
        raise ValueError(f"A and B must be disjoint: {A} vs {B}")
    if len(B) > MAX_ZEROS:
        raise EnumerationTooLarge(
            f"enumeration too large: |B| = {len(B)} exceeds {MAX_ZEROS} (2^{len(B)} subset terms)"
        )


def _signed_subset_sum(A, B, weight, factor: float) -> float:
    # sum over B' subset of B of (-factor)^|B'| * weight(A u B'), compensated
    terms = []
    for r in range(len(B) + 1):
        sign = (-factor) ** r
        for sub in itertools.combinations(B, r):
            terms.append(sign * weight(tuple(sorted(A + sub))))
    return math.fsum(terms)


def d_h(A: Iterable[int], B: Iterable[int], params: Gbp1Params) -> float:
    """Signed subset sum ``sum_{B' in B} (-1)^|B'| l_h(A u B')``."""
    A = as_index_set(A, allow_zero=True)
    B = as_index_set(B, allow_zero=True)
    _check_disjoint(A, B)
    if not B:
        return l_h(A, params)
    return _signed_subset_sum(A, B, lambda S: l_h(S, params), 1.0)


def d_h_circ(
    A: Iterable[int], B: Iterable[int], H: float, c: float, *, p_n: Optional[float] = None
) -> float:
    """Signed subset sum ``sum_{B' in B} (-c)^|B'| l_h_circ(A u B')``.

    ``p_n`` is only needed when ``A`` is empty (``l_h_circ`` of the empty
    set is ``c/p_n``).
    """
    A = as_index_set(A, allow_zero=True)
    B = as_index_set(B, allow_zero=True)
    _check_disjoint(A, B)
    empty = None if p_n is None else c / p_n
    if not B:
        return l_h_circ(A, H, empty=empty)
    return _signed_subset_sum(A, B, lambda S: l_h_circ(S, H, empty=empty), c)


def _require_gbp(spec: ProcessSpec) -> None:
    if spec.process is Process.FPP:
        raise ValueError("exact pattern probabilities are defined for the GBP kinds only")


def _check_horizon(spec: ProcessSpec, last: int) -> None:
    if spec.process is Process.GBP2 and last > spec.params.n:
        raise ValueError(f"index {last} exceeds the GBP-II horizon n={spec.params.n}")


def joint_ones_prob(spec: ProcessSpec, A: Iterable[int]) -> float:
    """``P(X_i = 1 for all i in A)``."""
    _require_gbp(spec)
    A = as_index_set(A)
    if not A:
        return 1.0
    _check_horizon(spec, A[-1])
    pr = spec.params
    proc = spec.process
    if proc is Process.GBP1:
        return pr.p * l_h(A, pr)
    if proc is Process.GBP1STAR:
        return l_h((0,) + A, pr)
    if proc is Process.GBP2:
        return pr.p_n * pr.c ** (len(A) - 1) * l_h_circ(A, pr.H)
    return pr.c ** len(A) * l_h_circ((0,) + A, pr.H)


def pattern_prob(spec: ProcessSpec, pattern: Pattern) -> float:
    """Exact probability of observing ``pattern`` on positions ``1..len``.

    Uses the signed subset sums over the zero positions, so the number of
    zeros is capped at :data:`MAX_ZEROS`.
    """
    _require_gbp(spec)
    x = parse_pattern(pattern)
    if len(x) == 0:
        return 1.0
    _check_horizon(spec, len(x))
    A = tuple(int(i) + 1 for i in np.flatnonzero(x == 1))
    B = tuple(int(i) + 1 for i in np.flatnonzero(x == 0))
    pr = spec.params
    proc = spec.process
    if proc is Process.GBP1:
        return pr.p * d_h(A, B, pr)
    if proc is Process.GBP1STAR:
        return d_h((0,) + A, B, pr)
    if proc is Process.GBP2:
        return pr.p_n * pr.c ** (len(A) - 1) * d_h_circ(A, B, pr.H, pr.c, p_n=pr.p_n)
    return pr.c ** len(A) * d_h_circ((0,) + A, B, pr.H, pr.c)


def _gap_kernel(spec: ProcessSpec, n: int) -> np.ndarray:
    """Gap weights ``K[m]``, ``K[0] = 0``.

    ``P(ones at i_1 < ... < i_j)`` is the marginal of the first one times
    ``prod K[gaps]`` for the stationary kinds (``p`` for GBP-I, ``p_n`` for
    GBP-II); for the starred kinds the first gap is measured from the
    anchor at 0 and there is no marginal factor.
    """
    pr = spec.params
    g = gap_power_table(n, pr.H)
    if spec.process.family == "gbp1":
        K = pr.p + pr.c * g
        K[0] = 0.0
        return K
    return pr.c * g


def joint_ones_table(spec: ProcessSpec, n: int) -> np.ndarray:
    """``q[mask] = P(X_i = 1 for every bit i-1 set in mask)`` for all masks."""
    _require_gbp(spec)
    _check_horizon(spec, n)
    if n > MAX_ENUM_N:
        raise EnumerationTooLarge(f"enumeration too large: n = {n} exceeds {MAX_ENUM_N}")
    K = _gap_kernel(spec, n)
    masks = np.arange(1 << n, dtype=np.int64)
    prod = np.ones(1 << n)
    last = np.zeros(1 << n, dtype=np.int64)  # last set position, 0 = none yet
    star = spec.process.is_star
    for i in range(1, n + 1):
        has = ((masks >> (i - 1)) & 1).astype(bool)
        if star:
            prod[has] *= K[i - last[has]]
        else:
            seen = has & (last > 0)
            prod[seen] *= K[i - last[seen]]
        last[has] = i
    if star:
        q = prod
    else:
        pre1 = spec.params.p if spec.process is Process.GBP1 else spec.params.p_n
        q = np.where(last > 0, pre1 * prod, 1.0)
    q[0] = 1.0
    return q


def all_pattern_probs(spec: ProcessSpec, n: int) -> np.ndarray:
    """Probabilities of all ``2**n`` patterns, indexed by bitmask.

    Bit ``i-1`` of the mask is the value at position ``i``. Computed by
    Moebius inversion of :func:`joint_ones_table` over supersets, which is
    the same signed sum as :func:`pattern_prob` organized in ``O(n 2^n)``.
    """
    f = joint_ones_table(spec, n).copy()
    for i in range(n):
        v = f.reshape(-1, 2, 1 << i)
        v[:, 0, :] -= v[:, 1, :]
    return f


def pattern_from_mask(mask: int, n: int) -> str:
    return "".join("1" if (mask >> i) & 1 else "0" for i in range(n))


def mask_from_pattern(pattern: Pattern) -> int:
    x = parse_pattern(pattern)
    return int(np.dot(x.astype(np.int64), 1 << np.arange(len(x), dtype=np.int64)))


def enumerate_pmf(spec: ProcessSpec, n: int) -> Pmf:
    """Law of the window sum ``X_1 + ... + X_n`` by exhaustive enumeration."""
    if n > MAX_ENUM_N:
        raise EnumerationTooLarge(f"enumeration too large: n = {n} exceeds {MAX_ENUM_N}")
    probs = all_pattern_probs(spec, n)
    ones = np.array([bin(m).count("1") for m in range(1 << n)])
    return Pmf(np.bincount(ones, weights=probs, minlength=n + 1))


def _conv(a: np.ndarray, b: np.ndarray, size: int) -> np.ndarray:
    if size <= _DIRECT_CONV_MAX:
        return np.convolve(a, b)[:size]
    return fftconvolve(a, b)[:size]


def ordered_tuple_sums(
    kernel: np.ndarray, n: int, jmax: int, *, anchored: bool = False
) -> np.ndarray:
    """Sums of gap-weight products over ordered index tuples in ``1..n``.

    ``out[j-1] = sum_{i_1 < ... < i_j} prod_t kernel[i_t - i_{t-1}]`` where
    the product runs over ``t = 2..j`` (free start), or over ``t = 1..j``
    with ``i_0 = 0`` when ``anchored``. ``kernel[0]`` is ignored.
    """
    K = np.asarray(kernel, dtype=float)[: n + 1].copy()
    K[0] = 0.0
    m = np.arange(n + 1, dtype=float)
    power = np.zeros(n + 1)
    power[0] = 1.0
    out = np.empty(jmax)
    for j in range(1, jmax + 1):
        if anchored:
            power = _conv(power, K, n + 1)
            out[j - 1] = math.fsum(power[1:])
        else:
            # chains pinned at 0 spanning m fit in n - m places
            out[j - 1] = math.fsum((n - m[:n]) * power[:n])
            power = _conv(power, K, n + 1)
    return out


def surjection_counts(k: int) -> list[int]:
    """``j! * S(k, j)`` for ``j = 1..k``: ways to map ``k`` labelled draws
    onto exactly ``j`` distinct positions."""
    return [math.factorial(j) * int(stirling2(k, j, exact=True)) for j in range(1, k + 1)]


def _joint_sums(spec: ProcessSpec, n: int, kmax: int) -> np.ndarray:
    # T[j-1] = sum_{|A| = j} P(all ones on A)
    K = _gap_kernel(spec, n)
    if spec.process.is_star:
        return ordered_tuple_sums(K, n, kmax, anchored=True)
    T = ordered_tuple_sums(K, n, kmax)
    if spec.process is Process.GBP1:
        return spec.params.p * T
    return spec.params.p_n * T


def exact_raw_moments(spec: ProcessSpec, n: int, kmax: int) -> np.ndarray:
    """``E(B_n^k)`` for ``k = 1..kmax`` from the surjection expansion."""
    _require_gbp(spec)
    if not 1 <= kmax <= MAX_MOMENT_ORDER:
        raise ValueError(f"moment order must be in 1..{MAX_MOMENT_ORDER}, got {kmax}")
    if not 1 <= n <= MAX_MOMENT_N:
        raise ValueError(f"n must be in 1..{MAX_MOMENT_N}, got {n}")
    _check_horizon(spec, n)
    T = _joint_sums(spec, n, kmax)
    out = np.empty(kmax)
    for k in range(1, kmax + 1):
        mult = surjection_counts(k)
        out[k - 1] = math.fsum(mult[j] * T[j] for j in range(k))
    return out


def central_from_raw(raw: Sequence[float]) -> np.ndarray:
    """Central moments ``E((B - EB)^k)`` from raw moments ``E(B^k)``, k >= 1."""
    raw = [1.0] + [float(x) for x in raw]
    mean = raw[1]
    out = []
    for k in range(1, len(raw)):
        out.append(math.fsum(math.comb(k, i) * raw[i] * (-mean) ** (k - i) for i in range(k + 1)))
    return np.array(out)


def exact_moment(spec: ProcessSpec, n: int, k: int, *, central: bool = False) -> float:
    """Exact ``k``-th raw (or central) moment of the window sum ``B_n``.

    Uses iterated convolutions of the gap kernel, ``O(k n^2)`` for
    ``n <= 20000`` and FFT convolutions beyond.
    """
    raw = exact_raw_moments(spec, n, k)
    if central:
        return float(central_from_raw(raw)[k - 1])
    return float(raw[k - 1])


def moments_to_csv(moments: Sequence[float], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "moment"])
        for k, v in enumerate(moments, start=1):
            w.writerow([k, repr(float(v))])
