"""Parameter records for the generalized Bernoulli processes and the
fractional Poisson process, with admissibility checks.

Five process kinds share three parameter records:

==========  ==============  =========================================
kind        record          admissible region
==========  ==============  =========================================
gbp1        Gbp1Params      0 < p, H < 1, 0 <= c < gbp1_c_bound
gbp1star    Gbp1Params      same as gbp1
gbp2        Gbp2Params      1/2 < H < 1, 0 < c < 2**(2H-2), 0 < lambda < c, n >= 1
gbp2star    Gbp2Params      1/2 < H < 1, 0 < c < 2**(2H-2) (no lambda, no n)
fpp         FppParams       0 < mu <= 1, nu > 0
==========  ==============  =========================================

All inequalities are strict where the region is open; there is no epsilon
slack, so boundary values are rejected.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping, Optional, Union


class Process(str, Enum):
    GBP1 = "gbp1"
    GBP1STAR = "gbp1star"
    GBP2 = "gbp2"
    GBP2STAR = "gbp2star"
    FPP = "fpp"

    @property
    def is_star(self) -> bool:
        return self in (Process.GBP1STAR, Process.GBP2STAR)

    @property
    def family(self) -> str:
        """``"gbp1"``, ``"gbp2"`` or ``"fpp"``."""
        if self in (Process.GBP1, Process.GBP1STAR):
            return "gbp1"
        if self in (Process.GBP2, Process.GBP2STAR):
            return "gbp2"
        return "fpp"


@dataclass(frozen=True)
class Gbp1Params:
    p: float
    H: float
    c: float


@dataclass(frozen=True)
class Gbp2Params:
    H: float
    c: float
    lam: Optional[float] = None
    n: Optional[int] = None

    @property
    def p_n(self) -> float:
        """Marginal success probability ``lambda * n**(2H-2)`` of GBP-II."""
        if self.lam is None or self.n is None:
            raise ValueError("p_n needs both lambda and the horizon n")
        return self.lam * math.exp((2 * self.H - 2) * math.log(self.n))


@dataclass(frozen=True)
class FppParams:
    mu: float
    nu: float

    @classmethod
    def from_gbp2(cls, H: float, c: float) -> "FppParams":
        """Fractional Poisson parameters sharing the GBP-II* scaling limit:
        ``mu = 2H - 1`` and ``nu = c * Gamma(2H - 1)``."""
        mu = 2 * H - 1
        return cls(mu=mu, nu=c * math.gamma(mu))


Params = Union[Gbp1Params, Gbp2Params, FppParams]


@dataclass(frozen=True)
class Violation:
    """One failed admissibility inequality."""

    field: str
    message: str
    assumption: str

    def __str__(self) -> str:
        return f"{self.message} ({self.assumption})"


class ValidationError(ValueError):
    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


def gbp1_c_bound(p: float, H: float) -> float:
    """Upper bound (exclusive) on the correlation amplitude ``c`` of GBP-I.

    Returns ``min(1 - p, (-2p + 2**(2H-2) + sqrt(4p - p*2**(2H) + 2**(4H-4))) / 2)``.

    Raises
    ------
    ValueError
        If ``p`` or ``H`` lies outside the open unit interval.
    """
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0, 1), got {p!r}")
    if not (0.0 < H < 1.0):
        raise ValueError(f"H must lie in (0, 1), got {H!r}")
    a = 2.0 ** (2 * H - 2)
    radicand = 4 * p - p * 2.0 ** (2 * H) + 2.0 ** (4 * H - 4)
    # 4p(1 - 4**(H-1)) >= 0 for H < 1, so this never fires on the open domain
    if radicand < 0:
        raise ArithmeticError(f"negative radicand {radicand!r} at p={p}, H={H}")
    return min(1.0 - p, 0.5 * (-2 * p + a + math.sqrt(radicand)))


def _is_real(x: Any) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def gbp1_violations(p: float, H: float, c: float) -> list[Violation]:
    a = "GBP-I admissibility"
    out = []
    for name, val in (("p", p), ("H", H), ("c", c)):
        if not _is_real(val):
            out.append(Violation(name, f"{name} must be a finite real", a))
    if out:
        return out
    if not 0 < p < 1:
        out.append(Violation("p", "0 < p < 1 violated", a))
    if not 0 < H < 1:
        out.append(Violation("H", "0 < H < 1 violated", a))
    if c < 0:
        out.append(Violation("c", "c >= 0 violated", a))
    if not out:
        bound = gbp1_c_bound(p, H)
        if not c < bound:
            out.append(Violation("c", f"c < {bound:.6g} violated", a))
    return out


def gbp2_violations(
    H: float, c: float, lam: Optional[float] = None, n: Optional[int] = None, *, star: bool = False
) -> list[Violation]:
    a = "GBP-II admissibility"
    out = []
    named = [("H", H), ("c", c)]
    if not star:
        named.append(("lambda", lam))
    for name, val in named:
        if not _is_real(val):
            out.append(Violation(name, f"{name} must be a finite real", a))
    if not star and (isinstance(n, bool) or not isinstance(n, int) or n < 1):
        out.append(Violation("n", "horizon n must be a positive integer", a))
    if out:
        return out
    if not 0.5 < H < 1:
        out.append(Violation("H", "0.5 < H < 1 violated", a))
        return out
    top = 2.0 ** (2 * H - 2)
    if not 0 < c < top:
        out.append(Violation("c", f"0 < c < 2^(2H-2) = {top:.6g} violated", a))
    if not star:
        if not 0 < lam:
            out.append(Violation("lambda", "lambda > 0 violated", a))
        if not lam < c:
            out.append(Violation("lambda", "lambda < c violated", a))
        if not out:
            p_n = lam * n ** (2 * H - 2)
            if not 0 < p_n < 1:
                out.append(Violation("lambda", "p_n = lambda*n^(2H-2) in (0,1) violated", a))
    return out


def fpp_violations(mu: float, nu: float) -> list[Violation]:
    a = "fractional Poisson order/rate"
    out = []
    for name, val in (("mu", mu), ("nu", nu)):
        if not _is_real(val):
            out.append(Violation(name, f"{name} must be a finite real", a))
    if out:
        return out
    if not 0 < mu <= 1:
        out.append(Violation("mu", "0 < mu <= 1 violated", a))
    if not nu > 0:
        out.append(Violation("nu", "nu > 0 violated", a))
    return out


@dataclass(frozen=True)
class ProcessSpec:
    """A process kind together with its validated parameters.

    Build instances with the classmethod constructors or :func:`validate`;
    both refuse inadmissible parameters.
    """

    process: Process
    params: Params = field(repr=True)

    @classmethod
    def gbp1(cls, p: float, H: float, c: float) -> "ProcessSpec":
        return validate({"process": "gbp1", "p": p, "H": H, "c": c})

    @classmethod
    def gbp1star(cls, p: float, H: float, c: float) -> "ProcessSpec":
        return validate({"process": "gbp1star", "p": p, "H": H, "c": c})

    @classmethod
    def gbp2(cls, H: float, c: float, lam: float, n: int) -> "ProcessSpec":
        return validate({"process": "gbp2", "H": H, "c": c, "lambda": lam, "n": n})

    @classmethod
    def gbp2star(cls, H: float, c: float) -> "ProcessSpec":
        return validate({"process": "gbp2star", "H": H, "c": c})

    @classmethod
    def fpp(cls, mu: float, nu: float) -> "ProcessSpec":
        return validate({"process": "fpp", "mu": mu, "nu": nu})

    @property
    def H(self) -> float:
        if isinstance(self.params, FppParams):
            return (self.params.mu + 1) / 2
        return self.params.H

    def with_horizon(self, n: int) -> "ProcessSpec":
        """Return the GBP-II spec re-targeted to horizon ``n``; other kinds
        are returned unchanged."""
        if self.process is not Process.GBP2:
            return self
        pr = self.params
        return validate({"process": "gbp2", "H": pr.H, "c": pr.c, "lambda": pr.lam, "n": n})

    def to_dict(self) -> dict[str, Any]:
        pr = self.params
        d: dict[str, Any] = {"process": self.process.value}
        if isinstance(pr, Gbp1Params):
            d.update(p=pr.p, H=pr.H, c=pr.c)
        elif isinstance(pr, Gbp2Params):
            d.update(H=pr.H, c=pr.c)
            if self.process is Process.GBP2:
                d.update({"lambda": pr.lam, "n": pr.n})
        else:
            d.update(mu=pr.mu, nu=pr.nu)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ProcessSpec":
        return validate(json.loads(text))


_FIELDS = {
    Process.GBP1: ("p", "H", "c"),
    Process.GBP1STAR: ("p", "H", "c"),
    Process.GBP2: ("H", "c", "lambda", "n"),
    Process.GBP2STAR: ("H", "c"),
    Process.FPP: ("mu", "nu"),
}


def violations(raw: Mapping[str, Any]) -> list[Violation]:
    """List every admissibility violation in a raw parameter mapping.

    An empty list means :func:`validate` will succeed.
    """
    try:
        proc = Process(raw.get("process"))
    except ValueError:
        return [Violation("process", f"unknown process {raw.get('process')!r}", "process kind")]
    missing = [f for f in _FIELDS[proc] if raw.get(f) is None]
    if missing:
        return [Violation(f, f"missing required field {f!r}", "parameter record") for f in missing]
    if proc.family == "gbp1":
        return gbp1_violations(raw["p"], raw["H"], raw["c"])
    if proc is Process.GBP2:
        return gbp2_violations(raw["H"], raw["c"], raw["lambda"], raw["n"])
    if proc is Process.GBP2STAR:
        return gbp2_violations(raw["H"], raw["c"], star=True)
    return fpp_violations(raw["mu"], raw["nu"])


def validate(raw: Mapping[str, Any]) -> ProcessSpec:
    """Turn a raw record (the JSON object form) into a :class:`ProcessSpec`.

    Raises
    ------
    ValidationError
        Carrying one :class:`Violation` per failed inequality.
    """
    errs = violations(raw)
    if errs:
        raise ValidationError(errs)
    proc = Process(raw["process"])
    if proc.family == "gbp1":
        params: Params = Gbp1Params(float(raw["p"]), float(raw["H"]), float(raw["c"]))
    elif proc is Process.GBP2:
        params = Gbp2Params(float(raw["H"]), float(raw["c"]), float(raw["lambda"]), int(raw["n"]))
    elif proc is Process.GBP2STAR:
        params = Gbp2Params(float(raw["H"]), float(raw["c"]))
    else:
        params = FppParams(float(raw["mu"]), float(raw["nu"]))
    return ProcessSpec(proc, params)
