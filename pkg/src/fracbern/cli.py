"""Command-line interface.

Subcommands: ``validate``, ``exact``, ``simulate``, ``returns``,
``converge`` and ``figures``. Every output is a pure function of the flags
and ``--seed``; each written file gets a ``<file>.manifest.json`` companion
recording the command, resolved configuration and package version.

Exit codes: 0 success, 1 invalid parameters or arguments, 2 numeric
failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import numpy as np

from . import __version__
from .exact import (
    MAX_ENUM_N,
    EnumerationTooLarge,
    central_from_raw,
    enumerate_pmf,
    exact_raw_moments,
)
from .mlf import mittag_leffler
from .params import FppParams, Process, ProcessSpec, ValidationError, validate, violations
from .renewal import interarrival_pmf_gbp1, interarrival_pmf_gbp2star, tail_index_fit
from .sample import RngSeed, fpp_counts, sample_batch, sample_fpp, sample_path
from .stats import (
    batch_median_mgf,
    c_k_star,
    common_edges,
    empirical_mgf,
    histogram,
    tv_distance,
)

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3

FIGURE_ROWS = ((0.1, 0.6, 0.2), (0.1, 0.8, 0.6), (0.6, 0.7, 0.1), (0.6, 0.9, 0.3))
FIGURE_NS = (50, 1000)
FIGURE_KINDS = ("gbp1", "gbp1star", "gbp2", "gbp2star", "fpp", "binomial")

_SPEC_KEYS = ("process", "p", "H", "c", "lambda", "n", "mu", "nu")
_DEFAULTS = {"seed": 0, "format": "csv"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _atomic_write(path: Path, write: Callable[[str], None]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    os.close(fd)
    try:
        write(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_text(path: Path, text: str) -> None:
    def w(tmp):
        with open(tmp, "w", newline="") as fh:
            fh.write(text)

    _atomic_write(path, w)


class Output:
    """Collects files and writes them, with manifests, once at the end."""

    def __init__(self, command: str, config: dict):
        self.command = command
        self.config = config
        self.files: list[tuple[Path, Callable[[str], None]]] = []

    def add_text(self, path: Path, text: str) -> None:
        def w(tmp):
            with open(tmp, "w", newline="") as fh:
                fh.write(text)

        self.files.append((Path(path), w))

    def add_writer(self, path: Path, writer: Callable[[str], None]) -> None:
        self.files.append((Path(path), writer))

    def manifest(self, outputs: Sequence[str]) -> str:
        return _dumps(
            {
                "command": self.command,
                "config": {k: v for k, v in self.config.items() if k != "out"},
                "seed": self.config.get("seed"),
                "version": f"v{__version__}",
                "outputs": list(outputs),
            }
        )

    def commit(self) -> None:
        for path, writer in self.files:
            _atomic_write(path, writer)
            _write_text(path.with_name(path.name + ".manifest.json"), self.manifest([path.name]))


def _emit(args, cfg: dict, text: str, command: str) -> None:
    if cfg.get("out"):
        out = Output(command, cfg)
        out.add_text(Path(cfg["out"]), text)
        out.commit()
    else:
        sys.stdout.write(text)


# --- configuration --------------------------------------------------------


def _resolve(args: argparse.Namespace) -> dict:
    cfg: dict[str, Any] = dict(_DEFAULTS)
    if getattr(args, "config", None):
        with open(args.config) as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a JSON object")
        cfg.update(loaded)
    for key, val in vars(args).items():
        if key in ("config", "func", "command"):
            continue
        if val is not None:
            cfg[key] = val
    return cfg


def _raw_spec(cfg: dict) -> dict:
    raw = {k: cfg[k] for k in _SPEC_KEYS if cfg.get(k) is not None}
    if raw.get("process") != "gbp2":
        raw.pop("n", None)
    return raw


def _spec(cfg: dict) -> ProcessSpec:
    if not cfg.get("process"):
        raise UsageError("--process is required")
    return validate(_raw_spec(cfg))


def _need(cfg: dict, key: str, default=None):
    val = cfg.get(key, default)
    if val is None:
        raise UsageError(f"--{key} is required for this command")
    return val


# --- commands -------------------------------------------------------------


def cmd_validate(args, cfg: dict) -> int:
    errs = violations(_raw_spec(cfg))
    if cfg["format"] == "json":
        text = _dumps(
            {
                "valid": not errs,
                "violations": [{"field": v.field, "message": v.message, "assumption": v.assumption} for v in errs],
            }
        )
    else:
        text = "valid\n" if not errs else "".join(f"invalid: {v}\n" for v in errs)
    _emit(args, cfg, text, "validate")
    return EXIT_OK if not errs else EXIT_INVALID


def _gbp_spec(cfg: dict) -> ProcessSpec:
    spec = _spec(cfg)
    if spec.process is Process.FPP:
        raise UsageError("this command needs a GBP process")
    return spec


def cmd_exact(args, cfg: dict) -> int:
    spec = _gbp_spec(cfg)
    n = int(_need(cfg, "n"))
    order = int(cfg.get("kmax") or 4)
    what = cfg.get("what") or ("pmf" if n <= MAX_ENUM_N else "moments")
    raw = exact_raw_moments(spec, n, order)
    cen = central_from_raw(raw)
    if cfg["format"] == "json":
        doc = {
            "process": spec.process.value,
            "params": spec.to_dict(),
            "n": n,
            "raw_moments": [float(x) for x in raw],
            "central_moments": [float(x) for x in cen],
        }
        if what == "pmf":
            pmf = enumerate_pmf(spec, n)
            doc["pmf"] = [float(x) for x in pmf.probs]
            doc["total"] = pmf.total()
        text = _dumps(doc)
    elif what == "pmf":
        if n > MAX_ENUM_N:
            raise EnumerationTooLarge(f"enumeration too large: n = {n} exceeds {MAX_ENUM_N}")
        pmf = enumerate_pmf(spec, n)
        text = "value,probability\n" + "".join(f"{i},{float(v)!r}\n" for i, v in enumerate(pmf.probs))
    else:
        text = "k,raw_moment,central_moment\n" + "".join(
            f"{k},{float(raw[k - 1])!r},{float(cen[k - 1])!r}\n" for k in range(1, order + 1)
        )
    _emit(args, cfg, text, "exact")
    return EXIT_OK


def _positions_line(values) -> str:
    return ",".join(str(v) for v in values) + "\n"


def cmd_simulate(args, cfg: dict) -> int:
    spec = _spec(cfg)
    n = int(_need(cfg, "n"))
    reps = int(cfg.get("reps") or 1)
    seed = int(cfg["seed"])
    if reps < 1:
        raise UsageError("--reps must be >= 1")
    paths = bool(cfg.get("paths"))
    if spec.process is Process.FPP:
        t = float(cfg.get("t") or n)
        if paths:
            lines = [
                _positions_line(repr(float(x)) for x in sample_fpp(spec.params, t, RngSeed(seed, r)))
                for r in range(reps)
            ]
            counts = None
        else:
            counts = fpp_counts(spec.params, t, reps, seed)
        censored = 0
    elif paths:
        lines = [
            _positions_line(np.flatnonzero(sample_path(spec, n, RngSeed(seed, r))) + 1) for r in range(reps)
        ]
        counts, censored = None, None
    else:
        batch = sample_batch(spec, n, reps, seed)
        counts, censored = batch.counts, batch.censored
    if cfg["format"] == "json":
        doc = {"process": spec.process.value, "params": spec.to_dict(), "n": n, "reps": reps, "seed": seed}
        if counts is not None:
            doc.update(counts=[int(x) for x in counts], mean=float(np.mean(counts)), censored=censored)
        else:
            doc["paths"] = [ln.rstrip("\n") for ln in lines]
        text = _dumps(doc)
    elif counts is not None:
        text = "".join(f"{int(x)}\n" for x in counts)
    else:
        text = "".join(lines)
    _emit(args, cfg, text, "simulate")
    return EXIT_OK


def cmd_returns(args, cfg: dict) -> int:
    spec = _gbp_spec(cfg)
    kmax = int(cfg.get("kmax") or 100_000)
    pr = spec.params
    if spec.process.family == "gbp1":
        table = interarrival_pmf_gbp1(pr, kmax)
    else:
        table = interarrival_pmf_gbp2star(pr.H, pr.c, kmax)
    if cfg["format"] == "csv":
        text = "k,pmf,survival\n" + "".join(
            f"{k},{float(table.pmf[k])!r},{float(table.survival[k])!r}\n" for k in range(1, kmax + 1)
        )
    else:
        lo = int(cfg.get("fit_min") or max(1, kmax // 1000))
        fit = tail_index_fit(table, (lo, kmax))
        doc = json.loads(fit.to_json())
        doc.update(
            process=spec.process.value,
            params=spec.to_dict(),
            kmax=kmax,
            clamped=table.clamped,
            partial_mean=table.partial_mean(),
        )
        if spec.process.family == "gbp1":
            doc["theory_mean"] = 1 / pr.p
            level = pr.c * (2 - 2 * pr.H) / pr.p**2
            doc["tail_constant_ratio"] = float(table.survival[kmax]) * kmax ** (3 - 2 * pr.H) / level
        text = _dumps(doc)
    _emit(args, cfg, text, "returns")
    return EXIT_OK


def _parse_grid(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    return [float(x) for x in str(text).split(",") if x.strip()]


def cmd_converge(args, cfg: dict) -> int:
    spec = _gbp_spec(cfg)
    if spec.process.family != "gbp2":
        raise UsageError("converge needs gbp2 or gbp2star parameters (H, c)")
    H, c = spec.params.H, spec.params.c
    star = ProcessSpec.gbp2star(H, c)
    n = int(cfg.get("n") or 1000)
    reps = int(cfg.get("reps") or 100_000)
    seed = int(cfg["seed"])
    grid = _parse_grid(cfg.get("t_grid") or "0.1,0.25,0.5")
    fp = FppParams.from_gbp2(H, c)
    mu, nu = fp.mu, fp.nu
    scale = n**mu

    streams = np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)
    b = sample_batch(star, n, reps, int(streams[0])).counts / scale
    f = fpp_counts(fp, float(n), reps, int(streams[1])) / scale
    limit = [mittag_leffler(mu, nu * t) for t in grid]
    mgf_rows = []
    for t, lim, gm, gmed, fm, fmed in zip(
        grid, limit, empirical_mgf(b, grid), batch_median_mgf(b, grid), empirical_mgf(f, grid), batch_median_mgf(f, grid)
    ):
        mgf_rows.append(
            {
                "t": t,
                "limit": lim,
                "gbp2star_mean": float(gm),
                "gbp2star_batch_median": float(gmed),
                "fpp_mean": float(fm),
                "fpp_batch_median": float(fmed),
                "gbp2star_ratio": float(gmed) / lim,
                "fpp_ratio": float(fmed) / lim,
            }
        )
    edges = common_edges([b, f], int(cfg.get("bins") or 30))
    tv = tv_distance(histogram(b, edges), histogram(f, edges))
    order = min(int(cfg.get("kmax") or 3), 6)
    raw = exact_raw_moments(star, n, order)
    moments = [
        {"k": k, "exact": float(raw[k - 1]), "theory": c_k_star(k, H, c) * scale**k,
         "ratio": float(raw[k - 1]) / (c_k_star(k, H, c) * scale**k)}
        for k in range(1, order + 1)
    ]
    if cfg["format"] == "csv":
        cols = ["t", "limit", "gbp2star_batch_median", "fpp_batch_median", "gbp2star_ratio", "fpp_ratio"]
        text = ",".join(cols) + "\n" + "".join(",".join(repr(float(r[k])) for k in cols) + "\n" for r in mgf_rows)
    else:
        text = _dumps(
            {
                "H": H,
                "c": c,
                "mu": mu,
                "nu": nu,
                "n": n,
                "reps": reps,
                "seed": seed,
                "mgf": mgf_rows,
                "histogram_tv": tv,
                "histogram_tv_note": "TV < 0.1 operationalizes visual closeness of the two scaled histograms",
                "moments": moments,
            }
        )
    _emit(args, cfg, text, "converge")
    return EXIT_OK


def _cell_seed(seed: int, row: int, n: int, kind: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(row, n, kind)).generate_state(1, dtype=np.uint64)[0])


def _figure_samples(kind: str, p: float, H: float, c: float, n: int, reps: int, seed: int) -> np.ndarray:
    if kind == "gbp1":
        return sample_batch(ProcessSpec.gbp1(p, H, c), n, reps, seed).counts
    if kind == "gbp1star":
        return sample_batch(ProcessSpec.gbp1star(p, H, c), n, reps, seed).counts
    if kind == "gbp2":
        return sample_batch(ProcessSpec.gbp2(H, c, p, n), n, reps, seed).counts
    if kind == "gbp2star":
        return sample_batch(ProcessSpec.gbp2star(H, c), n, reps, seed).counts
    if kind == "fpp":
        return fpp_counts(FppParams.from_gbp2(H, c), float(n), reps, seed)
    return RngSeed(seed).generator().binomial(n, p, size=reps)


def _figure_violations(kind: str, p: float, H: float, c: float, n: int) -> list[str]:
    if kind in ("gbp1", "gbp1star"):
        raw = {"process": kind, "p": p, "H": H, "c": c}
    elif kind == "gbp2":
        raw = {"process": "gbp2", "H": H, "c": c, "lambda": p, "n": n}
    elif kind in ("gbp2star", "fpp"):
        raw = {"process": "gbp2star", "H": H, "c": c}
    else:
        return []
    return [str(v) for v in violations(raw)]


def cmd_figures(args, cfg: dict) -> int:
    outdir = Path(_need(cfg, "out"))
    reps = int(cfg.get("reps") or 10_000)
    seed = int(cfg["seed"])
    bins = int(cfg.get("bins") or 40)
    out = Output("figures", cfg)
    summary: dict[str, Any] = {"reps": reps, "seed": seed, "cells": [], "skipped": []}

    for r, (p, H, c) in enumerate(FIGURE_ROWS, start=1):
        for n in FIGURE_NS:
            samples = {}
            for i, kind in enumerate(FIGURE_KINDS):
                bad = _figure_violations(kind, p, H, c, n)
                if bad:
                    summary["skipped"].append(
                        {"row": r, "n": n, "process": kind, "p": p, "H": H, "c": c,
                         "mapping": "lambda := p" if kind == "gbp2" else None, "violations": bad}
                    )
                    continue
                samples[kind] = _figure_samples(kind, p, H, c, n, reps, _cell_seed(seed, r, n, i))

            # unscaled histograms on shared unit-width bins
            top = max(int(s.max()) for s in samples.values())
            unit_edges = np.arange(-0.5, top + 1.0, 1.0)
            if len(unit_edges) < 3:
                unit_edges = np.array([-0.5, 0.5, 1.5])
            cell = {"row": r, "n": n, "p": p, "H": H, "c": c, "files": []}
            for kind, s in samples.items():
                h = histogram(s, unit_edges, process=kind, seed=seed)
                name = f"row{r}_n{n}_{kind}.csv"
                out.add_writer(outdir / name, h.to_csv)
                cell["files"].append(name)
                cell.setdefault("mass_at_zero", {})[kind] = float(np.mean(s == 0))

            # scaled histograms of the Mittag-Leffler pair
            if "gbp2star" in samples and "fpp" in samples:
                scale = n ** (2 * H - 1)
                edges = common_edges([samples["gbp2star"], samples["fpp"]], bins, scale)
                hs = {k: histogram(samples[k], edges, scale, process=k, seed=seed) for k in ("gbp2star", "fpp")}
                for k, h in hs.items():
                    name = f"row{r}_n{n}_{k}_scaled.csv"
                    out.add_writer(outdir / name, h.to_csv)
                    cell["files"].append(name)
                cell["scaled_tv_gbp2star_fpp"] = tv_distance(hs["gbp2star"], hs["fpp"])
            summary["cells"].append(cell)

    summary["files"] = sorted(f for cell in summary["cells"] for f in cell["files"])
    out.add_text(outdir / "figures.json", _dumps(summary))
    out.commit()
    _write_text(outdir / "manifest.json", out.manifest(summary["files"] + ["figures.json"]))
    for s in summary["skipped"]:
        print(f"skipped row {s['row']} n={s['n']} {s['process']}: {'; '.join(s['violations'])}", file=sys.stderr)
    return EXIT_OK


# --- parser ---------------------------------------------------------------


def _common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="JSON file with any of the flags below as keys")
    sp.add_argument("--process", choices=[p.value for p in Process])
    for name in ("p", "H", "c", "mu", "nu"):
        sp.add_argument(f"--{name}", type=float)
    sp.add_argument("--lambda", dest="lambda", type=float)
    sp.add_argument("--n", type=int)
    sp.add_argument("--reps", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--kmax", type=int, help="table horizon (returns) or highest moment order (exact, converge)")
    sp.add_argument("--out", help="output file (directory for figures); stdout when omitted")
    sp.add_argument("--format", choices=["csv", "json"])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fracbern", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"fracbern v{__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    sp = sub.add_parser("validate", help="check parameters against the admissible region")
    _common(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("exact", help="exact pmf (n <= 20) and moments of the window sum")
    _common(sp)
    sp.add_argument("--what", choices=["pmf", "moments"])
    sp.set_defaults(func=cmd_exact)

    sp = sub.add_parser("simulate", help="window sums or paths by renewal sampling")
    _common(sp)
    sp.add_argument("--paths", action="store_true", default=None, help="write positions of ones per path")
    sp.add_argument("--t", type=float, help="horizon for the fractional Poisson process (default n)")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("returns", help="return-time table (csv) or tail fit (json)")
    _common(sp)
    sp.add_argument("--fit-min", dest="fit_min", type=int)
    sp.set_defaults(func=cmd_returns)

    sp = sub.add_parser("converge", help="Mittag-Leffler limit check for GBP-II* and the fractional Poisson process")
    _common(sp)
    sp.add_argument("--t-grid", dest="t_grid")
    sp.add_argument("--bins", type=int)
    sp.set_defaults(func=cmd_converge)

    sp = sub.add_parser("figures", help="histogram CSVs for the four caption parameter rows at n = 50, 1000")
    _common(sp)
    sp.add_argument("--bins", type=int)
    sp.set_defaults(func=cmd_figures)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_INVALID
        cfg = _resolve(args)
        return args.func(args, cfg)
    except ValidationError as e:
        for v in e.violations:
            print(f"invalid: {v}", file=sys.stderr)
        return EXIT_INVALID
    except (UsageError, EnumerationTooLarge) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except ArithmeticError as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
