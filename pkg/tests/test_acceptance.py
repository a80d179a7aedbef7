"""Acceptance suite.

Each test checks one numbered criterion at its stated tolerance, prints a
single PASS/FAIL line through the ``acceptance`` fixture and then asserts.
Run it on its own with ``pytest tests/test_acceptance.py -s`` or
``python3 tests/test_acceptance.py``.
"""

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from fracbern import cli
from fracbern.exact import all_pattern_probs, d_h, d_h_circ, enumerate_pmf, exact_moment, exact_raw_moments
from fracbern.mlf import mittag_leffler
from fracbern.params import FppParams, Gbp1Params, ProcessSpec
from fracbern.renewal import interarrival_pmf_gbp1, interarrival_pmf_gbp2star, tail_index_fit
from fracbern.sample import fpp_counts, sample_batch
from fracbern.stats import batch_median_mgf, c_k, c_k_star, common_edges, growth_exponent, histogram, tv_distance

KMAX = 100_000


def test_c01_normalization(acceptance):
    specs = [
        ProcessSpec.gbp1(0.1, 0.6, 0.2),
        ProcessSpec.gbp1(0.3, 0.8, 0.3),
        ProcessSpec.gbp1(0.6, 0.3, 0.1),
        ProcessSpec.gbp1star(0.1, 0.6, 0.2),
        ProcessSpec.gbp1star(0.3, 0.8, 0.3),
        ProcessSpec.gbp1star(0.6, 0.3, 0.1),
        ProcessSpec.gbp2(0.6, 0.2, 0.1, 12),
        ProcessSpec.gbp2(0.8, 0.6, 0.3, 12),
        ProcessSpec.gbp2(0.7, 0.5, 0.2, 12),
        ProcessSpec.gbp2star(0.6, 0.2),
        ProcessSpec.gbp2star(0.8, 0.6),
        ProcessSpec.gbp2star(0.7, 0.5),
    ]
    t0 = time.perf_counter()
    worst = max(abs(enumerate_pmf(s, 12).total() - 1) for s in specs)
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-10 and elapsed < 30
    acceptance(1, ok, f"max |sum-1| = {worst:.2e} over {len(specs)} sets, {elapsed:.2f} s")
    assert ok


def test_c02_gbp2_positivity(acceptance):
    bad, smallest = 0, math.inf
    for H, c, lam in [(0.6, 0.2, 0.1), (0.8, 0.6, 0.3), (0.7, 0.5, 0.2)]:
        probs = all_pattern_probs(ProcessSpec.gbp2(H, c, lam, 12), 12)
        bad += int(np.sum(probs <= 0))
        smallest = min(smallest, probs.min())
    ok = bad == 0
    acceptance(2, ok, f"{bad} non-positive of {3 * 4096} patterns, min = {smallest:.3e}")
    assert ok


def test_c03_three_point_inequality(acceptance):
    t0 = time.perf_counter()
    # the inequality depends on the two gaps only; cover every gap pair with i2 <= 200
    a, b = np.meshgrid(np.arange(1, 201.0), np.arange(1, 201.0), indexing="ij")
    keep = a + b <= 200
    a, b = a[keep], b[keep]
    violations = 0
    for H in np.linspace(0.55, 0.95, 10):
        e = 2 * H - 2
        lhs_unit = (a * b) ** e
        rhs = (a + b) ** e
        for frac in np.linspace(0.05, 0.95, 10):
            c = frac * 2.0**e
            violations += int(np.sum(c * lhs_unit >= rhs))
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and elapsed < 5
    acceptance(3, ok, f"{violations} violations over {a.size} gap pairs x 100 (H, c), {elapsed:.2f} s")
    assert ok


def test_c04_renewal_matches_inclusion_exclusion(acceptance):
    worst = 0.0
    for p, H, c in [(0.1, 0.6, 0.2), (0.1, 0.8, 0.6), (0.6, 0.9, 0.3), (0.3, 0.3, 0.2)]:
        pr = Gbp1Params(p, H, c)
        f = interarrival_pmf_gbp1(pr, 12).pmf
        for k in range(2, 13):
            ref = d_h([1, k + 1], range(2, k + 1), pr)
            worst = max(worst, abs(f[k] / ref - 1))
    for H, c in [(0.6, 0.2), (0.8, 0.6), (0.9, 0.85)]:
        f = interarrival_pmf_gbp2star(H, c, 12).pmf
        for k in range(2, 13):
            ref = c * d_h_circ([1, k + 1], range(2, k + 1), H, c)
            worst = max(worst, abs(f[k] / ref - 1))
    ok = worst < 1e-9
    acceptance(4, ok, f"max relative error {worst:.2e}")
    assert ok


def test_c05_mean_return_time(acceptance):
    errs = {}
    for p in (0.1, 0.3, 0.6):
        t = interarrival_pmf_gbp1(Gbp1Params(p, 0.6, 0.2), KMAX)
        errs[p] = t.partial_mean() * p - 1
    ok = all(abs(e) < 0.02 for e in errs.values())
    acceptance(5, ok, "relative errors " + ", ".join(f"p={p}: {e:+.4f}" for p, e in errs.items()))
    assert ok


def test_c06_tail_slopes(acceptance):
    parts, ok = [], True
    for p, H, c in [(0.1, 0.6, 0.2), (0.1, 0.8, 0.3)]:
        t = interarrival_pmf_gbp1(Gbp1Params(p, H, c), KMAX)
        fit = tail_index_fit(t, (100, KMAX))
        ratio = t.survival[KMAX] * p**2 * KMAX ** (3 - 2 * H) / (c * (2 - 2 * H))
        ok &= abs(fit.slope - (2 * H - 3)) <= 0.15 and abs(ratio - 1) <= 0.1
        parts.append(f"I H={H}: {fit.slope:.3f} (ratio {ratio:.3f})")
    for H, c in [(0.6, 0.2), (0.8, 0.6)]:
        fit = tail_index_fit(interarrival_pmf_gbp2star(H, c, KMAX), (100, KMAX))
        ok &= abs(fit.slope - (1 - 2 * H)) <= 0.15
        parts.append(f"II* H={H}: {fit.slope:.3f}")
    acceptance(6, ok, "; ".join(parts))
    assert ok


def test_c07_exact_moment_ratios(acceptance):
    n = 10_000
    ratios, ok = [], True
    for H, c, lam in [(0.8, 0.6, 0.1), (0.7, 0.5, 0.2)]:
        scale = n ** (2 * H - 1)
        raw2 = exact_raw_moments(ProcessSpec.gbp2(H, c, lam, n), n, 3)
        raw2s = exact_raw_moments(ProcessSpec.gbp2star(H, c), n, 3)
        for k in (1, 2, 3):
            r2 = raw2[k - 1] / (c_k(k, H, c, lam) * scale**k)
            rs = raw2s[k - 1] / (c_k_star(k, H, c) * scale**k)
            ratios += [r2, rs]
            ok &= 0.9 <= r2 <= 1.1 and 0.9 <= rs <= 1.1
            if k == 1:
                ok &= abs(r2 - 1) < 1e-12
    acceptance(7, ok, f"ratios in [{min(ratios):.4f}, {max(ratios):.4f}]")
    assert ok


def test_c08_variance_regimes(acceptance):
    ns = [2**j for j in range(7, 14)]
    parts, ok = [], True
    for (p, H, c), target in [((0.1, 0.8, 0.3), 1.6), ((0.3, 0.5, 0.05), 1.0), ((0.1, 0.3, 0.2), 1.0)]:
        spec = ProcessSpec.gbp1(p, H, c)
        var = [exact_moment(spec, n, 2, central=True) for n in ns]
        slope, _ = growth_exponent(ns, var)
        ok &= abs(slope - target) <= 0.1
        parts.append(f"H={H}: {slope:.3f} (target {target})")
    acceptance(8, ok, "; ".join(parts))
    assert ok


def test_c09_fpp_limit(acceptance):
    H, c, n, reps = 0.8, 0.6, 1000, 100_000
    t0 = time.perf_counter()
    fp = FppParams.from_gbp2(H, c)
    scale = n**fp.mu
    b = sample_batch(ProcessSpec.gbp2star(H, c), n, reps, 1).counts / scale
    f = fpp_counts(fp, float(n), reps, 2) / scale
    grid = [0.1, 0.25, 0.5]
    limit = np.array([mittag_leffler(fp.mu, fp.nu * t) for t in grid])
    err_b = batch_median_mgf(b, grid) / limit - 1
    err_f = batch_median_mgf(f, grid) / limit - 1
    edges = common_edges([b, f], 30)
    tv = tv_distance(histogram(b, edges), histogram(f, edges))
    elapsed = time.perf_counter() - t0
    worst = max(np.abs(err_b).max(), np.abs(err_f).max())
    ok = worst < 0.03 and tv < 0.1 and elapsed < 300
    acceptance(9, ok, f"max mgf error {worst:.4f}, TV {tv:.4f}, {elapsed:.1f} s")
    assert ok


@pytest.mark.slow
def test_c10_sampler_fidelity(acceptance):
    specs = {
        "gbp1": ProcessSpec.gbp1(0.1, 0.6, 0.2),
        "gbp1star": ProcessSpec.gbp1star(0.1, 0.6, 0.2),
        "gbp2": ProcessSpec.gbp2(0.8, 0.6, 0.1, 10),
        "gbp2star": ProcessSpec.gbp2star(0.8, 0.6),
    }
    tvs = {}
    for i, (name, spec) in enumerate(specs.items()):
        codes = sample_batch(spec, 10, 1_000_000, 1000 + i, codes=True).codes
        emp = np.bincount(codes, minlength=1 << 10) / len(codes)
        tvs[name] = tv_distance(emp, all_pattern_probs(spec, 10))
    mass = [
        (enumerate_pmf(ProcessSpec.gbp2(H, c, lam, 12), 12)[0], enumerate_pmf(ProcessSpec.gbp2star(H, c), 12)[0])
        for H, c, lam in [(0.6, 0.2, 0.1), (0.8, 0.6, 0.3), (0.7, 0.5, 0.2)]
    ]
    ok = max(tvs.values()) < 0.01 and all(a > b for a, b in mass)
    detail = ", ".join(f"{k} {v:.4f}" for k, v in tvs.items())
    acceptance(10, ok, f"TV {detail}; P(B=0) II > II* in {sum(a > b for a, b in mass)}/3")
    assert ok


GBP1 = ["--process", "gbp1", "--p", "0.1", "--H", "0.6", "--c", "0.2"]
GBP2STAR = ["--process", "gbp2star", "--H", "0.8", "--c", "0.6"]
CLI_RUNS = {
    "validate": ["validate", *GBP1, "--format", "json"],
    "exact-pmf": ["exact", "--process", "gbp2", "--H", "0.8", "--c", "0.6", "--lambda", "0.1", "--n", "12"],
    "exact-moments": ["exact", *GBP2STAR, "--n", "2000", "--what", "moments", "--kmax", "3"],
    "simulate": ["simulate", *GBP1, "--n", "200", "--reps", "2000", "--seed", "7"],
    "simulate-paths": ["simulate", *GBP2STAR, "--n", "50", "--reps", "200", "--paths", "--seed", "7"],
    "simulate-fpp": ["simulate", "--process", "fpp", "--mu", "0.6", "--nu", "0.9", "--n", "100", "--reps", "500"],
    "returns": ["returns", *GBP1, "--kmax", "20000", "--format", "json"],
    "returns-csv": ["returns", *GBP2STAR, "--kmax", "2000"],
    "converge": ["converge", *GBP2STAR, "--n", "300", "--reps", "5000", "--seed", "3", "--format", "json"],
    "figures": ["figures", "--reps", "300", "--seed", "3"],
}


def _run_cli(argv, out: Path) -> dict[str, bytes]:
    out.mkdir(parents=True)
    target = out / ("figs" if argv[0] == "figures" else "result.out")
    code = cli.main([*argv, "--out", str(target)])
    assert code == 0, argv
    return {str(p.relative_to(out)): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()}


def test_c11_cli_determinism(acceptance, tmp_path, capsys):
    differing = []
    for name, argv in CLI_RUNS.items():
        first = _run_cli(argv, tmp_path / name / "a")
        second = _run_cli(argv, tmp_path / name / "b")
        if not first or first != second:
            differing.append(name)
        capsys.readouterr()
        # stdout path as well
        cli.main(argv if argv[0] != "figures" else ["validate", *GBP1])
        s1 = capsys.readouterr().out
        cli.main(argv if argv[0] != "figures" else ["validate", *GBP1])
        if s1 != capsys.readouterr().out:
            differing.append(name + " (stdout)")
    ok = not differing
    with capsys.disabled():
        acceptance(11, ok, f"{len(CLI_RUNS)} commands re-run, differing: {differing or 'none'}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
