import math

import numpy as np
import pytest
from scipy.stats import linregress

from fracbern.exact import all_pattern_probs, joint_ones_prob
from fracbern.mlf import fpp_mgf
from fracbern.params import FppParams, ProcessSpec
from fracbern.sample import (
    RngSeed,
    as_generator,
    expected_fpp_count,
    fpp_counts,
    path_counts,
    sample_batch,
    sample_fpp,
    sample_mittag_leffler_wait,
    sample_path,
)

SPECS = {
    "gbp1": ProcessSpec.gbp1(0.1, 0.6, 0.2),
    "gbp1star": ProcessSpec.gbp1star(0.1, 0.6, 0.2),
    "gbp2": ProcessSpec.gbp2(0.8, 0.6, 0.1, 10),
    "gbp2star": ProcessSpec.gbp2star(0.8, 0.6),
}


@pytest.mark.parametrize("name", SPECS)
def test_path_determinism(name):
    spec = SPECS[name]
    a = sample_path(spec, 10, RngSeed(5, 2))
    b = sample_path(spec, 10, RngSeed(5, 2))
    assert a.dtype == np.uint8 and len(a) == 10
    assert np.array_equal(a, b)
    a = sample_path(spec, 10, 5)
    b = sample_path(spec, 10, np.random.Generator(np.random.Philox(key=5)))
    assert np.array_equal(a, b)


def test_batch_independent_of_workers_and_reproducible():
    spec = SPECS["gbp1"]
    one = sample_batch(spec, 30, 5000, 11, codes=False, paths=True, chunk=700)
    many = sample_batch(spec, 30, 5000, 11, codes=False, paths=True, chunk=700, workers=4)
    assert np.array_equal(one.paths, many.paths)
    assert np.array_equal(one.counts, many.counts)
    assert np.array_equal(one.counts, one.paths.sum(axis=1))
    assert one.censored == many.censored
    other = sample_batch(spec, 30, 5000, 12, chunk=700)
    assert not np.array_equal(one.counts, other.counts)


def test_streams_differ():
    g0 = RngSeed(1, 0).generator().random(4)
    g1 = RngSeed(1, 1).generator().random(4)
    assert not np.allclose(g0, g1)
    with pytest.raises(ValueError):
        RngSeed(-1)
    with pytest.raises(ValueError):
        RngSeed(1, 1 << 64)
    assert isinstance(as_generator(3), np.random.Generator)


@pytest.mark.parametrize("name", SPECS)
def test_pattern_law_close_to_exact(name):
    spec = SPECS[name]
    b = sample_batch(spec, 10, 200_000, 99, codes=True)
    emp = np.bincount(b.codes, minlength=1 << 10) / b.reps
    tv = 0.5 * np.abs(emp - all_pattern_probs(spec, 10)).sum()
    assert tv < 0.02


def test_gbp1_mean():
    counts = path_counts(SPECS["gbp1"], 50, 100_000, 3)
    se = counts.std(ddof=1) / math.sqrt(len(counts))
    assert abs(counts.mean() - 5.0) < 3 * se


def test_gbp2_covariance():
    n = 20
    spec = ProcessSpec.gbp2(0.8, 0.6, 0.1, n)
    paths = sample_batch(spec, n, 400_000, 8, paths=True).paths.astype(float)
    p_n = spec.params.p_n
    i = 6
    for lag in range(1, 6):
        x, y = paths[:, i - 1], paths[:, i - 1 + lag]
        prod = (x - x.mean()) * (y - y.mean())
        se = prod.std(ddof=1) / math.sqrt(len(prod))
        theory = p_n * 0.6 * lag**-0.4 - p_n**2
        assert abs(prod.mean() - theory) < 3 * se


def test_gbp2star_marginals():
    spec = SPECS["gbp2star"]
    paths = sample_batch(spec, 20, 200_000, 17, paths=True).paths
    freq = paths.mean(axis=0)
    for i in range(1, 21):
        p = joint_ones_prob(spec, [i])
        assert p == pytest.approx(0.6 * i**-0.4)
        se = math.sqrt(p * (1 - p) / paths.shape[0])
        assert abs(freq[i - 1] - p) < 3.5 * se


def test_censoring_reported():
    b = sample_batch(SPECS["gbp2star"], 10, 10_000, 1)
    assert b.censored > 0
    assert b.reps == 10_000


def test_sampler_errors():
    with pytest.raises(ValueError):
        sample_batch(SPECS["gbp2"], 11, 10, 0)
    with pytest.raises(ValueError):
        sample_batch(ProcessSpec.fpp(0.6, 1.0), 10, 10, 0)
    with pytest.raises(ValueError):
        sample_batch(SPECS["gbp1"], 63, 10, 0, codes=True)
    with pytest.raises(ValueError):
        sample_path(SPECS["gbp1"], 0, 0)


def test_exponential_waits():
    w = sample_mittag_leffler_wait(1.0, 2.0, RngSeed(4), size=1_000_000)
    se = w.std() / math.sqrt(len(w))
    assert abs(w.mean() - 0.5) < 3 * se
    assert isinstance(sample_mittag_leffler_wait(0.6, 1.0, 4), float)
    with pytest.raises(ValueError):
        sample_mittag_leffler_wait(1.2, 1.0, 0)
    with pytest.raises(ValueError):
        sample_mittag_leffler_wait(0.5, 0.0, 0)


def test_mittag_leffler_wait_tail():
    mu = 0.6
    w = np.sort(sample_mittag_leffler_wait(mu, 0.6 * math.gamma(mu), RngSeed(6), size=1_000_000))
    ts = np.geomspace(1e2, 1e4, 20)
    surv = 1 - np.searchsorted(w, ts, side="right") / len(w)
    slope = linregress(np.log(ts), np.log(surv)).slope
    assert abs(slope + mu) < 0.1


def test_fpp_event_times():
    fp = FppParams(0.6, 0.9)
    times = sample_fpp(fp, 100.0, RngSeed(2))
    assert np.all(np.diff(times) > 0)
    assert times.size == 0 or (times[0] > 0 and times[-1] <= 100.0)
    again = sample_fpp(fp, 100.0, RngSeed(2))
    assert np.array_equal(times, again)
    with pytest.raises(ValueError):
        sample_fpp(fp, 0.0, 1)


def test_poisson_special_case():
    fp = FppParams(1.0, 2.0)
    n = fpp_counts(fp, 50.0, 100_000, 5)
    se = n.std(ddof=1) / math.sqrt(len(n))
    assert abs(n.mean() - 100.0) < 3 * se
    assert n.var() == pytest.approx(100.0, rel=0.03)


def test_fpp_mean_count():
    fp = FppParams.from_gbp2(0.8, 0.6)
    n = fpp_counts(fp, 1000.0, 100_000, 9)
    assert n.mean() / expected_fpp_count(fp, 1000.0) == pytest.approx(1.0, abs=0.05)


def test_fpp_counts_match_mgf():
    fp = FppParams.from_gbp2(0.8, 0.6)
    t = 200.0
    n = fpp_counts(fp, t, 100_000, 10, workers=3)
    for s in (0.1 / t**fp.mu, 0.5 / t**fp.mu):
        emp = np.exp(s * n).mean()
        assert emp == pytest.approx(fpp_mgf(fp.mu, fp.nu, s, t), rel=0.02)


def test_fpp_counts_worker_invariance():
    fp = FppParams(0.7, 1.1)
    a = fpp_counts(fp, 30.0, 3000, 4, chunk=500)
    b = fpp_counts(fp, 30.0, 3000, 4, chunk=500, workers=4)
    assert np.array_equal(a, b)
