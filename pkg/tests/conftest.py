"""Shared fixtures and independent reference implementations.

The brute-force pattern law below is written straight from the product
formulas, with no operator helpers, bit tricks or transforms from the
package, so it can serve as an oracle for the exact engine.
"""

import itertools
import math

import pytest

from fracbern.params import Process

ACCEPTANCE_LINES: list[str] = []


def _joint(kind, pr, ones):
    # P(all ones on the sorted tuple `ones`), from the gap-product formulas
    a = 2 * pr.H - 2
    if kind in (Process.GBP1, Process.GBP1STAR):
        pts = list(ones) if kind is Process.GBP1 else [0] + list(ones)
        if kind is Process.GBP1 and not pts:
            return 1.0
        prod = pr.p if kind is Process.GBP1 else 1.0
        for x, y in zip(pts, pts[1:]):
            prod *= pr.p + pr.c * (y - x) ** a
        return prod
    if kind is Process.GBP2:
        if not ones:
            return 1.0
        prod = pr.lam * pr.n**a
        for x, y in zip(ones, ones[1:]):
            prod *= pr.c * (y - x) ** a
        return prod
    prod = 1.0
    for x, y in zip([0] + list(ones), ones):
        prod *= pr.c * (y - x) ** a
    return prod


def oracle_pattern_prob(spec, pattern):
    """P(X_1..X_n = pattern) by inclusion-exclusion over the zeros."""
    ones = [i + 1 for i, b in enumerate(pattern) if b]
    zeros = [i + 1 for i, b in enumerate(pattern) if not b]
    terms = []
    for r in range(len(zeros) + 1):
        for extra in itertools.combinations(zeros, r):
            terms.append((-1) ** r * _joint(spec.process, spec.params, sorted(ones + list(extra))))
    return math.fsum(terms)


def all_patterns(n):
    return itertools.product((0, 1), repeat=n)


@pytest.fixture
def acceptance():
    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
