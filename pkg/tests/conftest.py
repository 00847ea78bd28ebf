"""Shared helpers for the test suite."""

from __future__ import annotations

import random

import pytest

from shiftlab.seeds import derive, label_path


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


def stream(*path: object) -> random.Random:
    """Deterministic per-test RNG; path keeps streams independent."""
    return random.Random(derive(0x5EED, *[label_path(str(p)) for p in path]))


def chi_square_p(counts, expected) -> float:
    """Upper-tail chi-square p-value via the regularized gamma function."""
    from scipy.stats import chi2

    stat = sum((c - e) ** 2 / e for c, e in zip(counts, expected))
    dof = len(counts) - 1
    return float(chi2.sf(stat, dof))
