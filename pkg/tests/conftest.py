"""Shared fixtures and independent oracles for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

# Published 8-architecture comparison table: ground-truth accuracy vs the
# same sub-networks sampled from two super-network snapshots.
ACC_TRUE = (85.78, 85.76, 85.59, 85.48, 85.32, 85.28, 84.98, 84.60)
ACC_SNAPSHOT_A = (81.59, 81.56, 81.73, 81.95, 81.70, 81.64, 81.60, 81.53)
ACC_SNAPSHOT_B = (81.20, 81.41, 81.55, 81.67, 81.37, 81.15, 81.58, 81.46)
TAU_TRUE_VS_A = 0.2143
TAU_TRUE_VS_B = -0.1429


def tau_brute(a, b) -> float:
    """O(n^2) tau-b by direct pair counting; the reference for kendall_tau."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = len(a)
    num = 0
    ties_a = 0
    ties_b = 0
    for i in range(n):
        for j in range(i + 1, n):
            sa = np.sign(a[i] - a[j])
            sb = np.sign(b[i] - b[j])
            num += sa * sb
            if sa == 0:
                ties_a += 1
            if sb == 0:
                ties_b += 1
    n0 = n * (n - 1) / 2
    denom = np.sqrt((n0 - ties_a) * (n0 - ties_b))
    return float(num / denom)


def power_iteration_largest_eigenvalue(matrix, iterations: int = 200, seed: int = 0) -> float:
    """Largest-magnitude eigenvalue of a symmetric operator by power iteration."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(matrix.shape[0])
    v /= np.linalg.norm(v)
    value = 0.0
    for _ in range(iterations):
        w = matrix @ v
        norm = np.linalg.norm(w)
        if norm == 0:
            return 0.0
        value = float(v @ w)
        v = w / norm
    return value


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240601)
