"""Accuracy oracles.

The abstract :class:`Evaluator` is the pluggable interface the search engine
talks to. :class:`SyntheticSupernet` simulates shared-weight evaluation: a
deterministic ground-truth function plus an affine distortion and a
checkpoint-seeded noise field, so that ranking disagreement between two
checkpoints can be reproduced and calibrated at desk scale.
:class:`CostModel` prices architectures in multiply-add operations for
hardware-constrained selection.
"""

from __future__ import annotations

import abc
import dataclasses
import hashlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import ndtri

from .metrics import kendall_tau
from .search_space import Architecture, SearchSpaceSpec
from .seeding import seed_stream


class Evaluator(abc.ABC):
    """Maps an architecture to an accuracy in [0, 1].

    Implementations must be pure given their internal state: repeated calls
    with the same architecture return identical values, and concurrent calls
    are safe.
    """

    #: advisory wall-clock cost of one evaluation, seconds
    cost_seconds: float = 0.0

    @abc.abstractmethod
    def evaluate(self, arch: Architecture) -> float:
        raise NotImplementedError

    def evaluate_many(self, archs: Sequence[Architecture]) -> np.ndarray:
        return np.array([self.evaluate(a) for a in archs], dtype=np.float64)

    def advanced(self) -> "Evaluator":
        """A copy of this evaluator advanced to a fresh checkpoint."""
        raise NotImplementedError(f"{type(self).__name__} has no notion of checkpoints")


def _choice_matrix(archs: Sequence[Architecture]) -> np.ndarray:
    return np.asarray([a.choices for a in archs], dtype=np.int64).reshape(len(archs), -1)


@dataclass(frozen=True)
class GroundTruthParams:
    """Deterministic ground-truth accuracy surface: a base offset, additive
    per-cell utilities and weak pairwise interactions."""

    base: float
    cell_utility: np.ndarray  # (L, O)
    pair_strength: float
    interaction_seed: int

    def __post_init__(self) -> None:
        u = np.asarray(self.cell_utility, dtype=np.float64)
        if u.ndim != 2:
            raise ValueError(f"cell_utility must be an LxO table, got shape {u.shape}")
        u = u.copy()
        u.setflags(write=False)
        object.__setattr__(self, "cell_utility", u)

    @property
    def num_layers(self) -> int:
        return self.cell_utility.shape[0]

    @property
    def choices_per_layer(self) -> int:
        return self.cell_utility.shape[1]

    @classmethod
    def random(
        cls,
        spec: SearchSpaceSpec,
        seed: int,
        base: float = 0.8,
        utility_amplitude: float = 0.01,
        pair_strength: float = 0.0005,
    ) -> "GroundTruthParams":
        """Utilities drawn uniformly from +-utility_amplitude; pairwise
        interaction terms derive from the same seed."""
        rng = np.random.default_rng(seed_stream(seed, "cell-utility"))
        u = rng.uniform(-utility_amplitude, utility_amplitude, (spec.num_layers, spec.choices_per_layer))
        return cls(base, u, pair_strength, seed_stream(seed, "interactions"))


def _interaction_table(truth: GroundTruthParams) -> np.ndarray:
    """Pairwise term v[l, l', o, o'], fixed by the interaction seed."""
    L, O = truth.cell_utility.shape
    rng = np.random.default_rng(truth.interaction_seed)
    return rng.uniform(-1.0, 1.0, (L, L, O, O))


def ground_truth_many(choice_matrix: np.ndarray, truth: GroundTruthParams) -> np.ndarray:
    """Vectorized ground truth for an (n, L) matrix of choice indices."""
    c = np.asarray(choice_matrix, dtype=np.int64)
    L = truth.num_layers
    if c.ndim != 2 or c.shape[1] != L:
        raise ValueError(f"expected an (n, {L}) choice matrix, got shape {c.shape}")
    z = truth.base + truth.cell_utility[np.arange(L), c].sum(axis=1)
    if truth.pair_strength != 0.0:
        v = _interaction_table(truth)
        for l in range(L):
            for lp in range(l + 1, L):
                z = z + truth.pair_strength * v[l, lp][c[:, l], c[:, lp]]
    return np.clip(z, 0.0, 1.0)


def ground_truth(arch: Architecture, truth: GroundTruthParams) -> float:
    """Ground-truth accuracy of one architecture, clamped to [0, 1]."""
    return float(ground_truth_many(_choice_matrix([arch]), truth)[0])


def _noise_field(choice_matrix: np.ndarray, checkpoint_seed: int, sigma: float) -> np.ndarray:
    """Zero-mean Gaussian noise, a pure function of (architecture, checkpoint):
    each architecture hashes to a uniform variate that is pushed through the
    inverse normal CDF."""
    if sigma == 0.0:
        return np.zeros(len(choice_matrix), dtype=np.float64)
    key = int(checkpoint_seed).to_bytes(8, "little", signed=False)
    raw = np.empty(len(choice_matrix), dtype=np.uint64)
    for i, row in enumerate(np.asarray(choice_matrix, dtype=np.uint16)):
        digest = hashlib.blake2b(row.tobytes(), key=key, digest_size=8).digest()
        raw[i] = int.from_bytes(digest, "little")
    uniform = (raw.astype(np.float64) + 0.5) / 2.0**64
    return sigma * ndtri(uniform)


@dataclass(frozen=True)
class SyntheticSupernet(Evaluator):
    """Simulated shared-weight evaluation: accuracy = a * truth + b + noise,
    where the noise field is redrawn whenever the checkpoint advances."""

    truth: GroundTruthParams
    a: float = 0.95
    b: float = 0.05
    sigma: float = 0.0065
    checkpoint_seed: int = 0

    cost_seconds: float = 0.0

    def __post_init__(self) -> None:
        if self.sigma < 0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")

    def evaluate_many(self, archs: Sequence[Architecture]) -> np.ndarray:
        return self.evaluate_matrix(_choice_matrix(archs))

    def evaluate_matrix(self, choice_matrix: np.ndarray) -> np.ndarray:
        z = ground_truth_many(choice_matrix, self.truth)
        eps = _noise_field(choice_matrix, self.checkpoint_seed, self.sigma)
        return np.clip(self.a * z + self.b + eps, 0.0, 1.0)

    def evaluate(self, arch: Architecture) -> float:
        return float(self.evaluate_many([arch])[0])

    def advanced(self) -> "SyntheticSupernet":
        return dataclasses.replace(
            self, checkpoint_seed=seed_stream(self.checkpoint_seed, "checkpoint-advance")
        )


def advance_checkpoint(supernet: SyntheticSupernet) -> SyntheticSupernet:
    """A copy of the simulator with a fresh, independently seeded noise
    field; ground truth and affine coefficients unchanged."""
    return supernet.advanced()


def sample_architectures(spec: SearchSpaceSpec, n: int, seed: int) -> list[Architecture]:
    """n distinct architectures drawn uniformly from the whole space."""
    if n > spec.size:
        raise ValueError(f"cannot sample {n} distinct architectures from a space of {spec.size}")
    rng = np.random.default_rng(seed)
    seen: set[tuple[int, ...]] = set()
    out: list[Architecture] = []
    while len(out) < n:
        batch = rng.integers(0, spec.choices_per_layer, (n, spec.num_layers))
        for row in batch:
            key = tuple(int(x) for x in row)
            if key not in seen:
                seen.add(key)
                out.append(Architecture(key))
                if len(out) == n:
                    break
    return out


def calibrate_sigma(
    supernet: SyntheticSupernet,
    spec: SearchSpaceSpec,
    n_archs: int = 10_000,
    seed: int = 0,
    target: tuple[float, float] = (0.50, 0.60),
    max_iterations: int = 60,
) -> tuple[float, float]:
    """Bisect the noise scale until the Kendall-tau between two checkpoints'
    rankings of ``n_archs`` sampled architectures lands in ``target``.

    Returns (sigma, achieved tau). Larger sigma always lowers the
    two-checkpoint agreement, so plain bisection converges.
    """
    lo_t, hi_t = target
    if not 0.0 < lo_t < hi_t < 1.0:
        raise ValueError(f"target window must satisfy 0 < lo < hi < 1, got {target}")
    archs = sample_architectures(spec, n_archs, seed_stream(seed, "calibration-sample"))
    matrix = _choice_matrix(archs)
    other = supernet.advanced()

    def tau_at(sigma: float) -> float:
        s1 = dataclasses.replace(supernet, sigma=sigma)
        s2 = dataclasses.replace(other, sigma=sigma)
        return kendall_tau(s1.evaluate_matrix(matrix), s2.evaluate_matrix(matrix))

    z = ground_truth_many(matrix, supernet.truth)
    spread = float(z.std())
    if spread == 0.0:
        raise ValueError("ground truth is constant; two-checkpoint tau cannot be calibrated")

    lo, hi = 0.0, spread
    while tau_at(hi) > hi_t:
        hi *= 2.0
        if hi > 1e3 * spread:
            raise RuntimeError("calibration failed to bracket the target window")
    sigma, tau = hi, tau_at(hi)
    for _ in range(max_iterations):
        mid = 0.5 * (lo + hi)
        tau = tau_at(mid)
        sigma = mid
        if lo_t <= tau <= hi_t:
            break
        if tau > hi_t:
            lo = mid
        else:
            hi = mid
    else:
        raise RuntimeError(
            f"calibration did not reach tau in [{lo_t}, {hi_t}] after {max_iterations} "
            f"iterations; last sigma={sigma:.6g}, tau={tau:.4f}"
        )
    return sigma, tau


@dataclass(frozen=True)
class CostModel:
    """Multiply-add cost: a fixed stem/head cost plus one table entry per
    cell choice."""

    fixed_cost: float
    cell_cost: np.ndarray  # (L, O)

    def __post_init__(self) -> None:
        table = np.asarray(self.cell_cost, dtype=np.float64)
        if table.ndim != 2:
            raise ValueError(f"cell_cost must be an LxO table, got shape {table.shape}")
        if self.fixed_cost < 0 or (table < 0).any():
            raise ValueError("costs must be non-negative")
        table = table.copy()
        table.setflags(write=False)
        object.__setattr__(self, "cell_cost", table)


# Relative multiply-add weight of each (kernel, expansion) cell choice, in
# DEFAULT_CHOICE_LABELS order; expansion dominates, kernel adds quadratically.
_CHOICE_COST_WEIGHTS = np.array([1.0, 1.9, 1.15, 2.2, 1.4, 2.6])
# depth profile: later stages carry more channels, early ones more resolution
_DEPTH_COST_PROFILE = (0.8, 1.25)


def bundled_cost_model(spec: SearchSpaceSpec) -> CostModel:
    """A representative cost table scaled so that the all-max architecture
    lands near 600M multiply-adds and typical ones near 400M (for the default
    19-cell space)."""
    L, O = spec.num_layers, spec.choices_per_layer
    weights = _CHOICE_COST_WEIGHTS
    if O != len(weights):
        # fall back to a smooth ramp with the same max/mean ratio
        weights = np.linspace(1.0, 2.6, O)
    depth = np.linspace(_DEPTH_COST_PROFILE[0], _DEPTH_COST_PROFILE[1], L)
    depth = depth / depth.mean()
    fixed = 16.9e6
    per_unit = (600e6 - fixed) / (L * weights.max())
    table = np.rint(per_unit * depth[:, None] * weights[None, :])
    return CostModel(fixed, table)


def flops_many(choice_matrix: np.ndarray, cost_model: CostModel) -> np.ndarray:
    """Vectorized multiply-add counts for an (n, L) choice matrix."""
    c = np.asarray(choice_matrix, dtype=np.int64)
    L = cost_model.cell_cost.shape[0]
    if c.ndim != 2 or c.shape[1] != L:
        raise ValueError(f"expected an (n, {L}) choice matrix, got shape {c.shape}")
    return cost_model.fixed_cost + cost_model.cell_cost[np.arange(L), c].sum(axis=1)


def flops(arch: Architecture, cost_model: CostModel) -> float:
    """Multiply-add count of one architecture."""
    return float(flops_many(_choice_matrix([arch]), cost_model)[0])
