"""Chain-styled search spaces.

An architecture is a length-L vector of per-cell choice indices. A subspace
restricts the searchable region of a space to some free cells, fixes the
rest, and may collapse previously searched cells into "super-cells" whose
options are a handful of preserved sub-architectures. Node features are
binary-reflected Gray codes of the fully materialized architecture.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence, Union

import numpy as np

# A searchable slot is addressed either by its layer index (free cell) or by
# the tuple of layer indices it spans (super-cell).
SlotKey = Union[int, tuple[int, ...]]

#: kernel {3,5,7} x expansion {3,6} labels of the default 6-choice cell
DEFAULT_CHOICE_LABELS = ("k3_e3", "k3_e6", "k5_e3", "k5_e6", "k7_e3", "k7_e6")


@dataclass(frozen=True)
class SearchSpaceSpec:
    """A chain of ``num_layers`` cells, each picking one of
    ``choices_per_layer`` interchangeable operators."""

    num_layers: int
    choices_per_layer: int
    choice_labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.num_layers < 1:
            raise ValueError(f"num_layers must be >= 1, got {self.num_layers}")
        if self.choices_per_layer < 2:
            raise ValueError(
                f"choices_per_layer must be >= 2, got {self.choices_per_layer}"
            )
        if self.choice_labels is not None:
            labels = tuple(self.choice_labels)
            if len(labels) != self.choices_per_layer:
                raise ValueError(
                    f"expected {self.choices_per_layer} choice labels, got {len(labels)}"
                )
            object.__setattr__(self, "choice_labels", labels)

    @property
    def bits_per_cell(self) -> int:
        """Number of Gray-code bits needed per cell: ceil(log2 O)."""
        return max(1, (self.choices_per_layer - 1).bit_length())

    @property
    def feature_dim(self) -> int:
        return self.num_layers * self.bits_per_cell

    @property
    def size(self) -> int:
        return self.choices_per_layer**self.num_layers

    def validate_architecture(self, arch: "Architecture") -> None:
        if len(arch.choices) != self.num_layers:
            raise ValueError(
                f"architecture has {len(arch.choices)} cells, space has {self.num_layers}"
            )
        for pos, c in enumerate(arch.choices):
            if not 0 <= c < self.choices_per_layer:
                raise ValueError(f"choice {c} at cell {pos} is outside [0, {self.choices_per_layer})")


def default_space() -> SearchSpaceSpec:
    """The default 19-cell, 6-choice space of inverted-residual cells."""
    return SearchSpaceSpec(19, 6, DEFAULT_CHOICE_LABELS)


@dataclass(frozen=True)
class Architecture:
    """One point of the space: a per-cell choice index vector."""

    choices: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "choices", tuple(int(c) for c in self.choices))

    def __len__(self) -> int:
        return len(self.choices)

    def to_text(self) -> str:
        """Comma-joined decimal choice indices, e.g. ``"1,3,0,5"``."""
        return ",".join(str(c) for c in self.choices)

    @classmethod
    def from_text(cls, text: str) -> "Architecture":
        try:
            return cls(tuple(int(tok) for tok in text.strip().split(",")))
        except ValueError as exc:
            raise ValueError(f"malformed architecture string {text!r}") from exc


def default_initial_architecture(spec: SearchSpaceSpec) -> Architecture:
    """All cells at the kernel-3 / expansion-6 choice when that label exists,
    otherwise choice 0."""
    choice = 0
    if spec.choice_labels and "k3_e6" in spec.choice_labels:
        choice = spec.choice_labels.index("k3_e6")
    return Architecture((choice,) * spec.num_layers)


@dataclass(frozen=True)
class SuperCell:
    """A block of already-searched cells collapsed into a single searchable
    position whose K options are preserved sub-architectures."""

    positions: tuple[int, ...]
    candidates: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        positions = tuple(int(p) for p in self.positions)
        candidates = tuple(tuple(int(c) for c in cand) for cand in self.candidates)
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "candidates", candidates)
        if not positions:
            raise ValueError("super-cell needs at least one position")
        if list(positions) != sorted(set(positions)):
            raise ValueError(f"super-cell positions must be strictly increasing, got {positions}")
        if not candidates:
            raise ValueError("super-cell needs at least one candidate")
        for cand in candidates:
            if len(cand) != len(positions):
                raise ValueError(
                    f"candidate {cand} does not cover the {len(positions)} super-cell positions"
                )
        if len(set(candidates)) != len(candidates):
            raise ValueError("super-cell candidates must be distinct")

    @property
    def num_candidates(self) -> int:
        return len(self.candidates)


@dataclass(frozen=True)
class Slot:
    """One searchable position of a subspace in canonical order."""

    key: SlotKey
    radix: int
    super_cell: SuperCell | None = None


@dataclass(frozen=True)
class Subspace:
    """The searchable region of one round: free cells, fixed cells and
    super-cells partition the layer range."""

    spec: SearchSpaceSpec
    free_positions: tuple[int, ...]
    fixed: Mapping[int, int]
    super_cells: tuple[SuperCell, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "free_positions", tuple(sorted(int(p) for p in self.free_positions)))
        object.__setattr__(self, "fixed", dict(self.fixed))
        object.__setattr__(self, "super_cells", tuple(self.super_cells))

        claimed: list[int] = list(self.free_positions) + list(self.fixed)
        for sc in self.super_cells:
            claimed.extend(sc.positions)
        expected = list(range(self.spec.num_layers))
        if sorted(claimed) != expected:
            raise ValueError(
                "free, fixed and super-cell positions must partition the layer range "
                f"[0, {self.spec.num_layers}); got {sorted(claimed)}"
            )
        O = self.spec.choices_per_layer
        for pos, c in self.fixed.items():
            if not 0 <= c < O:
                raise ValueError(f"fixed choice {c} at cell {pos} is outside [0, {O})")
        for sc in self.super_cells:
            for cand in sc.candidates:
                for c in cand:
                    if not 0 <= c < O:
                        raise ValueError(f"super-cell candidate entry {c} is outside [0, {O})")

    @cached_property
    def slots(self) -> tuple[Slot, ...]:
        """Searchable slots sorted by their leading layer index."""
        slots = [Slot(p, self.spec.choices_per_layer) for p in self.free_positions]
        slots += [Slot(sc.positions, sc.num_candidates, sc) for sc in self.super_cells]
        slots.sort(key=lambda s: s.key if isinstance(s.key, int) else s.key[0])
        return tuple(slots)

    @property
    def node_count(self) -> int:
        n = 1
        for slot in self.slots:
            n *= slot.radix
        return n

    @cached_property
    def _place_weights(self) -> tuple[int, ...]:
        # big-endian mixed radix: first slot is most significant
        weights = [1] * len(self.slots)
        for j in range(len(self.slots) - 2, -1, -1):
            weights[j] = weights[j + 1] * self.slots[j + 1].radix
        return tuple(weights)

    def digits_of(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.node_count:
            raise ValueError(f"node index {index} is outside [0, {self.node_count})")
        return tuple(
            (index // w) % slot.radix for slot, w in zip(self.slots, self._place_weights)
        )

    def index_of(self, digits: Sequence[int]) -> int:
        index = 0
        for slot, w, d in zip(self.slots, self._place_weights, digits):
            if not 0 <= d < slot.radix:
                raise ValueError(f"digit {d} for slot {slot.key} is outside [0, {slot.radix})")
            index += int(d) * w
        return index

    def assignment_from_digits(self, digits: Sequence[int]) -> dict[SlotKey, int]:
        return {slot.key: int(d) for slot, d in zip(self.slots, digits)}

    def digits_from_assignment(self, assignment: Mapping[SlotKey, int]) -> tuple[int, ...]:
        digits = []
        for slot in self.slots:
            if slot.key not in assignment:
                raise ValueError(f"assignment is missing slot {slot.key}")
            digits.append(int(assignment[slot.key]))
        return tuple(digits)


def full_subspace(spec: SearchSpaceSpec) -> Subspace:
    """The whole space as one subspace (every cell free)."""
    return Subspace(spec, tuple(range(spec.num_layers)), {})


@dataclass(frozen=True)
class SegmentPlan:
    """Disjoint layer-index sets searched in successive rounds."""

    segments: tuple[tuple[int, ...], ...]
    num_layers: int

    def __post_init__(self) -> None:
        segments = tuple(tuple(sorted(int(p) for p in seg)) for seg in self.segments)
        object.__setattr__(self, "segments", segments)
        flat = [p for seg in segments for p in seg]
        if sorted(flat) != list(range(self.num_layers)):
            raise ValueError(
                f"segments must be pairwise disjoint and cover [0, {self.num_layers}); got {segments}"
            )

    @property
    def num_rounds(self) -> int:
        return len(self.segments)


def make_segment_plan(spec: SearchSpaceSpec, sizes: Sequence[int]) -> SegmentPlan:
    """Contiguous segments of the given sizes, in layer order."""
    sizes = [int(s) for s in sizes]
    if sum(sizes) != spec.num_layers:
        raise ValueError(
            f"segment sizes {sizes} sum to {sum(sizes)}, but the space has {spec.num_layers} layers"
        )
    if any(s < 1 for s in sizes):
        raise ValueError(f"segment sizes must be positive, got {sizes}")
    segments = []
    start = 0
    for s in sizes:
        segments.append(tuple(range(start, start + s)))
        start += s
    return SegmentPlan(tuple(segments), spec.num_layers)


def gray_code_table(num_codes: int, bits: int) -> np.ndarray:
    """First ``num_codes`` binary-reflected Gray codes as a (num_codes, bits)
    0/1 matrix, most significant bit first."""
    if num_codes > 2**bits:
        raise ValueError(f"{bits} bits cannot encode {num_codes} codes")
    codes = np.arange(num_codes, dtype=np.int64)
    gray = codes ^ (codes >> 1)
    shifts = np.arange(bits - 1, -1, -1, dtype=np.int64)
    return ((gray[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


def gray_encode(arch: Architecture, spec: SearchSpaceSpec) -> np.ndarray:
    """Gray-code bit vector of an architecture, one ``bits_per_cell`` block
    per cell, concatenated in layer order."""
    spec.validate_architecture(arch)
    table = gray_code_table(spec.choices_per_layer, spec.bits_per_cell)
    return table[np.asarray(arch.choices, dtype=np.int64)].reshape(-1)


def cell_hamming(a: Architecture, b: Architecture) -> int:
    """Number of cells at which two architectures pick different choices."""
    if len(a.choices) != len(b.choices):
        raise ValueError(f"length mismatch: {len(a.choices)} vs {len(b.choices)}")
    return sum(x != y for x, y in zip(a.choices, b.choices))


def sample_uniform(subspace: Subspace, m: int, seed: int) -> list[dict[SlotKey, int]]:
    """``m`` distinct node assignments drawn uniformly without replacement."""
    n = subspace.node_count
    if m > n:
        raise ValueError(f"cannot sample {m} distinct nodes from a subspace of {n} nodes")
    if m < 0:
        raise ValueError(f"sample count must be non-negative, got {m}")
    rng = np.random.default_rng(seed)
    indices = rng.choice(n, size=m, replace=False)
    return [subspace.assignment_from_digits(subspace.digits_of(int(i))) for i in indices]


def materialize(subspace: Subspace, assignment: Mapping[SlotKey, int]) -> Architecture:
    """Expand an assignment over a subspace's slots into a full architecture:
    fixed choices copied, free choices inserted, super-cell picks expanded to
    their candidate's sub-assignment."""
    L = subspace.spec.num_layers
    choices: list[int | None] = [None] * L
    for pos, c in subspace.fixed.items():
        choices[pos] = c
    for slot in subspace.slots:
        if slot.key not in assignment:
            raise ValueError(f"assignment is missing slot {slot.key}")
        pick = int(assignment[slot.key])
        if not 0 <= pick < slot.radix:
            raise ValueError(f"assignment {pick} for slot {slot.key} is outside [0, {slot.radix})")
        if slot.super_cell is None:
            choices[slot.key] = pick  # type: ignore[index]
        else:
            for pos, c in zip(slot.super_cell.positions, slot.super_cell.candidates[pick]):
                choices[pos] = c
    return Architecture(tuple(choices))  # type: ignore[arg-type]


def extract_assignment(subspace: Subspace, arch: Architecture) -> dict[SlotKey, int]:
    """Inverse of :func:`materialize` for architectures consistent with the
    subspace; raises if the architecture contradicts fixed cells or picks a
    sub-assignment no super-cell candidate provides."""
    subspace.spec.validate_architecture(arch)
    for pos, c in subspace.fixed.items():
        if arch.choices[pos] != c:
            raise ValueError(f"architecture choice {arch.choices[pos]} at fixed cell {pos} != {c}")
    assignment: dict[SlotKey, int] = {}
    for slot in subspace.slots:
        if slot.super_cell is None:
            assignment[slot.key] = arch.choices[slot.key]  # type: ignore[index]
        else:
            sub = tuple(arch.choices[p] for p in slot.super_cell.positions)
            try:
                assignment[slot.key] = slot.super_cell.candidates.index(sub)
            except ValueError:
                raise ValueError(
                    f"sub-assignment {sub} at cells {slot.super_cell.positions} "
                    "matches no super-cell candidate"
                ) from None
    return assignment
