"""Haar-random local unitaries.

Single-qubit draws use the unit-quaternion construction: four independent
standard normals normalised to a point ``(a, b, c, d)`` on the 3-sphere give
``[[a + ib, c + id], [-c + id, a - ib]]``, which is Haar distributed on SU(2).
Global phases cancel in ``U rho U^dagger`` so SU(2) covers U(2).  (A
composite Euler-angle chart with an explicit Jacobian weight realises the
same measure; direct sampling makes the weight implicit.)

Randomness for Monte Carlo runs is counter-addressed: sample ``k`` under a
master seed always reads the same Philox counter blocks, one block of four
64-bit words per SU(2) factor, turned into four normals by Box-Muller.  Any
chunking or parallel schedule therefore reproduces the same unitaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .exceptions import CapabilityError
from .states import check_local_unitary

_WORDS_PER_SU2 = 4
_TWO_POW_53 = float(1 << 53)


def su2_from_normals(g: np.ndarray) -> np.ndarray:
    """Map normal 4-vectors of shape ``(..., 4)`` to SU(2) matrices ``(..., 2, 2)``."""
    g = np.asarray(g, dtype=float)
    g = g / np.linalg.norm(g, axis=-1, keepdims=True)
    a, b, c, d = np.moveaxis(g, -1, 0)
    u = np.empty(g.shape[:-1] + (2, 2), dtype=complex)
    u[..., 0, 0] = a + 1j * b
    u[..., 0, 1] = c + 1j * d
    u[..., 1, 0] = -c + 1j * d
    u[..., 1, 1] = a - 1j * b
    return u


def sample_su2(rng: np.random.Generator) -> np.ndarray:
    """One Haar-random SU(2) matrix drawn from ``rng``."""
    while True:
        g = rng.standard_normal(4)
        if np.any(g != 0.0):
            return su2_from_normals(g)


# -- counter-addressed normals ----------------------------------------------

def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ValueError(f"seed must be a nonnegative integer, got {seed!r}")
    return int(seed)


def counter_normals(seed: int, start: int, count: int, blocks: int) -> np.ndarray:
    """Standard normals for samples ``start .. start + count - 1``.

    Returns shape ``(count, blocks, 4)``; the values for sample ``k`` depend
    only on ``(seed, k, blocks)``.
    """
    seed = _check_seed(seed)
    if start < 0 or count < 0 or blocks < 1:
        raise ValueError("start and count must be nonnegative and blocks positive")
    bitgen = np.random.Philox(key=seed)
    bitgen.advance(start * blocks)
    raw = bitgen.random_raw(count * blocks * _WORDS_PER_SU2)
    u = ((raw >> np.uint64(11)).astype(float) + 0.5) / _TWO_POW_53
    u = u.reshape(count, blocks, 2, 2)
    radius = np.sqrt(-2.0 * np.log(u[..., 0]))
    angle = 2.0 * np.pi * u[..., 1]
    out = np.empty((count, blocks, 4))
    out[..., 0::2] = radius * np.cos(angle)
    out[..., 1::2] = radius * np.sin(angle)
    return out


@dataclass(frozen=True)
class SampleStream:
    """Random stream for one Monte Carlo sample: ``(master seed, sample index)``."""

    seed: int
    index: int

    def normals(self, blocks: int) -> np.ndarray:
        return counter_normals(self.seed, self.index, 1, blocks)[0]


# -- groups -----------------------------------------------------------------

class GroupMode(str, Enum):
    PRODUCT = "product"
    SYMMETRIC = "symmetric"
    FIXED = "fixed"


@dataclass(frozen=True)
class UnitaryGroup:
    """Local-unitary group integrated over.

    ``PRODUCT`` draws every qubit's block independently (SU(2)^n),
    ``SYMMETRIC`` draws one block and repeats it (U^{(x) n}), ``FIXED`` replays
    a user-supplied list, sample ``k`` taking element ``k``.
    """

    mode: GroupMode
    fixed: tuple[np.ndarray, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "mode", GroupMode(self.mode))
        if self.mode is GroupMode.FIXED:
            items = tuple(check_local_unitary(u).copy() for u in self.fixed)
            if not items:
                raise ValueError("fixed group needs at least one local unitary")
            object.__setattr__(self, "fixed", items)

    @classmethod
    def product(cls) -> "UnitaryGroup":
        return cls(GroupMode.PRODUCT)

    @classmethod
    def symmetric(cls) -> "UnitaryGroup":
        return cls(GroupMode.SYMMETRIC)

    @classmethod
    def from_list(cls, unitaries: Sequence[np.ndarray]) -> "UnitaryGroup":
        return cls(GroupMode.FIXED, tuple(unitaries))

    @classmethod
    def parse(cls, text: str) -> "UnitaryGroup":
        key = text.strip().lower()
        if key not in (GroupMode.PRODUCT.value, GroupMode.SYMMETRIC.value):
            raise ValueError(f"unknown group {text!r}; expected product or symmetric")
        return cls(GroupMode(key))

    def blocks_per_sample(self, n: int) -> int:
        return n if self.mode is GroupMode.PRODUCT else 1

    def check(self, n: int) -> None:
        if self.mode is GroupMode.FIXED:
            for u in self.fixed:
                check_local_unitary(u, n)

    def __str__(self):
        return self.mode.value


def sample_local_unitaries(group: UnitaryGroup, n: int, seed: int, start: int, count: int) -> np.ndarray:
    """Local unitaries for samples ``start .. start + count - 1``, shape ``(count, n, 2, 2)``."""
    if group.mode is GroupMode.FIXED:
        group.check(n)
        if start + count > len(group.fixed):
            raise CapabilityError(
                f"fixed group holds {len(group.fixed)} unitaries, sample {start + count - 1} requested"
            )
        return np.stack(group.fixed[start:start + count]) if count else np.empty((0, n, 2, 2), complex)
    g = counter_normals(seed, start, count, group.blocks_per_sample(n))
    u = su2_from_normals(g)
    if group.mode is GroupMode.SYMMETRIC:
        u = np.repeat(u, n, axis=1)
    return u


def sample_group(group: UnitaryGroup, n: int, stream: SampleStream | np.random.Generator) -> np.ndarray:
    """One local unitary ``(n, 2, 2)`` from ``group``.

    With a :class:`SampleStream` the draw is the one the estimator uses for
    that sample index.  A plain numpy ``Generator`` is also accepted for the
    product and symmetric groups.
    """
    if isinstance(stream, SampleStream):
        return sample_local_unitaries(group, n, stream.seed, stream.index, 1)[0]
    if group.mode is GroupMode.FIXED:
        raise TypeError("fixed groups are indexed by sample; pass a SampleStream")
    if group.mode is GroupMode.SYMMETRIC:
        return np.repeat(sample_su2(stream)[None], n, axis=0)
    return np.stack([sample_su2(stream) for _ in range(n)])
