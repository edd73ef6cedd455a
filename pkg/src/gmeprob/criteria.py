"""Density-matrix-element criteria Q_0 and Q_m for genuine multipartite entanglement.

Both criteria are nonpositive on every biseparable state, so a strictly
positive value certifies GME.  Each criterion reads only a handful of
matrix elements:

* ``Q_0 = |rho[0..0, 1..1]| - sum_{A|B} sqrt(rho[a, a] rho[abar, abar])``
  with one term per unordered bipartition ``A|B`` (``a`` has ones exactly on
  ``A``, ``abar`` on ``B``).
* ``Q_m = sum_{(alpha, beta)} (|rho[alpha, beta]| - sqrt(rho[alpha & beta, alpha & beta]
  rho[alpha | beta, alpha | beta])) - m (n - m - 1) sum_{|alpha| = m} rho[alpha, alpha]``
  where the first sum runs over *ordered* pairs of distinct weight-``m``
  masks sharing ``m - 1`` qubits.

The square-root terms are the two-copy expressions
``<x| P^dagger (rho (x) rho) P |x>`` with the swap operator already applied to
the product basis vector; :mod:`gmeprob.oracle` evaluates the literal form.
Evaluation is organised around an :class:`ElementPlan`, the list of index
tuples a criterion touches, so the same plan drives dense matrices and the
batched pure-state path used by the estimator.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np

from .states import (
    check_local_unitary,
    check_qubits,
    complement,
    num_qubits,
    apply_local_unitary,
    weight_indices,
)

#: Strict-positivity threshold for counting a value as a detection.
DETECTION_THRESHOLD = 1e-10

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True, order=True)
class Criterion:
    """``Criterion(0)`` is Q_0; ``Criterion(m)`` with ``m >= 1`` is Q_m."""

    order: int

    def __post_init__(self):
        if isinstance(self.order, bool) or not isinstance(self.order, (int, np.integer)) or self.order < 0:
            raise ValueError(f"criterion order must be a nonnegative integer, got {self.order!r}")
        object.__setattr__(self, "order", int(self.order))

    @classmethod
    def parse(cls, text: str) -> "Criterion":
        match = re.fullmatch(r"[qQ](\d+)", text.strip())
        if not match:
            raise ValueError(f"unknown criterion {text!r}; expected q0, q1, q2, ...")
        return cls(int(match.group(1)))

    def check(self, n: int) -> None:
        if self.order > n // 2:
            raise ValueError(f"Q{self.order} requires 1 <= m <= floor(n/2) = {n // 2} for n = {n}")

    def __str__(self):
        return f"q{self.order}"


Q0 = Criterion(0)


@dataclass(frozen=True)
class CriterionResult:
    value: float
    detected: bool

    @classmethod
    def from_value(cls, value: float, threshold: float = DETECTION_THRESHOLD) -> "CriterionResult":
        return cls(float(value), bool(value > threshold))


# -- bipartitions and pair sets ---------------------------------------------

def bipartitions(n: int) -> list[int]:
    """Canonical masks of the ``2**(n-1) - 1`` unordered bipartitions; each contains qubit 1."""
    n = check_qubits(n)
    top = 1 << (n - 1)
    return [top | rest for rest in range(top - 1)]


def ordered_pairs(n: int, m: int) -> list[tuple[int, int]]:
    """Ordered pairs of weight-``m`` masks that differ by moving one excitation."""
    masks = weight_indices(n, m)
    return [
        (a, b)
        for a in masks
        for b in masks
        if a != b and bin(a & b).count("1") == m - 1
    ]


@dataclass(frozen=True)
class ElementPlan:
    """Index tuples read by a criterion.

    value = sum |rho[off_rows, off_cols]|
            - sum sqrt(rho[root_left] * rho[root_right])   (diagonal elements)
            - linear_coef * sum rho[linear]                  (diagonal elements)
    """

    n: int
    off_rows: np.ndarray
    off_cols: np.ndarray
    root_left: np.ndarray
    root_right: np.ndarray
    linear: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.intp))
    linear_coef: float = 0.0

    def evaluate(
        self,
        off_abs: Callable[[np.ndarray, np.ndarray], np.ndarray],
        diag: Callable[[np.ndarray], np.ndarray],
    ) -> np.ndarray:
        """Evaluate with accessor callbacks; reductions run over the last axis."""
        value = off_abs(self.off_rows, self.off_cols).sum(axis=-1)
        prod = diag(self.root_left) * diag(self.root_right)
        value = value - np.sqrt(np.maximum(prod, 0.0)).sum(axis=-1)
        if self.linear_coef:
            value = value - self.linear_coef * diag(self.linear).sum(axis=-1)
        return value

    def elements(self) -> list[tuple[int, int]]:
        seen: dict[tuple[int, int], None] = {}
        for r, c in zip(self.off_rows.tolist(), self.off_cols.tolist()):
            seen[(r, c)] = None
        for idx in np.concatenate([self.root_left, self.root_right, self.linear]).tolist():
            seen[(idx, idx)] = None
        return list(seen)


def _arr(values: Iterable[int]) -> np.ndarray:
    return np.asarray(list(values), dtype=np.intp)


@lru_cache(maxsize=None)
def plan_for(criterion: Criterion, n: int) -> ElementPlan:
    n = check_qubits(n)
    criterion.check(n)
    full = (1 << n) - 1
    if criterion.order == 0:
        parts = bipartitions(n)
        return ElementPlan(
            n=n,
            off_rows=_arr([0]),
            off_cols=_arr([full]),
            root_left=_arr(parts),
            root_right=_arr(complement(a, n) for a in parts),
        )
    m = criterion.order
    pairs = ordered_pairs(n, m)
    coef = m * (n - m - 1)
    return ElementPlan(
        n=n,
        off_rows=_arr(a for a, _ in pairs),
        off_cols=_arr(b for _, b in pairs),
        root_left=_arr(a & b for a, b in pairs),
        root_right=_arr(a | b for a, b in pairs),
        # coefficient is zero only for Q_1 on two qubits
        linear=_arr(weight_indices(n, m) if coef else []),
        linear_coef=float(coef),
    )


def _dense_value(rho: np.ndarray, criterion: Criterion) -> float:
    rho = np.asarray(rho)
    n = num_qubits(rho)
    if rho.shape != (1 << n, 1 << n):
        raise ValueError(f"expected a square 2**n matrix, got shape {rho.shape}")
    plan = plan_for(criterion, n)
    value = plan.evaluate(
        lambda r, c: np.abs(rho[r, c]),
        lambda i: rho[i, i].real,
    )
    return float(value)


def eval_criterion(rho: np.ndarray, criterion: Criterion, threshold: float = DETECTION_THRESHOLD) -> CriterionResult:
    return CriterionResult.from_value(_dense_value(rho, criterion), threshold)


def eval_q0(rho: np.ndarray, threshold: float = DETECTION_THRESHOLD) -> CriterionResult:
    return eval_criterion(rho, Q0, threshold)


def eval_qm(rho: np.ndarray, m: int, threshold: float = DETECTION_THRESHOLD) -> CriterionResult:
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 1:
        raise ValueError(f"Q_m needs an integer m >= 1, got {m!r}")
    return eval_criterion(rho, Criterion(m), threshold)


def required_elements(criterion: Criterion, n: int) -> list[tuple[int, int]]:
    """Density-matrix elements ``(row, col)`` the reduced formula reads, without duplicates.

    Off-diagonal elements come first, in evaluation order, followed by
    diagonal elements.
    """
    return plan_for(criterion, n).elements()


# -- measurement bases and detectors ----------------------------------------

class Basis:
    """Fixed local rotation applied to the state before a criterion is evaluated."""

    __slots__ = ("name", "blocks")

    def __init__(self, name: str, blocks: np.ndarray | None = None):
        self.name = name
        self.blocks = None if blocks is None else check_local_unitary(blocks).copy()
        if self.blocks is not None:
            self.blocks.setflags(write=False)

    @classmethod
    def fixed(cls, blocks: np.ndarray) -> "Basis":
        return cls("fixed", blocks)

    @classmethod
    def parse(cls, text: str) -> "Basis":
        key = text.strip().lower()
        if key in ("comp", "computational", "z"):
            return COMPUTATIONAL
        if key in ("hadamard", "had", "x"):
            return HADAMARD_BASIS
        raise ValueError(f"unknown basis {text!r}; expected comp or hadamard")

    def local_unitary(self, n: int) -> np.ndarray | None:
        """Blocks to apply for an ``n``-qubit state, or None for the identity."""
        if self.name == "computational":
            return None
        if self.name == "hadamard":
            return np.broadcast_to(HADAMARD, (n, 2, 2))
        return check_local_unitary(self.blocks, n)

    def _key(self):
        return (self.name, None if self.blocks is None else self.blocks.tobytes())

    def __eq__(self, other):
        return isinstance(other, Basis) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"Basis({self.name!r})"

    def __str__(self):
        return {"computational": "comp"}.get(self.name, self.name)


COMPUTATIONAL = Basis("computational")
HADAMARD_BASIS = Basis("hadamard")


class DetectorConfig:
    """Set of (criterion, basis) pairs combined by taking the maximum value."""

    def __init__(self, pairs: Iterable[tuple[Criterion, Basis]]):
        unique = dict.fromkeys((c, b) for c, b in pairs)
        if not unique:
            raise ValueError("detector needs at least one (criterion, basis) pair")
        for c, b in unique:
            if not isinstance(c, Criterion) or not isinstance(b, Basis):
                raise TypeError("detector pairs must be (Criterion, Basis)")
        self.pairs: tuple[tuple[Criterion, Basis], ...] = tuple(unique)

    @classmethod
    def product(cls, criteria: Iterable[Criterion], bases: Iterable[Basis]) -> "DetectorConfig":
        bases = list(bases)
        return cls((c, b) for c in criteria for b in bases)

    @classmethod
    def parse(cls, criteria: str, bases: str = "comp") -> "DetectorConfig":
        """Build from comma lists such as ``"q0,q1"`` and ``"comp,hadamard"``."""
        crits = [Criterion.parse(t) for t in criteria.split(",") if t.strip()]
        bs = [Basis.parse(t) for t in bases.split(",") if t.strip()]
        return cls.product(crits, bs)

    @property
    def criteria(self) -> tuple[Criterion, ...]:
        return tuple(dict.fromkeys(c for c, _ in self.pairs))

    @property
    def bases(self) -> tuple[Basis, ...]:
        return tuple(dict.fromkeys(b for _, b in self.pairs))

    def check(self, n: int) -> None:
        for c, b in self.pairs:
            c.check(n)
            b.local_unitary(n)

    def issubset(self, other: "DetectorConfig") -> bool:
        return set(self.pairs) <= set(other.pairs)

    def describe(self) -> dict:
        return {
            "criteria": ",".join(str(c) for c in self.criteria),
            "bases": ",".join(str(b) for b in self.bases),
            "pairs": [[str(c), str(b)] for c, b in self.pairs],
        }

    def __eq__(self, other):
        return isinstance(other, DetectorConfig) and set(self.pairs) == set(other.pairs)

    def __hash__(self):
        return hash(frozenset(self.pairs))

    def __len__(self):
        return len(self.pairs)

    def __repr__(self):
        inner = ", ".join(f"({c}, {b})" for c, b in self.pairs)
        return f"DetectorConfig([{inner}])"


def full_detector(n: int) -> DetectorConfig:
    """Every valid criterion in both the computational and Hadamard bases."""
    return DetectorConfig.product([Criterion(k) for k in range(n // 2 + 1)], [COMPUTATIONAL, HADAMARD_BASIS])


def eval_detector(rho: np.ndarray, det: DetectorConfig) -> float:
    """Maximum criterion value over the detector's (criterion, basis) pairs."""
    if not isinstance(det, DetectorConfig):
        det = DetectorConfig(det)
    rho = np.asarray(rho, dtype=complex)
    n = num_qubits(rho)
    det.check(n)
    rotated: dict[Basis, np.ndarray] = {}
    best = -np.inf
    for criterion, basis in det.pairs:
        if basis not in rotated:
            blocks = basis.local_unitary(n)
            rotated[basis] = rho if blocks is None else apply_local_unitary(rho, blocks)
        best = max(best, _dense_value(rotated[basis], criterion))
    return float(best)
