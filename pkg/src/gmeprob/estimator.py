"""Monte Carlo estimates of a-priori GME detection probabilities.

For a state ``rho`` and a detector ``F`` (maximum of criteria over fixed
bases) the detection probability is the Haar measure of the set of local
unitaries ``U`` with ``F(U rho U^dagger) > 0``.  Samples are drawn with the
counter-addressed streams of :mod:`gmeprob.haar`, processed in fixed-size
chunks, and optionally spread over a thread pool; the hit count never depends
on the schedule.

For isotropic families ``(1-q)|psi><psi| + q I/2**n`` every element the
criteria read is ``(1-q) phi_a conj(phi_b) + delta_ab q/2**n`` with
``phi = U psi``, and only magnitudes enter.  The per-sample vectors ``|phi|``
are therefore all that is kept, which also makes noise sweeps cheap: the
same unitaries serve every grid point.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from statistics import NormalDist
from typing import Iterator, Sequence

import numpy as np

from .criteria import DETECTION_THRESHOLD, Basis, DetectorConfig, plan_for
from .haar import UnitaryGroup, sample_local_unitaries
from .states import (
    NoiseFamily,
    apply_blocks_to_vectors,
    check_noise,
    num_qubits,
    validate_density_matrix,
)

DEFAULT_SAMPLES = 200_000
CHUNK_SIZE = 8192


@dataclass(frozen=True)
class ProbabilityEstimate:
    p_hat: float
    ci_low: float
    ci_high: float
    n_samples: int
    n_hits: int
    seed: int
    threshold: float
    confidence: float = 0.95
    indicators: np.ndarray | None = field(default=None, compare=False, repr=False)

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("indicators")
        return out

    @property
    def half_width(self) -> float:
        return (self.ci_high - self.ci_low) / 2


@dataclass(frozen=True)
class SweepResult:
    points: tuple[tuple[float, ProbabilityEstimate], ...]

    @property
    def q_values(self) -> list[float]:
        return [q for q, _ in self.points]

    @property
    def estimates(self) -> list[ProbabilityEstimate]:
        return [e for _, e in self.points]

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)


def wilson_interval(hits: int, total: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if total < 1 or not 0 <= hits <= total:
        raise ValueError(f"need 0 <= hits <= total and total >= 1, got hits={hits}, total={total}")
    if not 0 < confidence < 1:
        raise ValueError(f"confidence must lie in (0, 1), got {confidence}")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = hits / total
    denom = 1 + z * z / total
    center = (p + z * z / (2 * total)) / denom
    half = z / denom * np.sqrt(p * (1 - p) / total + z * z / (4 * total * total))
    low = 0.0 if hits == 0 else max(0.0, center - half)
    high = 1.0 if hits == total else min(1.0, center + half)
    return float(low), float(high)


def _make_estimate(indicators: np.ndarray, seed: int, threshold: float, keep: bool) -> ProbabilityEstimate:
    total = int(indicators.size)
    hits = int(np.count_nonzero(indicators))
    low, high = wilson_interval(hits, total)
    return ProbabilityEstimate(
        p_hat=hits / total,
        ci_low=low,
        ci_high=high,
        n_samples=total,
        n_hits=hits,
        seed=seed,
        threshold=threshold,
        indicators=indicators if keep else None,
    )


# -- per-chunk evaluation ---------------------------------------------------

def _chunks(n_samples: int, chunk: int) -> Iterator[tuple[int, int]]:
    for start in range(0, n_samples, chunk):
        yield start, min(chunk, n_samples - start)


def _rotated_magnitudes(psi, group, bases, seed, start, count) -> dict[Basis, np.ndarray]:
    n = num_qubits(psi)
    u = sample_local_unitaries(group, n, seed, start, count)
    phi = apply_blocks_to_vectors(u, psi)
    out = {}
    for basis in bases:
        blocks = basis.local_unitary(n)
        rotated = phi if blocks is None else apply_blocks_to_vectors(np.asarray(blocks), phi)
        out[basis] = np.abs(rotated)
    return out


def detector_values_pure(mags: dict[Basis, np.ndarray], det: DetectorConfig, q: float) -> np.ndarray:
    """Detector values for isotropic states from rotated amplitude magnitudes."""
    first = next(iter(mags.values()))
    n = num_qubits(first[0])
    floor = q / first.shape[-1]
    best = None
    for criterion, basis in det.pairs:
        mag = mags[basis]
        value = plan_for(criterion, n).evaluate(
            lambda r, c: (1 - q) * mag[:, r] * mag[:, c],
            lambda i: (1 - q) * mag[:, i] ** 2 + floor,
        )
        best = value if best is None else np.maximum(best, value)
    return best


def _batched_kron(blocks: np.ndarray) -> np.ndarray:
    out = blocks[:, 0]
    for i in range(1, blocks.shape[1]):
        b = blocks[:, i]
        out = (out[:, :, None, :, None] * b[:, None, :, None, :]).reshape(
            out.shape[0], out.shape[1] * 2, out.shape[2] * 2
        )
    return out


def detector_values_dense(rhos: np.ndarray, det: DetectorConfig) -> np.ndarray:
    """Detector values for a stack of density matrices ``(B, 2**n, 2**n)``."""
    n = num_qubits(rhos[0])
    best = None
    rotated: dict[Basis, np.ndarray] = {}
    for criterion, basis in det.pairs:
        if basis not in rotated:
            blocks = basis.local_unitary(n)
            if blocks is None:
                rotated[basis] = rhos
            else:
                u = _batched_kron(np.asarray(blocks)[None])[0]
                rotated[basis] = u @ rhos @ u.conj().T
        r = rotated[basis]
        value = plan_for(criterion, n).evaluate(
            lambda rows, cols: np.abs(r[:, rows, cols]),
            lambda i: r[:, i, i].real,
        )
        best = value if best is None else np.maximum(best, value)
    return best


def _run_chunks(task, n_samples: int, chunk: int, workers: int | None) -> list:
    spans = list(_chunks(n_samples, chunk))
    if workers is None:
        workers = min(len(spans), os.cpu_count() or 1)
    if workers <= 1 or len(spans) == 1:
        return [task(s) for s in spans]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, spans))


def _check_common(det, group, n, n_samples, seed, threshold):
    if not isinstance(det, DetectorConfig):
        raise TypeError("detector must be a DetectorConfig")
    if not isinstance(group, UnitaryGroup):
        raise TypeError("group must be a UnitaryGroup")
    det.check(n)
    group.check(n)
    if isinstance(n_samples, bool) or not isinstance(n_samples, (int, np.integer)) or n_samples < 1:
        raise ValueError(f"n_samples must be a positive integer, got {n_samples!r}")
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ValueError(f"seed must be a nonnegative integer, got {seed!r}")
    if not np.isfinite(threshold):
        raise ValueError("threshold must be finite")


# -- public entry points ----------------------------------------------------

def estimate_probability(
    family: NoiseFamily | np.ndarray,
    group: UnitaryGroup,
    det: DetectorConfig,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    *,
    threshold: float = DETECTION_THRESHOLD,
    workers: int | None = 1,
    chunk_size: int = CHUNK_SIZE,
    keep_indicators: bool = False,
) -> ProbabilityEstimate:
    """Fraction of Haar-random local bases in which ``det`` detects GME.

    ``family`` is either a :class:`NoiseFamily` (fast amplitude path) or an
    arbitrary density matrix.  ``workers=1`` runs sequentially, ``None`` uses
    one thread per CPU; the result is identical either way.
    """
    if isinstance(family, NoiseFamily):
        return sweep_noise(
            family.base, [family.q], group, det, n_samples, seed,
            threshold=threshold, workers=workers, chunk_size=chunk_size,
            keep_indicators=keep_indicators,
        ).points[0][1]

    rho = validate_density_matrix(family)
    n = num_qubits(rho)
    _check_common(det, group, n, n_samples, seed, threshold)
    # dense stacks cost 4**n entries per sample
    chunk = max(1, min(chunk_size, (1 << 20) >> (2 * n)))

    def task(span):
        start, count = span
        u = _batched_kron(sample_local_unitaries(group, n, seed, start, count))
        rhos = u @ rho @ np.conj(np.swapaxes(u, -1, -2))
        return detector_values_dense(rhos, det) > threshold

    indicators = np.concatenate(_run_chunks(task, n_samples, chunk, workers))
    return _make_estimate(indicators, int(seed), threshold, keep_indicators)


def sweep_noise(
    base: np.ndarray,
    q_grid: Sequence[float],
    group: UnitaryGroup,
    det: DetectorConfig,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    *,
    threshold: float = DETECTION_THRESHOLD,
    workers: int | None = 1,
    chunk_size: int = CHUNK_SIZE,
    keep_indicators: bool = False,
) -> SweepResult:
    """Detection probability along ``(1-q)|base><base| + q I/2**n`` for each ``q`` in the grid.

    Every grid point uses the same sampled unitaries.
    """
    family = NoiseFamily(base, 0.0)
    psi = family.base
    n = family.n
    qs = [check_noise(q) for q in q_grid]
    if not qs:
        raise ValueError("q grid is empty")
    if any(b <= a for a, b in zip(qs, qs[1:])):
        raise ValueError("q grid must be strictly increasing")
    _check_common(det, group, n, n_samples, seed, threshold)
    bases = det.bases

    def task(span):
        start, count = span
        mags = _rotated_magnitudes(psi, group, bases, seed, start, count)
        return np.stack([detector_values_pure(mags, det, q) > threshold for q in qs])

    parts = _run_chunks(task, n_samples, chunk_size, workers)
    hits = np.concatenate(parts, axis=1)
    return SweepResult(tuple(
        (q, _make_estimate(hits[i], int(seed), threshold, keep_indicators))
        for i, q in enumerate(qs)
    ))
