"""Multi-qubit pure states, density matrices and isotropic-noise families.

Ordering convention: in a ket such as ``|001>`` the leftmost symbol is
qubit 1 and it is the *most* significant bit of the basis index, so
``|001> -> 1``, ``|010> -> 2``, ``|100> -> 4``.  A subset of qubits is
encoded as a bitmask with the same convention (qubit ``i`` contributes
``1 << (n - i)``), which makes the mask of a set of excited qubits equal to
the basis index of the corresponding product vector ``|d_alpha>``.

States are plain numpy arrays: a state vector has shape ``(2**n,)`` and a
density matrix ``(2**n, 2**n)``.  Local unitaries are arrays of shape
``(n, 2, 2)`` holding one 2x2 block per qubit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from math import comb, sqrt
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .exceptions import (
    HermiticityError,
    PositivityError,
    StateParseError,
    StateValidationError,
    TraceError,
)

MIN_QUBITS = 2
MAX_QUBITS = 12

NORM_TOL = 1e-12
STATE_TOL = 1e-10
LOAD_TOL = 1e-8


def check_qubits(n: int) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise TypeError(f"qubit count must be an integer, got {n!r}")
    if not MIN_QUBITS <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count must lie in [{MIN_QUBITS}, {MAX_QUBITS}], got {n}")
    return int(n)


def num_qubits(obj: np.ndarray) -> int:
    """Number of qubits of a state vector or density matrix."""
    dim = np.shape(obj)[0]
    n = int(dim).bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


# -- subset masks ----------------------------------------------------------

def qubit_bit(i: int, n: int) -> int:
    """Mask bit of qubit ``i`` (1-based) in an ``n``-qubit register."""
    if not 1 <= i <= n:
        raise ValueError(f"qubit index {i} outside 1..{n}")
    return 1 << (n - i)


def subset_mask(qubits: Iterable[int], n: int) -> int:
    """Bitmask of a set of 1-based qubit labels; equals the index of ``|d_alpha>``."""
    mask = 0
    for i in qubits:
        mask |= qubit_bit(i, n)
    return mask


def mask_qubits(mask: int, n: int) -> tuple[int, ...]:
    if not 0 <= mask < 1 << n:
        raise ValueError(f"mask {mask} out of range for {n} qubits")
    return tuple(i for i in range(1, n + 1) if mask & qubit_bit(i, n))


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def complement(mask: int, n: int) -> int:
    return ((1 << n) - 1) ^ mask


def weight_indices(n: int, weight: int) -> list[int]:
    """Basis indices with exactly ``weight`` ones, ascending."""
    return sorted(sum(1 << b for b in bits) for bits in combinations(range(n), weight))


# -- constructors ----------------------------------------------------------

def basis_vector(index: int, n: int) -> np.ndarray:
    vec = np.zeros(1 << n, dtype=complex)
    vec[index] = 1.0
    return vec


def make_ghz(n: int) -> np.ndarray:
    """(|0...0> + |1...1>) / sqrt(2)."""
    n = check_qubits(n)
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = psi[-1] = 1 / sqrt(2)
    return psi


def make_dicke(n: int, m: int) -> np.ndarray:
    """Equal superposition of all basis states with ``m`` excitations."""
    n = check_qubits(n)
    if not 1 <= m <= n - 1:
        raise ValueError(f"excitation count must lie in [1, {n - 1}], got {m}")
    psi = np.zeros(1 << n, dtype=complex)
    psi[weight_indices(n, m)] = 1 / sqrt(comb(n, m))
    return psi


def make_w(n: int) -> np.ndarray:
    return make_dicke(n, 1)


def projector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


@dataclass(frozen=True)
class NoiseFamily:
    """Pure state mixed with white noise: ``(1-q)|psi><psi| + q I / 2**n``."""

    base: np.ndarray
    q: float = 0.0

    def __post_init__(self):
        base = np.array(self.base, dtype=complex)
        check_qubits(num_qubits(base))
        if abs(np.linalg.norm(base) - 1) > NORM_TOL:
            raise ValueError("base state is not normalized")
        base.setflags(write=False)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "q", check_noise(self.q))

    @property
    def n(self) -> int:
        return num_qubits(self.base)

    def with_q(self, q: float) -> "NoiseFamily":
        return NoiseFamily(self.base, q)

    def realize(self) -> np.ndarray:
        return realize(self)


def check_noise(q: float) -> float:
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"noise weight must lie in [0, 1], got {q}")
    return q


def realize(family: NoiseFamily) -> np.ndarray:
    dim = family.base.shape[0]
    q = family.q
    return (1 - q) * projector(family.base) + (q / dim) * np.eye(dim)


# -- local unitaries -------------------------------------------------------

def check_local_unitary(blocks: np.ndarray, n: int | None = None) -> np.ndarray:
    blocks = np.asarray(blocks, dtype=complex)
    if blocks.ndim != 3 or blocks.shape[1:] != (2, 2):
        raise ValueError(f"local unitary must have shape (n, 2, 2), got {blocks.shape}")
    if n is not None and blocks.shape[0] != n:
        raise ValueError(f"local unitary has {blocks.shape[0]} blocks, state has {n} qubits")
    return blocks


def kron_blocks(blocks: np.ndarray) -> np.ndarray:
    """Full ``2**n x 2**n`` matrix ``U_1 (x) ... (x) U_n``."""
    out = np.ones((1, 1), dtype=complex)
    for block in check_local_unitary(blocks):
        out = np.kron(out, block)
    return out


def apply_blocks_to_vectors(blocks: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Apply per-qubit blocks to state vectors without forming the Kronecker product.

    ``blocks`` has shape ``(..., n, 2, 2)`` and ``psi`` shape ``(..., 2**n)``;
    leading dimensions broadcast.
    """
    n = blocks.shape[-3]
    lead = np.broadcast_shapes(blocks.shape[:-3], psi.shape[:-1])
    blocks = np.broadcast_to(blocks, lead + (n, 2, 2))
    out = np.broadcast_to(psi, lead + psi.shape[-1:]).reshape(lead + (2,) * n)
    k = len(lead)
    for i in range(n):
        # transposed block, broadcast over the other n-1 qubit axes
        ut = np.swapaxes(blocks[..., i, :, :], -1, -2).reshape(lead + (1,) * (n - 1) + (2, 2))
        out = np.moveaxis(out, k + i, -1)
        out = (out[..., None, :] @ ut)[..., 0, :]
        out = np.moveaxis(out, -1, k + i)
    return np.ascontiguousarray(out).reshape(lead + (1 << n,))


def apply_local_unitary(rho: np.ndarray, blocks: np.ndarray) -> np.ndarray:
    """``U_L rho U_L^dagger`` for ``U_L`` the tensor product of ``blocks``."""
    rho = np.asarray(rho, dtype=complex)
    n = num_qubits(rho)
    blocks = check_local_unitary(blocks, n)
    if rho.shape != (1 << n, 1 << n):
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    u = kron_blocks(blocks)
    return u @ rho @ u.conj().T


def permute_qubits(rho: np.ndarray, order: Iterable[int]) -> np.ndarray:
    """Relabel qubits: new qubit ``k`` is old qubit ``order[k]`` (0-based)."""
    rho = np.asarray(rho)
    n = num_qubits(rho)
    order = list(order)
    t = rho.reshape((2,) * (2 * n))
    t = t.transpose(order + [n + i for i in order])
    return t.reshape(rho.shape)


# -- validation and file I/O -----------------------------------------------

def validate_density_matrix(rho: np.ndarray, tol: float = STATE_TOL) -> np.ndarray:
    """Return ``rho`` as a complex array, raising if any invariant fails beyond ``tol``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise StateValidationError(f"density matrix must be square, got shape {rho.shape}")
    try:
        check_qubits(num_qubits(rho))
    except ValueError as exc:
        raise StateValidationError(str(exc)) from None
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > tol:
        raise HermiticityError(f"matrix is not Hermitian (max deviation {herm:.3g})")
    tr = np.trace(rho).real
    if abs(tr - 1) > tol:
        raise TraceError(f"trace is {tr:.12g}, expected 1")
    lowest = np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0]
    if lowest < -tol:
        raise PositivityError(f"matrix has negative eigenvalue {lowest:.3g}")
    return rho


def density_matrix_to_dict(rho: np.ndarray) -> dict:
    rho = np.asarray(rho, dtype=complex)
    return {
        "n": num_qubits(rho),
        "entries": [[float(z.real), float(z.imag)] for z in rho.ravel()],
    }


def dump_density_matrix(rho: np.ndarray, fp: IO[str] | str | Path) -> None:
    doc = density_matrix_to_dict(rho)
    if isinstance(fp, (str, Path)):
        Path(fp).write_text(json.dumps(doc, indent=1))
    else:
        json.dump(doc, fp, indent=1)


def load_density_matrix(source: IO[str] | str | Path, tol: float = LOAD_TOL) -> np.ndarray:
    """Read a density matrix from a JSON document ``{"n": ..., "entries": [[re, im], ...]}``.

    ``entries`` lists the ``4**n`` matrix elements in row-major order.  Raises
    :class:`StateParseError` for malformed documents and a subclass of
    :class:`StateValidationError` for matrices that are not valid states.
    """
    try:
        if isinstance(source, (str, Path)):
            text = Path(source).read_text()
        else:
            text = source.read()
        doc = json.loads(text)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise StateParseError(f"cannot read state document: {exc}") from None

    if not isinstance(doc, dict) or "n" not in doc or "entries" not in doc:
        raise StateParseError("state document needs fields 'n' and 'entries'")
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise StateParseError(f"'n' must be an integer, got {n!r}")
    if not MIN_QUBITS <= n <= MAX_QUBITS:
        raise StateValidationError(f"qubit count must lie in [{MIN_QUBITS}, {MAX_QUBITS}], got {n}")
    try:
        pairs = np.array(doc["entries"], dtype=float)
    except (TypeError, ValueError):
        raise StateParseError("'entries' must be a list of [real, imag] number pairs") from None
    dim = 1 << n
    if pairs.shape != (dim * dim, 2):
        raise StateParseError(
            f"'entries' must hold {dim * dim} [real, imag] pairs, got array of shape {pairs.shape}"
        )
    if not np.all(np.isfinite(pairs)):
        raise StateParseError("'entries' contains non-finite numbers")
    rho = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(dim, dim)
    return validate_density_matrix(rho, tol=tol)
