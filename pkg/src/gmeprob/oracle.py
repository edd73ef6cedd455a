"""Slow, literal two-copy evaluation of Q_0 and Q_m.

Materialises ``rho (x) rho`` on the ``4**n``-dimensional two-copy space and
builds every swap operator as an explicit 0/1 matrix.  Only meant as an
independent check of :mod:`gmeprob.criteria`; capped at four qubits.
"""

from __future__ import annotations

from functools import reduce
from itertools import combinations

import numpy as np

from .exceptions import CapabilityError

MAX_ORACLE_QUBITS = 4

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)


def _qubits_of(rho):
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    if rho.shape != (dim, dim) or 1 << n != dim or n < 2:
        raise ValueError(f"expected a 2**n x 2**n matrix, got shape {rho.shape}")
    if n > MAX_ORACLE_QUBITS:
        raise CapabilityError(f"oracle supports at most {MAX_ORACLE_QUBITS} qubits, got {n}")
    return n


def product_ket(bits) -> np.ndarray:
    """Kronecker product of single-qubit kets, first entry = first qubit."""
    return reduce(np.kron, [KET1 if b else KET0 for b in bits])


def d_ket(alpha, n) -> np.ndarray:
    """|1> on the (0-based) qubits in ``alpha``, |0> elsewhere."""
    return product_ket([i in alpha for i in range(n)])


def swap_operator(n: int, swap_set) -> np.ndarray:
    """Permutation matrix exchanging the qubits in ``swap_set`` between two copies.

    The two-copy space is ordered copy 1 (x) copy 2, each copy with qubit 0
    as the leftmost tensor factor.  ``swap_set`` holds 0-based qubit labels.
    """
    swap_set = set(swap_set)
    dim = 2 ** n
    perm = np.zeros((dim * dim, dim * dim))
    for col in range(dim * dim):
        bits = [(col >> (2 * n - 1 - k)) & 1 for k in range(2 * n)]
        first, second = bits[:n], bits[n:]
        for i in swap_set:
            first[i], second[i] = second[i], first[i]
        row = int("".join(map(str, first + second)), 2)
        perm[row, col] = 1.0
    return perm


def _two_copy_term(rho2, n, swap_set, left, right) -> float:
    p = swap_operator(n, swap_set)
    vec = np.kron(left, right)
    value = vec.conj() @ p.conj().T @ rho2 @ p @ vec
    return float(np.sqrt(max(value.real, 0.0)))


def oracle_q0(rho: np.ndarray) -> float:
    rho = np.asarray(rho, dtype=complex)
    n = _qubits_of(rho)
    zeros = product_ket([0] * n)
    ones = product_ket([1] * n)
    rho2 = np.kron(rho, rho)
    value = abs(zeros.conj() @ rho @ ones)
    # each unordered bipartition {A, B} once: A is the part holding qubit 0
    rest = range(1, n)
    for size in range(0, n - 1):
        for others in combinations(rest, size):
            part_a = {0, *others}
            value -= _two_copy_term(rho2, n, part_a, zeros, ones)
    return float(value)


def oracle_qm(rho: np.ndarray, m: int) -> float:
    rho = np.asarray(rho, dtype=complex)
    n = _qubits_of(rho)
    if not 1 <= m <= n // 2:
        raise ValueError(f"m must lie in [1, {n // 2}], got {m}")
    rho2 = np.kron(rho, rho)
    subsets = [frozenset(c) for c in combinations(range(n), m)]
    value = 0.0
    for alpha in subsets:
        for beta in subsets:
            if alpha == beta or len(alpha & beta) != m - 1:
                continue
            da, db = d_ket(alpha, n), d_ket(beta, n)
            value += abs(da.conj() @ rho @ db)
            value -= _two_copy_term(rho2, n, alpha, da, db)
    diag = sum((d_ket(a, n).conj() @ rho @ d_ket(a, n)).real for a in subsets)
    value -= m * (n - m - 1) * diag
    return float(value)
