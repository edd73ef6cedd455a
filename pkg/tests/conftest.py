import numpy as np
import pytest
from scipy.stats import unitary_group


@pytest.fixture
def rng():
    return np.random.default_rng(20140312)


def random_pure(dim, rng):
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def random_density(n, rng, rank=None):
    dim = 2 ** n
    rank = rank or dim
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_local_unitary(n, rng):
    """Independent of gmeprob.haar: scipy's U(2) Haar sampler."""
    return np.stack([unitary_group.rvs(2, random_state=rng) for _ in range(n)])


def kron_all(mats):
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def random_biseparable(n, rng, max_terms=8, conjugate=True):
    """Convex mixture of pure states, each a product across a random bipartition."""
    dim = 2 ** n
    k = int(rng.integers(1, max_terms + 1))
    weights = rng.dirichlet(np.ones(k))
    rho = np.zeros((dim, dim), dtype=complex)
    for w in weights:
        mask = int(rng.integers(1, dim - 1))
        part_a = [i for i in range(n) if mask >> i & 1]
        part_b = [i for i in range(n) if not mask >> i & 1]
        psi = np.kron(random_pure(2 ** len(part_a), rng), random_pure(2 ** len(part_b), rng))
        # tensor factors are ordered part_a + part_b; restore qubit order
        psi = psi.reshape((2,) * n).transpose(np.argsort(part_a + part_b)).reshape(dim)
        rho += w * np.outer(psi, psi.conj())
    if conjugate:
        u = kron_all(random_local_unitary(n, rng))
        rho = u @ rho @ u.conj().T
    return rho


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
