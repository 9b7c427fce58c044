import numpy as np
import pytest

from drazin.densela import qr_factor
from drazin.problems import generate_example


def jordan_block(lam, size):
    J = np.eye(size, dtype=np.complex128) * lam
    for i in range(size - 1):
        J[i, i + 1] = 1.0
    return J


def planted_singular(rng, n_max=20):
    """Random singular matrix with a planted nilpotent Jordan block.

    Returns ``(A, index)``.  Nonzero eigenvalues have magnitude in
    [0.5, 3], so rank decisions and the index are unambiguous.
    """
    index = int(rng.integers(1, 4))
    n = int(rng.integers(index + 2, n_max + 1))
    blocks = [jordan_block(0.0, index)]
    remaining = n - index
    while remaining > 0:
        size = int(rng.integers(1, min(3, remaining) + 1))
        lam = rng.uniform(0.5, 3.0) * np.exp(2j * np.pi * rng.uniform())
        blocks.append(jordan_block(lam, size))
        remaining -= size
    J = np.zeros((n, n), dtype=np.complex128)
    pos = 0
    for blk in blocks:
        s = blk.shape[0]
        J[pos:pos + s, pos:pos + s] = blk
        pos += s
    Q, _ = qr_factor(rng.standard_normal((n, n)))
    return Q @ J @ Q.conj().T, index


@pytest.fixture(scope="session")
def ex1():
    return generate_example("ex1")


@pytest.fixture(scope="session")
def ex4():
    return generate_example("ex4")
