"""Problem ingestion: built-in singular test systems and Matrix Market files.

The four built-in systems are the classic small singular benchmarks used by
this package's convergence experiments: a 12 x 12 Jordan-form matrix with a
trailing nilpotent block (``ex1``), the same matrix with its (7,7) entry set
to a very large (``ex2``) or very small (``ex3``) eigenvalue, and a 4 x 4
index-1 system (``ex4``).  Generation is deterministic; the returned index
values are 2, 2, 2 and 1, and match the oracle's rank-stabilization count.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .densela import as_matrix, as_vector, qr_factor

__all__ = [
    "EXAMPLE_IDS",
    "MatrixMarketError",
    "ProblemSpec",
    "ResolvedProblem",
    "apply_similarity",
    "generate_example",
    "load_matrix_market",
    "load_vector",
]

EXAMPLE_IDS = ("ex1", "ex2", "ex3", "ex4")


class MatrixMarketError(ValueError):
    """Matrix Market parse failure; the message cites the offending line."""


def _example1_matrix():
    return np.array([
        [1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 3, 1, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 3, 1, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 3, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 7, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 8, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0, 9, 1, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0, 0, 9, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    ], dtype=np.complex128)


def _example4():
    A = np.array([
        [1, 1, 1, 2],
        [0, 1, 3, 4],
        [0, 0, 1, 1],
        [0, 0, 0, 0],
    ], dtype=np.complex128)
    b = np.array([-4, 7, 1, 0], dtype=np.complex128)
    return A, b


def generate_example(example_id):
    """Return ``(A, b, index_a)`` for a built-in example id.

    ``ex1``: 12 x 12 Jordan-form singular matrix, ``b = ones``, index 2.
    ``ex2``/``ex3``: same with entry (7,7) set to 1000 / 0.001.
    ``ex4``: explicit 4 x 4 index-1 system with ``b = (-4, 7, 1, 0)``.
    """
    if example_id not in EXAMPLE_IDS:
        raise ValueError(
            f"unknown example id {example_id!r}; choose one of {', '.join(EXAMPLE_IDS)}")
    if example_id == "ex4":
        A, b = _example4()
        return A, b, 1
    A = _example1_matrix()
    if example_id == "ex2":
        A[6, 6] = 1000.0
    elif example_id == "ex3":
        A[6, 6] = 0.001
    b = np.ones(12, dtype=np.complex128)
    return A, b, 2


def apply_similarity(A, seed):
    """Reproducible well-conditioned similarity transform ``Q A Q^H``.

    ``Q`` is the orthogonal factor of a seeded Gaussian matrix, so the
    conditioning of the eigenproblem is unchanged while the matrix loses
    its displayed Jordan structure.  Used for robustness experiments.
    """
    A = as_matrix(A, square=True)
    n = A.shape[0]
    rng = np.random.default_rng(seed)
    Q, _ = qr_factor(rng.standard_normal((n, n)))
    return Q @ A @ Q.conj().T


_MM_FIELDS = ("real", "integer", "complex", "pattern")
_MM_SYMMETRIES = ("general", "symmetric", "hermitian", "skew-symmetric")


def _mm_lines(path):
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            yield lineno, raw.strip()


def _mm_error(path, lineno, message):
    return MatrixMarketError(f"{path}: line {lineno}: {message}")


def _mm_parse_value(tokens, field, path, lineno):
    try:
        if field == "complex":
            return complex(float(tokens[0]), float(tokens[1]))
        return complex(float(tokens[0]))
    except (ValueError, IndexError):
        raise _mm_error(path, lineno, f"bad numeric value {' '.join(tokens)!r}") from None


def load_matrix_market(path):
    """Read a dense complex matrix from a Matrix Market file.

    Supports coordinate and array formats with real/integer/complex fields
    and general/symmetric/hermitian/skew-symmetric symmetry (expanded to a
    full dense matrix; indices converted from 1-based).  ``pattern`` files
    carry no values and are rejected.
    """
    path = str(path)
    lines = _mm_lines(path)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise MatrixMarketError(f"{path}: line 1: empty file") from None
    parts = header.lower().split()
    if len(parts) != 5 or parts[0] != "%%matrixmarket" or parts[1] != "matrix":
        raise _mm_error(path, lineno, f"bad header {header!r}")
    fmt, field, symmetry = parts[2], parts[3], parts[4]
    if fmt not in ("coordinate", "array"):
        raise _mm_error(path, lineno, f"unsupported format {fmt!r}")
    if field not in _MM_FIELDS:
        raise _mm_error(path, lineno, f"unsupported field {field!r}")
    if field == "pattern":
        raise _mm_error(path, lineno, "pattern files carry no values and are not supported")
    if symmetry not in _MM_SYMMETRIES:
        raise _mm_error(path, lineno, f"unsupported symmetry {symmetry!r}")

    size = None
    entries = []
    values_per_entry = 2 if field == "complex" else 1
    for lineno, line in lines:
        if not line or line.startswith("%"):
            continue
        tokens = line.split()
        if size is None:
            want = 3 if fmt == "coordinate" else 2
            if len(tokens) != want:
                raise _mm_error(path, lineno, f"expected {want} size fields, got {len(tokens)}")
            try:
                size = tuple(int(t) for t in tokens)
            except ValueError:
                raise _mm_error(path, lineno, f"bad size line {line!r}") from None
            if size[0] < 1 or size[1] < 1 or (fmt == "coordinate" and size[2] < 0):
                raise _mm_error(path, lineno, "matrix dimensions must be positive")
            continue
        entries.append((lineno, tokens))
    if size is None:
        raise MatrixMarketError(f"{path}: missing size line")

    rows, cols = size[0], size[1]
    if symmetry != "general" and rows != cols:
        raise MatrixMarketError(f"{path}: {symmetry} matrices must be square")
    M = np.zeros((rows, cols), dtype=np.complex128)

    if fmt == "coordinate":
        nnz = size[2]
        if len(entries) != nnz:
            raise MatrixMarketError(
                f"{path}: declared {nnz} entries but found {len(entries)}")
        for lineno, tokens in entries:
            if len(tokens) != 2 + values_per_entry:
                raise _mm_error(path, lineno,
                                f"expected {2 + values_per_entry} fields, got {len(tokens)}")
            try:
                i, j = int(tokens[0]) - 1, int(tokens[1]) - 1
            except ValueError:
                raise _mm_error(path, lineno, f"bad indices {tokens[:2]}") from None
            if not (0 <= i < rows and 0 <= j < cols):
                raise _mm_error(path, lineno, f"indices ({i + 1}, {j + 1}) out of range")
            v = _mm_parse_value(tokens[2:], field, path, lineno)
            M[i, j] = v
            if symmetry != "general" and i != j:
                if symmetry == "symmetric":
                    M[j, i] = v
                elif symmetry == "hermitian":
                    M[j, i] = np.conj(v)
                else:
                    M[j, i] = -v
    else:
        flat = [(lineno, tokens) for lineno, tokens in entries]
        values = []
        for lineno, tokens in flat:
            if len(tokens) != values_per_entry:
                raise _mm_error(path, lineno,
                                f"expected {values_per_entry} value fields, got {len(tokens)}")
            values.append(_mm_parse_value(tokens, field, path, lineno))
        if symmetry == "general":
            expected = rows * cols
        else:
            expected = rows * (rows + 1) // 2
        if len(values) != expected:
            raise MatrixMarketError(
                f"{path}: array data holds {len(values)} values, expected {expected}")
        it = iter(values)
        for j in range(cols):
            start = j if symmetry != "general" else 0
            for i in range(start, rows):
                v = next(it)
                M[i, j] = v
                if symmetry != "general" and i != j:
                    if symmetry == "symmetric":
                        M[j, i] = v
                    elif symmetry == "hermitian":
                        M[j, i] = np.conj(v)
                    else:
                        M[j, i] = -v
    return M


def load_vector(path):
    """Read a right-hand-side or start vector.

    Accepts a Matrix Market array file with a single column (or row), or a
    plain text file with one value per line (``complex()`` literals allowed).
    """
    path = str(path)
    with open(path, "r", encoding="ascii") as fh:
        first = fh.readline()
    if first.lower().startswith("%%matrixmarket"):
        M = load_matrix_market(path)
        if M.shape[1] == 1:
            return M[:, 0]
        if M.shape[0] == 1:
            return M[0, :]
        raise MatrixMarketError(f"{path}: expected a single-column vector, got {M.shape}")
    values = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith(("#", "%")):
                continue
            for token in line.split():
                try:
                    values.append(complex(token))
                except ValueError:
                    raise MatrixMarketError(
                        f"{path}: line {lineno}: bad value {token!r}") from None
    if not values:
        raise MatrixMarketError(f"{path}: no vector entries found")
    return np.array(values, dtype=np.complex128)


@dataclass(frozen=True)
class ResolvedProblem:
    """A concrete system ready for the solvers."""

    A: np.ndarray
    b: np.ndarray
    index_a: int
    index_auto: bool
    x0: np.ndarray | None


@dataclass(frozen=True)
class ProblemSpec:
    """Where a problem comes from and how its index is determined.

    Exactly one of ``example`` / ``matrix_path`` must be set.  ``index_a``
    is either an integer or ``"auto"`` (resolved through the oracle's rank
    stabilization and reported, never silently overridden).  ``rhs_path``
    defaults to the built-in right-hand side (examples) or all-ones
    (files); ``x0_path`` defaults to the zero start.
    """

    example: str | None = None
    matrix_path: str | Path | None = None
    rhs_path: str | Path | None = None
    index_a: int | str = "auto"
    x0_path: str | Path | None = None
    similarity_seed: int | None = None

    def __post_init__(self):
        if (self.example is None) == (self.matrix_path is None):
            raise ValueError("specify exactly one of example / matrix_path")
        if self.example is not None and self.example not in EXAMPLE_IDS:
            raise ValueError(f"unknown example id {self.example!r}")
        if isinstance(self.index_a, str) and self.index_a != "auto":
            raise ValueError("index_a must be an integer or 'auto'")

    def resolve(self):
        """Load the matrix and vectors and settle the index."""
        from . import oracle

        if self.example is not None:
            A, b, _ = generate_example(self.example)
        else:
            A = load_matrix_market(self.matrix_path)
            A = as_matrix(A, square=True)
            b = np.ones(A.shape[0], dtype=np.complex128)
        if self.rhs_path is not None:
            b = as_vector(load_vector(self.rhs_path), dim=A.shape[0])
        if self.similarity_seed is not None:
            A = apply_similarity(A, self.similarity_seed)
        auto = self.index_a == "auto"
        index_a = oracle.index_of(A) if auto else int(self.index_a)
        x0 = None
        if self.x0_path is not None:
            x0 = as_vector(load_vector(self.x0_path), dim=A.shape[0])
        return ResolvedProblem(A=A, b=b, index_a=index_a, index_auto=auto, x0=x0)
