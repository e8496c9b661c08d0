"""Dense symmetric matrices, Jacobi eigendecomposition and principal minors."""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._backend import kernels
from .errors import DomainError, InputError

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100


class SymMatrix:
    """Immutable dense symmetric matrix.

    Symmetry is enforced at construction by mirroring the upper triangle of
    the supplied array, so ``entries[i, j] == entries[j, i]`` holds bit for bit.
    """

    __slots__ = ("_a",)

    def __init__(self, entries):
        a = np.array(entries, dtype=np.float64, copy=True)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise InputError(f"expected a nonempty square matrix, got shape {a.shape}")
        k = a.shape[0]
        a = np.where(np.tri(k, k, -1, dtype=bool), a.T, a)
        a.setflags(write=False)
        self._a = a

    @classmethod
    def _trusted(cls, a: np.ndarray) -> "SymMatrix":
        """Wrap an array already known to be exactly symmetric (no copy, no check)."""
        obj = cls.__new__(cls)
        a.setflags(write=False)
        obj._a = a
        return obj

    @property
    def entries(self) -> np.ndarray:
        return self._a

    @property
    def dim(self) -> int:
        return self._a.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._a
        return self._a.astype(dtype)

    def __neg__(self) -> "SymMatrix":
        return SymMatrix._trusted(-self._a)

    def __eq__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return np.array_equal(self._a, other._a)

    def __hash__(self):
        return hash(self._a.tobytes())

    def __repr__(self):
        return f"SymMatrix(dim={self.dim})"


def as_symmatrix(a) -> SymMatrix:
    return a if isinstance(a, SymMatrix) else SymMatrix(a)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in descending order, optionally with orthonormal eigenvectors."""

    values: np.ndarray
    vectors: Optional[np.ndarray] = None
    sweeps: int = 0
    residual: float = 0.0

    @property
    def lambda1(self) -> float:
        return float(self.values[0])

    @property
    def lambda_min(self) -> float:
        return float(self.values[-1])


def eigh(a, vectors: bool = True) -> Spectrum:
    """Full symmetric eigendecomposition by cyclic Jacobi rotations.

    Converges when the off-diagonal Frobenius mass drops below
    ``1e-13 * (1 + ||A||_F)``; stops after 100 sweeps otherwise and warns,
    reporting the residual off-diagonal norm in ``Spectrum.residual``.
    """
    A = as_symmatrix(a)
    x = A.entries
    if not np.all(np.isfinite(x)):
        raise InputError("matrix has non-finite entries")
    vals, vecs, sweeps, off = kernels.jacobi_eigh(x, vectors, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    fro = float(np.sqrt(np.sum(x * x)))
    if off >= JACOBI_TOL * (1.0 + fro):
        warnings.warn(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps "
                      f"(off-diagonal norm {off:.3e})", RuntimeWarning, stacklevel=2)
    return Spectrum(np.asarray(vals), np.asarray(vecs) if vectors else None,
                    int(sweeps), float(off))


def lambda1(a) -> float:
    """Largest eigenvalue, without eigenvectors."""
    x = as_symmatrix(a).entries
    return float(kernels.lambda1_batch(x[None], JACOBI_TOL, JACOBI_MAX_SWEEPS)[0])


def lambda_min(a) -> float:
    x = as_symmatrix(a).entries
    return -float(kernels.lambda1_batch(-x[None], JACOBI_TOL, JACOBI_MAX_SWEEPS)[0])


def check_subset(S: Sequence[int], dim: int) -> np.ndarray:
    idx = np.asarray(list(S), dtype=np.int64)
    if idx.ndim != 1 or idx.size == 0:
        raise InputError("index set must be a nonempty sequence")
    if idx.min() < 0 or idx.max() >= dim:
        raise InputError(f"index out of range [0, {dim})")
    if np.any(np.diff(idx) <= 0):
        raise InputError("index set must be strictly increasing (no duplicates)")
    return idx


def principal_minor(a, S: Sequence[int]) -> SymMatrix:
    """Rows and columns of ``a`` at the sorted index set ``S``."""
    A = as_symmatrix(a)
    idx = check_subset(S, A.dim)
    return SymMatrix(A.entries[np.ix_(idx, idx)])


def avg_sum_lower_bound(a) -> float:
    """(1/k) * sum of all entries; a lower bound on lambda1 (Rayleigh quotient at the all-ones vector)."""
    A = as_symmatrix(a)
    return math.fsum(A.entries.ravel()) / A.dim


def spectral_norm(a) -> float:
    s = eigh(a, vectors=False)
    return max(abs(s.lambda1), abs(s.lambda_min))


def log_det_psd(a) -> float:
    """log|A| through a Cholesky factorization; raises DomainError unless A is positive definite."""
    A = as_symmatrix(a)
    try:
        L = np.linalg.cholesky(A.entries)
    except np.linalg.LinAlgError as exc:
        raise DomainError("matrix is not positive definite") from exc
    diag = np.diagonal(L)
    if np.any(~(diag > 0)):
        raise DomainError("matrix is not positive definite")
    return 2.0 * math.fsum(np.log(diag))


# -- text format: "k" on the first line, then k rows of k floats --------------

def format_matrix(a) -> str:
    A = as_symmatrix(a)
    buf = io.StringIO()
    buf.write(f"{A.dim}\n")
    for row in A.entries:
        buf.write(" ".join(f"{x:.17g}" for x in row))
        buf.write("\n")
    return buf.getvalue()


def parse_matrix(text: str) -> SymMatrix:
    tokens = text.split()
    if not tokens:
        raise InputError("empty matrix text")
    try:
        k = int(tokens[0])
    except ValueError as exc:
        raise InputError(f"bad dimension line {tokens[0]!r}") from exc
    if k < 1 or len(tokens) != 1 + k * k:
        raise InputError(f"expected {k * k} entries after dimension {k}, got {len(tokens) - 1}")
    vals = np.array([float(t) for t in tokens[1:]]).reshape(k, k)
    if not np.array_equal(vals, vals.T):
        raise InputError("matrix text is not symmetric")
    return SymMatrix(vals)


def write_matrix(path, a) -> None:
    with open(path, "w") as fh:
        fh.write(format_matrix(a))


def read_matrix(path) -> SymMatrix:
    with open(path) as fh:
        return parse_matrix(fh.read())
