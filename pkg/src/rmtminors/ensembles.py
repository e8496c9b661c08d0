"""Gaussian data matrices, white Wishart and generalized Wigner samplers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .linalg import SymMatrix
from .rng import RngStream, derive_stream, standard_normals

__all__ = [
    "EnsembleSpec", "sample_gaussian_matrix", "sample_wishart", "sample_wigner",
    "sample", "derive_stream",
]


@dataclass(frozen=True)
class EnsembleSpec:
    """Either ``wishart`` (n, p) or ``wigner`` (p, eta); eta is the diagonal variance."""

    kind: str
    p: int
    n: int | None = None
    eta: float = 2.0

    def __post_init__(self):
        if self.kind not in ("wishart", "wigner"):
            raise InputError(f"unknown ensemble {self.kind!r}")
        _check_pos("p", self.p)
        if self.kind == "wishart":
            _check_pos("n", self.n)
        else:
            _check_eta(self.eta)

    @classmethod
    def wishart(cls, n: int, p: int) -> "EnsembleSpec":
        return cls("wishart", p=p, n=n)

    @classmethod
    def wigner(cls, p: int, eta: float = 2.0) -> "EnsembleSpec":
        return cls("wigner", p=p, eta=float(eta))


def _check_pos(name, v):
    if v is None or int(v) != v or v < 1:
        raise InputError(f"{name} must be a positive integer, got {v!r}")


def _check_eta(eta):
    if not (0.0 <= eta <= 2.0):
        raise InputError(f"eta must lie in [0, 2], got {eta!r}")


def sample_gaussian_matrix(n: int, p: int, rng: RngStream) -> np.ndarray:
    """n x p matrix of i.i.d. N(0, 1), filled row-major from the stream."""
    _check_pos("n", n)
    _check_pos("p", p)
    return standard_normals(rng, n * p).reshape(n, p)


def sample_wishart(n: int, p: int, rng: RngStream) -> SymMatrix:
    X = sample_gaussian_matrix(n, p, rng)
    return SymMatrix(X.T @ X)


def sample_wigner(p: int, eta: float, rng: RngStream) -> SymMatrix:
    """Symmetric p x p; upper-triangle entries independent, N(0, eta) on the diagonal, N(0, 1) off it."""
    _check_pos("p", p)
    _check_eta(eta)
    z = standard_normals(rng, p * (p + 1) // 2)
    a = np.zeros((p, p))
    a[np.triu(np.ones((p, p), dtype=bool))] = z   # boolean mask order is row-major
    d = np.arange(p)
    a[d, d] = math.sqrt(eta) * a[d, d] + 0.0
    return SymMatrix(a)


def sample(spec: EnsembleSpec, rng: RngStream) -> SymMatrix:
    if spec.kind == "wishart":
        return sample_wishart(spec.n, spec.p, rng)
    return sample_wigner(spec.p, spec.eta, rng)
