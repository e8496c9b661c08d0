"""Log densities of the small-block eigenvalue and matrix laws, and their normalizers.

Notation: m is the block size, n the Wishart degrees of freedom.  The shifted
Wishart law is that of (W - n I)/sqrt(n) for W ~ Wishart_m(n, I); its
eigenvalue density g and matrix density are compared with the GOE-type
Wigner law (diagonal variance 2, off-diagonal variance 1).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, InputError
from .linalg import as_symmatrix, log_det_psd

_LOG_PI = math.log(math.pi)
_LOG2 = math.log(2.0)
_LGAMMA_3_2 = math.lgamma(1.5)


def log_multivariate_gamma(m: int, a: float) -> float:
    """log Gamma_m(a) = m(m-1)/4 log pi + sum_j log Gamma(a - (j-1)/2)."""
    if int(m) != m or m < 1:
        raise InputError("m must be a positive integer")
    if not a > (m - 1) / 2.0:
        raise DomainError(f"need a > (m-1)/2 = {(m - 1) / 2.0!r}, got {a!r}")
    return 0.25 * m * (m - 1) * _LOG_PI + math.fsum(
        math.lgamma(a - 0.5 * (j - 1)) for j in range(1, int(m) + 1))


@dataclass(frozen=True)
class GammaConstants:
    m: int
    n: int
    log_c_mn: float
    log_C_mn: float
    log_c_m: float
    log_A_mn: float
    log_B_m: float

    def to_dict(self) -> dict:
        return asdict(self)


def log_c_m(m: int) -> float:
    """Normalizer of the Wigner (GOE, diagonal variance 2) eigenvalue density."""
    s = math.fsum(_LGAMMA_3_2 - math.lgamma(1.0 + 0.5 * j) for j in range(1, m + 1))
    return (math.lgamma(m + 1) - m * _LOG2 - 0.25 * m * (m - 1) * _LOG2
            - 0.5 * m * _LOG_PI + s)


def log_c_mn(m: int, n: int) -> float:
    """Normalizer of the Wishart_m(n, I) eigenvalue density."""
    s = math.fsum(_LGAMMA_3_2 - math.lgamma(1.0 + 0.5 * j) - math.lgamma(0.5 * (n - m + j))
                  for j in range(1, m + 1))
    return math.lgamma(m + 1) - 0.5 * n * m * _LOG2 + s


def log_B_m(m: int) -> float:
    """GOE matrix-density normalizer (2 pi)^{-m(m+1)/4} 2^{-m/2}."""
    return -0.25 * m * (m + 1) * math.log(2.0 * math.pi) - 0.5 * m * _LOG2


def _check_mn(m, n):
    if int(m) != m or int(n) != n or m < 1:
        raise InputError("m and n must be positive integers")
    if not m < n:
        raise InputError(f"need m < n, got m={m}, n={n}")
    return int(m), int(n)


def gamma_constants(m: int, n: int) -> GammaConstants:
    m, n = _check_mn(m, n)
    ln = math.log(n)
    lcmn = log_c_mn(m, n)
    # C(m,n) = n^{m/2} e^{-nm/2} n^{m(n-m+1)/2 - m} n^{m(m-1)/4} c_{m,n}
    log_C = (0.5 * m + 0.5 * m * (n - m + 1) - m + 0.25 * m * (m - 1)) * ln - 0.5 * n * m + lcmn
    log_A = ((0.25 * m * (m + 1) + 0.5 * m * (n - m - 1)) * ln - 0.5 * n * m
             - 0.5 * n * m * _LOG2 - log_multivariate_gamma(m, 0.5 * n))
    return GammaConstants(m, n, lcmn, log_C, log_c_m(m), log_A, log_B_m(m))


def _vec(x, m):
    v = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if v.ndim != 1 or v.size != m:
        raise InputError(f"expected a vector of length {m}")
    if not np.all(np.isfinite(v)):
        raise InputError("eigenvalue vector has non-finite entries")
    return v


def _log_vandermonde(v):
    m = v.size
    terms = []
    for j in range(m):
        for i in range(j + 1, m):
            terms.append(math.log(v[j] - v[i]))
    return math.fsum(terms)


def _order(v):
    """+1 strictly descending, 0 some tie (and otherwise descending), -1 out of order."""
    d = np.diff(v)
    if np.any(d > 0):
        return -1
    return 1 if np.all(d < 0) else 0


def log_wigner_eig_density(lam: Sequence[float], m: int) -> float:
    """log c_m - sum(lam^2)/4 + sum_{j<i} log(lam_j - lam_i), for descending lam."""
    v = _vec(lam, m)
    order = _order(v)
    if order < 0:
        raise DomainError("eigenvalues must be in descending order")
    if order == 0:
        return -math.inf
    return log_c_m(m) - 0.25 * math.fsum(v * v) + _log_vandermonde(v)


def log_wishart_eig_density(mu: Sequence[float], m: int, n: int) -> float:
    """Joint density of the ordered eigenvalues of Wishart_m(n, I); -inf off the support."""
    v = _vec(mu, m)
    if not n > m - 1:
        raise DomainError("need n > m - 1")
    if _order(v) <= 0 or v[-1] <= 0:
        return -math.inf
    return (log_c_mn(m, n) - 0.5 * math.fsum(v)
            + (0.5 * (n - m + 1) - 1.0) * math.fsum(np.log(v)) + _log_vandermonde(v))


def log_shifted_wishart_eig_density(v: Sequence[float], m: int, n: int) -> float:
    """Eigenvalue density g of (W - nI)/sqrt(n).

    Evaluated in the factored form
    log C(m,n) - (sqrt(n)/2) sum v + ((n-m-1)/2) sum log(1 + v/sqrt(n)) + sum log(v_j - v_i),
    which avoids the O(n log n) cancellation of the unshifted route; it
    equals (m/2) log n + log_wishart_eig_density(n + sqrt(n) v).
    """
    x = _vec(v, m)
    m, n = _check_mn(m, n)
    rn = math.sqrt(n)
    if _order(x) <= 0 or x[-1] <= -rn:
        return -math.inf
    C = gamma_constants(m, n).log_C_mn
    return (C - 0.5 * rn * math.fsum(x) + 0.5 * (n - m - 1) * math.fsum(np.log1p(x / rn))
            + _log_vandermonde(x))


def log_eig_density_ratio(v: Sequence[float], m: int, n: int) -> float:
    """log g(v) - log f~_m(v), on the domain ||v||_inf <= (2/3) sqrt(n)."""
    x = _vec(v, m)
    m, n = _check_mn(m, n)
    if _order(x) <= 0:
        raise DomainError("v must be strictly descending")
    if np.max(np.abs(x)) > (2.0 / 3.0) * math.sqrt(n):
        raise DomainError("need ||v||_inf <= (2/3) sqrt(n)")
    return log_shifted_wishart_eig_density(x, m, n) - log_wigner_eig_density(x, m)


def log_matrix_densities(w, m: int, n: int):
    """(shifted Wishart, GOE, difference) log densities at the m x m symmetric w."""
    W = as_symmatrix(w)
    if W.dim != m:
        raise InputError(f"expected an {m} x {m} matrix")
    m, n = _check_mn(m, n)
    x = W.entries
    rn = math.sqrt(n)
    consts = gamma_constants(m, n)
    try:
        logdet = log_det_psd(np.eye(m) + x / rn)
    except DomainError:
        wish = -math.inf
    else:
        wish = consts.log_A_mn + 0.5 * (n - m - 1) * logdet - 0.5 * rn * math.fsum(np.diag(x))
    goe = consts.log_B_m - 0.25 * math.fsum((x * x).ravel())
    return wish, goe, wish - goe


# -- oracle table -------------------------------------------------------------

def _chi2_logpdf(x, n):
    return (0.5 * n - 1.0) * math.log(x) - 0.5 * x - 0.5 * n * _LOG2 - math.lgamma(0.5 * n)


def _n02_logpdf(x):
    return -0.25 * x * x - 0.5 * math.log(4.0 * math.pi)


def selftest_table():
    """Rows of {name, value, expected, residual, tol, pass} for the density oracles."""
    rows = []

    def add(name, value, expected, tol):
        res = abs(value - expected)
        rows.append({"name": name, "value": value, "expected": expected,
                     "residual": res, "tol": tol, "pass": bool(res <= tol)})

    add("log_multivariate_gamma(1,0.5)", log_multivariate_gamma(1, 0.5), 0.5 * _LOG_PI, 1e-12)
    add("log_multivariate_gamma(2,1.5)", log_multivariate_gamma(2, 1.5),
        0.5 * _LOG_PI + math.lgamma(1.5), 1e-12)
    add("log_c_1", log_c_m(1), -math.log(2.0 * math.sqrt(math.pi)), 1e-12)
    add("log_B_1", log_B_m(1), -math.log(2.0 * math.sqrt(math.pi)), 1e-12)
    for x in (-3.0, 0.0, 0.5, 2.0, 7.0):
        add(f"wigner_eig_m1({x})", log_wigner_eig_density([x], 1), _n02_logpdf(x), 1e-10)
        add(f"goe_matrix_m1({x})", log_matrix_densities([[x]], 1, 2)[1], _n02_logpdf(x), 1e-10)
    for n, x in ((2, 2.0), (5, 0.3), (20, 17.5), (200, 230.0)):
        add(f"wishart_eig_m1(n={n},{x})", log_wishart_eig_density([x], 1, n),
            _chi2_logpdf(x, n), 1e-10)
    rng = np.random.default_rng(0)
    for n in (20, 50, 100):
        v = np.sort(rng.uniform(-2.0, 2.0, 3))[::-1]
        direct = log_shifted_wishart_eig_density(v, 3, n)
        via = 1.5 * math.log(n) + log_wishart_eig_density(n + math.sqrt(n) * v, 3, n)
        add(f"jacobian_identity(m=3,n={n})", direct, via, 1e-12 * max(1.0, abs(via)))
    for m in (1, 2, 3):
        g = gamma_constants(m, 10**6)
        add(f"logC_minus_logc(m={m},n=1e6)", g.log_C_mn, g.log_c_m, 5e-3)
        add(f"logA_minus_logB(m={m},n=1e6)", g.log_A_mn, g.log_B_m, 5e-3)
    add("shifted_wishart_matrix_m1(n=1e6,w=0)", log_matrix_densities([[0.0]], 1, 10**6)[0],
        log_B_m(1), 1e-2)
    return rows
