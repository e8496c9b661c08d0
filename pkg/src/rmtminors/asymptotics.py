"""Closed-form predictions, rate functions, scalings and tail bounds.

Bounds come back in log space unless the name says otherwise; use
``clamp_exp`` to turn a log bound into a probability capped at 1.  The
constant ``kappa`` only has an existence proof behind it, so it is a
parameter everywhere (default 3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

from .errors import DomainError, InputError
from .special import log_phi_bar, log_phi_bar_exact

__all__ = [
    "KAPPA", "TailBoundParams", "rate_I", "b_star", "predict_extreme", "epsilon_tau",
    "wigner_lambda1_tail_bound", "mdp_eta_tail_bound", "log_mdp_eta_tail_bound",
    "optimize_mdp_bound", "wishart_moderate_bound", "optimize_moderate_bound",
    "log_phi_bar", "chi2_lower_tail_bound", "log_binomial_with_bounds",
    "overlap_ratio_log", "max_l_value", "max_l_brute", "assumption_diagnostics",
    "log_block_exceed_prob", "second_moment_bound", "clamp_exp", "logsumexp",
]

KAPPA = 3.0
_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class TailBoundParams:
    kappa: float = KAPPA
    r: Optional[float] = None
    d_or_delta: Optional[float] = None

    def __post_init__(self):
        if not self.kappa > 0:
            raise InputError("kappa must be positive")


def logsumexp(*xs: float) -> float:
    finite = [x for x in xs if x != -math.inf]
    if not finite:
        return -math.inf
    top = max(finite)
    if top == math.inf:
        return math.inf
    return top + math.log(math.fsum(math.exp(x - top) for x in finite))


def clamp_exp(log_value: float) -> float:
    """min(1, exp(log_value))."""
    return 1.0 if log_value >= 0.0 else math.exp(log_value)


def rate_I(s: float) -> float:
    """Cramér rate of a chi-square(1) mean: (s - 1 - log s)/2, infinite for s <= 0."""
    if s <= 0:
        return math.inf
    return 0.5 * (s - 1.0 - math.log(s))


def b_star(t: float) -> float:
    """Sharp RIP recovery threshold."""
    if not t > 0:
        raise InputError(f"b_star needs t > 0, got {t!r}")
    if t < 4.0 / 3.0:
        return t / (4.0 - t)
    return math.sqrt((t - 1.0) / t)


def predict_extreme(kind: str, side: str, m: int, p: int, n: Optional[int] = None,
                    eta: float = 2.0) -> float:
    """First-order location of the max (``side='max'``) or min statistic.

    wishart: n +- 2 sqrt(n m log p); wigner: +- sqrt((4(m-1) + 2 eta) log p).
    """
    if side not in ("max", "min"):
        raise InputError(f"side must be 'max' or 'min', got {side!r}")
    if int(m) != m or m < 1:
        raise InputError("m must be a positive integer")
    if int(p) != p or p < 2:
        raise InputError("p must be an integer >= 2")
    sign = 1.0 if side == "max" else -1.0
    if kind == "wishart":
        if n is None or int(n) != n or n < 1:
            raise InputError("wishart prediction needs an integer n >= 1")
        return n + sign * 2.0 * math.sqrt(n * m * math.log(p))
    if kind == "wigner":
        if not 0.0 <= eta <= 2.0:
            raise InputError("eta must lie in [0, 2]")
        return sign * math.sqrt((4.0 * (m - 1) + 2.0 * eta) * math.log(p))
    raise InputError(f"unknown ensemble {kind!r}")


def epsilon_tau(m: int, p: float, t: float) -> Tuple[float, float]:
    if m < 1 or p < 3 or t < 0:
        raise InputError("epsilon_tau needs m >= 1, p >= 3, t >= 0")
    lp = math.log(p)
    eps = t / math.sqrt(4.0 * m * lp)
    tau = (1.0 - eps) * math.sqrt(4.0 * lp / m)
    return eps, tau


def wigner_lambda1_tail_bound(x: float, m: int, kappa: float = KAPPA) -> float:
    """log bound -x^2/4 + kappa m log x on P(lambda1 >= x or lambda_m <= -x) of an m x m GOE block."""
    if m < 2:
        raise DomainError("the Wigner block tail bound needs m >= 2")
    if not kappa > 0:
        raise DomainError("kappa must be positive")
    if not x > 4.0 * math.sqrt(m):
        raise DomainError(f"x must exceed 4 sqrt(m) = {4.0 * math.sqrt(m)!r}, got {x!r}")
    return -0.25 * x * x + kappa * m * math.log(x)


def _check_mdp(x, m, eta, r, delta):
    if m < 2:
        raise DomainError("needs m >= 2")
    if not 0.0 <= eta <= 2.0:
        raise DomainError("eta must lie in [0, 2]")
    if not r >= 4 * m:
        raise DomainError(f"r must be >= 4m = {4 * m}")
    if not 0.0 < delta < 1.0:
        raise DomainError("delta must lie in (0, 1)")
    if not x > 2.0 * r * delta + 1.0:
        raise DomainError(f"x must exceed 2 r delta + 1 = {2.0 * r * delta + 1.0!r}")


def log_mdp_eta_tail_bound(x: float, m: int, eta: float, r: float, delta: float) -> float:
    _check_mdp(x, m, eta, r, delta)
    denom = 2.0 * (eta - 2.0) / m + 4.0
    a = (1.5 * math.log(m) + math.log(math.log(m)) - m * math.log(delta)
         - (x - 2.0 * r * delta) ** 2 / denom)
    b = _LOG2 - r * r / 8.0
    return logsumexp(a, b)


def mdp_eta_tail_bound(x: float, m: int, eta: float, r: float, delta: float) -> float:
    """(m^1.5 log m / delta^m) exp(-(x - 2 r delta)^2 / (2(eta-2)/m + 4)) + 2 exp(-r^2/8).

    Bounds P(lambda1 >= x) for an m x m Wigner block with diagonal variance eta.
    Not clamped: the raw bound may exceed 1 (or overflow to inf).
    """
    lv = log_mdp_eta_tail_bound(x, m, eta, r, delta)
    return math.inf if lv > 709.0 else math.exp(lv)


def optimize_mdp_bound(x: float, m: int, eta: float):
    """Grid minimum over r = 4m 2^j (j = 0..10) and delta = 2^-1 .. 2^-20.

    Returns (r, delta, bound); raises DomainError if no grid pair is admissible.
    """
    best = None
    for j in range(11):
        r = 4.0 * m * 2.0 ** j
        for i in range(1, 21):
            delta = 2.0 ** -i
            if not x > 2.0 * r * delta + 1.0:
                continue
            lv = log_mdp_eta_tail_bound(x, m, eta, r, delta)
            if best is None or lv < best[2]:
                best = (r, delta, lv)
    if best is None:
        raise DomainError(f"no admissible (r, delta) on the grid for x = {x!r}")
    r, delta, lv = best
    return r, delta, (math.inf if lv > 709.0 else math.exp(lv))


def wishart_moderate_bound(y: float, n: int, m: int, r: float, d: float,
                           kappa: float = KAPPA, side: str = "upper") -> float:
    """log of 2 exp(-n I(1 +- (y - 2dmr)) + kappa m log(1/d)) + 2 exp(-m n I(r)).

    Bounds P(lambda1(W_S)/n - 1 >= y) on the upper side and
    P(lambda_m(W_S)/n - 1 <= -y) on the lower side, for one m x m Wishart block.
    """
    if side not in ("upper", "lower"):
        raise InputError("side must be 'upper' or 'lower'")
    if not r >= 1:
        raise DomainError("r must be >= 1")
    if not 0.0 < d < 0.5:
        raise DomainError("d must lie in (0, 1/2)")
    if not kappa > 0:
        raise DomainError("kappa must be positive")
    gap = y - 2.0 * d * m * r
    if not gap > 0:
        raise DomainError(f"y must exceed 2 d m r = {2.0 * d * m * r!r}")
    arg = 1.0 + gap if side == "upper" else 1.0 - gap
    rate = rate_I(arg)
    first = -math.inf if rate == math.inf else _LOG2 - n * rate - kappa * m * math.log(d)
    second = _LOG2 - m * n * rate_I(r)
    return logsumexp(first, second)


_MOD_R = (1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 16.0)
_MOD_D = tuple(2.0 ** -i for i in range(2, 41))


def optimize_moderate_bound(y: float, n: int, m: int, kappa: float = KAPPA,
                            side: str = "upper"):
    """Grid minimum of the moderate-deviation log bound; (r, d, log_bound) or None."""
    best = None
    for r in _MOD_R:
        for d in _MOD_D:
            if not y > 2.0 * d * m * r:
                continue
            lv = wishart_moderate_bound(y, n, m, r, d, kappa, side)
            if best is None or lv < best[2]:
                best = (r, d, lv)
    return best


def chi2_lower_tail_bound(x: float) -> float:
    """exp(-x), bounding P(chi2_n - n <= -2 sqrt(n x))."""
    if not x > 0:
        raise DomainError("x must be positive")
    return math.exp(-x)


def log_binomial_with_bounds(p: int, m: int):
    """(log C(p, m), m log p - m log m, m log p + m - m log m)."""
    if int(p) != p or int(m) != m or not 1 <= m <= p:
        raise InputError("need integers 1 <= m <= p")
    p, m = int(p), int(m)
    if p <= 100000:
        exact = math.log(math.comb(p, m))
    else:
        exact = math.lgamma(p + 1) - math.lgamma(m + 1) - math.lgamma(p - m + 1)
    lower = m * math.log(p) - m * math.log(m)
    return exact, lower, lower + m


def overlap_ratio_log(p: int, m: int) -> float:
    """log((p-m)!^2 / (p! (p-2m)!)), strictly negative.

    Evaluated as sum_{i<m} log1p(-m/(p-i)), the telescoped form of the
    factorial ratio, which keeps full relative accuracy for large p.
    """
    if int(p) != p or int(m) != m or m < 1:
        raise InputError("need positive integers p, m")
    if not 2 * m < p:
        raise DomainError("need 2m < p")
    return math.fsum(math.log1p(-m / (p - i)) for i in range(int(m)))


def _max_l_check(m, eps):
    if int(m) != m or m < 2:
        raise InputError("m must be an integer >= 2")
    if not 0.0 < eps < 1.0:
        raise InputError("epsilon must lie in (0, 1)")


def max_l_brute(m: int, eps: float):
    """(argmax, max) of (2m - l) - (2m^2 - l^2)(1-eps)^2/m over l = 1..m-1, by enumeration."""
    _max_l_check(m, eps)
    q = (1.0 - eps) ** 2
    best = None
    for l in range(1, int(m)):
        v = (2 * m - l) - (2 * m * m - l * l) * q / m
        if best is None or v > best[1]:
            best = (l, v)
    return best


def max_l_value(m: int, eps: float):
    """Closed form: the maximum sits at l = 1 with value (2m-1) - (2m - 1/m)(1-eps)^2."""
    _max_l_check(m, eps)
    return 1, (2 * m - 1) - (2 * m - 1.0 / m) * (1.0 - eps) ** 2


def assumption_diagnostics(n: float, p: float, m: int):
    """(rho1, rho2, xi_p, omega_n) for the growth conditions on (n, p, m).

    These are ratios to watch shrink, not pass/fail tests.
    """
    if n < 3 or m < 1:
        raise DomainError("need n >= 3 and m >= 1")
    if not p > 1:
        raise DomainError("need p > e^e")
    lp = math.log(p)
    llp = math.log(lp) if lp > 0 else -math.inf
    # p = e^e itself is admitted: log log p may round to just below 1
    if llp <= 0 or (llp < 1.0 and not math.isclose(llp, 1.0, rel_tol=1e-12)):
        raise DomainError(f"need p >= e^e, got {p!r}")
    xi = math.log(llp)
    ln = math.log(n)
    rho1 = m * llp / lp ** (1.0 / 3.0)
    rho2 = m * ln ** 1.5 * math.sqrt(lp) / n ** 0.25
    omega = math.sqrt(m / lp) * xi * ln
    return rho1, rho2, xi, omega


def log_block_exceed_prob(m: int, p: float, t: float) -> float:
    """log P(every entry of an m x m GOE block exceeds tau_{m,p,t} on the off-diagonal scale).

    Diagonal entries have variance 2, so the block probability is
    Phi_bar(tau/sqrt 2)^m Phi_bar(tau)^(m(m-1)/2).
    """
    _, tau = epsilon_tau(m, p, t)
    return (m * log_phi_bar_exact(tau / math.sqrt(2.0))
            + 0.5 * m * (m - 1) * log_phi_bar_exact(tau))


def second_moment_bound(mean: float, variance: float) -> float:
    """Var(Y)/(E Y)^2, an upper bound on P(Y <= 0)."""
    if mean == 0:
        raise DomainError("mean must be nonzero")
    if variance < 0:
        raise DomainError("variance must be nonnegative")
    return variance / (mean * mean)
