"""Closed-form lower bounds on bit-meters, block error and total energy per bit.

Every bound below depends on logarithms only through ratios, so the result is the
same in any base; ``base`` arguments exist so callers (and tests) can check that.
Bounds are real-valued; nothing is rounded up.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .channel import q_function

DECODING_FACTOR = 50.0
NEAR_CAPACITY_FACTOR = 100.0
SQRT2 = math.sqrt(2.0)

ALT_REGIME_NOTE = ("condition fails: no finite bit-meters bound; transmit power must instead "
                   "grow as Omega(log 1/eps)")


class ConditionError(ValueError):
    """A bound was requested outside the regime where it holds."""


@dataclass(frozen=True)
class ImplementationParams:
    lam: float
    mu: float

    def __post_init__(self):
        if not (self.lam > 0 and self.mu > 0):
            raise ValueError("lambda and mu must be positive")


@dataclass(frozen=True)
class BoundReport:
    theorem: str
    unit: str
    bound_value: float | None
    condition_ok: bool
    condition_text: str
    inputs: dict = field(default_factory=dict)
    note: str = ""

    def joules(self, mu: float) -> float | None:
        return None if self.bound_value is None else mu * self.bound_value


def _log(x: float, base: float) -> float:
    return math.log(x) / math.log(base)


def fano_error_lb(r: int, i_bits: float) -> float:
    """Lower bound on P(M_hat != M) for M uniform on 2**r values given ``i_bits`` of information.

    r >= 2: Fano with h_b <= 1 gives (r - i - 1)/r, which is 2/3 - 1/r at i = r/3.
    r = 1: h_b(P_e) >= 1 - i together with h_b(x) <= 2 sqrt(x) gives (1 - i)^2 / 4,
    which is 1/9 at i = 1/3.
    """
    if int(r) != r or r < 1:
        raise ValueError(f"r must be a positive integer, got {r}")
    if i_bits < 0:
        raise ValueError("information must be nonnegative")
    if r == 1:
        return max(0.0, 1 - i_bits) ** 2 / 4
    return max(0.0, (r - i_bits - 1) / r)


@dataclass(frozen=True)
class CellCount:
    bound: int
    simplified_valid: bool
    simplified_bound: float


def max_nodes_in_cell(a_over_lambda: float) -> CellCount:
    """Largest node count a side-``a`` cell can hold on a pitch-``lambda`` lattice."""
    x = float(a_over_lambda)
    if x < 0:
        raise ValueError("a/lambda must be nonnegative")
    return CellCount(math.floor(x * x + 4 * x + 4), x * x >= 25, 2 * x * x)


def _check_eps_p(eps: float, p: float) -> None:
    if not 0 < eps < 0.1:
        raise ValueError(f"block error must lie in (0, 0.1), got {eps}")
    if not 0 < p < 0.5:
        raise ValueError(f"p_ch must lie in (0, 1/2), got {p}")


def decoding_condition(eps: float, p_ch: float, base: float = 2.0) -> bool:
    _check_eps_p(eps, p_ch)
    return _log(1 / (10 * eps), base) > DECODING_FACTOR * _log(1 / (2 * p_ch), base)


def _fixed_eps_bound(theorem: str, unit: str, k: int, eps: float, p_ch: float, lam: float,
                     base: float) -> BoundReport:
    ok = decoding_condition(eps, p_ch, base)
    inputs = {"k": k, "eps": eps, "p_ch": p_ch, "lambda": lam}
    text = "log(1/(10 eps)) > 50 log(1/(2 p_ch))"
    if not ok:
        return BoundReport(theorem, unit, None, False, text, inputs, ALT_REGIME_NOTE)
    ratio = _log(1 / (10 * eps), base) / _log(1 / (2 * p_ch), base)
    value = k / (48 * SQRT2) * math.sqrt(ratio) * lam
    return BoundReport(theorem, unit, value, True, text, inputs)


def decoding_bm_lb(k: int, eps: float, p_ch: float, lam: float, base: float = 2.0) -> BoundReport:
    """Bit-meters any fixed-message-length decoder needs to reach block error ``eps``."""
    return _fixed_eps_bound("decoding", "bit-meters", k, eps, p_ch, lam, base)


def encoding_bm_lb(k: int, eps: float, p_ch: float, lam: float, base: float = 2.0) -> BoundReport:
    """Average bit-meters of any encoder, fixed or flexible message length."""
    return _fixed_eps_bound("encoding", "average bit-meters", k, eps, p_ch, lam, base)


def near_capacity_condition(n: float, p_ch: float, base: float = 2.0) -> bool:
    if n < 2:
        raise ValueError("blocklength must be at least 2")
    if not 0 < p_ch < 0.5:
        raise ValueError(f"p_ch must lie in (0, 1/2), got {p_ch}")
    return _log(n, base) > NEAR_CAPACITY_FACTOR * _log(1 / (2 * p_ch), base)


def near_capacity_bm_lb(k: int, n: float, p_ch: float, lam: float, base: float = 2.0) -> BoundReport:
    """Decoder bit-meters growing as sqrt(log n) at fixed crossover probability."""
    ok = near_capacity_condition(n, p_ch, base)
    inputs = {"k": k, "n": n, "p_ch": p_ch, "lambda": lam}
    text = "log n > 100 log(1/(2 p_ch))"
    if not ok:
        return BoundReport("near_capacity", "bit-meters", None, False, text, inputs,
                           "condition fails: blocklength too short for this bound")
    value = k / 192 * math.sqrt(_log(n, base) / _log(1 / (2 * p_ch), base)) * lam
    return BoundReport("near_capacity", "bit-meters", value, True, text, inputs)


def erasure_block_error_lb(n: float, R: float, p_ch: float) -> float:
    """Block error forced by independent erasure events in many starved cells.

    1 - (1 - (2p)^nbar / 9) ** (n R log(1/(2p)) / (4 log n)), nbar = log n / (2 log(1/(2p))),
    evaluated in the log domain so huge exponents and tiny bases stay accurate.
    """
    if not 0 < R <= 1:
        raise ValueError(f"rate must lie in (0, 1], got {R}")
    if not near_capacity_condition(n, p_ch):
        raise ConditionError("log n > 100 log(1/(2 p_ch)) does not hold")
    ln_n = math.log(n)
    ln_inv = math.log(1 / (2 * p_ch))
    nbar = ln_n / (2 * ln_inv)
    x = math.exp(-nbar * ln_inv) / 9            # (2p)^nbar / 9
    exponent = n * R * ln_inv / (4 * ln_n)
    return -math.expm1(exponent * math.log1p(-x))


def default_beta(zeta: float = 1.0, sigma2: float = 1.0, calibration_snr: float = 4.0) -> float:
    """Slope beta with beta * P_T = log2(1/(2 p_ch(P_T))) exact at ``calibration_snr``."""
    p_cal = q_function(math.sqrt(calibration_snr))
    P_cal = calibration_snr * sigma2 / zeta
    return math.log2(1 / (2 * p_cal)) / P_cal


def friction_constant(beta: float, mu: float) -> float:
    """c in E/k >= P_T/(R W) + c * sqrt(log2(1/(10 eps)) / P_T)."""
    if not (beta > 0 and mu > 0):
        raise ValueError("beta and mu must be positive")
    return mu / (48 * SQRT2 * math.sqrt(beta))


def total_energy_per_bit_lb(eps: float, beta: float, mu: float, R: float, W: float, P_T: float) -> float:
    """Transmit plus encoding energy per bit (joules/bit) at transmit power ``P_T``.

    Uses log2(1/(2 p_ch)) ~ beta * P_T so the friction term becomes
    mu/(48 sqrt 2) * sqrt(L / (beta P_T)) with L = log2(1/(10 eps)).
    """
    if not P_T > 0:
        raise ValueError("P_T must be positive")
    c = friction_constant(beta, mu)
    L = math.log2(1 / (10 * eps))
    return P_T / (R * W) + c * math.sqrt(L / P_T)


def golden_section(f, lo, hi, tol=mpmath.mpf("1e-30"), max_iter=400):
    """Minimise a unimodal ``f`` on [lo, hi]; arithmetic follows the type of ``lo``/``hi``."""
    invphi = (mpmath.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2


@dataclass(frozen=True)
class PowerOptimum:
    P_T: float
    value: float
    golden_P_T: float
    golden_value: float
    rel_gap: float


def optimal_transmit_power(eps: float, beta: float, mu: float, R: float, W: float,
                           check_tol: float = 1e-9) -> PowerOptimum:
    """Transmit power minimising the two-term energy bound, in closed form.

    P* = ((c/2) sqrt(L) R W)^(2/3). The closed form is checked against a golden-section
    search over log P_T run in 50-digit arithmetic; a disagreement beyond
    ``check_tol`` (relative) raises ``ArithmeticError``.
    """
    if not all(v > 0 for v in (eps, beta, mu, R, W)):
        raise ValueError("all parameters must be positive")
    c = friction_constant(beta, mu)
    L = math.log2(1 / (10 * eps))
    if not L > 0:
        raise ValueError("eps must be below 0.1")
    rw = R * W
    p_star = (c / 2 * math.sqrt(L) * rw) ** (2 / 3)
    value = p_star / rw + c * math.sqrt(L / p_star)

    with mpmath.workdps(50):
        cm, Lm, rwm = mpmath.mpf(c), mpmath.mpf(L), mpmath.mpf(rw)
        g = lambda u: mpmath.exp(u) / rwm + cm * mpmath.sqrt(Lm / mpmath.exp(u))
        u = golden_section(g, mpmath.mpf(-300), mpmath.mpf(300))
        gp, gv = float(mpmath.exp(u)), float(g(u))
    gap = abs(gp - p_star) / p_star
    if gap > check_tol:
        raise ArithmeticError(f"closed-form optimum {p_star} disagrees with search {gp}")
    return PowerOptimum(p_star, value, gp, gv, gap)


def required_blocklength(eps: float, C_minus_R: float, K: float) -> float:
    """Order-sense blocklength log2(1/eps) / (K (C - R)^2) needed near capacity."""
    if not (C_minus_R > 0 and K > 0):
        raise ValueError("C - R and K must be positive")
    return math.log2(1 / eps) / (K * C_minus_R ** 2)


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    max_residual: float
    points: int


def fit_loglog_slope(x, y) -> SlopeFit:
    """Least-squares slope of log y against log x; needs at least 4 distinct x values."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 4 or len(np.unique(x)) < 4:
        raise ValueError("need at least 4 distinct grid points to fit a slope")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    return SlopeFit(float(slope), float(intercept), float(np.max(np.abs(resid))), len(x))
