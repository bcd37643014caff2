"""Hard-decision BI-AWGN channel (a BSC), its erasure upgrade, and Monte-Carlo runs.

Information quantities are in bits (base-2 logarithms).
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

WILSON_Z = 1.959963984540054  # two-sided 95%
DEFAULT_CHUNK = 4096


def q_function(x):
    """Gaussian tail probability Q(x) = P(N(0,1) > x)."""
    out = 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ChannelParams:
    zeta: float = 1.0
    sigma2: float = 1.0
    P_T: float = 0.0
    W: float = 1.0

    def __post_init__(self):
        if not self.zeta > 0:
            raise ValueError("path loss zeta must be positive")
        if not self.sigma2 > 0:
            raise ValueError("noise variance must be positive")
        if self.P_T < 0:
            raise ValueError("transmit power must be nonnegative")
        if not self.W > 0:
            raise ValueError("W must be positive")

    @property
    def snr(self) -> float:
        return self.zeta * self.P_T / self.sigma2

    @property
    def p_ch(self) -> float:
        return p_ch(self)


def p_ch(params: ChannelParams) -> float:
    """Raw crossover probability after hard decision on a BPSK symbol."""
    return q_function(math.sqrt(params.snr))


@dataclass(frozen=True)
class CodeParams:
    k: int
    n: int

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")

    @property
    def R(self) -> float:
        return self.k / self.n


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _check_p(p: float) -> None:
    if not 0 <= p <= 0.5:
        raise ValueError(f"crossover probability must lie in [0, 1/2], got {p}")


def transmit_bsc(codeword, p: float, seed=None) -> np.ndarray:
    """Flip each bit independently with probability ``p``. Works on any array shape."""
    _check_p(p)
    x = np.asarray(codeword, dtype=np.uint8)
    flips = _rng(seed).random(x.shape) < p
    return x ^ flips.astype(np.uint8)


def transmit_bec_then_fill(codeword, p: float, seed=None) -> tuple[np.ndarray, np.ndarray]:
    """Erase each bit with probability 2p, then replace erasures by fair coin flips.

    The output has the same law as BSC(p); the erasure mask is returned as well.
    """
    _check_p(p)
    x = np.asarray(codeword, dtype=np.uint8)
    rng = _rng(seed)
    mask = rng.random(x.shape) < 2 * p
    fill = rng.integers(0, 2, x.shape, dtype=np.uint8)
    return np.where(mask, fill, x).astype(np.uint8), mask


def binary_entropy(x):
    x = np.asarray(x, dtype=float)
    if np.any((x < 0) | (x > 1)):
        raise ValueError("binary entropy argument must lie in [0, 1]")
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -x * np.log2(x) - (1 - x) * np.log2(1 - x)
    h = np.where((x == 0) | (x == 1), 0.0, h)
    return float(h) if h.ndim == 0 else h


def bsc_capacity(p):
    _check_p(float(np.max(p)))
    return 1 - binary_entropy(p)


def wilson_interval(errors: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    if trials < 1:
        raise ValueError("need at least one trial")
    phat = errors / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if errors == 0 else max(0.0, centre - half)
    hi = 1.0 if errors == trials else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class BlockErrorEstimate:
    trials: int
    errors: int
    p_ch: float
    seed: int
    mean_decoder_bitmeters: float | None = None

    @property
    def eps_hat(self) -> float:
        return self.errors / self.trials

    @property
    def wilson(self) -> tuple[float, float]:
        return wilson_interval(self.errors, self.trials)

    def row(self) -> dict:
        lo, hi = self.wilson
        return {"trials": self.trials, "errors": self.errors, "eps_hat": self.eps_hat,
                "wilson_lo": lo, "wilson_hi": hi, "p_ch": self.p_ch, "seed": self.seed}


BLOCK_ERROR_COLUMNS = ("trials", "errors", "eps_hat", "wilson_lo", "wilson_hi", "p_ch", "seed")


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    """Generator for one block of trials; depends only on (seed, chunk index)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))


def worker_count() -> int:
    return max(1, int(os.environ.get("INFOFRICTION_WORKERS", "1")))


def estimate_block_error(coder, p: float, trials: int, seed: int = 0, decoder_circuit=None,
                         chunk: int = DEFAULT_CHUNK, workers: int | None = None) -> BlockErrorEstimate:
    """Monte-Carlo block-error rate of ``coder`` over BSC(p).

    ``coder`` needs ``k``, ``encode_batch`` and ``decode_batch`` (see ``codes``).
    If ``decoder_circuit`` is given, the mean decoder bit-meters over trials is also
    returned. Trials run in fixed-size chunks, each seeded from (seed, chunk index),
    so results do not depend on ``workers``.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    _check_p(p)

    def run(c: int):
        size = min(chunk, trials - c * chunk)
        rng = chunk_rng(seed, c)
        info = rng.integers(0, 2, (size, coder.k), dtype=np.uint8)
        received = transmit_bsc(coder.encode_batch(info), p, rng)
        decoded, rounds = coder.decode_batch(received)
        errs = int(np.count_nonzero(np.any(decoded != info, axis=1)))
        bm = 0.0
        if decoder_circuit is not None:
            bm = float(np.sum(coder.decoder_bitmeters_batch(decoder_circuit, rounds)))
        return errs, bm

    n_chunks = -(-trials // chunk)
    workers = workers or worker_count()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, range(n_chunks)))
    else:
        results = [run(c) for c in range(n_chunks)]
    errors = sum(e for e, _ in results)
    mean_bm = math.fsum(b for _, b in results) / trials if decoder_circuit is not None else None
    return BlockErrorEstimate(trials, errors, p, seed, mean_bm)
