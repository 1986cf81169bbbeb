"""Discrete AWGN channel: exact matrix model and oversampled waveform model.

Matrix fidelity realizes y = zeta*G*x + q with cov(q) = sigma2*G through the
banded Cholesky factor of G (exact, O(N*L) per frame).  Waveform fidelity
synthesizes the oversampled transmit signal, adds white noise, matched-filters
and samples; it needs no factorization and therefore also covers the deep
acceleration region where the truncated Gram matrix is numerically singular.

Eb/N0 accounting: sigma2 is the noise variance per complex sample (N0).  With
Eb = 1 and uncoded signaling, Eb/N0 = 1/sigma2; for coded runs the energy per
information bit is Eb/code_rate, so sigma2 = Eb / (code_rate * 10^(dB/10)).
Bit-by-bit this matches the textbook Q(sqrt(2*Eb/N0)) reference at tau = 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import DimensionMismatch
from .pulse import IsiMatrix, PulseSpec
from .txchain import SymbolFrame, _pulse_taps, transmit_waveform


def sigma2_for_ebn0(ebn0_db: float, Eb: float = 1.0, code_rate: float = 1.0) -> float:
    """Noise variance per complex sample for a target Eb/N0 in dB."""
    return Eb / (code_rate * 10.0 ** (ebn0_db / 10.0))


def frame_rng(master_seed: int, sweep_index: int, frame_index: int) -> np.random.Generator:
    """Disjoint per-frame stream: SeedSequence(master, spawn_key=(sweep, frame)).

    This splitting rule makes Monte Carlo results independent of worker count
    and execution order.
    """
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(sweep_index, frame_index))
    return np.random.default_rng(ss)


@dataclass(frozen=True)
class RxFrame:
    """Received tau*T-spaced samples after the matched filter."""

    y: np.ndarray
    sigma2: float
    ebn0_db: float | None = None
    seed: int | None = None
    fidelity: str = "matrix"

    def __len__(self) -> int:
        return len(self.y)


def _as_rng(rng_or_seed) -> np.random.Generator:
    if isinstance(rng_or_seed, np.random.Generator):
        return rng_or_seed
    return np.random.default_rng(rng_or_seed)


def apply_channel_matrix(
    x: np.ndarray,
    G: IsiMatrix,
    zeta: float,
    sigma2: float,
    rng=None,
    ebn0_db: float | None = None,
) -> RxFrame:
    """y = zeta*G*x + q with q = U^T w, cov(q) = sigma2*G.

    w is white complex Gaussian with per-sample variance sigma2 (real rail
    drawn first, then imaginary).  Deterministic given the generator state.
    Raises NotPositiveDefinite when sigma2 > 0 and no factor exists.
    """
    x = np.asarray(x, dtype=complex)
    if x.shape[0] != G.n:
        raise DimensionMismatch(f"x has length {x.shape[0]}, G is {G.n}x{G.n}")
    if sigma2 < 0:
        raise ValueError("sigma2 must be nonnegative")
    y = zeta * G.matvec(x.copy())
    if sigma2 > 0.0:
        rng = _as_rng(rng)
        wI = rng.standard_normal(G.n)
        wQ = rng.standard_normal(G.n)
        scale = np.sqrt(sigma2 / 2.0)
        y = y + scale * (G.colored(wI) + 1j * G.colored(wQ))
    return RxFrame(y=y, sigma2=float(sigma2), ebn0_db=ebn0_db, fidelity="matrix")


def draw_colored_noise(G: IsiMatrix, sigma2: float, rng, size: int) -> np.ndarray:
    """size independent draws of q (columns), cov(q) = sigma2*G; for statistics."""
    rng = _as_rng(rng)
    scale = np.sqrt(sigma2 / 2.0)
    wI = rng.standard_normal((G.n, size))
    wQ = rng.standard_normal((G.n, size))
    return scale * (G.colored(wI) + 1j * G.colored(wQ))


def apply_channel_waveform(
    frame: SymbolFrame,
    spec: PulseSpec,
    sigma2: float,
    rng=None,
    ebn0_db: float | None = None,
) -> RxFrame:
    """Oversampled path: pulse superposition + white noise + matched filter.

    Statistically equivalent to the matrix model (same first and second
    moments up to pulse truncation and grid discretization).
    """
    tx = transmit_waveform(frame, spec)
    r = tx.samples
    if sigma2 > 0.0:
        rng = _as_rng(rng)
        std = np.sqrt(sigma2 / (2.0 * tx.dt))
        r = r + std * (rng.standard_normal(len(r)) + 1j * rng.standard_normal(len(r)))
    h, half = _pulse_taps(spec)
    mf = fftconvolve(r, h.astype(complex)) * tx.dt
    n = len(frame.x)
    idx = 2 * half + np.arange(n) * spec.oversampling
    return RxFrame(y=mf[idx], sigma2=float(sigma2), ebn0_db=ebn0_db, fidelity="waveform")
