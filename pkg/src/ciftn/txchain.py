"""Transmitter chain: BPSK mapping, pi/4 rotation, coordinate interleaving.

Conventions (fixed here because detector and decoder LLR signs depend on them):

* bit 0 -> +sqrt(Eb), bit 1 -> -sqrt(Eb);
* rotation angle is +pi/4 (counter-clockwise), so the I and Q components of a
  rotated symbol are equal and share its sign;
* interleaved pairs start at even 0-based indices: x[2m] carries the I
  components of symbols (2m, 2m+1), x[2m+1] carries their Q components.

After interleaving, the real parts of a pair both equal a[2m]/sqrt(2) and the
imaginary parts both equal a[2m+1]/sqrt(2): every adjacent in-pair sample pair
shares a sign on each rail, which is what the pair-wise detector exploits.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import OddLength
from .pulse import IsiKernel, PulseSpec, rrc_impulse

ROTATION = np.exp(1j * np.pi / 4)


def map_bits_to_bpsk(bits, Eb: float = 1.0) -> np.ndarray:
    """Antipodal mapping 0 -> +sqrt(Eb), 1 -> -sqrt(Eb)."""
    bits = np.asarray(bits)
    return np.sqrt(Eb) * (1.0 - 2.0 * bits.astype(float))


def map_and_rotate(bits, Eb: float = 1.0) -> np.ndarray:
    """BPSK symbols rotated counter-clockwise by pi/4.

    Each component of the result has magnitude sqrt(Eb/2) and the I and Q
    components share the symbol's sign.
    """
    return map_bits_to_bpsk(bits, Eb) * ROTATION


def coordinate_interleave(s: np.ndarray) -> np.ndarray:
    """Swap I/Q components across each consecutive symbol pair.

    For even 0-based n: x[n] = s_I[n] + j*s_I[n+1]; for odd n:
    x[n] = s_Q[n-1] + j*s_Q[n].  The I rail then carries both components of
    the even-indexed symbols and the Q rail those of the odd-indexed ones.
    """
    s = np.asarray(s, dtype=complex)
    if len(s) % 2:
        raise OddLength(f"interleaver needs an even length, got {len(s)}")
    x = np.empty_like(s)
    sI, sQ = s.real, s.imag
    x[0::2] = sI[0::2] + 1j * sI[1::2]
    x[1::2] = sQ[0::2] + 1j * sQ[1::2]
    return x


def coordinate_deinterleave(x: np.ndarray) -> np.ndarray:
    """Inverse of coordinate_interleave."""
    x = np.asarray(x, dtype=complex)
    if len(x) % 2:
        raise OddLength(f"de-interleaver needs an even length, got {len(x)}")
    s = np.empty_like(x)
    xI, xQ = x.real, x.imag
    s[0::2] = xI[0::2] + 1j * xI[1::2]
    s[1::2] = xQ[0::2] + 1j * xQ[1::2]
    return s


def compute_zeta(kernel: IsiKernel) -> float:
    """Transmit-energy normalization 1/sqrt(1 + g(tau*T)).

    Interleaving makes adjacent in-pair samples fully correlated
    (E[x_n x*_{n+1}] = Eb inside a pair, 0 across pairs), which inflates the
    mean transmit energy per symbol to Eb*(1 + g(tau*T)); zeta restores parity
    with conventional signaling.  At tau = 1 the first lag vanishes and
    zeta = 1.
    """
    g1 = float(kernel.g[1]) if kernel.isi_len >= 1 else 0.0
    return 1.0 / np.sqrt(1.0 + g1)


@dataclass(frozen=True)
class SymbolFrame:
    """Transmit-side lineage of one block: bits through interleaved symbols.

    mode is "ci" for the interleaved chain or "conventional" for plain FTN
    (rotation and interleaving bypassed, zeta = 1, x = a).
    """

    bits: np.ndarray
    a: np.ndarray
    s: np.ndarray
    x: np.ndarray
    zeta: float
    Eb: float = 1.0
    mode: str = "ci"

    def __len__(self) -> int:
        return len(self.bits)


def build_frame(
    bits,
    kernel: IsiKernel | None = None,
    Eb: float = 1.0,
    mode: str = "ci",
    zeta: float | None = None,
) -> SymbolFrame:
    """Assemble a SymbolFrame from information bits.

    zeta overrides the energy normalization (used to replicate tabulated
    values that fixed it at the tau = 0.6 point); by default it is computed
    from the kernel for "ci" mode and is 1 for "conventional".
    """
    bits = np.asarray(bits, dtype=np.uint8)
    if len(bits) % 2:
        raise OddLength(f"frame length must be even, got {len(bits)}")
    a = map_bits_to_bpsk(bits, Eb)
    if mode == "ci":
        s = a * ROTATION
        x = coordinate_interleave(s)
        if zeta is None:
            if kernel is None:
                raise ValueError("ci mode needs a kernel (or explicit zeta)")
            zeta = compute_zeta(kernel)
    elif mode == "conventional":
        s = a.astype(complex)
        x = a.astype(complex)
        zeta = 1.0 if zeta is None else zeta
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return SymbolFrame(bits=bits, a=a, s=s, x=x, zeta=float(zeta), Eb=Eb, mode=mode)


@dataclass(frozen=True)
class TxWaveform:
    """Oversampled transmit signal on a uniform grid.

    samples[m] is the signal at t = (m - origin) * dt, with symbol n centered
    at t = n * tau * T.
    """

    samples: np.ndarray
    dt: float
    origin: int


@lru_cache(maxsize=16)
def _pulse_taps(spec: PulseSpec) -> tuple[np.ndarray, int]:
    """rRC taps on the dt grid, renormalized to exact unit energy."""
    dt = spec.tau * spec.symbol_period / spec.oversampling
    span = max(spec.isi_len * spec.tau + 4.0, 10.0) * spec.symbol_period
    half = int(np.ceil(span / dt))
    t = (np.arange(2 * half + 1) - half) * dt
    h = rrc_impulse(t, spec.alpha, spec.symbol_period)
    h = h / np.sqrt(np.sum(h * h) * dt)
    return h, half


def transmit_waveform(frame: SymbolFrame, spec: PulseSpec) -> TxWaveform:
    """Superpose zeta-scaled rRC pulses at tau*T spacing.

    Used by the waveform-fidelity channel path; oversampling must be >= 8 for
    the matched-filter grid to reproduce the analytic autocorrelation within
    cross-validation tolerance.
    """
    if spec.oversampling < 8:
        raise ValueError("waveform path needs oversampling >= 8")
    h, half = _pulse_taps(spec)
    os = spec.oversampling
    n = len(frame.x)
    up = np.zeros((n - 1) * os + 1, dtype=complex)
    up[::os] = frame.x
    samples = frame.zeta * np.convolve(up, h.astype(complex))
    dt = spec.tau * spec.symbol_period / os
    return TxWaveform(samples=samples, dt=dt, origin=half)
