"""Detectors: the low-complexity pair-wise detector, brute-force MLSE, and ZF.

Pair-wise detector semantics (0-based indices; pairs start at even indices):
the I rail of samples (k, k+1) carries both components of symbol k, the Q rail
those of symbol k+1.  Each rail sums its two samples -- the in-pair terms are
constructive by construction and are never subtracted -- and removes the
out-of-pair interference using already-decided symbols for past samples and
sign-quantized raw samples for future ones.  Past contributions are rebuilt
from the decision that generated the interfering sample on the same rail
(sample p on the I rail carries symbol p rounded down to even; on the Q rail,
rounded up to odd).  Out-of-range contributions are zero: blocks start and
stop cold.

Decision feedback makes a frame sequential, but frames are independent and
run concurrently.  The arithmetic cost is Theta(N*L).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotInvertible, NotPositiveDefinite, OddLength, TooLarge
from .pulse import IsiKernel, IsiMatrix
from .txchain import ROTATION, coordinate_deinterleave, coordinate_interleave
from .channel import RxFrame

LLR_CLAMP = 50.0
MLSE_MAX_N = 14


@dataclass(frozen=True)
class DetectorOutput:
    """Hard BPSK decisions plus per-bit soft information.

    llr follows the bit mapping: positive means bit 0 (symbol +sqrt(Eb)).
    metric holds the pre-quantization decision statistic per symbol.
    op_count is filled only when operation counting was requested.
    """

    a_hat: np.ndarray
    llr: np.ndarray | None = None
    metric: np.ndarray | None = None
    op_count: int | None = None


def quantize(values, Eb: float = 1.0) -> np.ndarray:
    """Nearest unrotated BPSK symbol; a tie at exactly 0 resolves to +sqrt(Eb)."""
    root = np.sqrt(Eb)
    return np.where(np.asarray(values) >= 0.0, root, -root)


def _kernel_of(G) -> IsiKernel:
    return G.kernel if isinstance(G, IsiMatrix) else G


def _rx_vector(rx) -> np.ndarray:
    return rx.y if isinstance(rx, RxFrame) else np.asarray(rx)


def pair_gain(kernel: IsiKernel, zeta: float) -> float:
    """Mean of the pair statistic per unit symbol: zeta*sqrt(1/2)*(2 + 2 g(tau T))."""
    return zeta * np.sqrt(0.5) * (2.0 + 2.0 * float(kernel.g[1]))


def pair_noise_var(kernel: IsiKernel, sigma2: float) -> float:
    """Variance of one rail of the summed pair noise: sigma2*(1 + g(tau T))."""
    return sigma2 * (1.0 + float(kernel.g[1]))


def soft_output(metric, G, zeta: float, sigma2: float, Eb: float = 1.0) -> np.ndarray:
    """Gaussian LLRs for the pair-wise residual statistic.

    llr = 2*mu*metric/var with mu the constructive pair gain and var the rail
    noise variance of the summed pair; residual post-cancellation ISI is
    neglected.  sigma2 = 0 saturates at +/-LLR_CLAMP.
    """
    kernel = _kernel_of(G)
    metric = np.asarray(metric, dtype=float)
    if sigma2 <= 0.0:
        return np.where(metric >= 0.0, LLR_CLAMP, -LLR_CLAMP)
    mu = pair_gain(kernel, zeta) * np.sqrt(Eb)
    var = pair_noise_var(kernel, sigma2)
    return np.clip(2.0 * mu * metric / var, -LLR_CLAMP, LLR_CLAMP)


def _pair_feedback_coefs(g: np.ndarray, L: int) -> np.ndarray:
    """Coefficient of the decided symbol d pairs back in the summed statistic.

    Collects the four windows of the per-pair cancellation onto pair lags:
    sample lags (2d-1, 2d) act on the first sample of a pair and (2d, 2d+1)
    on the second, subject to each window's truncation.
    """
    D = (L + 1) // 2
    cd = np.zeros(D + 1)
    for d in range(1, D + 1):
        v = 0.0
        if 2 * d - 1 <= L - 1:
            v += g[2 * d - 1]
        if 2 * d <= L - 1:
            v += g[2 * d]
        if 2 * d <= L:
            v += g[2 * d]
        if 2 * d + 1 <= L:
            v += g[2 * d + 1]
        cd[d] = v
    return cd


def _detect_rail_fast(ys: np.ndarray, g: np.ndarray, L: int, scale: float, root: float):
    """One rail of the pair-wise detector (chain-recursion form).

    Returns (decisions per pair, residual statistic per pair).
    """
    N = len(ys)
    npair = N // 2
    q = np.where(ys >= 0.0, root, -root)
    qpad = np.concatenate([q, np.zeros(L + 2)])
    fut = np.zeros(npair)
    for m in range(2, L + 1):
        fut += (g[m] + g[m - 1]) * qpad[m : m + 2 * npair : 2]
    base = (ys[0::2] + ys[1::2] - scale * fut).tolist()
    cd = (scale * _pair_feedback_coefs(g, L)).tolist()
    D = len(cd) - 1
    dec = [0.0] * npair
    resid = [0.0] * npair
    for j in range(npair):
        acc = base[j]
        lim = D if j >= D else j
        for d in range(1, lim + 1):
            acc -= cd[d] * dec[j - d]
        resid[j] = acc
        dec[j] = root if acc >= 0.0 else -root
    return np.array(dec), np.array(resid)


def _detect_rail_reference(ys: np.ndarray, g: np.ndarray, L: int, scale: float, root: float):
    """Direct four-window transcription of the per-pair cancellation.

    Counts one multiply-accumulate per window term plus a small per-pair
    constant; returns (decisions per sample-pair symbol, residuals, ops).
    """
    N = len(ys)
    q = np.where(ys >= 0.0, root, -root)
    # decided symbol occupying sample p of this rail, in pair-slot terms:
    # both rails reduce to "pair index p//2"
    dec_pairs = np.zeros(N // 2)
    resid = np.zeros(N // 2)
    ops = 0
    for k in range(0, N - 1, 2):
        stat = ys[k] + ys[k + 1]
        isi = 0.0
        for i in range(1, L):            # past of sample k
            p = k - i
            if p >= 0:
                isi += dec_pairs[p // 2] * g[i]
                ops += 2
        for i in range(2, L + 1):        # future of sample k (quantized raw)
            p = k + i
            if p < N:
                isi += q[p] * g[i]
                ops += 2
        for i in range(1, L):            # future of sample k+1 (quantized raw)
            p = k + 1 + i
            if p < N:
                isi += q[p] * g[i]
                ops += 2
        for i in range(2, L + 1):        # past of sample k+1
            p = k + 1 - i
            if p >= 0:
                isi += dec_pairs[p // 2] * g[i]
                ops += 2
        val = stat - scale * isi
        ops += 4
        j = k // 2
        resid[j] = val
        dec_pairs[j] = root if val >= 0.0 else -root
    return dec_pairs, resid, ops


def detect_ci_pairwise(
    rx,
    G,
    zeta: float,
    Eb: float = 1.0,
    isi_len: int | None = None,
    count_ops: bool = False,
) -> DetectorOutput:
    """Pair-wise decision-feedback detection of a coordinate-interleaved frame.

    rx may be an RxFrame (its sigma2 feeds the soft output) or a raw complex
    vector (then llr assumes sigma2 = 0 saturation).  G may be an IsiMatrix or
    bare IsiKernel; isi_len defaults to the kernel depth.  count_ops switches
    to the instrumented reference implementation (identical decisions).
    """
    y = _rx_vector(rx)
    sigma2 = rx.sigma2 if isinstance(rx, RxFrame) else 0.0
    kernel = _kernel_of(G)
    N = len(y)
    if N % 2:
        raise OddLength(f"frame length must be even, got {N}")
    L = kernel.isi_len if isi_len is None else int(isi_len)
    if L > kernel.isi_len:
        raise DimensionMismatch(
            f"isi_len {L} exceeds kernel bandwidth {kernel.isi_len}"
        )
    g = kernel.g
    scale = zeta * np.sqrt(0.5)
    root = float(np.sqrt(Eb))
    a_hat = np.zeros(N)
    metric = np.zeros(N)
    ops = None
    if count_ops:
        decI, resI, opsI = _detect_rail_reference(y.real, g, L, scale, root)
        decQ, resQ, opsQ = _detect_rail_reference(y.imag, g, L, scale, root)
        ops = opsI + opsQ
    else:
        decI, resI = _detect_rail_fast(y.real, g, L, scale, root)
        decQ, resQ = _detect_rail_fast(y.imag, g, L, scale, root)
    a_hat[0::2], metric[0::2] = decI, resI
    a_hat[1::2], metric[1::2] = decQ, resQ
    llr = soft_output(metric, kernel, zeta, sigma2, Eb)
    return DetectorOutput(a_hat=a_hat, llr=llr, metric=metric, op_count=ops)


@dataclass(frozen=True)
class MlseProblem:
    """Whitened view of the block: z = (1/zeta) G^{-1} y, cov(z) = Delta."""

    z: np.ndarray
    Delta: np.ndarray


def build_mlse_problem(rx, G: IsiMatrix, zeta: float, sigma2: float) -> MlseProblem:
    """Materialize (z, Delta); raises NotInvertible for singular G."""
    y = _rx_vector(rx)
    Gd = G.full()
    if np.linalg.cond(Gd) > 1e14:
        raise NotInvertible("Gram matrix numerically singular")
    Ginv = np.linalg.inv(Gd)
    z = Ginv @ y / zeta
    return MlseProblem(z=z, Delta=(sigma2 / zeta**2) * Ginv)


def _mlse_candidates(N: int, root: float, mode: str) -> tuple[np.ndarray, np.ndarray]:
    """All 2^N symbol sequences in lexicographic order (-root before +root)."""
    grids = np.meshgrid(*([[-root, root]] * N), indexing="ij")
    A = np.stack([gr.ravel() for gr in grids], axis=1)
    if mode == "ci":
        S = A * ROTATION
        X = np.empty_like(S)
        X[:, 0::2] = S.real[:, 0::2] + 1j * S.real[:, 1::2]
        X[:, 1::2] = S.imag[:, 0::2] + 1j * S.imag[:, 1::2]
    elif mode == "conventional":
        X = A.astype(complex)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return A, X


def detect_mlse_bruteforce(
    rx,
    G: IsiMatrix,
    zeta: float,
    Eb: float = 1.0,
    mode: str = "ci",
) -> DetectorOutput:
    """Exact maximum-likelihood sequence estimation by exhaustive enumeration.

    Minimizes the whitened quadratic metric over all 2^N candidate BPSK
    sequences; evaluated in the algebraically equivalent inverse-free form
    x^H G x - (2/zeta) Re(x^H y), which is stable even when G is barely
    conditioned.  Ties resolve to the lexicographically smallest sequence.
    Enumeration is capped at N = 14 (oracle use only).
    """
    y = _rx_vector(rx)
    N = len(y)
    if N > MLSE_MAX_N:
        raise TooLarge(f"MLSE enumeration capped at N = {MLSE_MAX_N}, got {N}")
    if mode == "ci" and N % 2:
        raise OddLength("ci mode needs an even block length")
    Gd = G.full()
    if np.linalg.cond(Gd) > 1e14:
        raise NotInvertible("Gram matrix numerically singular")
    root = float(np.sqrt(Eb))
    A, X = _mlse_candidates(N, root, mode)
    quad = np.einsum("ci,ij,cj->c", X.conj(), Gd, X).real
    lin = (2.0 / zeta) * (X.conj() @ y).real
    best = int(np.argmin(quad - lin))
    return DetectorOutput(a_hat=A[best].copy())


def detect_zf(rx, G: IsiMatrix, zeta: float, Eb: float = 1.0, mode: str = "ci") -> DetectorOutput:
    """Zero-forcing: z = (1/zeta) G^{-1} y, then symbol-wise quantization.

    In ci mode the de-interleaved I and Q components of each source symbol are
    summed before the sign decision; conventional mode slices the real part.
    Exact on noiseless input; pays the usual noise enhancement otherwise.
    """
    y = _rx_vector(rx)
    if len(y) != G.n:
        raise DimensionMismatch(f"y has length {len(y)}, G is {G.n}x{G.n}")
    try:
        z = G.solve(y) / zeta
    except NotPositiveDefinite as exc:
        raise NotInvertible(str(exc)) from exc
    if mode == "ci":
        s_hat = coordinate_deinterleave(z)
        metric = s_hat.real + s_hat.imag
    elif mode == "conventional":
        metric = z.real
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return DetectorOutput(a_hat=quantize(metric, Eb), metric=metric)
