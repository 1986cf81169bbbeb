"""Root-raised-cosine pulse family, its autocorrelation, and the banded Gram matrix.

All other modules consume the sampled autocorrelation ``g(i*tau*T)`` produced
here.  Times are handled in units of the symbol period ``T`` (1.0 by default);
the model is scale-invariant in ``T``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cholesky_banded, cho_solve_banded

from .errors import NotPositiveDefinite

# Tolerance for detecting the removable singularity at |t| = T/(2*alpha);
# the closed form suffers catastrophic cancellation inside this window.
_SINGULARITY_EPS = 1e-8


def _snap_zeros(value):
    """Zero crossings at nonzero integer multiples of T land on ~1e-17 float
    residue of sin(pi*n); snap so Nyquist-rate sampling is exactly orthogonal."""
    return np.where(np.abs(value) < 1e-15, 0.0, value)


def _rc_autocorr_scalar(u: float, alpha: float) -> float:
    """Raised-cosine value at normalized time u = t/T."""
    if alpha > 0.0:
        au = 2.0 * alpha * abs(u)
        if abs(au - 1.0) < _SINGULARITY_EPS:
            return float((np.pi / 4.0) * np.sinc(1.0 / (2.0 * alpha)))
        return float(_snap_zeros(np.sinc(u) * np.cos(np.pi * alpha * u) / (1.0 - au * au)))
    return float(_snap_zeros(np.sinc(u)))


def rc_autocorr(t, spec: "PulseSpec"):
    """Autocorrelation g(t) of the unit-energy rRC pulse (the raised cosine).

    Continuous in t, including the removable singularity at t = T/(2*alpha)
    and t = 0.  Accepts scalars or arrays; returns the matching shape.
    """
    alpha = spec.alpha
    T = spec.symbol_period
    t = np.asarray(t, dtype=float)
    u = t / T
    if t.ndim == 0:
        return _rc_autocorr_scalar(float(u), alpha)
    out = np.empty_like(u)
    if alpha > 0.0:
        au = 2.0 * alpha * np.abs(u)
        sing = np.abs(au - 1.0) < _SINGULARITY_EPS
        if np.any(sing):
            out[sing] = (np.pi / 4.0) * np.sinc(1.0 / (2.0 * alpha))
        ok = ~sing
        out[ok] = _snap_zeros(np.sinc(u[ok]) * np.cos(np.pi * alpha * u[ok]) / (1.0 - au[ok] ** 2))
    else:
        out[:] = _snap_zeros(np.sinc(u))
    return out


def rrc_impulse(t, alpha: float, T: float = 1.0):
    """Unit-energy root-raised-cosine impulse response h(t).

    Used by the oversampled waveform path; the matched pair h * h reproduces
    rc_autocorr up to grid discretization.
    """
    t = np.asarray(t, dtype=float)
    u = np.atleast_1d(t / T)
    out = np.empty_like(u)
    tiny = np.abs(u) < 1e-10
    out[tiny] = 1.0 - alpha + 4.0 * alpha / np.pi
    if alpha > 0.0:
        sing = np.abs(np.abs(u) - 1.0 / (4.0 * alpha)) < 1e-10
        out[sing & ~tiny] = (alpha / np.sqrt(2.0)) * (
            (1.0 + 2.0 / np.pi) * np.sin(np.pi / (4.0 * alpha))
            + (1.0 - 2.0 / np.pi) * np.cos(np.pi / (4.0 * alpha))
        )
        ok = ~(tiny | sing)
    else:
        ok = ~tiny
    uo = u[ok]
    num = np.sin(np.pi * uo * (1.0 - alpha)) + 4.0 * alpha * uo * np.cos(np.pi * uo * (1.0 + alpha))
    den = np.pi * uo * (1.0 - (4.0 * alpha * uo) ** 2)
    out[ok] = num / den
    out = out / np.sqrt(T)
    return out.reshape(t.shape) if t.ndim else float(out[0])


def _tail_energy(tau: float, alpha: float, L: int, T: float = 1.0, horizon: int = 512) -> float:
    """One-sided truncated tail energy sum_{i>L} g(i*tau*T)^2."""
    i = np.arange(L + 1, L + 1 + horizon)
    g = np.array([_rc_autocorr_scalar(k * tau, alpha) for k in i * 1.0])
    return float(np.sum(g * g))


def default_isi_len(tau: float, alpha: float, tail_tol: float = 1e-6, T: float = 1.0) -> int:
    """Smallest one-sided lag count L whose truncated tail energy is below tail_tol."""
    cap = 512
    g = np.array([_rc_autocorr_scalar(i * tau, alpha) for i in range(1, cap + 1)])
    tail = np.cumsum((g * g)[::-1])[::-1]
    # tail[j] = sum over lags >= j+1 of g^2: keeping lags 1..L drops tail[L]
    below = np.nonzero(tail < tail_tol)[0]
    if len(below) == 0:
        raise ValueError(f"tail tolerance {tail_tol} unreachable within {cap} lags")
    return max(1, int(below[0]))


@dataclass(frozen=True)
class PulseSpec:
    """Pulse-shaping configuration: roll-off, acceleration, and truncation depth.

    alpha          : rRC roll-off in [0, 1]
    tau            : acceleration factor in (0, 1]; 1.0 is the orthogonal rate
    symbol_period  : symbol duration T (seconds; the model is scale-invariant)
    oversampling   : samples per tau*T interval, waveform-fidelity path only
    isi_len        : one-sided lag count L; None selects the smallest L whose
                     truncated tail energy is below tail_tol
    """

    alpha: float = 0.3
    tau: float = 1.0
    symbol_period: float = 1.0
    oversampling: int = 16
    isi_len: int | None = None
    tail_tol: float = 1e-6

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 < self.tau <= 1.0:
            raise ValueError(f"tau must be in (0, 1], got {self.tau}")
        if self.symbol_period <= 0.0:
            raise ValueError("symbol_period must be positive")
        if self.oversampling < 1:
            raise ValueError("oversampling must be a positive integer")
        if self.isi_len is None:
            object.__setattr__(
                self, "isi_len", default_isi_len(self.tau, self.alpha, self.tail_tol)
            )
        if self.isi_len < 1:
            raise ValueError("isi_len must be >= 1")
        tail = _tail_energy(self.tau, self.alpha, self.isi_len)
        if tail >= self.tail_tol:
            raise ValueError(
                f"truncated tail energy {tail:.3e} exceeds tolerance {self.tail_tol:.1e} "
                f"at isi_len={self.isi_len}; increase isi_len"
            )


@dataclass(frozen=True)
class IsiKernel:
    """Sampled autocorrelation g(0), g(tau*T), ..., g(L*tau*T) for a PulseSpec."""

    g: np.ndarray
    spec: PulseSpec

    @classmethod
    def from_spec(cls, spec: PulseSpec) -> "IsiKernel":
        lags = np.arange(spec.isi_len + 1) * spec.tau * spec.symbol_period
        g = np.asarray(rc_autocorr(lags, spec), dtype=float)
        return cls(g=g, spec=spec)

    def __post_init__(self):
        g = np.asarray(self.g, dtype=float)
        object.__setattr__(self, "g", g)
        if g[0] != 1.0:
            raise ValueError("kernel must have unit zero-lag value")
        if np.any(np.abs(g) > 1.0 + 1e-12):
            raise ValueError("kernel magnitudes must not exceed 1")

    @property
    def isi_len(self) -> int:
        return len(self.g) - 1


class IsiMatrix:
    """Banded symmetric Toeplitz Gram matrix G with G[i, j] = g(|i - j| tau T).

    Entries beyond lag L are exactly zero by truncation.  Storage is banded
    (scipy upper form), so an N = 672 block costs O(N*L).  A banded Cholesky
    factor is attempted at construction and cached; configurations where the
    truncated matrix is numerically indefinite (deep acceleration with large N)
    leave the factor unavailable, and the operations that require it raise
    NotPositiveDefinite.
    """

    def __init__(self, kernel: IsiKernel, n: int):
        if n < 2:
            raise ValueError("matrix dimension must be >= 2")
        self.kernel = kernel
        self.n = int(n)
        L = min(kernel.isi_len, self.n - 1)
        self.bandwidth = L
        g = kernel.g
        ab = np.zeros((L + 1, self.n))
        for i in range(L + 1):
            ab[L - i, i:] = g[i]
        self._ab = ab
        try:
            self._cho = cholesky_banded(ab, lower=False)
            self._cho_error = None
        except np.linalg.LinAlgError as exc:
            self._cho = None
            self._cho_error = str(exc)

    @property
    def is_positive_definite(self) -> bool:
        return self._cho is not None

    @property
    def cholesky_upper(self) -> np.ndarray:
        """Banded upper factor U with G = U^T U; raises if unavailable."""
        if self._cho is None:
            raise NotPositiveDefinite(
                f"banded Cholesky failed for tau={self.kernel.spec.tau}, "
                f"alpha={self.kernel.spec.alpha}, L={self.bandwidth}, n={self.n}: "
                f"{self._cho_error}"
            )
        return self._cho

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """G @ x for real or complex x, O(N*L)."""
        x = np.asarray(x)
        if x.shape[0] != self.n:
            raise ValueError(f"expected length {self.n}, got {x.shape[0]}")
        g = self.kernel.g
        y = g[0] * x
        for i in range(1, self.bandwidth + 1):
            y[:-i] += g[i] * x[i:]
            y[i:] += g[i] * x[:-i]
        return y

    def solve(self, b: np.ndarray) -> np.ndarray:
        """G^{-1} b through the cached banded factor."""
        U = self.cholesky_upper
        b = np.asarray(b)
        if np.iscomplexobj(b):
            return cho_solve_banded((U, False), b.real) + 1j * cho_solve_banded((U, False), b.imag)
        return cho_solve_banded((U, False), b)

    def colored(self, w: np.ndarray) -> np.ndarray:
        """U^T @ w: maps white noise to noise with covariance G (per unit variance).

        Accepts a vector or a (n, batch) matrix of independent draws.
        """
        U = self.cholesky_upper
        L = self.bandwidth
        w = np.asarray(w)
        q = np.zeros_like(w)
        for i in range(L + 1):
            row = U[L - i]          # superdiagonal i: U[j, j+i] stored at row[j+i]
            r = row if w.ndim == 1 else row[:, None]
            if i == 0:
                q += r * w
            else:
                q[i:] += r[i:] * w[:-i]
        return q

    def entry(self, i: int, j: int) -> float:
        lag = abs(i - j)
        return float(self.kernel.g[lag]) if lag <= self.bandwidth else 0.0

    def full(self) -> np.ndarray:
        """Dense copy; intended for small n (oracles, MLSE)."""
        from scipy.linalg import toeplitz

        col = np.zeros(self.n)
        L = self.bandwidth
        col[: L + 1] = self.kernel.g[: L + 1]
        return toeplitz(col)


def build_isi_matrix(n: int, spec: PulseSpec, require_posdef: bool = False) -> IsiMatrix:
    """Construct the banded Gram matrix for an N-symbol block.

    require_posdef=True enforces a successful Cholesky factorization up front
    (needed for exact colored-noise generation and zero-forcing); the default
    defers that requirement to the operations that actually use the factor.
    """
    G = IsiMatrix(IsiKernel.from_spec(spec), n)
    if require_posdef:
        G.cholesky_upper  # noqa: B018 - raises NotPositiveDefinite on failure
    return G
