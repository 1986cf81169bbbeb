"""Monte Carlo BER engine, spectral efficiency, and the worked-example trace.

Determinism contract: every frame draws from an independent stream seeded by
(master_seed, sweep_index, frame_index), frames are consumed in fixed-size
rounds, and the stop rule is evaluated only at round boundaries.  Results are
therefore bit-identical for any worker count, and the CSV emitter uses fixed
formatting so equal configurations produce byte-identical files.
"""
from __future__ import annotations

import multiprocessing
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import (
    RxFrame,
    apply_channel_matrix,
    apply_channel_waveform,
    frame_rng,
    sigma2_for_ebn0,
)
from .coding import LdpcCode
from .detect import detect_ci_pairwise, detect_mlse_bruteforce, detect_zf, quantize
from .errors import ConfigInvalid
from .isi_analysis import IsiBudget, isi_budget
from .pulse import IsiKernel, IsiMatrix, PulseSpec, build_isi_matrix
from .txchain import build_frame, compute_zeta

MODES = ("ci_ftn", "conventional_ftn", "nyquist_bpsk", "nyquist_qpsk")
DETECTORS = ("pairwise", "zf", "mlse")
FIDELITIES = ("auto", "matrix", "waveform")

ROUND_FRAMES = 64
LLR_CLAMP = 50.0


@dataclass(frozen=True)
class SimConfig:
    """One BER experiment: signaling mode, detector, sweep, and stop rule.

    The stop rule requires at least 100 bit errors per point for statistical
    validity unless allow_low_errors is set.  fidelity "auto" uses the exact
    matrix channel whenever the Gram matrix factors and falls back to the
    oversampled waveform channel otherwise.
    """

    mode: str = "ci_ftn"
    detector: str = "pairwise"
    pulse: PulseSpec = field(default_factory=PulseSpec)
    ebn0_db: tuple[float, ...] = (0.0,)
    frame_len: int = 672
    coded: bool = False
    ldpc_file: str | None = None
    ldpc_iters: int = 50
    min_errors: int = 200
    max_bits: float = 2e8
    master_seed: int = 1
    fidelity: str = "auto"
    workers: int = 1
    Eb: float = 1.0
    zeta: float | None = None
    allow_low_errors: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigInvalid(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.detector not in DETECTORS:
            raise ConfigInvalid(f"detector must be one of {DETECTORS}, got {self.detector!r}")
        if self.fidelity not in FIDELITIES:
            raise ConfigInvalid(f"fidelity must be one of {FIDELITIES}")
        sweep = tuple(float(v) for v in self.ebn0_db)
        if len(sweep) == 0:
            raise ConfigInvalid("ebn0_db sweep must be nonempty")
        if any(b <= a for a, b in zip(sweep, sweep[1:])):
            raise ConfigInvalid("ebn0_db sweep must be strictly increasing")
        object.__setattr__(self, "ebn0_db", sweep)
        if self.frame_len < 2 or self.frame_len % 2:
            raise ConfigInvalid("frame_len must be even and >= 2")
        if self.min_errors < 100 and not self.allow_low_errors:
            raise ConfigInvalid("min_errors < 100 requires allow_low_errors")
        if self.max_bits <= 0:
            raise ConfigInvalid("max_bits must be positive")
        if self.workers < 1:
            raise ConfigInvalid("workers must be >= 1")
        if self.mode == "conventional_ftn" and self.detector == "pairwise":
            raise ConfigInvalid("the pairwise detector requires coordinate-interleaved frames")
        if self.detector == "mlse" and self.frame_len > 14:
            raise ConfigInvalid("mlse detector is an oracle; frame_len must be <= 14")
        if self.coded:
            if self.mode == "conventional_ftn":
                raise ConfigInvalid("coded runs need a soft-output chain (ci_ftn or nyquist modes)")
            if self.detector != "pairwise" and self.mode == "ci_ftn":
                raise ConfigInvalid("coded ci_ftn runs use the pairwise detector's soft output")


@dataclass(frozen=True)
class BerPoint:
    """One sweep point of a BER run."""

    ebn0_db: float
    bits_simulated: int
    bit_errors: int
    ber: float
    ci_halfwidth: float
    wall_time_s: float


def ber_points_csv(points: list[BerPoint]) -> str:
    """Fixed-format CSV; '.' decimal separator, newline-terminated rows."""
    lines = ["ebn0_db,bits,errors,ber,ci_halfwidth"]
    for p in points:
        lines.append(
            f"{p.ebn0_db:g},{p.bits_simulated},{p.bit_errors},{p.ber:.6e},{p.ci_halfwidth:.6e}"
        )
    return "\n".join(lines) + "\n"


def ebn0_at_ber(points, target_ber: float) -> float:
    """Eb/N0 where a measured curve crosses target_ber (log-linear in BER)."""
    pts = [(p.ebn0_db, p.ber) for p in points if p.ber > 0]
    if len(pts) < 2:
        return float("nan")
    dbs = np.array([p[0] for p in pts])
    lb = np.log10([p[1] for p in pts])
    lt = np.log10(target_ber)
    for i in range(len(dbs) - 1):
        lo, hi = lb[i], lb[i + 1]
        if (lo - lt) * (hi - lt) <= 0 and lo != hi:
            f = (lt - lo) / (hi - lo)
            return float(dbs[i] + f * (dbs[i + 1] - dbs[i]))
    return float("nan")


def spectral_efficiency(mode: str, tau: float, alpha: float, bits_per_symbol: float | None = None) -> float:
    """Bits/s/Hz: bits_per_symbol / (tau * (1 + alpha)).

    BPSK over the interleaved or conventional chain carries 1 bit per symbol;
    Nyquist QPSK carries 2 at tau = 1 (tau is forced for the nyquist modes).
    """
    if not 0.0 < tau <= 1.0 or not 0.0 <= alpha <= 1.0:
        raise ValueError("tau in (0,1] and alpha in [0,1] required")
    if bits_per_symbol is None:
        bits_per_symbol = 2.0 if mode == "nyquist_qpsk" else 1.0
    if mode.startswith("nyquist"):
        tau = 1.0
    return bits_per_symbol / (tau * (1.0 + alpha))


class _RunContext:
    """Per-process immutable state shared by all frames of one run."""

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        self.kernel = IsiKernel.from_spec(cfg.pulse)
        self.G = build_isi_matrix(cfg.frame_len, cfg.pulse) if cfg.mode.endswith("ftn") else None
        if cfg.mode == "ci_ftn":
            self.zeta = cfg.zeta if cfg.zeta is not None else compute_zeta(self.kernel)
            self.frame_mode = "ci"
        else:
            self.zeta = 1.0 if cfg.zeta is None else cfg.zeta
            self.frame_mode = "conventional"
        if cfg.fidelity == "auto":
            use_matrix = self.G is not None and self.G.is_positive_definite
            self.fidelity = "matrix" if (use_matrix or self.G is None) else "waveform"
        else:
            self.fidelity = cfg.fidelity
        self.code = None
        if cfg.coded:
            self.code = (
                LdpcCode.from_file(cfg.ldpc_file, max_iterations=cfg.ldpc_iters)
                if cfg.ldpc_file
                else LdpcCode.default(max_iterations=cfg.ldpc_iters)
            )
            if cfg.frame_len != self.code.n:
                raise ConfigInvalid(
                    f"coded frames must match the codeword length {self.code.n}"
                )
        self.code_rate = self.code.rate if self.code else 1.0
        self.sigma2 = tuple(
            sigma2_for_ebn0(db, cfg.Eb, self.code_rate) for db in cfg.ebn0_db
        )

    def info_bits_per_frame(self) -> int:
        return self.code.k if self.code else self.cfg.frame_len


def _ftn_channel(ctx: _RunContext, frame, sigma2: float, rng) -> RxFrame:
    if ctx.fidelity == "matrix":
        return apply_channel_matrix(frame.x, ctx.G, frame.zeta, sigma2, rng)
    return apply_channel_waveform(frame, ctx.cfg.pulse, sigma2, rng)


def _sim_round(ctx: _RunContext, sweep_idx: int, frame_lo: int, n_frames: int):
    """Simulate n_frames frames starting at frame_lo; returns (errors, bits)."""
    cfg = ctx.cfg
    sigma2 = ctx.sigma2[sweep_idx]
    root = np.sqrt(cfg.Eb)
    errors = 0
    bits = 0
    llr_batch = [] if ctx.code else None
    info_batch = [] if ctx.code else None
    for fi in range(frame_lo, frame_lo + n_frames):
        rng = frame_rng(cfg.master_seed, sweep_idx, fi)
        if ctx.code:
            info = rng.integers(0, 2, ctx.code.k).astype(np.uint8)
            frame_bits = ctx.code.encode(info)
        else:
            info = frame_bits = rng.integers(0, 2, cfg.frame_len).astype(np.uint8)

        if cfg.mode == "nyquist_bpsk":
            a = root * (1.0 - 2.0 * frame_bits.astype(float))
            y = a + np.sqrt(sigma2 / 2.0) * (
                rng.standard_normal(len(a)) + 1j * rng.standard_normal(len(a))
            )
            llr = np.clip(2.0 * root * y.real / (sigma2 / 2.0), -LLR_CLAMP, LLR_CLAMP)
            hard = (y.real < 0).astype(np.uint8)
        elif cfg.mode == "nyquist_qpsk":
            bI = frame_bits[0::2].astype(float)
            bQ = frame_bits[1::2].astype(float)
            x = root * ((1.0 - 2.0 * bI) + 1j * (1.0 - 2.0 * bQ))
            y = x + np.sqrt(sigma2 / 2.0) * (
                rng.standard_normal(len(x)) + 1j * rng.standard_normal(len(x))
            )
            hard = np.empty(cfg.frame_len, dtype=np.uint8)
            hard[0::2] = y.real < 0
            hard[1::2] = y.imag < 0
            llr = np.empty(cfg.frame_len)
            llr[0::2] = 2.0 * root * y.real / (sigma2 / 2.0)
            llr[1::2] = 2.0 * root * y.imag / (sigma2 / 2.0)
            llr = np.clip(llr, -LLR_CLAMP, LLR_CLAMP)
        else:
            frame = build_frame(
                frame_bits, ctx.kernel, Eb=cfg.Eb, mode=ctx.frame_mode, zeta=cfg.zeta
            )
            rx = _ftn_channel(ctx, frame, sigma2, rng)
            if cfg.detector == "pairwise":
                out = detect_ci_pairwise(rx, ctx.kernel, frame.zeta, cfg.Eb)
            elif cfg.detector == "zf":
                out = detect_zf(rx, ctx.G, frame.zeta, cfg.Eb, mode=ctx.frame_mode)
            else:
                out = detect_mlse_bruteforce(rx, ctx.G, frame.zeta, cfg.Eb, mode=ctx.frame_mode)
            hard = (out.a_hat < 0).astype(np.uint8)
            llr = out.llr

        if ctx.code:
            llr_batch.append(llr)
            info_batch.append(info)
        else:
            errors += int(np.sum(hard != frame_bits))
            bits += cfg.frame_len

    if ctx.code:
        llr_mat = np.stack(llr_batch, axis=1)
        decoded, _ = ctx.code.decode(llr_mat)
        info_mat = np.stack(info_batch, axis=1)
        errors = int(np.sum(decoded != info_mat))
        bits = ctx.code.k * n_frames
    return errors, bits


_WORKER_CTX: _RunContext | None = None


def _worker_init(cfg: SimConfig):
    global _WORKER_CTX
    _WORKER_CTX = _RunContext(cfg)


def _worker_round(args):
    sweep_idx, frame_lo, n_frames = args
    return _sim_round(_WORKER_CTX, sweep_idx, frame_lo, n_frames)


def _split_round(frame_lo: int, n_frames: int, parts: int):
    sizes = [n_frames // parts] * parts
    for i in range(n_frames % parts):
        sizes[i] += 1
    lo = frame_lo
    out = []
    for s in sizes:
        if s:
            out.append((lo, s))
            lo += s
    return out


def run_ber(config: SimConfig) -> list[BerPoint]:
    """Run the BER sweep; deterministic for a given master seed and config."""
    ctx = _RunContext(config)
    pool = None
    try:
        if config.workers > 1:
            pool = multiprocessing.Pool(
                config.workers, initializer=_worker_init, initargs=(config,)
            )
        points = []
        info_per_frame = ctx.info_bits_per_frame()
        for sweep_idx in range(len(config.ebn0_db)):
            t0 = time.perf_counter()
            errors = 0
            bits = 0
            cursor = 0
            while errors < config.min_errors and bits < config.max_bits:
                if pool is None:
                    e, b = _sim_round(ctx, sweep_idx, cursor, ROUND_FRAMES)
                else:
                    tasks = [
                        (sweep_idx, lo, n)
                        for lo, n in _split_round(cursor, ROUND_FRAMES, config.workers)
                    ]
                    e = b = 0
                    for te, tb in pool.map(_worker_round, tasks):
                        e += te
                        b += tb
                errors += e
                bits += b
                cursor += ROUND_FRAMES
            ber = errors / bits if bits else 0.0
            half = 1.96 * float(np.sqrt(max(ber * (1.0 - ber), 0.0) / bits)) if bits else 0.0
            points.append(
                BerPoint(
                    ebn0_db=config.ebn0_db[sweep_idx],
                    bits_simulated=bits,
                    bit_errors=errors,
                    ber=ber,
                    ci_halfwidth=half,
                    wall_time_s=time.perf_counter() - t0,
                )
            )
            assert bits % info_per_frame == 0
        return points
    finally:
        if pool is not None:
            pool.close()
            pool.join()


WORKED_SEQUENCE = np.array([1.0, -1.0, 1.0, -1.0, 1.0, 1.0])
WORKED_TAU = 0.6
WORKED_ALPHA = 0.3


@dataclass(frozen=True)
class TraceReport:
    """End-to-end noiseless worked example on the six-symbol sequence."""

    a: np.ndarray
    tau: float
    alpha: float
    isi_len: int
    conventional_y_real: np.ndarray
    ci_tx: np.ndarray
    zeta: float
    component_magnitude: float
    third_symbol_budget: IsiBudget

    def as_text(self) -> str:
        lines = [
            f"worked example: tau={self.tau}, alpha={self.alpha}, L={self.isi_len}",
            f"symbols a            : {np.array2string(self.a, precision=0)}",
            "conventional Re(y)   : "
            + np.array2string(self.conventional_y_real, precision=4, floatmode="fixed"),
            f"zeta                 : {self.zeta:.4f}",
            f"component magnitude  : {self.component_magnitude:.4f}",
            "interleaved transmit : "
            + np.array2string(self.ci_tx, precision=4, floatmode="fixed"),
            f"3rd symbol ISI total : {self.third_symbol_budget.total:.4f}"
            f" (constructive {self.third_symbol_budget.constructive_sum:.4f},"
            f" destructive {self.third_symbol_budget.destructive_sum:.4f})",
        ]
        return "\n".join(lines) + "\n"

    def as_csv(self) -> str:
        lines = ["quantity,index,value"]
        for i, v in enumerate(self.a):
            lines.append(f"a,{i + 1},{v:g}")
        for i, v in enumerate(self.conventional_y_real):
            lines.append(f"conventional_y_re,{i + 1},{v:.6f}")
        for i, v in enumerate(self.ci_tx):
            lines.append(f"ci_tx_re,{i + 1},{v.real:.6f}")
            lines.append(f"ci_tx_im,{i + 1},{v.imag:.6f}")
        lines.append(f"zeta,,{self.zeta:.6f}")
        lines.append(f"component_magnitude,,{self.component_magnitude:.6f}")
        lines.append(f"third_symbol_isi_total,,{self.third_symbol_budget.total:.6f}")
        return "\n".join(lines) + "\n"


def trace_example(
    tau: float = WORKED_TAU, alpha: float = WORKED_ALPHA, isi_len: int | None = None
) -> TraceReport:
    """Reproduce the six-symbol noiseless walkthrough at tau = 0.6."""
    spec = PulseSpec(alpha=alpha, tau=tau, isi_len=isi_len)
    kernel = IsiKernel.from_spec(spec)
    a = WORKED_SEQUENCE.copy()
    n = len(a)
    G = build_isi_matrix(n, spec)
    bits = ((1.0 - a) / 2).astype(np.uint8)
    conv = build_frame(bits, kernel, mode="conventional")
    y_conv = apply_channel_matrix(conv.x, G, conv.zeta, 0.0)
    ci = build_frame(bits, kernel, mode="ci")
    budget = isi_budget(conv.x.real, G, conv.zeta, index=2)
    return TraceReport(
        a=a,
        tau=tau,
        alpha=alpha,
        isi_len=spec.isi_len,
        conventional_y_real=y_conv.y.real,
        ci_tx=ci.zeta * ci.x,
        zeta=ci.zeta,
        component_magnitude=ci.zeta / np.sqrt(2.0),
        third_symbol_budget=budget,
    )
