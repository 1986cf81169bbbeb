"""Rate-1/2 (672, 336) LDPC encoding and sum-product decoding.

The parity-check matrix ships as a data file in a plain-text sparse row
format: comment lines start with '#', every other line holds a row index
followed by that row's column indices.  The packaged matrix is systematic --
information bits occupy columns 0..k-1 and the trailing n-k columns form an
invertible block over GF(2) -- so encoding is a precomputed GF(2) product.

Decoding is flooding-schedule belief propagation in the tanh domain with
early stop on a zero syndrome.  LLR convention: positive means bit 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import LengthMismatch

DEFAULT_CODE_FILE = "ldpc_672_336.txt"
_TANH_CLIP = 30.0


def _gf2_inv(A: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    M = np.concatenate([A.copy().astype(np.uint8), np.eye(n, dtype=np.uint8)], axis=1)
    for col in range(n):
        rows = np.nonzero(M[col:, col])[0]
        if len(rows) == 0:
            raise np.linalg.LinAlgError("parity block singular over GF(2)")
        piv = col + rows[0]
        if piv != col:
            M[[col, piv]] = M[[piv, col]]
        sel = np.nonzero(M[:, col])[0]
        sel = sel[sel != col]
        M[sel] ^= M[col]
    return M[:, n:]


def parse_parity_file(text: str) -> np.ndarray:
    """Parse the sparse row-list format into a dense 0/1 matrix."""
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [int(p) for p in line.split()]
        rows.append((parts[0], parts[1:]))
    m = max(r for r, _ in rows) + 1
    n = max(max(cols) for _, cols in rows) + 1
    H = np.zeros((m, n), dtype=np.uint8)
    for r, cols in rows:
        H[r, cols] = 1
    return H


def format_parity_file(H: np.ndarray, header: str = "") -> str:
    lines = [f"# {ln}" for ln in header.splitlines() if ln] if header else []
    for r in range(H.shape[0]):
        cols = " ".join(str(c) for c in np.nonzero(H[r])[0])
        lines.append(f"{r} {cols}")
    return "\n".join(lines) + "\n"


@dataclass
class LdpcCode:
    """Parity structure plus the cached encoder/decoder machinery."""

    H: np.ndarray
    max_iterations: int = 50
    n: int = field(init=False)
    k: int = field(init=False)

    def __post_init__(self):
        self.H = np.asarray(self.H, dtype=np.uint8)
        m, n = self.H.shape
        self.n = n
        self.k = n - m
        self._P = (_gf2_inv(self.H[:, self.k:]) @ self.H[:, : self.k]) % 2
        # edge bookkeeping for the flooding decoder
        er, ec = np.nonzero(self.H)
        order = np.lexsort((ec, er))
        self._er, self._ec = er[order], ec[order]
        E = len(self._er)
        self._row_starts = np.searchsorted(self._er, np.arange(m))
        self._row_counts = np.diff(np.append(self._row_starts, E))
        order_c = np.lexsort((self._er, self._ec))
        self._to_cm = order_c
        self._from_cm = np.argsort(order_c)
        ec_cm = self._ec[order_c]
        self._col_starts = np.searchsorted(ec_cm, np.arange(n))
        self._col_counts = np.diff(np.append(self._col_starts, E))

    @property
    def rate(self) -> float:
        return self.k / self.n

    @classmethod
    def from_file(cls, path: str, max_iterations: int = 50) -> "LdpcCode":
        with open(path) as fh:
            return cls(parse_parity_file(fh.read()), max_iterations=max_iterations)

    @classmethod
    def default(cls, max_iterations: int = 50) -> "LdpcCode":
        text = resources.files("ciftn.data").joinpath(DEFAULT_CODE_FILE).read_text()
        return cls(parse_parity_file(text), max_iterations=max_iterations)

    def syndrome(self, codeword: np.ndarray) -> np.ndarray:
        return (self.H @ np.asarray(codeword, dtype=np.uint8)) % 2

    def encode(self, info_bits: np.ndarray) -> np.ndarray:
        """Systematic encoding; accepts (k,) or (k, batch)."""
        u = np.asarray(info_bits, dtype=np.uint8)
        if u.shape[0] != self.k:
            raise LengthMismatch(f"expected {self.k} information bits, got {u.shape[0]}")
        parity = (self._P @ u) % 2
        return np.concatenate([u, parity.astype(np.uint8)], axis=0)

    def decode(self, llr: np.ndarray, max_iter: int | None = None):
        """Belief-propagation decoding of (n,) or (n, batch) channel LLRs.

        Returns (info_bits, converged).  Non-convergence after the iteration
        cap returns the current best estimate with the flag cleared.
        """
        llr = np.asarray(llr, dtype=float)
        single = llr.ndim == 1
        if single:
            llr = llr[:, None]
        if llr.shape[0] != self.n:
            raise LengthMismatch(f"expected {self.n} LLRs, got {llr.shape[0]}")
        mi = max_iter or self.max_iterations
        n, B = llr.shape
        E = len(self._er)
        hard_out = (llr < 0).astype(np.uint8)
        converged = np.zeros(B, dtype=bool)
        active = np.arange(B)
        c2v = np.zeros((E, B))
        llr_a = llr
        for _ in range(mi):
            c2v_cm = c2v[self._to_cm]
            colsum = np.add.reduceat(c2v_cm, self._col_starts, axis=0)
            v2c_cm = (
                llr_a[self._ec[self._to_cm]]
                + np.repeat(colsum, self._col_counts, axis=0)
                - c2v_cm
            )
            v2c = v2c_cm[self._from_cm]
            t = np.tanh(0.5 * np.clip(v2c, -_TANH_CLIP, _TANH_CLIP))
            sgn = np.where(t >= 0, 1.0, -1.0)
            mag = np.log(np.clip(np.abs(t), 1e-30, 1.0))
            rsign = np.multiply.reduceat(sgn, self._row_starts, axis=0)
            rmag = np.add.reduceat(mag, self._row_starts, axis=0)
            loo = (
                np.repeat(rsign, self._row_counts, axis=0)
                * sgn
                * np.exp(np.clip(np.repeat(rmag, self._row_counts, axis=0) - mag, -700.0, 0.0))
            )
            c2v = 2.0 * np.arctanh(np.clip(loo, -1 + 1e-15, 1 - 1e-15))
            c2v_cm = c2v[self._to_cm]
            colsum = np.add.reduceat(c2v_cm, self._col_starts, axis=0)
            hard = ((llr_a + colsum) < 0).astype(np.uint8)
            syn_ok = ~np.any(
                np.bitwise_xor.reduceat(hard[self._ec], self._row_starts, axis=0), axis=0
            )
            hard_out[:, active] = hard
            if np.any(syn_ok):
                converged[active[syn_ok]] = True
                keep = ~syn_ok
                active = active[keep]
                if len(active) == 0:
                    break
                llr_a = llr_a[:, keep]
                c2v = c2v[:, keep]
        info = hard_out[: self.k]
        if single:
            return info[:, 0], bool(converged[0])
        return info, converged
