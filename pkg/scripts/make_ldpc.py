"""Generate the packaged (672, 336) parity-check matrix.

Deterministic progressive-edge-growth construction of a column-weight-3
regular code, 4-cycle free at this size.  Columns are permuted so the first
336 positions are the information set (the trailing 336 columns form an
invertible square over GF(2)), then written in the plain-text sparse row
format consumed by ciftn.coding.

Run from the repository root:

    python scripts/make_ldpc.py src/ciftn/data/ldpc_672_336.txt
"""
import sys

import numpy as np

N, M, DV = 672, 336, 3


def peg_construct(n=N, m=M, dv=DV, seed=0):
    rng = np.random.default_rng(seed)
    check_nbrs = [[] for _ in range(m)]
    var_nbrs = [[] for _ in range(n)]
    check_deg = np.zeros(m, dtype=int)

    def bfs_depths(v):
        depth = np.full(m, -1, dtype=int)
        frontier_v = {v}
        seen_v = {v}
        d = 0
        while True:
            frontier_c = set()
            for vv in frontier_v:
                for cc in var_nbrs[vv]:
                    if depth[cc] < 0:
                        frontier_c.add(cc)
            if not frontier_c:
                return depth
            for cc in frontier_c:
                depth[cc] = d
            next_v = set()
            for cc in frontier_c:
                for vv in check_nbrs[cc]:
                    if vv not in seen_v:
                        next_v.add(vv)
                        seen_v.add(vv)
            frontier_v = next_v
            d += 1

    for v in range(n):
        for e in range(dv):
            if e == 0:
                order = np.lexsort((np.arange(m), check_deg))
                c = int(order[0])
            else:
                depth = bfs_depths(v)
                unreached = np.nonzero(depth < 0)[0]
                cand = unreached if len(unreached) else np.nonzero(depth == depth.max())[0]
                cand = [c for c in cand if c not in var_nbrs[v]]
                if not cand:
                    cand = [c for c in range(m) if c not in var_nbrs[v]]
                cand = np.asarray(cand)
                c = int(cand[np.lexsort((cand, check_deg[cand]))[0]])
            var_nbrs[v].append(c)
            check_nbrs[c].append(v)
            check_deg[c] += 1

    H = np.zeros((m, n), dtype=np.uint8)
    for v in range(n):
        H[var_nbrs[v], v] = 1
    return H


def pivot_columns(H):
    Mk = H.copy()
    m, n = Mk.shape
    piv = []
    r = 0
    for c in range(n):
        rows = np.nonzero(Mk[r:, c])[0]
        if len(rows) == 0:
            continue
        pr = r + rows[0]
        if pr != r:
            Mk[[r, pr]] = Mk[[pr, r]]
        sel = np.nonzero(Mk[:, c])[0]
        sel = sel[sel != r]
        Mk[sel] ^= Mk[r]
        piv.append(c)
        r += 1
        if r == m:
            break
    return np.array(piv), r


def main(out_path):
    H = peg_construct()
    S = (H.astype(np.int32) @ H.T.astype(np.int32))
    np.fill_diagonal(S, 0)
    assert S.max() <= 1, "construction produced a 4-cycle"
    piv, rank = pivot_columns(H)
    assert rank == M, f"rank {rank} != {M}"
    info = np.setdiff1d(np.arange(N), piv)
    H = H[:, np.concatenate([info, piv])]   # systematic layout: [info | parity]
    with open(out_path, "w") as fh:
        fh.write(f"# parity-check matrix: {M} rows, {N} columns, rate 1/2\n")
        fh.write("# systematic layout: information bits occupy columns 0..335,\n")
        fh.write("# the trailing 336 columns are an invertible parity block\n")
        fh.write("# line format: <row index> <column> <column> ...\n")
        for r in range(M):
            cols = " ".join(str(c) for c in np.nonzero(H[r])[0])
            fh.write(f"{r} {cols}\n")
    print(f"wrote {out_path}: {H.sum()} edges, row weights {sorted(set(H.sum(1)))}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/ciftn/data/ldpc_672_336.txt")
