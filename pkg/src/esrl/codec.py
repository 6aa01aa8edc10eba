"""Bit-level encoder and floating-point decoders for lifted coupled codes.

Encoding is systematic per spatial batch: the parity square of B_0 (the
staircase-diagonal block) is unit lower triangular by construction, so each
batch's parity falls out of forward substitution given the previous omega
batches; the tail is solved the same way through the Q blocks.

Decoding operates on proto-row granularity: one layer is the Z lifted rows
of one proto row, updated together with vectorized min-sum or sum-product.
A single windowed engine core realizes layered decoding (window = whole
frame), semi-layered multi-engine decoding (one engine per spatial position
in lockstep), and windowed BP (sliding window with finalization).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from esrl.profile import CodeProfile, CoupledCode, expand_coupled, lift_expand

__all__ = [
    "LiftedCode",
    "DecodeResult",
    "CodecError",
    "build_lifted",
    "encode",
    "layer_ordering",
    "decode_layered",
    "decode_slme",
    "decode_windowed",
    "syndrome_ok",
    "posterior_memory_blocks",
]

LLR_CAP = 1000.0


class CodecError(ValueError):
    pass


@dataclass
class LiftedCode:
    """Precomputed gather/scatter structure of a lifted coupled code."""

    profile: CodeProfile
    coupled: CoupledCode
    L: int
    Z: int
    k: int                  # info columns per batch
    num_blocks: int         # Z-sized column blocks
    num_positions: int      # spatial row positions, L + omega
    row_blocks: list        # per proto row: int array of column blocks
    row_idx: list           # per proto row: (d, Z) gather indices
    row_shift: list         # per proto row: shifts aligned with row_blocks
    diag_entry: list        # per proto row: index into row arrays of the
                            # unit-diagonal entry used by forward substitution

    @property
    def num_rows(self) -> int:
        return len(self.row_blocks)

    def row_degree(self, r: int) -> int:
        return len(self.row_blocks[r])


def build_lifted(profile: CodeProfile, L: int) -> LiftedCode:
    """Expand, lift, and index a profile for encoding and decoding."""
    if profile.Z <= 0:
        raise CodecError("profile must carry a lifting size Z > 0")
    cc = lift_expand(expand_coupled(profile, L))
    m, n, omega, Z = profile.m, profile.n, profile.omega, profile.Z
    k = n - m
    if profile.n_prime - profile.m_prime != k:
        raise CodecError("profile is not systematic-encodable")
    num_blocks = n * L + m * omega
    z = np.arange(Z)
    row_blocks, row_idx, row_shift, diag_entry = [], [], [], []
    for r, entries in enumerate(cc.rows):
        pos = r // m
        c = r % m
        blocks = np.empty(len(entries), dtype=np.int64)
        shifts = np.empty(len(entries), dtype=np.int64)
        diag = -1
        for e, (batch, col, shift) in enumerate(entries):
            blocks[e] = cc.col_index(batch, col)
            shifts[e] = shift
            if batch < L:
                if pos < L and batch == pos and col == k + c:
                    diag = e
            elif col == c:
                diag = e
        if diag < 0:
            raise CodecError(f"row {r} lacks its systematic diagonal entry")
        idx = (z[None, :] + shifts[:, None]) % Z
        row_blocks.append(blocks)
        row_idx.append(idx)
        row_shift.append(shifts)
        diag_entry.append(diag)
    return LiftedCode(profile, cc, L, Z, k, num_blocks, L + omega,
                      row_blocks, row_idx, row_shift, diag_entry)


def encode(code: LiftedCode, u_blocks: np.ndarray) -> np.ndarray:
    """Systematic encoding; returns the codeword as (num_blocks, Z) bits.

    u_blocks has shape (L, k, Z).  Forward substitution walks the rows in
    order: every non-diagonal entry of a row is already determined when the
    row is reached, and the circulant diagonal is inverted by a roll.
    """
    L, Z, k, m = code.L, code.Z, code.k, code.profile.m
    u_blocks = np.asarray(u_blocks, dtype=np.uint8)
    if u_blocks.shape != (L, k, Z):
        raise CodecError(f"expected info shape {(L, k, Z)}")
    bits = np.zeros((code.num_blocks, Z), dtype=np.uint8)
    for i in range(L):
        bits[i * code.profile.n : i * code.profile.n + k] = u_blocks[i]
    for r in range(code.num_rows):
        blocks = code.row_blocks[r]
        shifts = code.row_shift[r]
        d = code.diag_entry[r]
        rhs = np.zeros(Z, dtype=np.uint8)
        for e in range(len(blocks)):
            if e == d:
                continue
            rhs ^= np.roll(bits[blocks[e]], -int(shifts[e]))
        # roll(p, -s) = rhs  =>  p = roll(rhs, s)
        bits[blocks[d]] = np.roll(rhs, int(shifts[d]))
    return bits


def syndrome_ok(code: LiftedCode, bits: np.ndarray, rows=None) -> bool:
    bits = np.asarray(bits, dtype=np.uint8)
    if rows is None:
        rows = range(code.num_rows)
    for r in rows:
        vals = bits[code.row_blocks[r][:, None], code.row_idx[r]]
        if (vals.sum(axis=0) % 2).any():
            return False
    return True


def layer_ordering(profile: CodeProfile, m_sub: int | None = None) -> np.ndarray:
    """Row permutation by ascending uncoupled row degree; stable ties."""
    if m_sub is None:
        m_sub = profile.m
    deg = profile.B[:m_sub].sum(axis=1)
    return np.argsort(deg, kind="stable")


@dataclass
class DecodeResult:
    bits: np.ndarray
    iterations: int
    converged: bool
    cn_updates: int
    posterior: np.ndarray


def _update_row_nms(q: np.ndarray, alpha: float) -> np.ndarray:
    d = q.shape[0]
    if d == 1:
        return np.full_like(q, LLR_CAP)
    sgn = np.where(q < 0, -1.0, 1.0)
    total_sign = np.prod(sgn, axis=0)
    a = np.abs(q)
    part = np.partition(a, 1, axis=0)
    min1, min2 = part[0], part[1]
    pos = np.argmin(a, axis=0)
    mag = np.where(np.arange(d)[:, None] == pos[None, :], min2, min1)
    return alpha * total_sign * sgn * mag


def _update_row_sp(q: np.ndarray, alpha: float) -> np.ndarray:
    d = q.shape[0]
    if d == 1:
        return np.full_like(q, LLR_CAP)
    t = np.tanh(np.clip(q, -LLR_CAP, LLR_CAP) / 2.0)
    t = np.clip(t, -0.9999999999999998, 0.9999999999999998)
    prod = np.prod(t, axis=0)
    ext = np.clip(prod / t, -0.9999999999999998, 0.9999999999999998)
    return 2.0 * np.arctanh(ext)


_UPDATES = {"nms": _update_row_nms, "sp": _update_row_sp}


class _Engine:
    """Shared decoding machinery over one posterior memory."""

    def __init__(self, code: LiftedCode, llr: np.ndarray, variant: str,
                 alpha: float, check_conflicts: bool):
        llr = np.asarray(llr, dtype=np.float64)
        if llr.size != code.num_blocks * code.Z:
            raise CodecError("LLR length mismatch")
        if not np.isfinite(llr).all():
            raise CodecError("non-finite input LLR")
        if variant not in _UPDATES:
            raise CodecError(f"unknown decoder variant {variant!r}")
        self.code = code
        self.post = np.clip(llr.reshape(code.num_blocks, code.Z),
                            -LLR_CAP, LLR_CAP).copy()
        self.update = _UPDATES[variant]
        self.alpha = alpha
        self.ext = {}
        self.cn_updates = 0
        self.check_conflicts = check_conflicts
        self.frozen_blocks = np.zeros(code.num_blocks, dtype=bool)

    def process_row(self, r: int, written=None):
        code = self.code
        blocks = code.row_blocks[r]
        idx = code.row_idx[r]
        gathered = self.post[blocks[:, None], idx]
        e_old = self.ext.get(r)
        q = gathered if e_old is None else gathered - e_old
        e_new = self.update(q, self.alpha)
        self.ext[r] = e_new
        out = np.clip(q + e_new, -LLR_CAP, LLR_CAP)
        frozen = self.frozen_blocks[blocks]
        if frozen.any():
            out[frozen] = gathered[frozen]
        self.post[blocks[:, None], idx] = out
        self.cn_updates += blocks.size * code.Z
        if written is not None:
            for b in blocks[~frozen]:
                key = int(b)
                if key in written:
                    raise RuntimeError(
                        f"posterior write conflict on block {key}")
                written.add(key)

    def hard_bits(self) -> np.ndarray:
        return (self.post < 0).astype(np.uint8)

    def rows_of_positions(self, positions, order) -> list:
        m = self.code.profile.m
        return [p * m + int(o) for p in positions for o in order]

    def syndrome_rows_ok(self, rows) -> bool:
        return syndrome_ok(self.code, self.hard_bits(), rows)


def _position_batches(code: LiftedCode, positions) -> list:
    """Column blocks owned by the given row positions (for finalization)."""
    n, m, L = code.profile.n, code.profile.m, code.L
    blocks = []
    for p in positions:
        if p < L:
            blocks.extend(range(p * n, (p + 1) * n))
        else:
            start = L * n + (p - L) * m
            blocks.extend(range(start, start + m))
    return blocks


def _decode(code: LiftedCode, llr, W: int, S: int, I_max: int,
            num_engines: int, variant: str, alpha: float,
            check_conflicts: bool) -> DecodeResult:
    M = code.num_positions
    if not 1 <= W <= M or not 1 <= S <= W:
        raise CodecError("window parameters out of range")
    eng = _Engine(code, llr, variant, alpha, check_conflicts)
    order = layer_ordering(code.profile)
    m = code.profile.m
    total_iters = 0
    p = 0
    while p < M:
        hi = min(p + W, M)
        positions = list(range(p, hi))
        E = max(1, min(num_engines, len(positions)))
        chunk = -(-len(positions) // E)
        groups = [positions[i : i + chunk]
                  for i in range(0, len(positions), chunk)]
        schedules = [[g * m + int(o) for g in grp for o in order]
                     for grp in groups]
        steps = max(len(s) for s in schedules)
        window_rows = [q * m + c for q in positions for c in range(m)]
        for _ in range(I_max):
            total_iters += 1
            for t in range(steps):
                written = set() if check_conflicts else None
                for sched in schedules:
                    if t < len(sched):
                        eng.process_row(sched[t], written)
            if eng.syndrome_rows_ok(window_rows):
                break
        if hi == M:
            break
        eng.frozen_blocks[_position_batches(code, range(p, p + S))] = True
        p += S
    bits = eng.hard_bits()
    converged = syndrome_ok(code, bits)
    return DecodeResult(bits, total_iters, converged, eng.cn_updates,
                        eng.post)


def decode_layered(code: LiftedCode, llr, I_max: int, variant: str = "nms",
                   alpha: float = 0.75,
                   check_conflicts: bool = False) -> DecodeResult:
    """Full-frame layered decoding, positions top to bottom."""
    M = code.num_positions
    return _decode(code, llr, M, M, I_max, 1, variant, alpha, check_conflicts)


def decode_slme(code: LiftedCode, llr, W: int, S: int, I_max: int,
                num_engines: int | None = None, variant: str = "nms",
                alpha: float = 0.75,
                check_conflicts: bool = False) -> DecodeResult:
    """Lockstep multi-engine decoding, one engine per position by default."""
    if num_engines is None:
        num_engines = W
    return _decode(code, llr, W, S, I_max, num_engines, variant, alpha,
                   check_conflicts)


def decode_windowed(code: LiftedCode, llr, W: int, S: int, I_max: int,
                    variant: str = "nms", alpha: float = 0.75,
                    check_conflicts: bool = False) -> DecodeResult:
    """Sliding-window BP; S positions finalize per slide."""
    return _decode(code, llr, W, S, I_max, W, variant, alpha, check_conflicts)


def posterior_memory_blocks(code: LiftedCode, W: int | None = None) -> int:
    """Spatial positions of posterior memory a decoder must hold."""
    return code.num_positions if W is None else min(W, code.num_positions)
