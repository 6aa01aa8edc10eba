"""Decoding-threshold estimation by reciprocal channel approximation.

SNR messages are propagated over the full coupled protograph (staircase plus
tail), so edge spreading and termination are part of the analysis.  The
channel capacity C(s) of binary-input AWGN is evaluated by Gauss-Hermite
quadrature; the reciprocal energy function R(s) = C^-1(1 - C(s)) maps
between the VN (SNR) and CN (reciprocal) domains.  To mitigate the boundary
wave of a finite coupling length, per-position reliabilities are averaged
over the L spatial positions and blended with the tail mean before the
stopping comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from esrl.profile import CoupledCode, code_rate

__all__ = [
    "S_MAX",
    "capacity",
    "capacity_inv",
    "reciprocal_energy",
    "ReciprocalTable",
    "RcaState",
    "ThresholdResult",
    "rca_evaluate",
    "rca_threshold",
    "rca_threshold_detail",
]

# SNR cap standing in for +inf; C(S_MAX) rounds to 1.0 in double precision,
# so R(0) = S_MAX and R(S_MAX) = 0 exactly, keeping R an involution.
S_MAX = 1000.0

_GH_NODES, _GH_WEIGHTS = np.polynomial.hermite.hermgauss(128)


def capacity(s):
    """Binary-input AWGN capacity at linear SNR s, in bits per channel use.

    The channel LLR under BPSK is N(4s, 8s); C = 1 - E[log2(1 + e^-LLR)].
    """
    s = np.asarray(s, dtype=np.float64)
    if (s < 0).any():
        raise ValueError("SNR must be non-negative")
    lam = 4.0 * s[..., None] + np.sqrt(16.0 * s[..., None]) * _GH_NODES
    loss = np.logaddexp(0.0, -lam) / math.log(2.0)
    c = 1.0 - (loss @ _GH_WEIGHTS) / math.sqrt(math.pi)
    c = np.where(s == 0.0, 0.0, np.clip(c, 0.0, 1.0))
    return float(c) if c.ndim == 0 else c


def capacity_inv(y: float, tol: float = 1e-9) -> float:
    """Inverse capacity by bisection; values at or above C(S_MAX) saturate."""
    if not 0.0 <= y <= 1.0:
        raise ValueError("capacity must lie in [0, 1]")
    if y <= 0.0:
        return 0.0
    if y >= capacity(S_MAX):
        return S_MAX
    lo, hi = 0.0, S_MAX
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if capacity(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def reciprocal_energy(s: float) -> float:
    """R(s) = C^-1(1 - C(s)); decreasing involution with R(0) = S_MAX."""
    if s < 0:
        raise ValueError("SNR must be non-negative")
    return capacity_inv(1.0 - capacity(min(s, S_MAX)))


class ReciprocalTable:
    """Piecewise-linear R(s) over a dense grid, for the inner iteration.

    The grid is log-spaced where R varies fastest plus a linear section; the
    exact endpoint values keep the saturation behavior of reciprocal_energy.
    """

    def __init__(self, points: int = 6000):
        grid = np.concatenate([[0.0], np.geomspace(1e-7, S_MAX, points)])
        vals = capacity_inv_vec(1.0 - capacity(grid))
        self.grid = grid
        self.vals = vals

    def __call__(self, s):
        return np.interp(s, self.grid, self.vals)


def capacity_inv_vec(y):
    """Vectorized bisection inverse of capacity (used to build the table)."""
    y = np.clip(np.asarray(y, dtype=np.float64), 0.0, 1.0)
    lo = np.zeros_like(y)
    hi = np.full_like(y, S_MAX)
    sat = y >= capacity(S_MAX)
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        below = capacity(mid) < y
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    out[sat] = S_MAX
    out[y <= 0.0] = 0.0
    return out


@dataclass
class RcaState:
    """Per-edge SNR messages and derived reliabilities after an evaluation."""

    s_vc: np.ndarray
    s_cv: np.ndarray
    q: np.ndarray
    q_bar: np.ndarray
    zeta_tail: float
    q_hat: np.ndarray
    iterations: int
    success: bool


def _edge_arrays(coupled: CoupledCode):
    H = coupled.to_dense()
    rows, cols = np.nonzero(H)
    return H.shape, rows, cols


def rca_evaluate(coupled: CoupledCode, esn0_db: float, *, I_RCA: int = 1000,
                 T_stop_db: float = 20.0, table: ReciprocalTable | None = None,
                 punctured: bool = True, stall_window: int = 25) -> RcaState:
    """Run SNR message passing at one trial Es/N0; success if q_hat > T.

    Punctured VNs start at SNR 0; everything else starts at the channel SNR.
    Iteration stops early on success or when the minimum of q_hat stalls
    below the target (the messages are monotone in t, so a stall is final).
    """
    if table is None:
        table = _default_table()
    R = table
    (num_rows, num_cols), rows, cols = _edge_arrays(coupled)
    L, n, m, omega = coupled.L, coupled.profile.n, coupled.profile.m, \
        coupled.profile.omega
    s_ch = 10.0 ** (esn0_db / 10.0)
    s0 = np.full(num_cols, s_ch)
    if punctured:
        s0[coupled.punct_mask] = 0.0
    T = 10.0 ** (T_stop_db / 10.0)

    s_vc = s0[cols].copy()
    s_cv = np.zeros_like(s_vc)
    q_hat = np.zeros(n)
    prev_min = -1.0
    stall = 0
    it = 0
    for it in range(1, I_RCA + 1):
        r_vc = R(s_vc)
        row_sum = np.bincount(rows, weights=r_vc, minlength=num_rows)
        s_cv = row_sum[rows] - r_vc
        r_cv = R(s_cv)
        col_sum = np.bincount(cols, weights=r_cv, minlength=num_cols)
        s_vc = s0[cols] + col_sum[cols] - r_cv

        q = s0 + col_sum
        q_bar = q[: L * n].reshape(L, n).mean(axis=0)
        if omega * m:
            zeta = float(q[L * n :].mean())
            q_hat = (L * n * q_bar + omega * m * zeta) / (L * n + omega * m)
        else:
            zeta = 0.0
            q_hat = q_bar
        cur_min = float(q_hat.min())
        if cur_min > T:
            return RcaState(s_vc, s_cv, q, q_bar, zeta, q_hat, it, True)
        if cur_min - prev_min < 1e-9 * max(prev_min, 1.0):
            stall += 1
            if stall >= stall_window:
                break
        else:
            stall = 0
        prev_min = cur_min
    q = s0 + np.bincount(cols, weights=R(s_cv), minlength=num_cols)
    q_bar = q[: L * n].reshape(L, n).mean(axis=0)
    zeta = float(q[L * n :].mean()) if omega * m else 0.0
    return RcaState(s_vc, s_cv, q, q_bar, zeta, q_hat, it, False)


_TABLE = None


def _default_table() -> ReciprocalTable:
    global _TABLE
    if _TABLE is None:
        _TABLE = ReciprocalTable()
    return _TABLE


@dataclass
class ThresholdResult:
    threshold_db: float  # Eb/N0
    esn0_db: float
    rate: Fraction
    iterations_used: int


def _coupled_rate(coupled: CoupledCode, punctured: bool) -> Fraction:
    p = coupled.profile
    if punctured:
        return code_rate(p, coupled.L)
    k = p.n - p.m
    return Fraction(k * coupled.L, p.n * coupled.L + p.m * p.omega)


def rca_threshold_detail(coupled: CoupledCode, I_RCA: int = 1000,
                         T_stop_db: float = 20.0, *,
                         resolution_db: float = 0.01,
                         bracket=(-6.0, 15.0),
                         punctured: bool = True) -> ThresholdResult:
    """Bisect the minimal Es/N0 whose evaluation succeeds; report Eb/N0.

    The success predicate is monotone in the trial SNR, so plain bisection
    applies once an initial coarse scan finds a failing/succeeding pair.
    """
    table = _default_table()

    def ok(db):
        return rca_evaluate(coupled, db, I_RCA=I_RCA, T_stop_db=T_stop_db,
                            table=table, punctured=punctured)

    lo, hi = bracket
    state = ok(hi)
    if not state.success:
        raise RuntimeError(f"no threshold below {hi} dB Es/N0")
    if ok(lo).success:
        raise RuntimeError(f"threshold below bracket start {lo} dB Es/N0")
    # coarse descent, then bisection
    while hi - lo > resolution_db:
        mid = 0.5 * (lo + hi)
        st = ok(mid)
        if st.success:
            hi, state = mid, st
        else:
            lo = mid
    rate = _coupled_rate(coupled, punctured)
    ebn0 = hi - 10.0 * math.log10(float(rate))
    return ThresholdResult(ebn0, hi, rate, state.iterations)


def rca_threshold(coupled: CoupledCode, I_RCA: int = 1000,
                  T_stop_db: float = 20.0, **kw) -> float:
    """Eb/N0 decoding threshold in dB (see rca_threshold_detail)."""
    return rca_threshold_detail(coupled, I_RCA, T_stop_db, **kw).threshold_db
