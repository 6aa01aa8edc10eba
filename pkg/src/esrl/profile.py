"""Code profile data model and structural transformations for ESRL codes.

An ESRL (edge-spreading Raptor-like) family is described by the triple
{P (or B), T, Q} plus scalar parameters.  This module owns the purely
structural side: sub-matrix split, coupled expansion, pruning, rate
computation, QC lifting expansion, validation, and the profile file format.
"""

from __future__ import annotations

import io
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = [
    "CodeProfile",
    "CoupledCode",
    "ProfileError",
    "split_submatrices",
    "expand_coupled",
    "code_rate",
    "prune",
    "lift_expand",
    "validate",
    "tail_matrix",
    "parse_profile",
    "serialize_profile",
    "load_profile",
    "save_profile",
]


class ProfileError(ValueError):
    """Raised for structurally invalid profiles or parameters."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CodeProfile:
    """Complete description of an ESRL code family.

    B is the binary uncoupled protomatrix (m x n), T the edge-spreading
    labels ({-1} where B is 0, [0, omega] where B is 1), P the circulant
    shifts ([0, Z-1] where B is 1, -1 elsewhere), and Q the m x (omega*m)
    tail, stored as omega lower-triangular blocks side by side.
    Instances are immutable and safe to share across threads.
    """

    m_prime: int
    n_prime: int
    m: int
    n: int
    omega: int
    rho: int
    Z: int
    B: np.ndarray
    T: np.ndarray
    P: np.ndarray
    Q: np.ndarray

    def __post_init__(self):
        for name in ("B", "T", "P", "Q"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def k(self) -> int:
        return self.n - self.m

    def q_block(self, j: int) -> np.ndarray:
        """Tail block Q_j, 1-based j in [1, omega]."""
        if not 1 <= j <= self.omega:
            raise ProfileError(f"tail block index {j} out of range")
        return self.Q[:, (j - 1) * self.m : j * self.m]

    @classmethod
    def from_matrices(cls, *, m_prime, n_prime, omega, rho, Z, T, P, Q=None):
        """Build a profile with B derived from P by binarization."""
        P = np.asarray(P, dtype=np.int64)
        T = np.asarray(T, dtype=np.int64)
        m, n = P.shape
        B = (P >= 0).astype(np.int64)
        if Q is None:
            Q = tail_matrix(m, omega)
        return cls(m_prime=m_prime, n_prime=n_prime, m=m, n=n, omega=omega,
                   rho=rho, Z=Z, B=B, T=T, P=P, Q=Q)

    def with_lifting(self, Z: int, P: np.ndarray) -> "CodeProfile":
        P = np.asarray(P, dtype=np.int64)
        if P.shape != (self.m, self.n):
            raise ProfileError("shift matrix shape mismatch")
        if not np.array_equal(P >= 0, self.B == 1):
            raise ProfileError("shift support must match B support")
        return CodeProfile(m_prime=self.m_prime, n_prime=self.n_prime,
                           m=self.m, n=self.n, omega=self.omega, rho=self.rho,
                           Z=Z, B=self.B, T=self.T, P=P, Q=self.Q)


def tail_matrix(m: int, omega: int) -> np.ndarray:
    """Default tail: per block, unit diagonal plus sub- and sub-sub-diagonal.

    Lower triangular with unit diagonal, so it stays full rank under any
    pruning from the end.
    """
    if omega == 0:
        return np.zeros((m, 0), dtype=np.int64)
    block = np.zeros((m, m), dtype=np.int64)
    for c in range(m):
        for d in (0, 1, 2):
            if c - d >= 0:
                block[c, c - d] = 1
    return np.tile(block, (1, omega))


# ---------------------------------------------------------------------------
# structural operations


def split_submatrices(profile: CodeProfile) -> list[np.ndarray]:
    """Split B into omega+1 sub-matrices according to the spreading labels."""
    bad = (profile.B == 1) & ((profile.T < 0) | (profile.T > profile.omega))
    if bad.any():
        raise ProfileError("spreading label out of range on a nonzero entry")
    return [((profile.T == i) & (profile.B == 1)).astype(np.int64)
            for i in range(profile.omega + 1)]


def _pruned_dims(profile: CodeProfile, m_sub: int) -> tuple[int, int]:
    if not profile.m_prime <= m_sub <= profile.m:
        raise ProfileError(
            f"pruning point {m_sub} outside [{profile.m_prime}, {profile.m}]")
    return m_sub, profile.n_prime + (m_sub - profile.m_prime)


def prune(profile: CodeProfile, m_sub: int) -> CodeProfile:
    """Nested sub-profile keeping the first m_sub rows (and matching columns)."""
    m_sub, n_sub = _pruned_dims(profile, m_sub)
    if m_sub == profile.m:
        return profile
    Q = np.hstack([profile.q_block(j)[:m_sub, :m_sub]
                   for j in range(1, profile.omega + 1)]) \
        if profile.omega else np.zeros((m_sub, 0), dtype=np.int64)
    for j in range(profile.omega):
        blk = Q[:, j * m_sub : (j + 1) * m_sub]
        if gf2_rank(blk) != m_sub:
            raise ProfileError("pruned tail block is rank-deficient")
    return CodeProfile(m_prime=profile.m_prime, n_prime=profile.n_prime,
                       m=m_sub, n=n_sub, omega=profile.omega, rho=profile.rho,
                       Z=profile.Z, B=profile.B[:m_sub, :n_sub],
                       T=profile.T[:m_sub, :n_sub], P=profile.P[:m_sub, :n_sub],
                       Q=Q)


def code_rate(profile: CodeProfile, L: int, m_sub: int | None = None,
              n_sub: int | None = None) -> Fraction:
    """Code rate of the coupled, punctured family at a pruning point."""
    if m_sub is None:
        m_sub = profile.m
    expect_m, expect_n = _pruned_dims(profile, m_sub)
    if n_sub is None:
        n_sub = expect_n
    if n_sub != expect_n:
        raise ProfileError("pruning point off the extension staircase")
    k = n_sub - m_sub
    den = n_sub * L + m_sub * profile.omega - profile.rho * (L + profile.omega)
    if den <= 0:
        raise ProfileError("non-positive transmitted length")
    return Fraction(k * L, den)


@dataclass(frozen=True)
class CoupledCode:
    """Expanded coupled protomatrix (or lifted parity-check when Z > 0).

    Rows are grouped m_sub per row position r in [0, L+omega); columns are
    grouped n_sub per spatial batch i in [0, L), followed by omega tail
    blocks of m_sub columns each.  Each row is a list of
    (batch, column-in-batch, shift) entries, where batch >= L addresses
    tail block batch - L and shift is 0 at proto level (Z == 0).
    """

    profile: CodeProfile
    L: int
    Z: int
    rows: tuple
    punct_mask: np.ndarray

    @property
    def m_sub(self) -> int:
        return self.profile.m

    @property
    def n_sub(self) -> int:
        return self.profile.n

    @property
    def num_rows(self) -> int:
        return self.m_sub * (self.L + self.profile.omega)

    @property
    def num_cols(self) -> int:
        return self.n_sub * self.L + self.m_sub * self.profile.omega

    def col_index(self, batch: int, v: int) -> int:
        if batch < self.L:
            return batch * self.n_sub + v
        return self.L * self.n_sub + (batch - self.L) * self.m_sub + v

    def to_dense(self) -> np.ndarray:
        """Dense binary matrix; proto level when Z == 0, lifted otherwise."""
        z = max(self.Z, 1)
        H = np.zeros((self.num_rows * z, self.num_cols * z), dtype=np.int64)
        for r, row in enumerate(self.rows):
            for batch, v, shift in row:
                g = self.col_index(batch, v)
                for zz in range(z):
                    H[r * z + zz, g * z + (zz + shift) % z] = 1
        return H

    def row_weight(self) -> int:
        return sum(len(row) for row in self.rows)


def expand_coupled(profile: CodeProfile, L: int) -> CoupledCode:
    """Couple L replicas of the split sub-matrices plus the tail columns."""
    if L < 1:
        raise ProfileError("coupling length must be >= 1")
    subs = split_submatrices(profile)
    m, n, omega, rho = profile.m, profile.n, profile.omega, profile.rho
    rows = []
    for r in range(L + omega):
        for c in range(m):
            entries = []
            for i in range(max(0, r - omega), min(L - 1, r) + 1):
                j = r - i
                for v in np.flatnonzero(subs[j][c]):
                    entries.append((i, int(v), 0))
            if r >= L:
                qj = profile.q_block(r - L + 1)
                for v in np.flatnonzero(qj[c]):
                    entries.append((L + (r - L), int(v), 0))
            rows.append(tuple(entries))
    punct = np.zeros(n * L + m * omega, dtype=bool)
    for i in range(L):
        punct[i * n : i * n + rho] = True
    for j in range(omega):
        punct[L * n + j * m : L * n + j * m + rho] = True
    return CoupledCode(profile=profile, L=L, Z=0, rows=tuple(rows),
                       punct_mask=punct)


def lift_expand(coupled: CoupledCode) -> CoupledCode:
    """Attach circulant shifts from P; tail entries lift with shift 0."""
    p = coupled.profile
    if p.Z <= 0:
        raise ProfileError("profile has no lifting size")
    if ((p.B == 1) & (p.P < 0)).any():
        raise ProfileError("missing shift on a nonzero entry")
    if ((p.P >= p.Z)).any():
        raise ProfileError("shift value exceeds lifting size")
    m, n, omega, L = p.m, p.n, p.omega, coupled.L
    subs = split_submatrices(p)
    lifted_rows = []
    for r, row in enumerate(coupled.rows):
        c = r % m
        entries = []
        for batch, v, _ in row:
            shift = 0 if batch >= L else int(p.P[c, v])
            entries.append((batch, v, shift))
        lifted_rows.append(tuple(entries))
    del subs
    return CoupledCode(profile=p, L=L, Z=p.Z, rows=tuple(lifted_rows),
                       punct_mask=coupled.punct_mask)


def gf2_rank(mat: np.ndarray) -> int:
    """Rank over GF(2) by plain elimination."""
    a = (np.array(mat, dtype=np.int64) & 1).astype(np.uint8)
    rank = 0
    rows, cols = a.shape
    for col in range(cols):
        pivot = None
        for r in range(rank, rows):
            if a[r, col]:
                pivot = r
                break
        if pivot is None:
            continue
        a[[rank, pivot]] = a[[pivot, rank]]
        mask = (a[:, col] == 1)
        mask[rank] = False
        a[mask] ^= a[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def validate(profile: CodeProfile) -> list[str]:
    """Check the structural invariants; violations are returned, not raised."""
    v = []
    p = profile
    if p.B.shape != (p.m, p.n) or p.T.shape != (p.m, p.n) or p.P.shape != (p.m, p.n):
        return ["matrix dimensions disagree with (m, n)"]
    if p.Q.shape != (p.m, p.omega * p.m):
        v.append("tail matrix shape disagrees with (m, omega*m)")
        return v
    if not np.isin(p.B, (0, 1)).all():
        v.append("protomatrix has a non-binary entry (parallel edge)")
    if ((p.B == 0) != (p.T == -1)).any():
        v.append("spreading label support disagrees with protomatrix support")
    if ((p.B == 1) & ((p.T < 0) | (p.T > p.omega))).any():
        v.append("spreading label outside [0, omega] on an edge")
    if p.Z > 0:
        if ((p.B == 1) & ((p.P < 0) | (p.P >= p.Z))).any():
            v.append("shift outside [0, Z-1] on an edge")
        if ((p.B == 0) & (p.P != -1)).any():
            v.append("shift present on a non-edge")
    # upper-right corner of B stays empty
    if p.B[: p.m_prime, p.n_prime :].any():
        v.append("upper-right corner of the protomatrix is not empty")
    # SSC: lower triangular with unit diagonal, diagonal spread to B_0
    for c in range(p.m_prime, p.m):
        d = p.n_prime + (c - p.m_prime)
        if d < p.n:
            if p.B[c, d] != 1:
                v.append(f"SSC diagonal entry missing at row {c}")
            elif p.T[c, d] != 0:
                v.append(f"SSC diagonal entry at row {c} not assigned to B_0")
            if p.B[c, d + 1 :].any():
                v.append(f"SSC row {c} extends above the diagonal")
    # column weights: HRC-side columns need weight >= 3, first rho columns
    # fully connected
    col_w = p.B.sum(axis=0)
    for j in range(p.rho):
        if col_w[j] != p.m:
            v.append(f"punctured column {j} is not fully connected")
    for j in range(p.rho, p.n_prime):
        if col_w[j] < 3:
            v.append(f"column {j} has weight {col_w[j]} < 3")
    # tail blocks: banded lower triangular, unit diagonal, full rank
    for jb in range(1, p.omega + 1):
        q = p.q_block(jb)
        if (np.diag(q) != 1).any():
            v.append(f"tail block {jb} diagonal is not all ones")
        if np.triu(q, 1).any():
            v.append(f"tail block {jb} is not lower triangular")
        ii, jj = np.nonzero(q)
        if ((ii - jj) > 2).any():
            v.append(f"tail block {jb} exceeds the tri-diagonal band")
    return v


# ---------------------------------------------------------------------------
# file format

_HEADER = "esrl-profile v1"
_SCALARS = ("m_prime", "n_prime", "m", "n", "omega", "rho", "Z")


def serialize_profile(profile: CodeProfile) -> str:
    out = io.StringIO()
    out.write(_HEADER + "\n")
    for name in _SCALARS:
        out.write(f"{name} {getattr(profile, name)}\n")
    for name, mat in (("P", profile.P), ("T", profile.T), ("Q", profile.Q)):
        out.write(name + "\n")
        for row in mat:
            out.write(" ".join(str(int(x)) for x in row) + "\n")
    return out.getvalue()


def parse_profile(text: str) -> CodeProfile:
    lines = text.splitlines()
    if not lines or lines[0] != _HEADER:
        raise ProfileError("not a profile file (bad header)")
    pos = 1
    scalars = {}
    for name in _SCALARS:
        try:
            key, val = lines[pos].split()
        except (IndexError, ValueError):
            raise ProfileError(f"expected scalar line for {name}") from None
        if key != name:
            raise ProfileError(f"expected {name}, found {key}")
        scalars[name] = int(val)
        pos += 1
    mats = {}
    shapes = {"P": (scalars["m"], scalars["n"]),
              "T": (scalars["m"], scalars["n"]),
              "Q": (scalars["m"], scalars["omega"] * scalars["m"])}
    for name in ("P", "T", "Q"):
        if pos >= len(lines) or lines[pos] != name:
            raise ProfileError(f"expected matrix section {name}")
        pos += 1
        rows, cols = shapes[name]
        data = []
        for _ in range(rows):
            if pos >= len(lines):
                raise ProfileError(f"truncated matrix {name}")
            parts = lines[pos].split()
            if len(parts) != cols and cols > 0:
                raise ProfileError(f"matrix {name} row has {len(parts)} "
                                   f"entries, expected {cols}")
            data.append([int(x) for x in parts])
            pos += 1
        mats[name] = np.array(data, dtype=np.int64).reshape(rows, cols)
    if pos != len(lines):
        raise ProfileError("trailing content after matrices")
    return CodeProfile.from_matrices(
        m_prime=scalars["m_prime"], n_prime=scalars["n_prime"],
        omega=scalars["omega"], rho=scalars["rho"], Z=scalars["Z"],
        T=mats["T"], P=mats["P"], Q=mats["Q"])


def load_profile(path) -> CodeProfile:
    with open(path, "r", encoding="ascii") as fh:
        return parse_profile(fh.read())


def save_profile(profile: CodeProfile, path) -> None:
    text = serialize_profile(profile)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".esrl-tmp-")
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
