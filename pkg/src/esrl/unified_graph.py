"""Cycle counting and edge-spreading optimization on the unified graph.

The unified graph is the bipartite protograph of B with every edge annotated
by its spreading label from T.  A message-passing sweep from a root VN counts
the short cycles that survive coupling: each basic message gamma_c carries an
accumulated path value phi, incremented by the label of every VN-to-CN hop
(including the initial send) and decremented by the label of every CN-to-VN
hop, so a closed walk returns with phi equal to the alternating label sum of
the cycle.  A cycle survives in the coupled graph iff phi = 0.

Monomials are stored as count vectors indexed by (initial CN, phi) rather
than explicit factor bags; all operations needed downstream (phi-zero
counting and single-edge reallocation) act per initial-CN row or per
arriving-edge monomial, so the grouping of factors into individual walks
never has to be materialized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from esrl.profile import CodeProfile

__all__ = [
    "UnifiedGraph",
    "CyclePolynomial",
    "CycleCountError",
    "ConsistencyError",
    "from_profile",
    "count_cycles_at_vn",
    "count_cycles_total",
    "eval_reallocation",
    "optimize_spreading",
    "survives_lifting",
    "spreading_path_value",
    "lifting_path_value",
    "girth",
    "cycle_report",
]

DEFAULT_TERM_CAP = 10**6


class CycleCountError(RuntimeError):
    """Polynomial term count exceeded the configured cap."""


class ConsistencyError(RuntimeError):
    """Counts failed an integrality check; indicates a counting bug."""


class UnifiedGraph:
    """Bipartite protograph with per-edge spreading labels.

    T is the master adjacency: T[c, v] = -1 means no edge, otherwise the
    spreading label in [0, omega].  An optional shift matrix mirrors P for
    lifting-aware checks.  locked marks edges whose label must not change.
    """

    def __init__(self, T, omega, *, locked=None, shift=None, Z=0):
        self.T = np.array(T, dtype=np.int64)
        self.m, self.n = self.T.shape
        self.omega = int(omega)
        self.Z = int(Z)
        bad = (self.T >= 0) & (self.T > self.omega)
        if bad.any():
            raise ValueError("spreading label exceeds omega")
        if locked is None:
            locked = np.zeros(self.T.shape, dtype=bool)
        self.locked = np.array(locked, dtype=bool)
        self.shift = None if shift is None else np.array(shift, dtype=np.int64)
        self.cn_adj = [np.flatnonzero(self.T[c] >= 0) for c in range(self.m)]
        self.vn_adj = [np.flatnonzero(self.T[:, v] >= 0) for v in range(self.n)]
        # instrumentation: factor updates performed by message passing
        self.op_count = 0

    @property
    def num_edges(self) -> int:
        return int((self.T >= 0).sum())

    def copy(self) -> "UnifiedGraph":
        return UnifiedGraph(self.T, self.omega, locked=self.locked,
                            shift=self.shift, Z=self.Z)

    def with_label(self, c: int, v: int, label: int) -> "UnifiedGraph":
        if self.T[c, v] < 0:
            raise ValueError(f"no edge ({c}, {v})")
        T = self.T.copy()
        T[c, v] = label
        return UnifiedGraph(T, self.omega, locked=self.locked,
                            shift=self.shift, Z=self.Z)


def from_profile(profile: CodeProfile, lock_diagonal: bool = True) -> UnifiedGraph:
    """Unified graph of a profile; the tail matrix is deliberately ignored."""
    locked = np.zeros((profile.m, profile.n), dtype=bool)
    if lock_diagonal:
        for c in range(profile.m_prime, profile.m):
            d = profile.n_prime + (c - profile.m_prime)
            if d < profile.n:
                locked[c, d] = True
    shift = profile.P if profile.Z > 0 else None
    return UnifiedGraph(profile.T, profile.omega, locked=locked,
                        shift=shift, Z=profile.Z)


@dataclass
class CyclePolynomial:
    """The collected polynomial p_v^l as per-arriving-CN count matrices.

    arrays[c] has shape (deg(v), width): row r counts factors whose initial
    message left the root along its r-th adjacent CN, column j counts factors
    with path value j - offset.  Monomial boundaries beyond the arriving CN
    are irrelevant to every downstream operation, so they are not kept.
    """

    root: int
    length: int
    neighbors: tuple
    offset: int
    arrays: dict

    def f(self) -> int:
        """Number of factors with accumulated path value zero."""
        return int(sum(a[:, self.offset].sum() for a in self.arrays.values()))

    def copy(self) -> "CyclePolynomial":
        return CyclePolynomial(self.root, self.length, self.neighbors,
                               self.offset,
                               {c: a.copy() for c, a in self.arrays.items()})

    def factor_count(self) -> int:
        return int(sum(a.sum() for a in self.arrays.values()))


def _shift_cols(a: np.ndarray, s: int) -> np.ndarray:
    """Shift count columns by s; the range is sized so nothing falls off."""
    if s == 0:
        return a.copy()
    out = np.zeros_like(a)
    if s > 0:
        out[:, s:] = a[:, :-s]
    else:
        out[:, :s] = a[:, -s:]
    return out


def _message_pass(g: UnifiedGraph, v: int, l_max: int, collect: set,
                  term_cap: int):
    """Sweep l_max - 1 steps from root v; collect p_v^l at t = l - 1.

    Returns {l: CyclePolynomial} for l in collect.  Messages are dicts over
    directed edges; each value is a (deg(v), width) count matrix.
    """
    cvs = g.vn_adj[v]
    d = len(cvs)
    pos = {int(c): r for r, c in enumerate(cvs)}
    offset = g.omega * l_max
    width = 2 * offset + 1
    T = g.T
    out = {}
    if d == 0:
        for l in collect:
            out[l] = CyclePolynomial(v, l, (), offset, {})
        return out

    m_vc = {}
    for c in cvs:
        a = np.zeros((d, width), dtype=np.int64)
        a[pos[int(c)], offset + T[c, v]] = 1
        m_vc[(v, int(c))] = a
    m_cv = {}
    for t in range(1, l_max):
        total_factors = 0
        if t % 2 == 1:
            nxt = {}
            by_cn = {}
            for (v_s, c), a in m_vc.items():
                by_cn.setdefault(c, []).append((v_s, a))
            for c, incoming in by_cn.items():
                tot = incoming[0][1] if len(incoming) == 1 else sum(
                    a for _, a in incoming)
                senders = {v_s: a for v_s, a in incoming}
                for v_r in g.cn_adj[c]:
                    v_r = int(v_r)
                    ex = tot - senders[v_r] if v_r in senders else tot
                    if not ex.any():
                        continue
                    msg = _shift_cols(ex, -T[c, v_r])
                    nxt[(c, v_r)] = msg
                    total_factors += int(msg.sum())
            m_cv = nxt
            if t + 1 in collect:
                arrays = {}
                for c in cvs:
                    c = int(c)
                    a = m_cv.get((c, v))
                    if a is None:
                        continue
                    a = a.copy()
                    # drop walks returning along their own initial edge
                    a[pos[c], :] = 0
                    if a.any():
                        arrays[c] = a
                out[t + 1] = CyclePolynomial(v, t + 1, tuple(int(c) for c in cvs),
                                             offset, arrays)
        else:
            nxt = {}
            by_vn = {}
            for (c, v_r), a in m_cv.items():
                by_vn.setdefault(v_r, []).append((c, a))
            for v_r, incoming in by_vn.items():
                tot = incoming[0][1] if len(incoming) == 1 else sum(
                    a for _, a in incoming)
                senders = {c: a for c, a in incoming}
                for c_r in g.vn_adj[v_r]:
                    c_r = int(c_r)
                    ex = tot - senders[c_r] if c_r in senders else tot
                    if not ex.any():
                        continue
                    msg = _shift_cols(ex, T[c_r, v_r])
                    nxt[(v_r, c_r)] = msg
                    total_factors += int(msg.sum())
            m_vc = nxt
        g.op_count += total_factors
        if total_factors > term_cap:
            raise CycleCountError(
                f"term cap {term_cap} exceeded at root {v}, step {t}")
    return out


def count_cycles_at_vn(g: UnifiedGraph, v: int, l: int,
                       term_cap: int = DEFAULT_TERM_CAP):
    """Number of surviving l-cycles through VN v, with the polynomial."""
    if l < 4 or l % 2:
        raise ValueError("cycle length must be an even integer >= 4")
    poly = _message_pass(g, v, l, {l}, term_cap)[l]
    fv = poly.f()
    if fv % 2:
        raise ConsistencyError(f"odd phi-zero factor count {fv} at VN {v}")
    return fv // 2, poly


def count_cycles_total(g: UnifiedGraph, l: int,
                       term_cap: int = DEFAULT_TERM_CAP) -> int:
    """Total surviving l-cycles; each cycle appears at l/2 roots."""
    acc = 0
    for v in range(g.n):
        cnt, _ = count_cycles_at_vn(g, v, l, term_cap)
        acc += cnt
    half = l // 2
    if acc % half:
        raise ConsistencyError(
            f"per-VN total {acc} not divisible by {half} for l={l}")
    return acc // half


def eval_reallocation(g: UnifiedGraph, poly: CyclePolynomial, edge,
                      new_label: int) -> CyclePolynomial:
    """Polynomial after re-assigning the root's edge to a new label.

    Pure function: the root sent its initial factor with +old on this edge,
    so all factors rooted there move by theta; the monomial that arrived
    back along the same edge absorbed -old at the last hop, so it moves by
    -theta.
    """
    c, v = edge
    if v != poly.root:
        raise ValueError("edge is not incident to the polynomial's root")
    if g.T[c, v] < 0:
        raise ValueError(f"no edge ({c}, {v})")
    if g.locked[c, v]:
        raise ValueError(f"edge ({c}, {v}) is locked")
    if not 0 <= new_label <= g.omega:
        raise ValueError("label out of range")
    theta = new_label - int(g.T[c, v])
    out = poly.copy()
    if theta == 0:
        return out
    r = poly.neighbors.index(c)
    for ac, a in out.arrays.items():
        shifted_row = _shift_cols(a[r : r + 1], theta)
        a[r] = shifted_row[0]
        if ac == c:
            out.arrays[ac] = _shift_cols(a, -theta)
    return out


def _candidate_moves(g: UnifiedGraph, v: int, polys: dict, lengths: list):
    """Yield (eps, c, new_label) for unlocked edges at v per the greedy rule.

    A move is admissible only if no shorter length gains surviving cycles.
    """
    top = polys[lengths[-1]]
    f_top = top.f()
    f_short = {l: polys[l].f() for l in lengths[:-1]}
    for c in top.neighbors:
        if g.locked[c, v]:
            continue
        old = int(g.T[c, v])
        for new in range(g.omega + 1):
            if new == old:
                continue
            ok = True
            for l in lengths[:-1]:
                if eval_reallocation(g, polys[l], (c, v), new).f() > f_short[l]:
                    ok = False
                    break
            if not ok:
                continue
            f_new = eval_reallocation(g, top, (c, v), new).f()
            eps = (f_top - f_new) // 2
            yield eps, c, new


def optimize_spreading(g: UnifiedGraph, l_target: int, I_MP: int,
                       term_cap: int = DEFAULT_TERM_CAP, moves=None,
                       roots=None) -> UnifiedGraph:
    """Greedy single-edge reallocations minimizing surviving l_target-cycles.

    Each pass recomputes every polynomial, then applies the best admissible
    move (largest removed-cycle count, ties to the lowest (v, c, label)),
    stopping early once no move removes a cycle.  Only VN-to-CN direction
    edges are candidates.  roots optionally restricts candidate edges to
    those VNs (their polynomials still see the whole graph).
    """
    if l_target < 4 or l_target % 2:
        raise ValueError("target length must be an even integer >= 4")
    lengths = list(range(4, l_target + 1, 2))
    cur = g.copy()
    scan = range(cur.n) if roots is None else list(roots)
    for _ in range(I_MP):
        best = None
        for v in scan:
            polys = _message_pass(cur, v, l_target, set(lengths), term_cap)
            for eps, c, new in _candidate_moves(cur, v, polys, lengths):
                key = (-eps, v, c, new)
                if best is None or key < best[0]:
                    best = (key, v, c, new, eps)
        if best is None or best[4] <= 0:
            break
        _, v, c, new, eps = best
        if moves is not None:
            moves.append({"cn": int(c), "vn": int(v),
                          "old": int(cur.T[c, v]), "new": int(new),
                          "removed": int(eps)})
        cur = cur.with_label(c, v, new)
    return cur


def spreading_path_value(cycle, T) -> int:
    """Accumulated label value of a proto cycle [v0, c0, v1, c1, ...]."""
    vns = cycle[0::2]
    cns = cycle[1::2]
    k = len(cns)
    phi = 0
    for i in range(k):
        phi += T[cns[i], vns[i]] - T[cns[i], vns[(i + 1) % k]]
    return int(phi)


def lifting_path_value(cycle, shift) -> int:
    """Alternating circulant-shift sum of a proto cycle."""
    vns = cycle[0::2]
    cns = cycle[1::2]
    k = len(cns)
    s = 0
    for i in range(k):
        s += shift[cns[i], vns[i]] - shift[cns[i], vns[(i + 1) % k]]
    return int(s)


def survives_lifting(cycle, g: UnifiedGraph) -> bool:
    """True iff the cycle remains after both coupling and circulant lifting."""
    vns = cycle[0::2]
    cns = cycle[1::2]
    if len(vns) != len(cns) or len(vns) < 2:
        raise ValueError("malformed cycle")
    k = len(cns)
    for i in range(k):
        if g.T[cns[i], vns[i]] < 0 or g.T[cns[i], vns[(i + 1) % k]] < 0:
            raise ValueError("cycle uses a missing edge")
        if cns[i] == cns[(i + 1) % k] or vns[i] == vns[(i + 1) % k]:
            raise ValueError("cycle repeats adjacent nodes")
    if spreading_path_value(cycle, g.T) != 0:
        return False
    if g.Z <= 1 or g.shift is None:
        return True
    return lifting_path_value(cycle, g.shift) % g.Z == 0


def girth(g: UnifiedGraph) -> int:
    """Shortest cycle length of the underlying bipartite graph (0 if acyclic).

    BFS from every node; a non-tree edge between nodes at depths d1, d2
    closes a cycle of length d1 + d2 + 1 through the root.
    """
    total = g.n + g.m  # node ids: VNs then CNs
    adj = [[g.n + int(c) for c in g.vn_adj[v]] for v in range(g.n)]
    adj += [[int(v) for v in g.cn_adj[c]] for c in range(g.m)]
    best = float("inf")
    for root in range(total):
        dist = {root: 0}
        parent = {root: -1}
        frontier = [root]
        while frontier and 2 * dist[frontier[0]] < best - 1:
            nxt = []
            for u in frontier:
                for w in adj[u]:
                    if w == parent[u]:
                        continue
                    if w in dist:
                        best = min(best, dist[u] + dist[w] + 1)
                    else:
                        dist[w] = dist[u] + 1
                        parent[w] = u
                        nxt.append(w)
            frontier = nxt
    return int(best) if best != float("inf") else 0


def cycle_report(g: UnifiedGraph, lengths, term_cap: int = DEFAULT_TERM_CAP):
    """Per-length totals and per-VN counts, for diagnostics and the CLI."""
    report = {}
    for l in lengths:
        per_vn = []
        for v in range(g.n):
            cnt, _ = count_cycles_at_vn(g, v, l, term_cap)
            per_vn.append(cnt)
        acc = sum(per_vn)
        half = l // 2
        if acc % half:
            raise ConsistencyError(f"non-integral total at l={l}")
        report[l] = {"total": acc // half, "per_vn": per_vn}
    return report
