"""Automated profile construction: PEG placement, ACE screening, row-wise
extension design, and girth-targeted circulant lifting.

The flow designs the high-rate core first, then grows one row at a time;
previously designed rows are never edited, so every intermediate pruning
point of the final profile is exactly the profile that existed when that
row was finished.  All randomness flows from a single seeded generator, so
identical configs produce byte-identical profiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from esrl.profile import (
    CodeProfile,
    expand_coupled,
    tail_matrix,
)
from esrl.rca import rca_threshold_detail
from esrl.unified_graph import (
    UnifiedGraph,
    girth,
    lifting_path_value,
    optimize_spreading,
    spreading_path_value,
)

__all__ = [
    "DesignConfig",
    "DesignError",
    "DesignResult",
    "select_degree_distribution",
    "rank_degree_candidates",
    "peg_place",
    "ace_spectrum",
    "ace_ok",
    "proto_cycles",
    "design_hrc",
    "design_ime",
    "design_full",
    "lift_profile",
]


class DesignError(ValueError):
    pass


@dataclass(frozen=True)
class DesignConfig:
    m_prime: int
    n_prime: int
    m: int
    n: int
    rho: int
    omega: int
    L: int
    Z: int = 0
    g_target: int = 6
    eta_ace: int = 4            # screening bound for the high-rate core
    eta_ace_ime: int = 3        # relaxed bound for extension rows
    ace_lmax: int = 6           # cycle lengths screened during construction
    I_HRC: int = 50
    I_IME: int = 50
    I_MP: int = 30
    n_degree_candidates: int = 200
    irc_row_max: int = 6        # extra row edges beyond the punctured column
    ssc_extra_max: int = 1      # off-diagonal edges allowed per new column
    ssc_weight_frac: float = 0.3
    weight_target: int | None = None
    rca_iters: int = 150
    rca_resolution_db: float = 0.05
    rca_bracket: tuple = (-6.0, 15.0)
    seed: int = 0

    def __post_init__(self):
        if self.g_target < 6 or self.g_target % 2:
            raise DesignError("girth target must be an even integer >= 6")
        for name in ("I_HRC", "I_IME", "I_MP", "n_degree_candidates"):
            if getattr(self, name) < 1:
                raise DesignError(f"{name} must be >= 1")
        if self.n - self.m != self.n_prime - self.m_prime:
            raise DesignError("extension must keep the information length")
        if not 0 <= self.rho < self.n_prime - self.m_prime:
            raise DesignError("puncturing count out of range")
        if not self.m_prime <= self.m or not self.n_prime <= self.n:
            raise DesignError("core dimensions exceed the full matrix")

    @property
    def k(self) -> int:
        return self.n_prime - self.m_prime


@dataclass
class DesignResult:
    profile: CodeProfile
    threshold_db: float
    log: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# PEG


def _bfs_cn_depth(B: np.ndarray, v: int) -> np.ndarray:
    """BFS depth of every CN from VN v; unreachable CNs get -1."""
    m, n = B.shape
    dist_c = np.full(m, -1, dtype=np.int64)
    dist_v = np.full(n, -1, dtype=np.int64)
    dist_v[v] = 0
    frontier_v = [v]
    depth = 0
    while frontier_v:
        depth += 1
        frontier_c = []
        for vv in frontier_v:
            for c in np.flatnonzero(B[:, vv]):
                if dist_c[c] < 0:
                    dist_c[c] = depth
                    frontier_c.append(c)
        frontier_v = []
        depth += 1
        for cc in frontier_c:
            for vv in np.flatnonzero(B[cc]):
                if dist_v[vv] < 0:
                    dist_v[vv] = depth
                    frontier_v.append(vv)
    return dist_c


def _peg_select(B: np.ndarray, v: int, candidates) -> int:
    """CN for the next edge of VN v: unreachable first, then farthest.

    Ties break by lowest current CN degree, then lowest index.
    """
    cands = [c for c in candidates if not B[c, v]]
    if not cands:
        raise DesignError(f"no feasible CN for column {v}")
    dist = _bfs_cn_depth(B, v)
    row_deg = B.sum(axis=1)

    def key(c):
        d = dist[c]
        reach = math.inf if d < 0 else int(d)
        return (-reach if reach is not math.inf else -math.inf,
                int(row_deg[c]), int(c))

    return min(cands, key=key)


def peg_place(B, targets: dict, rng=None, allowed: dict | None = None):
    """Grow columns to their target degrees by progressive edge growth.

    targets maps column index to total column degree.  allowed optionally
    restricts each column to a set of candidate CNs.  Column processing
    order is shuffled when an rng is supplied (restart diversity); edge
    selection itself is deterministic.
    """
    B = np.array(B, dtype=np.int64)
    m = B.shape[0]
    cols = sorted(targets)
    if rng is not None:
        rng.shuffle(cols)
    for v in cols:
        cand = range(m) if allowed is None or v not in allowed else allowed[v]
        while B[:, v].sum() < targets[v]:
            c = _peg_select(B, v, cand)
            B[c, v] = 1
    return B


# ---------------------------------------------------------------------------
# ACE


def proto_cycles(B, l_max: int):
    """All simple cycles of even length <= l_max, as [v0, c0, v1, c1, ...].

    Each cycle is produced once: the starting VN is the cycle's smallest
    and the first CN is smaller than the last.
    """
    B = np.asarray(B)
    m, n = B.shape
    adj_v = [np.flatnonzero(B[:, v]).tolist() for v in range(n)]
    adj_c = [np.flatnonzero(B[c]).tolist() for c in range(m)]
    half_max = l_max // 2
    out = []

    def walk(v0, vns, cns):
        c = cns[-1]
        if len(cns) >= 2 and v0 in adj_c[c] and cns[0] < c:
            cyc = []
            for vv, cc in zip(vns, cns):
                cyc.extend((vv, cc))
            out.append(cyc)
        if len(cns) == half_max:
            return
        for v in adj_c[c]:
            if v <= v0 or v in vns:
                continue
            for c2 in adj_v[v]:
                if c2 in cns:
                    continue
                walk(v0, vns + [v], cns + [c2])

    for v0 in range(n):
        for c0 in adj_v[v0]:
            walk(v0, [v0], [c0])
    return out


def ace_spectrum(B, l_max: int, T=None, eta_cap=None) -> dict:
    """Minimum cycle ACE per length: eta = sum of (d_v - 2) over cycle VNs.

    With T given, only cycles whose spreading path value is zero count.
    eta_cap prunes the search: any minimum >= eta_cap is reported as inf,
    which makes screening against a bound cheap even on dense columns.
    """
    if l_max < 4 or l_max % 2:
        raise DesignError("cycle length bound must be an even integer >= 4")
    B = np.asarray(B)
    m, n = B.shape
    deg = B.sum(axis=0)
    adj_v = [np.flatnonzero(B[:, v]).tolist() for v in range(n)]
    adj_c = [np.flatnonzero(B[c]).tolist() for c in range(m)]
    best = {l: math.inf for l in range(4, l_max + 1, 2)}
    cap = math.inf if eta_cap is None else float(eta_cap)
    half_max = l_max // 2
    # low-degree columns first, so small-eta cycles tighten the bound early
    rank = np.empty(n, dtype=np.int64)
    rank[np.argsort(deg, kind="stable")] = np.arange(n)

    def bound():
        return min(cap, max(best.values()))

    def walk(v0, vns, cns, eta):
        c = cns[-1]
        h = len(cns)
        if h >= 2 and v0 in adj_c[c] and cns[0] < c:
            if eta < best[2 * h]:
                if T is None:
                    best[2 * h] = eta
                else:
                    cyc = []
                    for vv, cc in zip(vns, cns):
                        cyc.extend((vv, cc))
                    if spreading_path_value(cyc, T) == 0:
                        best[2 * h] = eta
        if h == half_max:
            return
        for v in adj_c[c]:
            if rank[v] <= rank[v0] or v in vns:
                continue
            e2 = eta + int(deg[v]) - 2
            if e2 >= bound():
                continue
            for c2 in adj_v[v]:
                if c2 in cns:
                    continue
                walk(v0, vns + [v], cns + [c2], e2)

    for v0 in np.argsort(rank):
        e0 = int(deg[v0]) - 2
        if e0 >= bound():
            continue
        for c0 in adj_v[v0]:
            walk(int(v0), [int(v0)], [c0], e0)
    return best


def ace_ok(B, requirement: dict, T=None) -> bool:
    """True when every screened length meets its minimum-ACE bound."""
    l_max = max(requirement)
    cap = max(requirement.values())
    spec = ace_spectrum(B, l_max, T=T, eta_cap=cap)
    return all(spec[l] >= req for l, req in requirement.items())


def _ace_requirement(config: DesignConfig, eta: int) -> dict:
    return {l: eta for l in range(4, config.ace_lmax + 1, 2)}


# ---------------------------------------------------------------------------
# degree selection (high-rate core)


def _hrc_base(config: DesignConfig) -> np.ndarray:
    """Punctured columns fully connected; parity part is an accumulator."""
    mp, np_, k = config.m_prime, config.n_prime, config.k
    B = np.zeros((mp, np_), dtype=np.int64)
    B[:, : config.rho] = 1
    for j in range(mp):
        B[j, k + j] = 1
        if j + 1 < mp:
            B[j + 1, k + j] = 1
    return B


def _hrc_from_degrees(config: DesignConfig, degrees, rng=None) -> np.ndarray:
    B = _hrc_base(config)
    targets = {v: int(degrees[v]) for v in range(config.rho, config.k)}
    return peg_place(B, targets, rng)


def _sample_degrees(config: DesignConfig, rng) -> tuple:
    degs = np.empty(config.n_prime, dtype=np.int64)
    degs[: config.rho] = config.m_prime
    degs[config.rho : config.k] = rng.integers(
        3, config.m_prime + 1, size=config.k - config.rho)
    for j in range(config.m_prime):
        degs[config.k + j] = 2 if j + 1 < config.m_prime else 1
    return tuple(int(d) for d in degs)


def _hrc_profile(config: DesignConfig, B, T) -> CodeProfile:
    B = np.asarray(B, dtype=np.int64)
    return CodeProfile(m_prime=config.m_prime, n_prime=config.n_prime,
                       m=config.m_prime, n=config.n_prime,
                       omega=config.omega, rho=config.rho, Z=0,
                       B=B, T=np.asarray(T, dtype=np.int64),
                       P=np.where(B == 1, 0, -1),
                       Q=tail_matrix(config.m_prime, config.omega))


def _score(config: DesignConfig, profile: CodeProfile) -> float:
    cc = expand_coupled(profile, config.L)
    try:
        return rca_threshold_detail(
            cc, I_RCA=config.rca_iters,
            resolution_db=config.rca_resolution_db,
            bracket=config.rca_bracket).threshold_db
    except RuntimeError:
        return math.inf


def rank_degree_candidates(config: DesignConfig, candidates, rng):
    """(score, degrees) per candidate; score is the coupled RCA threshold
    of a PEG realization with all edges left in the first sub-matrix."""
    out = []
    for degs in candidates:
        B = _hrc_from_degrees(config, degs, rng)
        T = np.where(B == 1, 0, -1)
        out.append((_score(config, _hrc_profile(config, B, T)), degs))
    return out


def select_degree_distribution(config: DesignConfig, rng=None) -> tuple:
    """Best-scoring column-degree assignment among sampled candidates."""
    if rng is None:
        rng = np.random.default_rng(config.seed)
    seen = set()
    candidates = []
    for _ in range(config.n_degree_candidates):
        d = _sample_degrees(config, rng)
        if d not in seen:
            seen.add(d)
            candidates.append(d)
    scored = rank_degree_candidates(config, candidates, rng)
    best = min(range(len(scored)), key=lambda i: (scored[i][0], i))
    return scored[best][1]


# ---------------------------------------------------------------------------
# high-rate core design

_ACE_RETRIES = 50


def _peg_ace(build, screen, rng, retries=_ACE_RETRIES):
    for _ in range(retries):
        B = build(rng)
        if screen(B):
            return B
    raise DesignError("ACE screening rejected every PEG candidate")


def _spread_target(config: DesignConfig, g: UnifiedGraph) -> int:
    """Cycle length the optimizer attacks: capped by the exactness window."""
    gb = girth(g)
    window = 2 * gb - 2 if gb else config.g_target - 2
    lt = min(config.g_target - 2, window)
    return max(4, lt - (lt % 2))


def _lock_tail_contacts(config: DesignConfig, locked: np.ndarray) -> None:
    """Pin punctured-column labels on rows that meet a punctured tail VN.

    The tail parity block joins tail column v to rows v..v+2.  If such a
    row also received the phase-shifted copy of punctured column v, that
    single check row would touch two punctured VNs; keeping the label at
    its initial 0 rules this out.
    """
    for v in range(config.rho):
        for c in range(v, min(v + 3, locked.shape[0])):
            locked[c, v] = True


def design_hrc(config: DesignConfig, rng=None,
               degrees=None) -> DesignResult:
    """Restarted search for the high-rate core and its spreading labels."""
    if rng is None:
        rng = np.random.default_rng(config.seed)
    if degrees is None:
        degrees = select_degree_distribution(config, rng)
    req = _ace_requirement(config, config.eta_ace)
    best = None
    log = []
    for attempt in range(config.I_HRC):
        perm = np.array(degrees)
        info = perm[config.rho : config.k]
        rng.shuffle(info)
        perm[config.rho : config.k] = info
        B = _peg_ace(lambda r: _hrc_from_degrees(config, perm, r),
                     lambda b: ace_ok(b, req), rng)
        T = np.where(B == 1, 0, -1)
        locked = np.zeros(B.shape, dtype=bool)
        for j in range(config.m_prime):
            locked[j, config.k + j] = True  # keeps the parity part solvable
        _lock_tail_contacts(config, locked)
        g = UnifiedGraph(T, config.omega, locked=locked)
        g = optimize_spreading(g, _spread_target(config, g), config.I_MP)
        prof = _hrc_profile(config, B, g.T)
        score = _score(config, prof)
        log.append({"attempt": attempt, "threshold_db": score})
        if best is None or score < best.threshold_db:
            best = DesignResult(prof, score, log)
    if best is None:
        raise DesignError("no HRC candidate survived")
    best.log = log
    return best


# ---------------------------------------------------------------------------
# row-wise extension design


def _embed_rows(config: DesignConfig, B, T, m_cur: int, n_cur: int):
    """Grow (B, T) by one all-zero row and one column for the new parity."""
    mb = np.full((m_cur + 1, n_cur + 1), 0, dtype=np.int64)
    mt = np.full((m_cur + 1, n_cur + 1), -1, dtype=np.int64)
    mb[:m_cur, :n_cur] = B
    mt[:m_cur, :n_cur] = T
    return mb, mt


def _weights_from_budget(config: DesignConfig, w_hrc: int, rng) -> list:
    """Per-row (irc_extra, ssc_extra) when a total weight target is set."""
    rows = config.m - config.m_prime
    fixed = w_hrc + rows * (config.rho + 1)  # punctured edges + diagonals
    extra = (config.weight_target or 0) - fixed
    if extra < rows:
        raise DesignError("weight target too small for the row structure")
    base, rem = divmod(extra, rows)
    plan = [base + (1 if i < rem else 0) for i in range(rows)]
    idx = np.arange(rows)
    rng.shuffle(idx)
    out = [(0, 0)] * rows
    for i, r in enumerate(idx):
        e = plan[r]
        ssc = min(config.ssc_extra_max, max(0, e - 1)) if i % 3 == 2 else 0
        out[r] = (max(1, e - ssc), e - max(1, e - ssc))
    return out


def _sample_row_plan(config: DesignConfig, rng) -> list:
    rows = config.m - config.m_prime
    plan = []
    for _ in range(rows):
        irc = int(rng.integers(1, config.irc_row_max + 1))
        ssc = int(rng.integers(0, config.ssc_extra_max + 1))
        plan.append((irc, ssc))
    return plan


def _ssc_weight(config: DesignConfig, B, m_cur: int) -> int:
    # unit diagonals are structural, only optional edges count for the cap
    return int(B[:, config.n_prime :].sum()) - max(0, m_cur - config.m_prime)


def _irc_weight(config: DesignConfig, B, m_cur: int) -> int:
    return int(B[config.m_prime : m_cur, : config.n_prime].sum())


def _place_row(config: DesignConfig, B, c: int, irc_extra: int,
               ssc_extra: int, rng) -> np.ndarray:
    """Fill row c: punctured columns, the unit diagonal, then PEG edges.

    SSC edges blocked by the weight cap (or missing columns on early rows)
    fall back to extra IRC edges, so the row weight always lands on plan.
    """
    B = B.copy()
    B[c, : config.rho] = 1
    B[c, config.k + c] = 1
    Bt = B.T
    irc_cols = list(range(config.rho, config.n_prime))
    ssc_cols = list(range(config.n_prime, config.k + c))
    irc_extra = max(irc_extra, 2 - config.rho)  # rows keep >= 2 core edges
    if config.weight_target is None:
        # every non-punctured core column must end at weight >= 3; spread
        # the remaining deficit over the rows still to be placed
        deficit = sum(max(0, 3 - int(B[:, v].sum())) for v in irc_cols)
        irc_extra = max(irc_extra, -(-deficit // (config.m - c)))
    placed_ssc = 0
    budget = config.ssc_weight_frac * (
        _irc_weight(config, B, c + 1) + irc_extra)
    for _ in range(ssc_extra):
        if not ssc_cols or _ssc_weight(config, B, c + 1) + 1 > budget:
            break
        pick = _peg_select(Bt, c, ssc_cols)
        B[c, pick] = 1
        placed_ssc += 1
    extra = min(irc_extra + (ssc_extra - placed_ssc),
                len(irc_cols) - int(B[c, irc_cols].sum()))
    for _ in range(extra):
        need = [v for v in irc_cols
                if B[:, v].sum() < 3 and not B[c, v]]
        pick = _peg_select(Bt, c, need or irc_cols)
        B[c, pick] = 1
    return B


def design_ime(config: DesignConfig, hrc: DesignResult, rng=None,
               row_plan=None) -> DesignResult:
    """Row-by-row extension; earlier rows and labels are never edited."""
    if rng is None:
        rng = np.random.default_rng(config.seed + 1)
    if row_plan is None:
        row_plan = global_weight_ref(config, hrc, rng)
    B_cur = np.array(hrc.profile.B)
    T_cur = np.array(hrc.profile.T)
    req = _ace_requirement(config, config.eta_ace_ime)
    log = []
    snapshots = []
    best_score = hrc.threshold_db
    for c in range(config.m_prime, config.m):
        irc_extra, ssc_extra = row_plan[c - config.m_prime]
        B_grown, T_grown = _embed_rows(config, B_cur, T_cur,
                                       B_cur.shape[0], B_cur.shape[1])
        best_row = None
        for attempt in range(config.I_IME):
            B_try = _peg_ace(
                lambda r: _place_row(config, B_grown, c, irc_extra,
                                     ssc_extra, r),
                lambda b: ace_ok(b, req), rng)
            T_try = np.where(B_try == 1, 0, -1)
            T_try[:c] = T_grown[:c]
            locked = np.zeros(B_try.shape, dtype=bool)
            locked[:c] = B_try[:c] == 1
            locked[c, config.k + c] = True
            _lock_tail_contacts(config, locked)
            g = UnifiedGraph(T_try, config.omega, locked=locked)
            # punctured columns connect to every row; rooting the counter
            # there explodes the polynomials and their cycles clear the ACE
            # floor through sheer degree anyway
            roots = [v for v in np.flatnonzero(B_try[c]).tolist()
                     if v >= config.rho]
            g = optimize_spreading(g, _spread_target(config, g),
                                   config.I_MP, roots=roots)
            prof = _partial_profile(config, B_try, g.T, c + 1)
            score = _score(config, prof)
            if best_row is None or score < best_row[0]:
                best_row = (score, B_try, g.T, prof)
        score, B_cur, T_cur, prof = best_row
        best_score = score
        log.append({"row": c, "threshold_db": score})
        snapshots.append(prof)
    return DesignResult(prof, best_score, log, snapshots)


def _partial_profile(config: DesignConfig, B, T, m_cur: int) -> CodeProfile:
    B = np.asarray(B, dtype=np.int64)
    return CodeProfile(m_prime=config.m_prime, n_prime=config.n_prime,
                       m=m_cur, n=config.k + m_cur,
                       omega=config.omega, rho=config.rho, Z=0,
                       B=B, T=np.asarray(T, dtype=np.int64),
                       P=np.where(B == 1, 0, -1),
                       Q=tail_matrix(m_cur, config.omega))


def global_weight_ref(config: DesignConfig, hrc: DesignResult,
                      rng) -> list:
    """Full-size reference construction supplying per-row weight targets.

    A handful of complete matrices are grown in one shot (no per-row
    optimization) and scored; the winner's row weights become the plan.
    When a total weight target is configured the plan is derived from the
    budget instead of sampled.
    """
    if config.weight_target is not None:
        return _weights_from_budget(config, int(hrc.profile.B.sum()), rng)
    req = _ace_requirement(config, config.eta_ace_ime)
    budget = max(1, config.I_HRC // 4)
    best = None
    for _ in range(budget):
        plan = _sample_row_plan(config, rng)
        B = np.array(hrc.profile.B)
        ok = True
        for c in range(config.m_prime, config.m):
            B = _embed_rows(config, B, np.where(B == 1, 0, -1),
                            B.shape[0], B.shape[1])[0]
            try:
                B = _peg_ace(
                    lambda r, c=c, B=B: _place_row(
                        config, B, c, *plan[c - config.m_prime], r),
                    lambda b: ace_ok(b, req), rng, retries=10)
            except DesignError:
                ok = False
                break
        if not ok:
            continue
        T = np.where(B == 1, 0, -1)
        score = _score(config, _partial_profile(config, B, T, config.m))
        if best is None or score < best[0]:
            best = (score, plan)
    if best is None:
        raise DesignError("reference construction failed ACE screening")
    return best[1]


def design_full(config: DesignConfig) -> DesignResult:
    """Complete flow: core design, then the row-wise extension."""
    rng = np.random.default_rng(config.seed)
    hrc = design_hrc(config, rng)
    if config.m == config.m_prime:
        return hrc
    return design_ime(config, hrc, rng)


# ---------------------------------------------------------------------------
# circulant lifting


def lift_profile(profile: CodeProfile, Z: int, g_target: int = 6,
                 rng=None, budget: int = 200) -> CodeProfile:
    """Assign circulant shifts breaking every surviving short cycle.

    A cycle shorter than g_target that survives edge spreading must get a
    nonzero alternating shift sum mod Z.  Greedy repair over random
    restarts; raises when the budget is exhausted.
    """
    if Z < 1:
        raise DesignError("lifting size must be >= 1")
    if rng is None:
        rng = np.random.default_rng(0)
    cycles = [cyc for cyc in proto_cycles(profile.B, g_target - 2)
              if spreading_path_value(cyc, profile.T) == 0]
    if Z == 1:
        if cycles:
            raise DesignError("Z=1 cannot break surviving cycles")
        return profile.with_lifting(1, np.where(profile.B == 1, 0, -1))
    edge_cycles = {}
    for i, cyc in enumerate(cycles):
        vns, cns = cyc[0::2], cyc[1::2]
        h = len(cns)
        for j in range(h):
            edge_cycles.setdefault((cns[j], vns[j]), []).append(i)
            edge_cycles.setdefault((cns[j], vns[(j + 1) % h]), []).append(i)
    for _ in range(budget):
        P = np.where(profile.B == 1,
                     rng.integers(0, Z, size=profile.B.shape), -1)
        for _ in range(200):
            broken = True
            target = None
            for cyc in cycles:
                if lifting_path_value(cyc, P) % Z == 0:
                    broken = False
                    target = cyc
                    break
            if broken:
                return profile.with_lifting(Z, P)
            best = None
            vns, cns = target[0::2], target[1::2]
            h = len(cns)
            seen = set()
            for j in range(h):
                for edge in ((cns[j], vns[j]), (cns[j], vns[(j + 1) % h])):
                    if edge in seen:
                        continue
                    seen.add(edge)
                    old = P[edge]
                    for s in range(Z):
                        if s == old:
                            continue
                        P[edge] = s
                        viol = sum(
                            1 for ci in edge_cycles[edge]
                            if lifting_path_value(cycles[ci], P) % Z == 0)
                        key = (viol, edge, s)
                        if best is None or key < best[0]:
                            best = (key, edge, s)
                    P[edge] = old
            (viol, _, _), edge, s = best
            P[edge] = s
            if viol > 0 and rng.random() < 0.1:
                # perturb a random edge to escape a repair loop
                e = list(edge_cycles)[int(rng.integers(len(edge_cycles)))]
                P[e] = int(rng.integers(Z))
    raise DesignError(f"girth target {g_target} unreachable at Z={Z}")
