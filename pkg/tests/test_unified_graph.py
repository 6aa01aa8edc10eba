import numpy as np
import pytest

from conftest import random_profile
from esrl.unified_graph import (
    ConsistencyError,
    UnifiedGraph,
    count_cycles_at_vn,
    count_cycles_total,
    cycle_report,
    eval_reallocation,
    from_profile,
    girth,
    lifting_path_value,
    optimize_spreading,
    spreading_path_value,
    survives_lifting,
)
import oracles
import reference_graph as ref


def random_graph(rng, m, n, omega, density=0.5):
    while True:
        B = (rng.random((m, n)) < density).astype(np.int64)
        for c in range(m):
            if not B[c].any():
                B[c, rng.integers(n)] = 1
        for v in range(n):
            if not B[:, v].any():
                B[rng.integers(m), v] = 1
        if B.sum(axis=0).min() >= 1 and B.sum(axis=1).min() >= 1:
            break
    T = np.where(B == 1, rng.integers(0, omega + 1, size=(m, n)), -1)
    return UnifiedGraph(T, omega)


def girth_at_least_6_graph(rng, m, n, omega):
    """Rejection-sample a sparse graph whose bipartite girth is >= 6."""
    while True:
        g = random_graph(rng, m, n, omega, density=2.2 / m)
        if girth(g) >= 6:
            return g


def reference():
    return UnifiedGraph(ref.REFERENCE_T, ref.REFERENCE_OMEGA)


class TestReferenceGoldens:
    def test_counts_at_root(self):
        g = reference()
        c4, p4 = count_cycles_at_vn(g, ref.ROOT, 4)
        c6, p6 = count_cycles_at_vn(g, ref.ROOT, 6)
        assert c4 == ref.Q4_ROOT
        assert c6 == ref.Q6_ROOT
        assert ref.poly_multisets(p4) == ref.P4_GOLDEN
        assert ref.poly_multisets(p6) == ref.P6_GOLDEN

    def test_whole_graph_counts(self):
        g = reference()
        assert count_cycles_total(g, 4) == ref.Q4_TOTAL
        assert count_cycles_total(g, 6) == ref.Q6_TOTAL

    def test_candidate_deltas(self):
        g = reference()
        _, p6 = count_cycles_at_vn(g, ref.ROOT, 6)
        f6 = p6.f()
        for (c, new), eps in ref.CANDIDATE_EPS.items():
            f_new = eval_reallocation(g, p6, (c, ref.ROOT), new).f()
            assert (f6 - f_new) // 2 == eps

    def test_rejected_candidate_creates_short_cycles(self):
        g = reference()
        _, p4 = count_cycles_at_vn(g, ref.ROOT, 4)
        f_new = eval_reallocation(g, p4, (1, ref.ROOT), 1).f()
        assert (f_new - p4.f()) // 2 == ref.NEW_4CYCLES_CN1

    def test_optimizer_selects_golden_move(self):
        g = reference()
        moves = []
        out = optimize_spreading(g, 6, 1, moves=moves, roots=[ref.ROOT])
        assert moves == [ref.BEST_MOVE]
        assert out.T[2, ref.ROOT] == 1
        # the input graph is untouched
        assert g.T[2, ref.ROOT] == 0

    def test_move_removes_the_cycle_for_real(self):
        g = reference()
        out = optimize_spreading(g, 6, 1, roots=[ref.ROOT])
        c6, _ = count_cycles_at_vn(out, ref.ROOT, 6)
        assert c6 == ref.Q6_ROOT - 1
        assert count_cycles_total(out, 4) == 0


class TestOracleEquivalence:
    """Message-passing counts equal brute-force simple-cycle enumeration.

    The equivalence holds for l up to 2g - 2 where g is the bipartite girth;
    beyond that, non-simple closed walks contaminate the factor counts.
    """

    def test_random_graphs_l4_l6(self):
        rng = np.random.default_rng(100)
        for _ in range(60):
            m = int(rng.integers(3, 7))
            n = int(rng.integers(3, 8))
            omega = int(rng.integers(0, 3))
            g = random_graph(rng, m, n, omega)
            gr = girth(g)
            B = (g.T >= 0).astype(np.int64)
            for l in (4, 6):
                if gr and l <= 2 * gr - 2:
                    assert count_cycles_total(g, l) == \
                        oracles.surviving_cycle_count(B, g.T, l)

    def test_high_girth_graphs_l8(self):
        rng = np.random.default_rng(101)
        hits = 0
        for _ in range(12):
            g = girth_at_least_6_graph(rng, 8, 12, 2)
            B = (g.T >= 0).astype(np.int64)
            for l in (4, 6, 8):
                assert count_cycles_total(g, l) == \
                    oracles.surviving_cycle_count(B, g.T, l)
            hits += 1
        assert hits == 12

    def test_zero_labels_count_plain_cycles(self):
        rng = np.random.default_rng(102)
        g = random_graph(rng, 5, 7, 0)
        B = (g.T >= 0).astype(np.int64)
        gr = girth(g)
        for l in (4, 6):
            if gr and l <= 2 * gr - 2:
                assert count_cycles_total(g, l) == \
                    oracles.surviving_cycle_count(B, np.zeros_like(g.T), l)

    def test_matches_coupled_graph_oracle(self):
        rng = np.random.default_rng(103)
        for _ in range(10):
            p = random_profile(rng, int(rng.integers(3, 6)),
                               int(rng.integers(3, 7)),
                               int(rng.integers(1, 3)))
            g = from_profile(p, lock_diagonal=False)
            gr = girth(g)
            if not gr or 4 > 2 * gr - 2:
                continue
            assert count_cycles_total(g, 4) == oracles.coupled_cycle_count(p, 4)


class TestReallocation:
    def test_matches_fresh_recount(self):
        """Within the validity window the two-shift update is exact."""
        rng = np.random.default_rng(104)
        checked = 0
        while checked < 40:
            m = int(rng.integers(3, 7))
            n = int(rng.integers(3, 8))
            omega = int(rng.integers(1, 3))
            g = random_graph(rng, m, n, omega)
            gr = girth(g)
            v = int(rng.integers(n))
            cands = g.vn_adj[v]
            if not len(cands) or not gr:
                continue
            c = int(rng.choice(cands))
            new = int(rng.integers(0, omega + 1))
            for l in (4, 6):
                if l > 2 * gr - 2:
                    continue
                _, poly = count_cycles_at_vn(g, v, l)
                pred = eval_reallocation(g, poly, (c, v), new)
                g2 = g.with_label(c, v, new)
                _, fresh = count_cycles_at_vn(g2, v, l)
                assert pred.f() == fresh.f()
                checked += 1

    def test_pure_and_involutive(self):
        g = reference()
        _, p6 = count_cycles_at_vn(g, ref.ROOT, 6)
        before = {c: a.copy() for c, a in p6.arrays.items()}
        moved = eval_reallocation(g, p6, (2, ref.ROOT), 1)
        for c, a in p6.arrays.items():
            assert np.array_equal(a, before[c])
        g2 = g.with_label(2, ref.ROOT, 1)
        back = eval_reallocation(g2, moved, (2, ref.ROOT), 0)
        for c, a in p6.arrays.items():
            assert np.array_equal(back.arrays[c], a)

    def test_noop_and_errors(self):
        g = reference()
        _, p6 = count_cycles_at_vn(g, ref.ROOT, 6)
        same = eval_reallocation(g, p6, (2, ref.ROOT), 0)
        assert same.f() == p6.f()
        with pytest.raises(ValueError):
            eval_reallocation(g, p6, (2, 0), 1)
        with pytest.raises(ValueError):
            eval_reallocation(g, p6, (2, ref.ROOT), ref.REFERENCE_OMEGA + 1)

    def test_locked_edge_rejected(self):
        T = ref.REFERENCE_T
        locked = np.zeros(T.shape, dtype=bool)
        locked[2, ref.ROOT] = True
        g = UnifiedGraph(T, 1, locked=locked)
        _, p6 = count_cycles_at_vn(g, ref.ROOT, 6)
        with pytest.raises(ValueError):
            eval_reallocation(g, p6, (2, ref.ROOT), 1)
        moves = []
        optimize_spreading(g, 6, 1, moves=moves, roots=[ref.ROOT])
        assert all(m["cn"] != 2 for m in moves)


class TestOptimizer:
    def test_never_increases_shorter_cycles(self):
        rng = np.random.default_rng(105)
        for _ in range(15):
            g = random_graph(rng, int(rng.integers(3, 6)),
                             int(rng.integers(4, 8)), int(rng.integers(1, 3)))
            gr = girth(g)
            if not gr or 6 > 2 * gr - 2:
                continue
            before4 = count_cycles_total(g, 4)
            before6 = count_cycles_total(g, 6)
            out = optimize_spreading(g, 6, 5)
            assert count_cycles_total(out, 4) <= before4
            assert count_cycles_total(out, 6) <= before6

    def test_stops_when_no_gain(self):
        rng = np.random.default_rng(106)
        g = random_graph(rng, 4, 6, 2)
        moves = []
        optimize_spreading(g, 4, 50, moves=moves)
        assert all(m["removed"] > 0 for m in moves)
        # a second run on the optimized graph makes no further move
        out = optimize_spreading(g, 4, 50)
        again = []
        optimize_spreading(out, 4, 50, moves=again)
        assert again == []

    def test_respects_iteration_budget(self):
        rng = np.random.default_rng(107)
        g = random_graph(rng, 5, 8, 2)
        moves = []
        optimize_spreading(g, 4, 1, moves=moves)
        assert len(moves) <= 1


class TestPathValues:
    def test_hand_values(self):
        T = ref.REFERENCE_T
        # 4-cycle v4 - c0 - v0 - c1 - (v4)
        cyc = [4, 0, 0, 1]
        assert spreading_path_value(cyc, T) == (1 - 1) + (1 - 0)
        # traversal direction flips the sign
        rev = [4, 1, 0, 0]
        assert spreading_path_value(rev, T) == -spreading_path_value(cyc, T)

    def test_rotation_invariance(self):
        rng = np.random.default_rng(108)
        g = random_graph(rng, 5, 7, 2)
        B = (g.T >= 0).astype(np.int64)
        adj_vn, adj_cn = oracles.graph_adj(B)
        for cyc in oracles.enumerate_simple_cycles(adj_vn, adj_cn, 6)[:20]:
            rot = cyc[2:] + cyc[:2]
            assert spreading_path_value(cyc, g.T) == \
                spreading_path_value(rot, g.T)

    def test_survives_lifting_agrees_with_lifted_girth(self):
        """A proto 4-cycle survives lifting iff the lifted graph keeps it."""
        rng = np.random.default_rng(109)
        from esrl.profile import lift_expand, expand_coupled

        for _ in range(10):
            Z = int(rng.integers(2, 6))
            p = random_profile(rng, 3, 5, 0, Z=Z)
            g = from_profile(p, lock_diagonal=False)
            B = (g.T >= 0).astype(np.int64)
            adj_vn, adj_cn = oracles.graph_adj(B)
            cycles = oracles.enumerate_simple_cycles(adj_vn, adj_cn, 4)
            if not cycles:
                continue
            H = lift_expand(expand_coupled(p, 1)).to_dense()
            H = H[: 3 * Z, : 5 * Z]
            adj_vn_l, adj_cn_l = oracles.graph_adj(H)
            lifted = oracles.enumerate_simple_cycles(adj_vn_l, adj_cn_l, 4)
            lifted_proto = {
                frozenset((c // Z, v // Z) for v, c in
                          zip(cyc[0::2] + cyc[2::2] + cyc[:1],
                              cyc[1::2] + cyc[1::2]))
                for cyc in lifted
            }
            for cyc in cycles:
                vns, cns = cyc[0::2], cyc[1::2]
                edges = frozenset(
                    (cns[i], vns[i]) for i in range(2)) | frozenset(
                    (cns[i], vns[(i + 1) % 2]) for i in range(2))
                surv = (spreading_path_value(cyc, g.T) == 0
                        and lifting_path_value(cyc, p.P) % Z == 0)
                assert surv == (edges in lifted_proto)


class TestGirth:
    def test_known_graphs(self):
        # complete bipartite 2x2 has a 4-cycle
        g = UnifiedGraph(np.zeros((2, 2), dtype=np.int64), 0)
        assert girth(g) == 4
        # a single 6-cycle
        T = -np.ones((3, 3), dtype=np.int64)
        for i in range(3):
            T[i, i] = 0
            T[i, (i + 1) % 3] = 0
        assert girth(UnifiedGraph(T, 0)) == 6
        # a tree has no cycle
        T = -np.ones((1, 3), dtype=np.int64)
        T[0, :] = 0
        assert girth(UnifiedGraph(T, 0)) == 0

    def test_matches_enumeration(self):
        rng = np.random.default_rng(110)
        for _ in range(30):
            g = random_graph(rng, int(rng.integers(2, 6)),
                             int(rng.integers(2, 7)), 0,
                             density=float(rng.uniform(0.2, 0.7)))
            B = (g.T >= 0).astype(np.int64)
            adj_vn, adj_cn = oracles.graph_adj(B)
            want = 0
            for l in (4, 6, 8, 10):
                if oracles.enumerate_simple_cycles(adj_vn, adj_cn, l):
                    want = l
                    break
            got = girth(g)
            if want:
                assert got == want
            else:
                assert got == 0 or got > 10


class TestConsistencyAndInstrumentation:
    def test_bad_length_rejected(self):
        g = reference()
        for l in (3, 5, 2, 0):
            with pytest.raises(ValueError):
                count_cycles_at_vn(g, 0, l)

    def test_term_cap_enforced(self):
        rng = np.random.default_rng(111)
        g = random_graph(rng, 6, 9, 2, density=0.8)
        from esrl.unified_graph import CycleCountError
        with pytest.raises(CycleCountError):
            count_cycles_total(g, 8, term_cap=5)

    def test_op_count_linear_in_length(self):
        rng = np.random.default_rng(112)
        g = girth_at_least_6_graph(rng, 8, 12, 1)
        g.op_count = 0
        count_cycles_at_vn(g, 0, 4)
        small = g.op_count
        g.op_count = 0
        count_cycles_at_vn(g, 0, 8)
        # factor growth per extra hop is bounded by the maximum degree
        max_deg = max(max(len(a) for a in g.vn_adj),
                      max(len(a) for a in g.cn_adj))
        assert g.op_count <= small * (2 * max_deg) ** 4 + 1

    def test_cycle_report_totals(self):
        g = reference()
        rep = cycle_report(g, [4, 6])
        assert rep[4]["total"] == 0
        assert rep[6]["total"] == 3
        assert sum(rep[6]["per_vn"]) == 9
        assert rep[6]["per_vn"][ref.ROOT] == 2


class TestProfileIntegration:
    def test_from_profile_locks_staircase(self):
        rng = np.random.default_rng(113)
        p = random_profile(rng, 6, 9, 1, m_prime=2, n_prime=5)
        g = from_profile(p)
        for c in range(2, 6):
            d = 5 + (c - 2)
            if d < 9:
                assert g.locked[c, d]
        assert g.locked.sum() == sum(1 for c in range(2, 6) if 5 + (c - 2) < 9)

    def test_optimize_preserves_staircase_labels(self):
        rng = np.random.default_rng(114)
        p = random_profile(rng, 5, 8, 1, m_prime=2, n_prime=5)
        g = from_profile(p)
        out = optimize_spreading(g, 4, 10)
        for c in range(2, 5):
            d = 5 + (c - 2)
            assert out.T[c, d] == 0
