import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rhoda.model import LogicalTopology
from rhoda.topology import (
    InfeasibleMatching,
    MatchingProblem,
    TopologyError,
    allocate_inter_wavelengths,
    awgr_output_port,
    awgr_wavelengths,
    configure_inter_topology,
    configure_intra_topology,
    cycle_edges,
    dmux_port,
    greedy_traffic_cycle,
    intra_wavelength_plan,
    max_weight_perfect_matching,
    split_largest_remainder,
)

from oracles import brute_force_matching, greedy_cycle, greedy_degree_topology


class TestCycle:
    def test_two_nodes(self):
        assert greedy_traffic_cycle(np.array([[0, 0], [0, 0]])) == [1, 2]
        assert greedy_traffic_cycle(np.array([[0, 3], [3, 0.0]])) == [1, 2]

    def test_three_nodes(self):
        w = np.zeros((3, 3))
        w[0, 1] = w[1, 0] = 9
        w[1, 2] = w[2, 1] = 5
        w[0, 2] = w[2, 0] = 1
        # totals are 10, 14, 6, so the walk starts at node 2
        order = greedy_traffic_cycle(w)
        assert order == [2, 1, 3]
        undirected = {frozenset(e) for e in cycle_edges(order)}
        assert undirected == {frozenset(e) for e in cycle_edges([1, 2, 3])}

    def test_equal_weights_follow_ids(self):
        w = np.ones((7, 7))
        assert greedy_traffic_cycle(w) == list(range(1, 8))

    def test_single_node_rejected(self):
        with pytest.raises(ValueError):
            greedy_traffic_cycle(np.zeros((1, 1)))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 12), st.integers(0, 2**32))
    def test_matches_oracle(self, n, seed):
        rng = np.random.default_rng(seed)
        a = rng.integers(0, 5, size=(n, n)).astype(float)
        w = a + a.T
        np.fill_diagonal(w, 0)
        got = greedy_traffic_cycle(w)
        assert got == [x + 1 for x in greedy_cycle(w.tolist())]
        assert sorted(got) == list(range(1, n + 1))


class TestIntra:
    def test_unit_budget_is_cycle(self, rng):
        t = rng.random((9, 9))
        np.fill_diagonal(t, 0)
        topo = configure_intra_topology(t, 1)
        assert set(topo.edges) == set(cycle_edges(greedy_traffic_cycle(t + t.T)))

    def test_two_racks(self):
        topo = configure_intra_topology(np.zeros((2, 2)), 2)
        assert set(topo.edges) == {(1, 2), (2, 1)}

    @pytest.mark.parametrize("kind", ["uniform", "random", "sparse"])
    def test_degree_two_saturated_at_sixteen(self, rng, kind):
        if kind == "uniform":
            t = np.ones((16, 16))
        elif kind == "random":
            t = rng.random((16, 16))
        else:
            t = rng.random((16, 16)) * (rng.random((16, 16)) < 0.3) + 1e-3
        np.fill_diagonal(t, 0)
        topo = configure_intra_topology(t, 2)
        assert topo.out_degree().tolist() == [2] * 16
        assert topo.in_degree().tolist() == [2] * 16
        assert topo.is_strongly_connected()

    def test_crafted_matches_greedy_oracle(self):
        t = np.array(
            [
                [0, 5, 6, 8],
                [7, 0, 3, 4],
                [11, 10, 0, 12],
                [9, 2, 1, 0],
            ],
            dtype=float,
        )
        topo = configure_intra_topology(t, 2)
        want = {(i + 1, j + 1) for i, j in greedy_degree_topology(t.tolist(), 2)}
        assert set(topo.edges) == want
        # cycle 1-3-2-4, then (3,4), (2,1), (1,2), (4,3) by rate
        assert want == {(1, 3), (3, 2), (2, 4), (4, 1), (3, 4), (2, 1), (1, 2), (4, 3)}

    @settings(max_examples=60, deadline=None)
    @given(st.integers(3, 10), st.integers(1, 4), st.integers(0, 2**32))
    def test_random_strongly_connected_and_capped(self, n, cap, seed):
        rng = np.random.default_rng(seed)
        t = rng.random((n, n)) * (rng.random((n, n)) < 0.5)
        np.fill_diagonal(t, 0)
        topo = configure_intra_topology(t, cap)
        assert topo.is_strongly_connected()
        assert topo.out_degree().max() <= cap and topo.in_degree().max() <= cap
        ring = set(cycle_edges(greedy_traffic_cycle(t + t.T)))
        assert ring <= set(topo.edges)
        # when the plain greedy fills every budget, the output is exactly the oracle's
        oracle = greedy_degree_topology(t.tolist(), cap)
        eff = min(cap, n - 1)
        out = [sum(1 for a, _ in oracle if a == u) for u in range(n)]
        inn = [sum(1 for _, b in oracle if b == u) for u in range(n)]
        if min(out) == eff and min(inn) == eff:
            assert set(topo.edges) == {(i + 1, j + 1) for i, j in oracle}
        assert topo.out_degree().min() == eff or len(topo) == n * (n - 1)

    def test_zero_budget_rejected(self):
        with pytest.raises(ValueError):
            configure_intra_topology(np.zeros((4, 4)), 0)


class TestAwgr:
    @pytest.mark.parametrize("k", [2, 4, 8, 16, 128])
    def test_port_map_is_bijection(self, k):
        ports = range(1, k + 1)
        for i in range(1, k + 1):
            assert sorted(awgr_output_port(i, p, k) for p in ports) == list(ports)
        for p in ports:
            for q in ports:
                (i,) = awgr_wavelengths(p, q, k, k)
                assert awgr_output_port(i, p, k) == q

    @pytest.mark.parametrize("k", [2, 4, 8, 16, 128])
    def test_inverts_formula_exhaustively(self, k):
        w = 2 * k
        for p in range(1, k + 1):
            by_q = {q: [] for q in range(1, k + 1)}
            for i in range(1, w + 1):
                by_q[(i + p - 2) % k + 1].append(i)
            for q in range(1, k + 1):
                assert awgr_wavelengths(p, q, k, w) == by_q[q]

    def test_examples(self):
        assert awgr_wavelengths(1, 1, 16, 16) == [1]
        assert awgr_wavelengths(3, 4, 16, 16) == [2]
        got = awgr_wavelengths(2, 1, 4, 128)
        assert got == list(range(4, 129, 4)) and len(got) == 32

    def test_port_range(self):
        with pytest.raises(ValueError):
            awgr_wavelengths(0, 1, 4, 4)
        with pytest.raises(ValueError):
            awgr_wavelengths(1, 5, 4, 4)

    def test_intra_plan_congruence(self, rng):
        t = rng.random((8, 8))
        np.fill_diagonal(t, 0)
        plan = intra_wavelength_plan({1: configure_intra_topology(t, 2)}, 8, 64)
        for (_, p, q), ws in plan.items():
            assert ws and all(awgr_output_port(i, p, 8) == q for i in ws)


class TestMatching:
    def test_three_by_three(self):
        w = np.array([[0, 5, 1], [2, 0, 7], [9, 3, 0]], float)
        sigma = max_weight_perfect_matching(MatchingProblem(w))
        assert sigma == [2, 3, 1]
        assert sum(w[x, sigma[x] - 1] for x in range(3)) == 21

    def test_two_by_two_forced(self, rng):
        for _ in range(5):
            assert max_weight_perfect_matching(MatchingProblem(rng.random((2, 2)))) == [2, 1]

    def test_identity_dominant(self):
        w = np.eye(5) * 100 + 1
        assert max_weight_perfect_matching(MatchingProblem(w, forbid_diagonal=False)) == [1, 2, 3, 4, 5]

    def test_infeasible(self):
        with pytest.raises(InfeasibleMatching):
            max_weight_perfect_matching(MatchingProblem(np.zeros((1, 1))))
        with pytest.raises(InfeasibleMatching):
            max_weight_perfect_matching(MatchingProblem(np.ones((2, 2)), frozenset({(1, 2)})))

    def test_two_hundred_random_instances(self, backend):
        rng = np.random.default_rng(2024)
        for _ in range(200):
            n = int(rng.integers(2, 8))
            w = rng.integers(0, 50, size=(n, n)).astype(float)
            sigma = max_weight_perfect_matching(MatchingProblem(w))
            assert all(sigma[x] != x + 1 for x in range(n))
            got = sum(w[x, sigma[x] - 1] for x in range(n))
            best, _ = brute_force_matching(w.tolist(), {(i, i) for i in range(n)})
            assert got == best

    def test_random_forbidden_sets(self, rng):
        for _ in range(50):
            n = int(rng.integers(3, 7))
            w = rng.random((n, n))
            extra = {(int(a), int(b)) for a, b in rng.integers(0, n, size=(n, 2))}
            forb = {(i, i) for i in range(n)} | extra
            ref = brute_force_matching(w.tolist(), forb)
            prob = MatchingProblem(w, frozenset((a + 1, b + 1) for a, b in extra))
            if ref is None:
                with pytest.raises(InfeasibleMatching):
                    max_weight_perfect_matching(prob)
                continue
            sigma = max_weight_perfect_matching(prob)
            assert all((x, s - 1) not in forb for x, s in enumerate(sigma))
            assert sum(w[x, sigma[x] - 1] for x in range(n)) == pytest.approx(ref[0])


class TestInter:
    def test_degree_one_is_cycle(self, rng):
        ct = rng.random((6, 6))
        topo = configure_inter_topology(ct, 1)
        assert set(topo.edges) == set(cycle_edges(greedy_traffic_cycle(ct + ct.T)))

    def test_dominant_entry_selected(self):
        ct = np.zeros((4, 4))
        for a, b in [(0, 1), (1, 2), (2, 3), (3, 0)]:
            ct[a, b] = 100
        ct += 1
        np.fill_diagonal(ct, 0)
        ct[0, 2] = 50  # 1 -> 3, heavy but below every ring pair
        ring = set(cycle_edges(greedy_traffic_cycle(ct + ct.T)))
        assert (1, 3) not in ring
        topo = configure_inter_topology(ct, 2)
        assert (1, 3) in topo.edges
        matched = set(topo.edges) - ring
        forb = {(i, i) for i in range(4)} | {(a - 1, b - 1) for a, b in ring}
        resid = ct.copy()
        best, _ = brute_force_matching(resid.tolist(), forb)
        assert sum(ct[a - 1, b - 1] for a, b in matched) == best

    def test_sixty_four_clusters_degree_four(self, rng):
        ct = rng.random((64, 64)) ** 3
        np.fill_diagonal(ct, 0)
        topo = configure_inter_topology(ct, 4)
        assert topo.out_degree().tolist() == [4] * 64
        assert topo.in_degree().tolist() == [4] * 64
        assert len(topo) == 256
        assert topo.is_strongly_connected()

    @settings(max_examples=25, deadline=None)
    @given(st.integers(3, 7), st.data())
    def test_each_round_is_optimal(self, C, data):
        d = data.draw(st.integers(1, C - 1))
        seed = data.draw(st.integers(0, 2**32))
        rng = np.random.default_rng(seed)
        ct = rng.integers(0, 20, size=(C, C)).astype(float)
        np.fill_diagonal(ct, 0)
        topo = configure_inter_topology(ct, d)
        assert topo.out_degree().tolist() == [d] * C and topo.in_degree().tolist() == [d] * C
        # replay the rounds against brute force
        ring = cycle_edges(greedy_traffic_cycle(ct + ct.T))
        chosen = {(a - 1, b - 1) for a, b in ring}
        resid = ct.copy()
        for _ in range(d - 1):
            forb = chosen | {(i, i) for i in range(C)}
            best, _ = brute_force_matching(resid.tolist(), forb)
            sigma = max_weight_perfect_matching(
                MatchingProblem(resid, frozenset((a + 1, b + 1) for a, b in chosen))
            )
            assert sum(resid[x, sigma[x] - 1] for x in range(C)) == best
            for x, s in enumerate(sigma):
                chosen.add((x, s - 1))
                resid[x, s - 1] = 0
        assert {(a - 1, b - 1) for a, b in topo.edges} == chosen

    def test_bad_degree(self):
        with pytest.raises(ValueError):
            configure_inter_topology(np.ones((4, 4)), 4)
        with pytest.raises(ValueError):
            configure_inter_topology(np.ones((1, 1)), 1)

    def test_round_failure_names_round(self, monkeypatch):
        import rhoda.topology as topo_mod

        def boom(prob):
            raise InfeasibleMatching("x")

        monkeypatch.setattr(topo_mod, "max_weight_perfect_matching", boom)
        with pytest.raises(TopologyError, match=r"round 1 infeasible \(C=5, d=3\)"):
            configure_inter_topology(np.ones((5, 5)), 3)


class TestWavelengths:
    def _star(self, n_out):
        return LogicalTopology.from_edges(n_out + 1, [(1, j) for j in range(2, n_out + 2)])

    def test_three_to_one(self):
        t = np.zeros((3, 3))
        t[0, 1], t[0, 2] = 3, 1
        assert allocate_inter_wavelengths(self._star(2), t, 128) == {(1, 2): 96, (1, 3): 32}

    def test_equal_split_index_tie_break(self):
        t = np.zeros((5, 5))
        t[0, 1:] = 1
        got = allocate_inter_wavelengths(self._star(4), t, 10)
        assert [got[(1, j)] for j in range(2, 6)] == [3, 3, 2, 2]

    def test_single_edge_gets_all(self):
        assert allocate_inter_wavelengths(self._star(1), np.zeros((2, 2)), 64) == {(1, 2): 64}

    def test_too_many_edges(self):
        with pytest.raises(ValueError, match="w_inter"):
            allocate_inter_wavelengths(self._star(3), np.ones((4, 4)), 2)

    @settings(max_examples=80, deadline=None)
    @given(st.lists(st.floats(0, 1e3), min_size=1, max_size=8), st.integers(8, 256))
    def test_conservation_and_floor(self, weights, total):
        parts = split_largest_remainder(total, weights)
        assert sum(parts) == total and min(parts) >= 1

    def test_cluster_totals_conserved(self, rng):
        ct = rng.random((16, 16))
        np.fill_diagonal(ct, 0)
        topo = configure_inter_topology(ct, 4)
        plan = allocate_inter_wavelengths(topo, ct, 128)
        for x in range(1, 17):
            assert sum(v for (a, _), v in plan.items() if a == x) == 128


def test_dmux_port():
    assert dmux_port(17, 16) == 2
    assert dmux_port(16, 16) == 1
    assert dmux_port(1, 2) == 1
    with pytest.raises(ValueError):
        dmux_port(0, 4)


def test_greedy_cycle_visits_every_permutation_start():
    # every node can be the start when it alone carries the largest total
    for s in range(4):
        w = np.ones((4, 4))
        w[s, :] += 5
        w[:, s] += 5
        np.fill_diagonal(w, 0)
        assert greedy_traffic_cycle(w)[0] == s + 1
    assert list(itertools.islice(greedy_traffic_cycle(np.ones((3, 3))), 1)) == [1]
