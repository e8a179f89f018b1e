import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rhoda.model import (
    ClusterAssignment,
    DcnParams,
    FlowSet,
    Level,
    LogicalTopology,
    ParamsError,
    TrafficMatrix,
    aggregate_cluster_traffic,
    flows_from_matrix,
    matrix_from_flows,
    validate_params,
)

from oracles import aggregate_loops


class TestParams:
    def test_paper_defaults_valid(self):
        p = validate_params(DcnParams(M=1024, k=16, C=64, d=4, alpha_ccs=16))
        assert p.t_intra == p.t_inter == 2
        assert p.w_intra == 128 and p.wl_capacity_gbps == 100.0

    def test_smallest_two_cluster_instance(self):
        validate_params(DcnParams(M=4, k=2, C=2, d=1, alpha_ccs=2, w_intra=2))

    def test_rack_count_mismatch_named(self):
        with pytest.raises(ParamsError, match=r"M != k\*C"):
            validate_params(DcnParams(M=10, k=3, C=4))

    def test_alpha_defaults_to_k(self):
        p = DcnParams.for_racks(64, 8)
        assert p.alpha_ccs == 8 and p.ccs_groups == 1 and p.ccs_size == 64

    @pytest.mark.parametrize(
        "kw, msg",
        [
            ({"alpha_ccs": 0}, "alpha_ccs must be a positive"),
            ({"alpha_ccs": 32}, r"alpha_ccs must lie in \[1, k\]"),
            ({"alpha_ccs": 3}, "alpha_ccs must divide k"),
            ({"w_intra": 8}, "w_intra < k"),
            ({"d": 64}, "d > C-1"),
            ({"wl_capacity_gbps": 0.0}, "wl_capacity_gbps"),
            ({"t_intra": 0}, "t_intra must be a positive"),
        ],
    )
    def test_each_invariant_reported(self, kw, msg):
        with pytest.raises(ParamsError, match=msg):
            validate_params(DcnParams(M=1024, k=16, C=64, **kw))

    def test_single_cluster_ignores_degree_bound(self):
        validate_params(DcnParams(M=16, k=16, C=1, d=4))

    def test_for_racks_rejects_non_divisor(self):
        with pytest.raises(ParamsError):
            DcnParams.for_racks(10, 3)


class TestTraffic:
    def test_rejects_bad_matrices(self):
        with pytest.raises(ValueError, match="square"):
            TrafficMatrix(np.zeros((2, 3)))
        with pytest.raises(ValueError, match="negative"):
            TrafficMatrix(np.array([[0, -1.0], [0, 0]]))
        with pytest.raises(ValueError, match="diagonal"):
            TrafficMatrix(np.eye(2))
        with pytest.raises(ValueError, match="non-finite"):
            TrafficMatrix(np.array([[0, np.inf], [0, 0]]))

    def test_matrix_is_read_only_copy(self):
        raw = np.array([[0.0, 1.0], [2.0, 0.0]])
        t = TrafficMatrix(raw)
        raw[0, 1] = 9
        assert t.rates[0, 1] == 1.0
        with pytest.raises(ValueError):
            t.rates[0, 1] = 3.0
        assert t.total == 3.0
        assert t.mutual()[0, 1] == 3.0

    def test_flowset_validation(self):
        with pytest.raises(ValueError, match="self-flow"):
            FlowSet.from_records([(1, 1, 1.0)])
        with pytest.raises(ValueError, match="positive"):
            FlowSet.from_records([(1, 2, 0.0)])
        with pytest.raises(ValueError, match="equal length"):
            FlowSet([1, 2], [2], [1.0])

    def test_empty_flowset_gives_zero_matrix(self):
        t = matrix_from_flows(FlowSet.from_records([]), 3)
        assert t.total == 0 and t.M == 3

    def test_flows_are_additive(self):
        t = matrix_from_flows(FlowSet.from_records([(1, 2, 1.0), (1, 2, 2.0)]), 2)
        assert t.rates[0, 1] == 3.0

    def test_out_of_range_rack(self):
        with pytest.raises(ValueError, match="out of range"):
            matrix_from_flows(FlowSet.from_records([(1, 5, 1.0)]), 4)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.tuples(st.integers(1, 6), st.integers(1, 6), st.floats(0.01, 100)), max_size=40))
    def test_round_trip_preserves_aggregates(self, recs):
        recs = [r for r in recs if r[0] != r[1]]
        t = matrix_from_flows(FlowSet.from_records(recs), 6)
        back = matrix_from_flows(flows_from_matrix(t), 6)
        np.testing.assert_array_equal(back.rates, t.rates)
        ref = np.zeros((6, 6))
        for s, d, r in recs:
            ref[s - 1, d - 1] += r
        np.testing.assert_allclose(t.rates, ref, rtol=1e-12)


class TestAssignment:
    def test_members_and_ports(self):
        a = ClusterAssignment([2, 1, 2, 1], 2)
        assert [m.tolist() for m in a.members] == [[2, 4], [1, 3]]
        assert a.local_index.tolist() == [1, 1, 2, 2]
        assert a.sizes().tolist() == [2, 2]
        assert a[3] == 2

    def test_ccs_rule(self):
        # k=4, C=2, alpha=2: groups are racks 1-4 and 5-8
        p = DcnParams.for_racks(8, 4, d=1, alpha_ccs=2, w_intra=4)
        ok = ClusterAssignment([1, 1, 2, 2, 1, 1, 2, 2], 2)
        ok.check(p)
        assert ok.ccs_counts(2).tolist() == [[2, 2], [2, 2]]
        bad = ClusterAssignment([1, 1, 1, 2, 1, 2, 2, 2], 2)
        with pytest.raises(ValueError, match="CCS group 1 places 3 racks in cluster 1"):
            bad.check(p)

    def test_size_rule(self):
        p = DcnParams.for_racks(4, 2, d=1, w_intra=2)
        with pytest.raises(ValueError, match="cluster 1 has 3 racks"):
            ClusterAssignment([1, 1, 1, 2], 2).check(p)

    def test_cluster_range(self):
        with pytest.raises(ValueError):
            ClusterAssignment([0, 1], 1)


class TestAggregate:
    def test_zero(self):
        a = ClusterAssignment([1, 1, 2, 2], 2)
        assert not aggregate_cluster_traffic(TrafficMatrix.zeros(4), a, 2).any()

    def test_single_flow(self):
        t = np.zeros((4, 4))
        t[0, 2] = 5
        ct = aggregate_cluster_traffic(TrafficMatrix(t), ClusterAssignment([1, 1, 2, 2], 2), 2)
        assert ct.tolist() == [[0, 5], [0, 0]]

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_quadruple_loop(self, seed):
        rng = np.random.default_rng(seed)
        t = rng.random((8, 8))
        np.fill_diagonal(t, 0)
        cl = rng.permutation([1, 1, 1, 1, 2, 2, 2, 2])
        ct = aggregate_cluster_traffic(TrafficMatrix(t), ClusterAssignment(cl, 2), 2)
        np.testing.assert_allclose(ct, aggregate_loops(t.tolist(), cl.tolist(), 2), rtol=1e-12)
        off = cl[:, None] != cl[None, :]
        assert ct.sum() == pytest.approx(t[off].sum())

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            aggregate_cluster_traffic(TrafficMatrix.zeros(4), ClusterAssignment([1, 2], 2), 2)


class TestTopology:
    def test_rejects_self_loop_and_range(self):
        with pytest.raises(ValueError, match="self-loop"):
            LogicalTopology.from_edges(3, [(1, 1)])
        with pytest.raises(ValueError, match="outside"):
            LogicalTopology.from_edges(3, [(1, 4)])
        with pytest.raises(ValueError, match="wavelength count"):
            LogicalTopology(3, {(1, 2): 0})

    def test_degrees_and_connectivity(self):
        ring = LogicalTopology.from_edges(4, [(1, 2), (2, 3), (3, 4), (4, 1)], Level.CLUSTER)
        assert ring.out_degree().tolist() == [1] * 4
        assert ring.in_degree().tolist() == [1] * 4
        assert ring.is_strongly_connected()
        assert not LogicalTopology.from_edges(3, [(1, 2), (2, 3)]).is_strongly_connected()
        assert (1, 2) in ring and len(ring) == 4

    def test_wavelength_override(self):
        t = LogicalTopology.from_edges(2, [(1, 2), (2, 1)]).with_wavelengths({(1, 2): 7})
        assert t.edges == {(1, 2): 7, (2, 1): 1}

    def test_csr_rows_sorted(self):
        t = LogicalTopology.from_edges(3, [(1, 3), (1, 2), (3, 1)])
        ip, ix = t.csr
        assert ip.tolist() == [0, 2, 2, 3]
        assert ix.tolist() == [1, 2, 0]
