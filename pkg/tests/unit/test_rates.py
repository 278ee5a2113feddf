"""Unit tests for SINR and sum-rate arithmetic."""

import math

import numpy as np
import pytest

from src.core.cells import VirtualCell, VirtualCellPartition
from src.core.rates import (
    CellSolution,
    CellView,
    assignment_from_power,
    cell_sum_rate,
    continuous_sum_rate,
    intra_cell_interference,
    per_user_band_sinr,
    sinr,
    system_sum_rate,
)
from src.models.allocation import ChannelAssignment
from src.models.experiment import AffiliationRule, EvalMode
from src.models.system import ChannelRealization


def _two_cell_network():
    """Users 0 and 1 on BSs 0 and 1, one band, unit noise and bandwidth."""
    gain = np.array(
        [
            [[4.0], [0.5]],
            [[0.25], [2.0]],
        ]
    )
    chan = ChannelRealization(gain=gain, noise=np.ones((2, 1)))
    partition = VirtualCellPartition(
        cells=(VirtualCell(bs=(0,), users=(0,)), VirtualCell(bs=(1,), users=(1,))),
        rule=AffiliationRule.CLOSEST,
        m=2,
    )
    served = ChannelAssignment(np.ones((1, 1, 1), dtype=bool))
    solutions = [
        CellSolution(assignment=served, p_uk=np.array([[1.0]])),
        CellSolution(assignment=served, p_uk=np.array([[2.0]])),
    ]
    return chan, partition, solutions


class TestSinr:
    """Tests for per-link SINR."""

    def test_single_link(self, make_view):
        """Test that a lone link sees only noise."""
        view = make_view([[[3.0]]], noise=2.0)
        assert sinr(view, np.array([[[4.0]]])).item() == pytest.approx(6.0)

    def test_two_users_one_bs(self, make_view):
        """Test direct substitution with received powers 4 and 1."""
        view = make_view([[[4.0]], [[1.0]]], noise=1.0)
        z = sinr(view, np.ones((2, 1, 1)))
        assert z[:, 0, 0].tolist() == pytest.approx([2.0, 0.2])

    def test_zero_power(self, make_view, rng):
        """Test that silence gives zero SINR."""
        view = make_view(rng.uniform(0.1, 1, size=(3, 2, 2)))
        assert np.all(sinr(view, np.zeros((3, 2, 2))) == 0.0)

    def test_own_power_to_other_bs_interferes(self, make_view):
        """Test that a user's power aimed at another BS counts as interference."""
        view = make_view([[[1.0], [1.0]]], noise=1.0)
        z = sinr(view, np.array([[[1.0], [1.0]]]))
        assert z[0, :, 0].tolist() == pytest.approx([0.5, 0.5])

    def test_weak_interferer_next_to_dominant_link(self, make_view):
        """Test that interference far below the signal's rounding step is kept."""
        view = make_view([[[1e16]], [[0.3]]], noise=1e-3)
        z = sinr(view, np.ones((2, 1, 1)))
        assert z[0, 0, 0] == pytest.approx(1e16 / (1e-3 + 0.3), rel=1e-12)
        per_band = per_user_band_sinr(view, np.ones((2, 1)))
        assert per_band[0, 0, 0] == pytest.approx(1e16 / (1e-3 + 0.3), rel=1e-12)


class TestIntraCellInterference:
    """Tests for the per-user-band interference term."""

    def test_single_user(self, make_view, rng):
        """Test that a lone user sees no interference."""
        view = make_view(rng.uniform(0.1, 1, size=(1, 3, 2)))
        assert np.all(intra_cell_interference(view, np.ones((1, 2))) == 0.0)

    def test_two_users(self, make_view, rng):
        """Test the two-term definition."""
        gain = rng.uniform(0.1, 1, size=(2, 2, 3))
        p_uk = rng.uniform(0.1, 1, size=(2, 3))
        j = intra_cell_interference(make_view(gain), p_uk)
        assert np.allclose(j[0], gain[1] * p_uk[1][None, :])
        assert np.allclose(j[1], gain[0] * p_uk[0][None, :])

    def test_matches_sinr_for_concentrated_power(self, make_view, rng):
        """Test agreement with the link SINR when each user serves one BS per band."""
        gain = rng.uniform(0.1, 1, size=(4, 3, 2))
        view = make_view(gain, noise=0.3)
        p_uk = rng.uniform(0.1, 1, size=(4, 2))
        serving = rng.integers(0, 3, size=(4, 2))
        p = np.zeros((4, 3, 2))
        for u in range(4):
            for k in range(2):
                p[u, serving[u, k], k] = p_uk[u, k]
        link = sinr(view, p)
        per_band = per_user_band_sinr(view, p_uk)
        for u in range(4):
            for k in range(2):
                b = serving[u, k]
                assert link[u, b, k] == pytest.approx(per_band[u, b, k])


class TestCellSumRate:
    """Tests for the discrete cell objective."""

    def test_single_link(self, make_view):
        """Test a 20 kHz link at SINR 3."""
        view = make_view([[[3.0]]], noise=1.0, width=20_000.0)
        gamma = np.ones((1, 1, 1), dtype=bool)
        assert cell_sum_rate(view, gamma, np.array([[1.0]])) == pytest.approx(40_000.0)

    def test_empty_assignment(self, make_view, rng):
        """Test that no assigned link means no rate."""
        view = make_view(rng.uniform(0.1, 1, size=(2, 2, 2)))
        assert cell_sum_rate(view, ChannelAssignment.empty(2, 2, 2), np.ones((2, 2))) == 0.0

    def test_permutation_invariance(self, make_view, rng):
        """Test that relabelling users and BSs leaves the rate unchanged."""
        gain = rng.uniform(0.1, 1, size=(3, 2, 2))
        gamma = np.zeros((3, 2, 2), dtype=bool)
        gamma[0, 1, 0] = gamma[1, 0, 0] = gamma[2, 1, 1] = gamma[0, 0, 1] = True
        p_uk = rng.uniform(0.1, 1, size=(3, 2))
        users, bss = np.array([2, 0, 1]), np.array([1, 0])

        base = cell_sum_rate(make_view(gain), gamma, p_uk)
        permuted = cell_sum_rate(
            make_view(gain[users][:, bss]), gamma[users][:, bss], p_uk[users]
        )
        assert permuted == pytest.approx(base)

    def test_empty_view(self):
        """Test a cell without users."""
        view = CellView.from_arrays(np.zeros((0, 2, 1)), np.ones((2, 1)), [1.0], [])
        assert cell_sum_rate(view, np.zeros((0, 2, 1), dtype=bool), np.zeros((0, 1))) == 0.0


class TestContinuousSumRate:
    """Tests for the continuous objective and its discrete reading."""

    def test_single_link(self, make_view):
        """Test the closed form of one link."""
        view = make_view([[[2.0]]], noise=0.5, width=10.0)
        assert continuous_sum_rate(view, np.array([[[1.0]]])) == pytest.approx(10.0 * math.log2(5.0))

    def test_assignment_from_power(self):
        """Test the dominant-BS reading of per-link powers."""
        p = np.zeros((2, 3, 2))
        p[0, 1, 0], p[0, 2, 0] = 0.7, 0.3
        p[1, 0, 1] = 1.0
        gamma = assignment_from_power(p).gamma
        assert gamma[0, 1, 0] and not gamma[0, 2, 0]
        assert gamma[1, 0, 1]
        assert gamma.sum() == 2
        assert assignment_from_power(p).is_feasible()


class TestSystemSumRate:
    """Tests for network-wide evaluation."""

    def test_single_cell_equals_cell_rate(self, rng):
        """Test that one virtual cell has no external interference."""
        gain = rng.uniform(0.1, 1, size=(3, 2, 2))
        chan = ChannelRealization(gain=gain, noise=np.full((2, 2), 0.1))
        partition = VirtualCellPartition(
            cells=(VirtualCell(bs=(0, 1), users=(0, 1, 2)),), rule=AffiliationRule.CLOSEST, m=1
        )
        gamma = np.zeros((3, 2, 2), dtype=bool)
        gamma[0, 0, :] = gamma[1, 1, :] = gamma[2, 0, 1] = True
        p_uk = rng.uniform(0.1, 1, size=(3, 2))
        solution = CellSolution(assignment=ChannelAssignment(gamma), p_uk=p_uk)
        widths = np.array([1.0, 2.0])

        view = CellView.from_cell(partition.cells[0], chan, widths, np.ones(3))
        expected = cell_sum_rate(view, gamma, p_uk)
        for mode in EvalMode:
            assert system_sum_rate(partition, chan, widths, [solution], mode) == pytest.approx(expected)

    def test_two_cells_hand_computed(self):
        """Test global SINRs with every cross term written out."""
        chan, partition, solutions = _two_cell_network()
        # User 0 at BS 0: 4*1 / (1 + 0.25*2); user 1 at BS 1: 2*2 / (1 + 0.5*1)
        expected = math.log2(1 + 4.0 / 1.5) + math.log2(1 + 4.0 / 1.5)
        rate = system_sum_rate(partition, chan, np.ones(1), solutions, EvalMode.GLOBAL)
        assert rate == pytest.approx(expected)

    def test_local_mode_ignores_other_cells(self):
        """Test that local evaluation adds the isolated cell rates."""
        chan, partition, solutions = _two_cell_network()
        expected = math.log2(1 + 4.0) + math.log2(1 + 4.0)
        rate = system_sum_rate(partition, chan, np.ones(1), solutions, EvalMode.LOCAL)
        assert rate == pytest.approx(expected)

    def test_global_never_exceeds_local(self, rng):
        """Test that external interference only lowers the rate."""
        gain = rng.uniform(0.1, 1, size=(4, 2, 3))
        chan = ChannelRealization(gain=gain, noise=np.full((2, 3), 0.05))
        partition = VirtualCellPartition(
            cells=(VirtualCell(bs=(0,), users=(0, 2)), VirtualCell(bs=(1,), users=(1, 3))),
            rule=AffiliationRule.CLOSEST,
            m=2,
        )
        solutions = [
            CellSolution(ChannelAssignment(np.ones((2, 1, 3), dtype=bool)), rng.uniform(0.1, 1, size=(2, 3)))
            for _ in range(2)
        ]
        widths = np.ones(3)
        local = system_sum_rate(partition, chan, widths, solutions, EvalMode.LOCAL)
        global_ = system_sum_rate(partition, chan, widths, solutions, EvalMode.GLOBAL)
        assert global_ <= local
        assert global_ < local

    def test_interferer_lowers_rate(self):
        """Test that switching on a user in another cell strictly lowers a link's rate."""
        chan, partition, solutions = _two_cell_network()
        quiet = [
            solutions[0],
            CellSolution(assignment=ChannelAssignment(np.zeros((1, 1, 1), dtype=bool)), p_uk=np.zeros((1, 1))),
        ]
        noisy = [
            solutions[0],
            CellSolution(assignment=ChannelAssignment(np.zeros((1, 1, 1), dtype=bool)), p_uk=np.array([[2.0]])),
        ]
        widths = np.ones(1)
        assert system_sum_rate(partition, chan, widths, noisy) < system_sum_rate(partition, chan, widths, quiet)

    def test_solution_count_mismatch(self):
        """Test that every cell needs a solution."""
        chan, partition, solutions = _two_cell_network()
        with pytest.raises(ValueError):
            system_sum_rate(partition, chan, np.ones(1), solutions[:1])
