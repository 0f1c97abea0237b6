"""Tests for optimization result types."""

import numpy as np

from pyirs_robust.solution import INFEASIBLE, Solution, SolveStatus
from pyirs_robust.worst_case import ActivationVector


class TestInfeasibleSentinel:
    """Tests for the INFEASIBLE sentinel."""

    def test_orders_below_numbers(self):
        """Test INFEASIBLE compares below any EE value."""
        assert INFEASIBLE < 0.0
        assert INFEASIBLE < -1e300
        assert not INFEASIBLE > 0.0
        assert not INFEASIBLE < INFEASIBLE

    def test_repr(self):
        """Test the sentinel repr."""
        assert repr(INFEASIBLE) == "INFEASIBLE"


class TestSolution:
    """Tests for Solution."""

    def test_infeasible_constructor(self):
        """Test the infeasible result fields."""
        sol = Solution.infeasible("dp")
        assert sol.status is SolveStatus.INFEASIBLE
        assert sol.ee is INFEASIBLE
        assert sol.x is None
        assert not sol.is_feasible
        assert sol.ee_value == -np.inf
        assert sol.algorithm == "dp"

    def test_feasible(self):
        """Test a feasible result exposes its EE."""
        sol = Solution(status=SolveStatus.OPTIMAL, ee=12.5, x=ActivationVector([1, 0]),
                       m_star=1, algorithm="dp")
        assert sol.is_feasible
        assert sol.ee_value == 12.5
        assert sol.gap_bound == 0.0

    def test_status_values(self):
        """Test status strings used in reports."""
        assert SolveStatus.OPTIMAL == "optimal"
        assert str(SolveStatus.FEASIBLE) == "feasible"
