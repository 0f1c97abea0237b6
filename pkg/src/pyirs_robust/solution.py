"""최적화 결과 타입."""

import enum
from dataclasses import dataclass, field

import numpy as np

from .worst_case import ActivationVector


class SolveStatus(enum.StrEnum):
    """결과 상태."""

    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"


class Infeasible(enum.Enum):
    """실현 불가능한 부분 문제의 에너지 효율 (−∞에 해당)."""

    INFEASIBLE = "infeasible"

    def __lt__(self, other) -> bool:
        return not isinstance(other, Infeasible)

    def __gt__(self, other) -> bool:
        return False

    def __repr__(self) -> str:
        return "INFEASIBLE"


INFEASIBLE = Infeasible.INFEASIBLE


@dataclass(frozen=True)
class Solution:
    """
    활성화 최적화 결과.

    status가 infeasible이면 ee는 INFEASIBLE이고 x는 None입니다.
    gap_bound는 완화 기반 방법의 사후 최적성 간격 상한입니다 (DP는 0).
    ee_rel은 완화 문제의 목적값, ee_upper는 그 인증된 상한입니다.
    """

    status: SolveStatus
    ee: "float | Infeasible"
    x: ActivationVector | None
    m_star: int
    gap_bound: float = 0.0
    algorithm: str = ""
    ee_rel: float | None = None
    ee_upper: float | None = None
    details: dict = field(default_factory=dict, compare=False)

    @classmethod
    def infeasible(cls, algorithm: str = "") -> "Solution":
        return cls(
            status=SolveStatus.INFEASIBLE,
            ee=INFEASIBLE,
            x=None,
            m_star=0,
            gap_bound=0.0,
            algorithm=algorithm,
        )

    @property
    def is_feasible(self) -> bool:
        return self.status is not SolveStatus.INFEASIBLE

    @property
    def ee_value(self) -> float:
        """숫자 EE (실현 불가능하면 −inf, 통계 집계용)."""
        return -np.inf if self.ee is INFEASIBLE else float(self.ee)
