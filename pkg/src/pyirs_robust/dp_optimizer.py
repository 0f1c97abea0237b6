"""연속 위상에서 최악 에너지 효율을 전역 최적화하는 동적 계획법."""

import logging

import numpy as np

from .channel_model import ChannelEstimate
from .exceptions import IRSParameterError
from .phase_control import PhaseMode
from .solution import Solution, SolveStatus
from .worst_case import (
    ActivationVector,
    PowerModel,
    feasibility,
    validate_uncertainty,
    worst_case_ee,
    worst_case_snr,
)

logger = logging.getLogger(__name__)

ALGORITHM = "dp"
CONTINUOUS = PhaseMode.continuous()


def descending_order(ch: ChannelEstimate) -> np.ndarray:
    """α̂ 내림차순 인덱스 (같은 값은 원래 인덱스 오름차순)."""
    return np.argsort(-ch.alphas, kind="stable")


def _prefix_activation(L: int, order: np.ndarray, M: int) -> ActivationVector:
    bits = np.zeros(L, dtype=np.int8)
    bits[order[:M]] = 1
    return ActivationVector(bits)


def solve_dp(
    ch: ChannelEstimate,
    delta: float,
    gamma_min: float,
    gamma_bar: float,
    pm: PowerModel,
) -> Solution:
    """
    연속 위상 최악 EE 문제를 전역 최적으로 풉니다.

    α̂ 내림차순으로 정렬한 뒤 M = 0..L에 대해 가장 큰 M개를 켠 접두 활성화의
    EE를 누적합으로 평가하고, 실현 가능한 M 중 EE가 엄격히 큰 첫 M을 고릅니다.
    따라서 EE가 같으면 가장 작은 M이 선택됩니다.

    Args:
        ch: 채널 추정치
        delta: 불확실성 반지름 δ
        gamma_min: 최소 SNR γ_min
        gamma_bar: γ̄
        pm: 전력 모델

    Returns:
        Solution (status=optimal 또는 infeasible)

    Raises:
        IRSAssumptionError: δ > α̂_min인 경우
    """
    validate_uncertainty(ch, delta)
    L = ch.L
    verdict = feasibility(ch, delta, gamma_min, CONTINUOUS, gamma_bar)
    if not verdict:
        logger.debug(f"DP: all-on vector misses gamma_min={gamma_min:.4e}; infeasible")
        return Solution.infeasible(ALGORITHM)

    order = descending_order(ch)
    sorted_alphas = ch.alphas[order]

    # f_c(M) = α̂₀ + Σ_{m≤M} α̂_(m), M = 0..L
    f = ch.alpha0 + np.concatenate(([0.0], np.cumsum(sorted_alphas)))
    counts = np.arange(L + 1, dtype=float)
    gamma = gamma_bar * (f - delta * np.sqrt(1.0 + counts)) ** 2
    feasible = gamma >= gamma_min
    # 모두 켠 경우의 판정은 독립 재계산 결과를 따름
    feasible[L] = True
    ee = np.where(
        feasible,
        np.log2(1.0 + gamma) / (pm.base_power(L) + pm.delta_p * counts),
        -np.inf,
    )
    m_star = int(np.argmax(ee))

    x = _prefix_activation(L, order, m_star)
    ee_star = float(worst_case_ee(ch, x, delta, CONTINUOUS, gamma_bar, pm))
    logger.debug(f"DP: L={L} selected M={m_star} ee={ee_star:.6e}")
    return Solution(
        status=SolveStatus.OPTIMAL,
        ee=ee_star,
        x=x,
        m_star=m_star,
        gap_bound=0.0,
        algorithm=ALGORITHM,
    )


def solve_subproblem_eq_M(
    ch: ChannelEstimate,
    delta: float,
    gamma_min: float,
    gamma_bar: float,
    pm: PowerModel,
    M: int,
) -> Solution:
    """
    정확히 M개를 켜는 부분 문제를 풉니다.

    가장 큰 M개의 α̂를 켠 활성화가 최적이며, 그 활성화가 SNR 하한
    (α̂₀ + Σ α̂ ≥ √(γ_min/γ̄) + δ√(1+M)와 동치)을 만족하지 않으면
    부분 문제는 실현 불가능합니다.

    Raises:
        IRSParameterError: M이 [0, L] 밖인 경우
        IRSAssumptionError: δ > α̂_min인 경우
    """
    if int(M) != M or not 0 <= M <= ch.L:
        raise IRSParameterError(f"M must be an integer in [0, {ch.L}], got {M}")
    validate_uncertainty(ch, delta)
    x = _prefix_activation(ch.L, descending_order(ch), int(M))
    gamma = worst_case_snr(ch, x, delta, CONTINUOUS, gamma_bar)
    if gamma < gamma_min:
        return Solution.infeasible(ALGORITHM)
    return Solution(
        status=SolveStatus.OPTIMAL,
        ee=float(worst_case_ee(ch, x, delta, CONTINUOUS, gamma_bar, pm)),
        x=x,
        m_star=int(M),
        gap_bound=0.0,
        algorithm=ALGORITHM,
    )
