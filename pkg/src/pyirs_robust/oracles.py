"""
검증용 전수 탐색 기준 구현.

최적화기와 코드 경로를 공유하지 않도록 worst_case 기본 함수만 사용하며
후보마다 처음부터 평가합니다.
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .channel_model import ChannelEstimate, make_rng
from .constants import EXHAUSTIVE_CHUNK, EXHAUSTIVE_MAX_L, SUBSET_GUARD
from .exceptions import IRSGuardError, IRSParameterError
from .phase_control import PhaseMode, configure_phases
from .solution import Solution, SolveStatus
from .worst_case import (
    ActivationVector,
    PowerModel,
    received_snr,
    validate_uncertainty,
    worst_case_ee,
    worst_case_error,
    worst_case_snr,
)

logger = logging.getLogger(__name__)

SAMPLE_BATCH = 4096


def _evaluate_batch(ch, X, delta, gamma_min, gamma_bar, pm, mode, cfg) -> np.ndarray:
    gamma = np.asarray(worst_case_snr(ch, X, delta, mode, gamma_bar, cfg))
    ee = np.asarray(worst_case_ee(ch, X, delta, mode, gamma_bar, pm, cfg))
    return np.where(gamma >= gamma_min, ee, -np.inf)


def _index_bits(indices: np.ndarray, L: int) -> np.ndarray:
    # x_1이 최상위 비트 (사전식 순서)
    shifts = np.arange(L - 1, -1, -1, dtype=np.int64)
    return ((indices[:, None] >> shifts) & 1).astype(float)


def exhaustive_search(
    ch: ChannelEstimate,
    delta: float,
    gamma_min: float,
    gamma_bar: float,
    pm: PowerModel,
    mode: PhaseMode,
    threads: int = 1,
) -> Solution:
    """
    2^L개의 활성화를 모두 평가해 전역 최적 해를 찾습니다.

    후보는 2^16개 단위로 나누어 평가하며 스레드를 쓰더라도 결과는 같습니다.
    EE가 같으면 이진 값이 가장 작은 활성화가 선택됩니다.

    Args:
        ch: 채널 추정치
        delta: δ
        gamma_min: γ_min
        gamma_bar: γ̄
        pm: 전력 모델
        mode: 위상 모드
        threads: 청크 평가 스레드 수

    Returns:
        Solution (status=optimal 또는 infeasible)

    Raises:
        IRSGuardError: L > 25인 경우
        IRSAssumptionError: 전제 조건 위반
    """
    L = ch.L
    if L > EXHAUSTIVE_MAX_L:
        raise IRSGuardError(f"Exhaustive search is limited to L <= {EXHAUSTIVE_MAX_L}, got {L}")
    validate_uncertainty(ch, delta)
    cfg = configure_phases(ch, mode)
    total = 1 << L
    starts = range(0, total, EXHAUSTIVE_CHUNK)

    def best_in_chunk(start: int) -> tuple[float, int]:
        indices = np.arange(start, min(start + EXHAUSTIVE_CHUNK, total), dtype=np.int64)
        ee = _evaluate_batch(ch, _index_bits(indices, L), delta, gamma_min, gamma_bar, pm,
                             mode, cfg)
        pos = int(np.argmax(ee))
        return float(ee[pos]), int(indices[pos])

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(best_in_chunk, starts))
    else:
        results = [best_in_chunk(start) for start in starts]

    best_ee, best_index = -np.inf, -1
    for ee, index in results:
        if ee > best_ee:
            best_ee, best_index = ee, index

    if best_index < 0:
        logger.debug(f"Exhaustive search: no feasible activation among 2^{L}")
        return Solution.infeasible("exhaustive")

    x = ActivationVector(_index_bits(np.array([best_index]), L)[0].astype(np.int8))
    return Solution(
        status=SolveStatus.OPTIMAL,
        ee=float(worst_case_ee(ch, x, delta, mode, gamma_bar, pm, cfg)),
        x=x,
        m_star=x.M,
        gap_bound=0.0,
        algorithm="exhaustive",
    )


def _ball_samples(rng: np.random.Generator, count: int, dim: int, delta: float,
                  interior: bool) -> np.ndarray:
    # 복소 dim차원 = 실수 2·dim차원 구
    gaussian = rng.standard_normal((count, 2 * dim))
    gaussian /= np.linalg.norm(gaussian, axis=1, keepdims=True)
    radius = np.full((count, 1), delta)
    if interior:
        radius = delta * rng.random((count, 1)) ** (1.0 / (2 * dim))
    points = gaussian * radius
    return points[:, :dim] + 1j * points[:, dim:]


def sampled_worst_snr(
    ch: ChannelEstimate,
    x,
    phases,
    delta: float,
    samples: int,
    seed: int,
    gamma_bar: float = 1.0,
    include_constructed: bool = True,
) -> float:
    """
    반지름 δ 공 위의 무작위 CSI 오차에 대해 수신 SNR의 최솟값을 구합니다.

    표본의 절반은 구면 위, 절반은 공 내부 (반지름 δ·u^{1/(2(L+1))})에서 뽑고,
    include_constructed이면 닫힌 형식의 최악 오차 점을 추가합니다.

    Raises:
        IRSParameterError: samples < 1인 경우
    """
    if samples < 1:
        raise IRSParameterError(f"samples must be >= 1, got {samples}")
    arr = np.asarray(x.bits if isinstance(x, ActivationVector) else x, dtype=float)
    phases = np.asarray(phases, dtype=float)
    dim = ch.L + 1
    rng = make_rng(seed)

    best = np.inf
    remaining = samples
    while remaining > 0:
        count = min(SAMPLE_BATCH, remaining)
        on_sphere = count // 2
        batch = np.vstack((
            _ball_samples(rng, on_sphere, dim, delta, interior=False),
            _ball_samples(rng, count - on_sphere, dim, delta, interior=True),
        ))
        best = min(best, float(np.min(received_snr(ch, arr, batch, phases, gamma_bar))))
        remaining -= count

    if include_constructed:
        err = worst_case_error(ch, arr, phases, delta, PhaseMode.continuous())
        best = min(best, float(received_snr(ch, arr, err.coeffs, phases, gamma_bar)))
    return best


def enumerate_subsets_eq_M(
    ch: ChannelEstimate,
    delta: float,
    gamma_min: float,
    gamma_bar: float,
    pm: PowerModel,
    M: int,
    mode: PhaseMode,
) -> Solution:
    """
    정확히 M개를 켜는 모든 활성화를 평가합니다.

    Raises:
        IRSParameterError: M이 [0, L] 밖인 경우
        IRSGuardError: C(L, M) > 10⁶인 경우
    """
    L = ch.L
    if int(M) != M or not 0 <= M <= L:
        raise IRSParameterError(f"M must be an integer in [0, {L}], got {M}")
    count = math.comb(L, int(M))
    if count > SUBSET_GUARD:
        raise IRSGuardError(f"C({L}, {M}) = {count} exceeds the enumeration guard {SUBSET_GUARD}")
    validate_uncertainty(ch, delta)
    cfg = configure_phases(ch, mode)

    best_ee, best_bits = -np.inf, None
    combos = itertools.combinations(range(L), int(M))
    while True:
        chunk = list(itertools.islice(combos, EXHAUSTIVE_CHUNK))
        if not chunk:
            break
        X = np.zeros((len(chunk), L))
        if M > 0:
            rows = np.repeat(np.arange(len(chunk)), int(M))
            X[rows, np.asarray(chunk, dtype=np.int64).reshape(-1)] = 1.0
        ee = _evaluate_batch(ch, X, delta, gamma_min, gamma_bar, pm, mode, cfg)
        pos = int(np.argmax(ee))
        if ee[pos] > best_ee:
            best_ee, best_bits = float(ee[pos]), X[pos].astype(np.int8)

    if best_bits is None:
        return Solution.infeasible("enumeration")
    x = ActivationVector(best_bits)
    return Solution(
        status=SolveStatus.OPTIMAL,
        ee=float(worst_case_ee(ch, x, delta, mode, gamma_bar, pm, cfg)),
        x=x,
        m_star=int(M),
        gap_bound=0.0,
        algorithm="enumeration",
    )
