"""연속 최적 위상과 b비트 균일 양자화."""

from dataclasses import dataclass

import numpy as np

from .channel_model import ChannelEstimate
from .converters import TWO_PI, wrap_phase, wrap_symmetric
from .exceptions import IRSParameterError


@dataclass(frozen=True)
class PhaseMode:
    """위상 모드: bits가 None이면 연속, 아니면 b비트 이산."""

    bits: int | None = None

    def __post_init__(self):
        if self.bits is not None and (int(self.bits) != self.bits or self.bits < 1):
            raise IRSParameterError(f"bits must be a positive integer, got {self.bits}")

    @classmethod
    def continuous(cls) -> "PhaseMode":
        return cls(None)

    @classmethod
    def discrete(cls, bits: int) -> "PhaseMode":
        return cls(int(bits))

    @classmethod
    def parse(cls, mode: str, bits: int | None = None) -> "PhaseMode":
        """
        "c"/"continuous" 또는 "d"/"discrete" 문자열로부터 생성합니다.

        Raises:
            IRSParameterError: 알 수 없는 모드이거나 이산 모드에 bits가 없는 경우
        """
        key = mode.strip().lower()
        if key in ("c", "continuous"):
            return cls.continuous()
        if key in ("d", "discrete"):
            if bits is None:
                raise IRSParameterError("Discrete mode requires bits")
            return cls.discrete(bits)
        raise IRSParameterError(f"Unknown phase mode: {mode}")

    @property
    def is_continuous(self) -> bool:
        return self.bits is None

    @property
    def label(self) -> str:
        return "c" if self.is_continuous else "d"


@dataclass(frozen=True)
class PhaseShiftConfig:
    """연속 위상, 양자화 위상, 양자화 오차와 양자화 격자 정보."""

    continuous: np.ndarray
    discrete: np.ndarray
    errors: np.ndarray
    bits: int | None

    @property
    def K(self) -> int | None:
        return None if self.bits is None else 2 ** self.bits

    @property
    def omega(self) -> float | None:
        return None if self.bits is None else TWO_PI / self.K


def _check_bits(b: int) -> int:
    if int(b) != b or b < 1:
        raise IRSParameterError(f"b must be an integer >= 1, got {b}")
    return int(b)


def optimal_continuous_phases(ch: ChannelEstimate) -> np.ndarray:
    """
    모든 반사 성분을 ĥ₀의 위상에 정렬하는 연속 위상 φ*_ℓ = (θ̂₀ − θ̂_ℓ) mod 2π.

    Args:
        ch: 채널 추정치

    Returns:
        길이 L의 [0, 2π) 위상 배열
    """
    return wrap_phase(ch.phases[0] - ch.phases[1:])


def _scaled(phases, b: int) -> tuple[np.ndarray, int, float]:
    K = 2 ** b
    omega = TWO_PI / K
    return np.asarray(phases, dtype=float) / omega + 0.5, K, omega


def closed_form_indices(phases, b: int) -> np.ndarray:
    """
    닫힌 형식 양자화 인덱스 k = ⌊φ/ω + 1/2⌋ mod K.

    반올림은 ⌊x + 1/2⌋ (round-half-up)이며 은행가 반올림이 아닙니다.
    """
    b = _check_bits(b)
    s, K, _ = _scaled(phases, b)
    return np.mod(np.floor(s).astype(np.int64), K)


def decision_region_indices(phases, b: int) -> np.ndarray:
    """
    결정 영역 R₀..R_{K−1}을 선형 탐색하여 인덱스를 찾습니다.

    R₀ = [0, ω/2) ∪ [2π − ω/2, 2π), R_k = [kω − ω/2, kω + ω/2).
    경계는 ω 단위로 스케일한 같은 부동소수점 값 s = φ/ω + 1/2에서 비교합니다.
    """
    b = _check_bits(b)
    s, K, _ = _scaled(phases, b)
    indices = np.full(s.shape, -1, dtype=np.int64)
    for k in range(K):
        in_region = (s >= k) & (s < k + 1)
        if k == 0:
            # R₀의 위쪽 조각 [2π − ω/2, 2π)
            in_region |= (s >= K) & (s < K + 1)
        indices = np.where(in_region & (indices < 0), k, indices)
    if np.any(indices < 0):
        raise IRSParameterError("phases must lie in [0, 2π)")
    return indices


def quantize_closed_form(phases, b: int) -> np.ndarray:
    """
    닫힌 형식으로 b비트 양자화 위상 φᵈ = [⌊φ/ω + 1/2⌋ mod K]·ω를 계산합니다.

    Raises:
        IRSParameterError: b < 1인 경우
    """
    b = _check_bits(b)
    return closed_form_indices(phases, b) * (TWO_PI / 2 ** b)


def quantize_decision_regions(phases, b: int) -> np.ndarray:
    """
    결정 영역 탐색으로 양자화 위상을 계산합니다 (O(L·2^b) 검증용).

    Raises:
        IRSParameterError: b < 1이거나 위상이 [0, 2π) 밖인 경우
    """
    b = _check_bits(b)
    return decision_region_indices(phases, b) * (TWO_PI / 2 ** b)


def quantization_errors(continuous, discrete, b: int | None = None) -> np.ndarray:
    """
    양자화 오차 ε_ℓ = φᵈ_ℓ − φ*_ℓ (2π 감기 해소, (−π, π] 기준).

    격자 위의 φᵈ에 대해 결과는 (−ω/2, ω/2]에 놓입니다.
    """
    continuous = np.asarray(continuous, dtype=float)
    discrete = np.asarray(discrete, dtype=float)
    if continuous.shape != discrete.shape:
        raise IRSParameterError("continuous and discrete phases must have the same shape")
    if b is not None:
        _check_bits(b)
    return wrap_symmetric(discrete - continuous)


def configure_phases(ch: ChannelEstimate, mode: PhaseMode) -> PhaseShiftConfig:
    """
    모드에 맞는 전체 위상 설정을 계산합니다.

    연속 모드에서는 discrete = continuous이고 오차는 모두 0입니다.
    """
    continuous = optimal_continuous_phases(ch)
    if mode.is_continuous:
        return PhaseShiftConfig(
            continuous=continuous,
            discrete=continuous.copy(),
            errors=np.zeros_like(continuous),
            bits=None,
        )
    discrete = quantize_closed_form(continuous, mode.bits)
    return PhaseShiftConfig(
        continuous=continuous,
        discrete=discrete,
        errors=quantization_errors(continuous, discrete, mode.bits),
        bits=mode.bits,
    )
