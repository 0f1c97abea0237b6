"""
최악 SNR 닫힌 형식, 전력 모델, 실현 가능성 판정.

모든 닫힌 형식 함수는 활성화 벡터 하나 (L,) 또는 여러 개를 쌓은 배치 (N, L)를
받습니다. 배치 입력이면 마지막 축을 따라 계산한 (N,) 배열을 돌려줍니다.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .channel_model import ChannelEstimate
from .constants import FD_FORMS, P_ON_INTERCEPT_MW, P_ON_SLOPE_MW
from .converters import mw_to_watt, wrap_phase
from .exceptions import (
    IRSAssumptionError,
    IRSDegenerateError,
    IRSParameterError,
)
from .phase_control import PhaseMode, PhaseShiftConfig, configure_phases

logger = logging.getLogger(__name__)

# f ≥ g 판정에 쓰는 상대 허용 오차
DOMINANCE_RTOL = 1e-9


class ActivationVector:
    """IRS 소자 on/off 이진 벡터 x."""

    def __init__(self, bits):
        bits = np.asarray(bits)
        if bits.ndim != 1 or bits.size < 1:
            raise IRSParameterError("ActivationVector must be a non-empty 1-D array")
        if not np.all((bits == 0) | (bits == 1)):
            raise IRSParameterError("ActivationVector entries must be 0 or 1")
        bits = bits.astype(np.int8)
        bits.setflags(write=False)
        self.bits = bits

    @classmethod
    def ones(cls, L: int) -> "ActivationVector":
        return cls(np.ones(L, dtype=np.int8))

    @classmethod
    def zeros(cls, L: int) -> "ActivationVector":
        return cls(np.zeros(L, dtype=np.int8))

    @classmethod
    def from_indices(cls, L: int, indices) -> "ActivationVector":
        """켜진 소자 인덱스 목록으로부터 생성합니다."""
        bits = np.zeros(L, dtype=np.int8)
        bits[np.asarray(indices, dtype=np.int64)] = 1
        return cls(bits)

    @property
    def L(self) -> int:
        return int(self.bits.size)

    @property
    def M(self) -> int:
        """켜진 소자 수 Σx."""
        return int(self.bits.sum())

    def __array__(self, dtype=None, copy=None):
        return self.bits.astype(dtype or np.int8)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ActivationVector):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash(self.bits.tobytes())

    def __repr__(self) -> str:
        return f"ActivationVector({''.join(str(int(b)) for b in self.bits)})"


@dataclass(frozen=True)
class PowerModel:
    """
    전체 전력 소비 모델 (와트).

    P_tot = P_fix + L·P_off + (P_on − P_off)·Σx, P_fix = p/η + P_static.
    """

    p: float
    eta: float
    p_static: float
    p_on: float
    p_off: float

    def __post_init__(self):
        if self.p < 0:
            raise IRSParameterError(f"p must be >= 0, got {self.p}")
        if not 0.0 < self.eta <= 1.0:
            raise IRSParameterError(f"eta must lie in (0, 1], got {self.eta}")
        if not self.p_static > 0:
            raise IRSParameterError(f"p_static must be positive, got {self.p_static}")
        if not 0.0 < self.p_off <= self.p_on:
            raise IRSParameterError(
                f"Require 0 < p_off <= p_on, got p_off={self.p_off}, p_on={self.p_on}"
            )

    @property
    def p_fix(self) -> float:
        return self.p / self.eta + self.p_static

    @property
    def delta_p(self) -> float:
        """켜진 소자 하나당 추가 전력 P_on − P_off."""
        return self.p_on - self.p_off

    def base_power(self, L: int) -> float:
        """모든 소자가 꺼졌을 때의 전력 P_fix + L·P_off."""
        return self.p_fix + L * self.p_off


@dataclass(frozen=True)
class ExpansionCoeffs:
    """
    |α̂₀ + Σ x_ℓ α̂_ℓ e^{jε_ℓ}|² 전개 계수.

    mu는 L×L 상삼각 행렬 (대각 및 하삼각은 0)입니다.
    """

    alpha0_sq: float
    zeta: np.ndarray
    mu: np.ndarray
    zeta_prime: np.ndarray
    xi: float
    delta: float

    @property
    def L(self) -> int:
        return int(self.zeta.size)


@dataclass(frozen=True)
class WorstCaseError:
    """최악 CSI 오차 h̃* 의 크기와 위상."""

    magnitudes: np.ndarray
    phases: np.ndarray

    @property
    def coeffs(self) -> np.ndarray:
        return self.magnitudes * np.exp(1j * self.phases)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.magnitudes))


@dataclass(frozen=True)
class FeasibilityVerdict:
    """
    실현 가능성 판정 결과.

    exact가 False이면 (b = 2) 판정은 충분 조건일 뿐입니다.
    """

    feasible: bool
    exact: bool

    def __bool__(self) -> bool:
        return self.feasible


def _as_activation(x, L: int, binary: bool = True) -> np.ndarray:
    if isinstance(x, ActivationVector):
        x = x.bits
    arr = np.asarray(x, dtype=float)
    if arr.ndim not in (1, 2) or arr.shape[-1] != L:
        raise IRSParameterError(f"Activation must have trailing length {L}, got {arr.shape}")
    if binary and not np.all((arr == 0.0) | (arr == 1.0)):
        raise IRSParameterError("Activation entries must be 0 or 1")
    return arr


def _as_scalar(value):
    return float(value) if np.ndim(value) == 0 else value


def validate_uncertainty(ch: ChannelEstimate, delta: float) -> None:
    """
    δ ≥ 0이고 δ ≤ α̂_min인지 확인합니다.

    Raises:
        IRSParameterError: δ가 음수인 경우
        IRSAssumptionError: δ > α̂_min인 경우
    """
    if not np.isfinite(delta) or delta < 0:
        raise IRSParameterError(f"delta must be finite and >= 0, got {delta}")
    if delta > ch.alpha_min:
        raise IRSAssumptionError(
            f"Uncertainty radius {delta:.6e} exceeds alpha_min {ch.alpha_min:.6e}"
        )


def _check_mode(mode: PhaseMode) -> None:
    if not mode.is_continuous and mode.bits < 2:
        raise IRSAssumptionError(
            f"Discrete worst-case results require b >= 2, got b={mode.bits}"
        )


def f_c(ch: ChannelEstimate, x):
    """
    연속 위상에서의 정렬 합 f_c(x) = α̂₀ + Σ x_ℓ α̂_ℓ.

    Args:
        ch: 채널 추정치
        x: 활성화 벡터 (L,) 또는 배치 (N, L)

    Returns:
        스칼라 또는 (N,) 배열
    """
    arr = _as_activation(x, ch.L)
    return _as_scalar(ch.alpha0 + (arr * ch.alphas).sum(axis=-1))


def pairwise_min_sum(mu: np.ndarray, x):
    """
    Σ_{n<m} μ_nm·min(x_n, x_m).

    이진 입력은 x_n·x_m = min(x_n, x_m)이므로 이차 형식으로 계산하고,
    분수 입력은 행마다 쌍별 최솟값을 직접 계산합니다.
    """
    arr = np.asarray(x, dtype=float)
    if np.all((arr == 0.0) | (arr == 1.0)):
        return _as_scalar(np.einsum("...n,nm,...m->...", arr, mu, arr))
    if arr.ndim == 1:
        return float((mu * np.minimum.outer(arr, arr)).sum())
    return np.array([(mu * np.minimum.outer(row, row)).sum() for row in arr])


def expansion_coeffs(ch: ChannelEstimate, errors, delta: float) -> ExpansionCoeffs:
    """
    전개 계수 ζ, μ, ζ', ξ를 계산합니다.

    ζ_ℓ = α̂_ℓ² + 2α̂₀α̂_ℓcos(ε_ℓ), μ_nm = 2α̂_nα̂_m cos(ε_n − ε_m) (n < m),
    ζ'_ℓ = ζ_ℓ − δ², ξ = α̂₀² − δ².

    Args:
        ch: 채널 추정치
        errors: 길이 L의 양자화 오차 ε
        delta: 불확실성 반지름 δ

    Returns:
        ExpansionCoeffs
    """
    errors = np.asarray(errors, dtype=float)
    if errors.shape != (ch.L,):
        raise IRSParameterError(f"errors must have length {ch.L}, got {errors.shape}")
    alphas = ch.alphas
    alpha0 = ch.alpha0
    zeta = alphas ** 2 + 2.0 * alpha0 * alphas * np.cos(errors)
    mu = np.triu(2.0 * np.outer(alphas, alphas) * np.cos(np.subtract.outer(errors, errors)), k=1)
    delta_sq = float(delta) ** 2
    return ExpansionCoeffs(
        alpha0_sq=alpha0 ** 2,
        zeta=zeta,
        mu=mu,
        zeta_prime=zeta - delta_sq,
        xi=alpha0 ** 2 - delta_sq,
        delta=float(delta),
    )


def f_d(ch: ChannelEstimate, x, errors, form: str = "magnitude"):
    """
    이산 위상에서의 합 크기 f_d(x) = |α̂₀ + Σ x_ℓ α̂_ℓ e^{jε_ℓ}|.

    Args:
        ch: 채널 추정치
        x: 활성화 벡터 또는 배치
        errors: 양자화 오차 ε
        form: "magnitude", "quadratic", "min-expansion" 중 하나

    Returns:
        스칼라 또는 (N,) 배열

    Raises:
        IRSParameterError: 알 수 없는 form인 경우
    """
    if form not in FD_FORMS:
        raise IRSParameterError(f"Unknown f_d form: {form}. Expected one of {FD_FORMS}")
    arr = _as_activation(x, ch.L)
    errors = np.asarray(errors, dtype=float)
    alphas = ch.alphas
    alpha0 = ch.alpha0

    if form == "magnitude":
        terms = arr * (alphas * np.exp(1j * errors))
        return _as_scalar(np.abs(alpha0 + terms.sum(axis=-1)))
    if form == "quadratic":
        delta_re = alpha0 + (arr * (alphas * np.cos(errors))).sum(axis=-1)
        delta_im = (arr * (alphas * np.sin(errors))).sum(axis=-1)
        return _as_scalar(np.sqrt(delta_re ** 2 + delta_im ** 2))

    coeffs = expansion_coeffs(ch, errors, 0.0)
    squared = coeffs.alpha0_sq + (arr * coeffs.zeta).sum(axis=-1) + pairwise_min_sum(coeffs.mu, arr)
    return _as_scalar(np.sqrt(np.maximum(squared, 0.0)))


def g(x, delta: float):
    """
    불확실성 항 g(x; δ) = δ·√(1 + Σx).

    Args:
        x: 활성화 벡터 또는 배치
        delta: δ ≥ 0
    """
    if delta < 0:
        raise IRSParameterError(f"delta must be >= 0, got {delta}")
    if isinstance(x, ActivationVector):
        x = x.bits
    arr = np.asarray(x, dtype=float)
    return _as_scalar(delta * np.sqrt(1.0 + arr.sum(axis=-1)))


def _resolve_phases(ch: ChannelEstimate, mode: PhaseMode,
                    phases: PhaseShiftConfig | None) -> PhaseShiftConfig:
    return phases if phases is not None else configure_phases(ch, mode)


def signal_strength(ch: ChannelEstimate, x, mode: PhaseMode,
                    phases: PhaseShiftConfig | None = None):
    """모드에 따른 f (연속이면 f_c, 이산이면 f_d)."""
    if mode.is_continuous:
        return f_c(ch, x)
    cfg = _resolve_phases(ch, mode, phases)
    return f_d(ch, x, cfg.errors, form="quadratic")


def worst_case_snr(
    ch: ChannelEstimate,
    x,
    delta: float,
    mode: PhaseMode,
    gamma_bar: float,
    phases: PhaseShiftConfig | None = None,
):
    """
    최악 SNR γ_worst(x; δ) = γ̄·(f − g)².

    Args:
        ch: 채널 추정치
        x: 활성화 벡터 또는 배치
        delta: 불확실성 반지름 δ
        mode: 위상 모드
        gamma_bar: γ̄ = p/σ²
        phases: 미리 계산한 위상 설정 (없으면 계산)

    Returns:
        스칼라 또는 (N,) 배열

    Raises:
        IRSAssumptionError: δ > α̂_min, 이산 모드에서 b < 2, 또는 f < g가 감지된 경우
    """
    validate_uncertainty(ch, delta)
    _check_mode(mode)
    f = np.asarray(signal_strength(ch, x, mode, phases))
    gx = np.asarray(g(x, delta))
    slack = f - gx
    if np.any(slack < -DOMINANCE_RTOL * np.maximum(f, gx)):
        raise IRSAssumptionError(
            f"Worst-case dominance f >= g violated (min slack {float(slack.min()):.3e})"
        )
    return _as_scalar(gamma_bar * slack ** 2)


def worst_case_se(ch, x, delta, mode, gamma_bar, phases=None):
    """최악 스펙트럼 효율 log₂(1 + γ_worst) (bits/s/Hz)."""
    return _as_scalar(np.log2(1.0 + np.asarray(worst_case_snr(ch, x, delta, mode, gamma_bar,
                                                              phases))))


def vartheta(ch: ChannelEstimate, x, errors) -> float:
    """
    ϑ(x) = Arg(α̂₀ + Σ x_ℓ α̂_ℓ e^{jε_ℓ}) ∈ [0, 2π).

    Raises:
        IRSDegenerateError: f_d(x) = 0인 경우
    """
    arr = _as_activation(x, ch.L)
    if arr.ndim != 1:
        raise IRSParameterError("vartheta takes a single activation vector")
    total = ch.alpha0 + (arr * (ch.alphas * np.exp(1j * np.asarray(errors, dtype=float)))).sum()
    if total == 0:
        raise IRSDegenerateError("Argument of a zero sum is undefined")
    return float(wrap_phase(np.angle(total)))


def worst_case_error(
    ch: ChannelEstimate,
    x,
    phases,
    delta: float,
    mode: PhaseMode,
) -> WorstCaseError:
    """
    최악 SNR을 달성하는 CSI 오차를 구성합니다.

    θ̃₀ = (ϑ + θ̂₀ + π) mod 2π, θ̃_ℓ = (ϑ + θ̂₀ − φ_ℓ + π) mod 2π이며
    크기는 {0}∪P에서 λ = δ/√(1 + Σx), 꺼진 소자에서 0입니다.

    Args:
        ch: 채널 추정치
        x: 활성화 벡터
        phases: 적용된 위상 φ (이산 모드면 φᵈ, 연속 모드면 φ*)
        delta: δ
        mode: 위상 모드

    Returns:
        WorstCaseError

    Raises:
        IRSAssumptionError: 전제 조건 위반
    """
    validate_uncertainty(ch, delta)
    _check_mode(mode)
    arr = _as_activation(x, ch.L)
    if arr.ndim != 1:
        raise IRSParameterError("worst_case_error takes a single activation vector")
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (ch.L,):
        raise IRSParameterError(f"phases must have length {ch.L}")

    lam = delta / np.sqrt(1.0 + arr.sum())
    magnitudes = np.concatenate(([lam], lam * arr))
    if delta == 0:
        return WorstCaseError(magnitudes=np.zeros(ch.L + 1), phases=np.zeros(ch.L + 1))

    # ϑ + θ̂₀ = Arg(ĥ₀ + Σ x_ℓ ĥ_ℓ e^{jφ_ℓ})
    total = ch.coeffs[0] + (arr * ch.coeffs[1:] * np.exp(1j * phases)).sum()
    if total == 0:
        raise IRSDegenerateError("Received signal sum vanishes; worst-case phase undefined")
    anchor = np.angle(total) + np.pi
    err_phases = wrap_phase(np.concatenate(([anchor], anchor - phases)))
    return WorstCaseError(magnitudes=magnitudes, phases=err_phases)


def received_snr(ch: ChannelEstimate, x, h_err, phases, gamma_bar: float):
    """
    오차 h̃를 포함한 수신 SNR γ̄·|ĥ₀ + h̃₀ + Σ x_ℓ (ĥ_ℓ + h̃_ℓ) e^{jφ_ℓ}|².

    Args:
        ch: 채널 추정치
        x: 활성화 벡터 (L,)
        h_err: 오차 벡터 (L+1,) 또는 배치 (S, L+1)
        phases: 적용된 위상 (L,)
        gamma_bar: γ̄

    Returns:
        스칼라 또는 (S,) 배열
    """
    arr = _as_activation(x, ch.L)
    h_err = np.asarray(h_err, dtype=np.complex128)
    if h_err.shape[-1] != ch.L + 1:
        raise IRSParameterError(f"h_err must have trailing length {ch.L + 1}")
    rotation = arr * np.exp(1j * np.asarray(phases, dtype=float))
    h = ch.coeffs + h_err
    total = h[..., 0] + (h[..., 1:] * rotation).sum(axis=-1)
    return _as_scalar(gamma_bar * np.abs(total) ** 2)


def p_on_for_bits(b: int) -> float:
    """
    이산 위상 소자의 켜짐 전력 P_on(b) = (1.8b − 3) mW (와트로 반환).

    Raises:
        IRSParameterError: b < 2인 경우
    """
    if b < 2:
        raise IRSParameterError(f"P_on(b) rule requires b >= 2, got {b}")
    return mw_to_watt(P_ON_SLOPE_MW * b + P_ON_INTERCEPT_MW)


def total_power(pm: PowerModel, x, L: int):
    """
    전체 소비 전력 P_fix + L·P_off + (P_on − P_off)·Σx (와트).

    Args:
        pm: 전력 모델
        x: 활성화 벡터 또는 배치 (분수 값 허용)
        L: 소자 수
    """
    if isinstance(x, ActivationVector):
        x = x.bits
    arr = np.asarray(x, dtype=float)
    return _as_scalar(pm.base_power(L) + pm.delta_p * arr.sum(axis=-1))


def worst_case_ee(
    ch: ChannelEstimate,
    x,
    delta: float,
    mode: PhaseMode,
    gamma_bar: float,
    pm: PowerModel,
    phases: PhaseShiftConfig | None = None,
):
    """
    최악 에너지 효율 log₂(1 + γ_worst)/P_tot (bits/s/Hz/W).

    Raises:
        IRSAssumptionError: worst_case_snr에서 전파
    """
    gamma = np.asarray(worst_case_snr(ch, x, delta, mode, gamma_bar, phases))
    return _as_scalar(np.log2(1.0 + gamma) / np.asarray(total_power(pm, x, ch.L)))


def feasibility(
    ch: ChannelEstimate,
    delta: float,
    gamma_min: float,
    mode: PhaseMode,
    gamma_bar: float,
    phases: PhaseShiftConfig | None = None,
) -> FeasibilityVerdict:
    """
    모든 소자를 켠 벡터가 SNR 하한을 만족하는지 판정합니다.

    연속 모드와 b ≥ 3에서는 필요충분 조건이고, b = 2에서는 충분 조건입니다.
    """
    gamma_all_on = worst_case_snr(ch, np.ones(ch.L), delta, mode, gamma_bar, phases)
    exact = mode.is_continuous or mode.bits >= 3
    return FeasibilityVerdict(feasible=bool(gamma_all_on >= gamma_min), exact=exact)


def upper_bound_snr(coeffs: ExpansionCoeffs, x, gamma_bar: float):
    """
    최악 SNR 상한 γ̂ = γ̄(ξ + Σζ'_ℓx_ℓ + Σ_{n<m} μ_nm·min(x_n, x_m)).

    x는 [0, 1] 범위의 분수 값도 허용합니다.
    """
    if isinstance(x, ActivationVector):
        x = x.bits
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1] != coeffs.L:
        raise IRSParameterError(f"Activation must have trailing length {coeffs.L}")
    inner = coeffs.xi + (arr * coeffs.zeta_prime).sum(axis=-1) + pairwise_min_sum(coeffs.mu, arr)
    return _as_scalar(gamma_bar * inner)


def upper_bound_ee(coeffs: ExpansionCoeffs, x, gamma_bar: float, pm: PowerModel):
    """상한 에너지 효율 ÊE = log₂(1 + γ̂)/P_tot."""
    gamma_hat = np.asarray(upper_bound_snr(coeffs, x, gamma_bar))
    return _as_scalar(np.log2(1.0 + gamma_hat) / np.asarray(total_power(pm, x, coeffs.L)))
