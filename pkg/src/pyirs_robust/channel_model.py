"""재현 가능한 IRS 채널 추정치 생성 (경로 손실 + 라이시안 페이딩)."""

import json
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .constants import (
    DEFAULT_EXPONENTS,
    DEFAULT_IRS_POS,
    DEFAULT_PATHLOSS_REF,
    DEFAULT_REF_DISTANCES,
    DEFAULT_RICIAN_DB,
    DEFAULT_RX_POS,
    DEFAULT_SPACING_OVER_WAVELENGTH,
    DEFAULT_TX_POS,
    PURE_LOS_KAPPA,
)
from .converters import db_to_linear, wrap_phase
from .exceptions import IRSParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScenarioGeometry:
    """송신기, 수신기, IRS 위치 (미터)와 소자 간격 d/λ."""

    tx_pos: tuple[float, float, float] = DEFAULT_TX_POS
    rx_pos: tuple[float, float, float] = DEFAULT_RX_POS
    irs_pos: tuple[float, float, float] = DEFAULT_IRS_POS
    element_spacing_over_wavelength: float = DEFAULT_SPACING_OVER_WAVELENGTH

    def __post_init__(self):
        for name in ("tx_pos", "rx_pos", "irs_pos"):
            pos = tuple(float(v) for v in getattr(self, name))
            if len(pos) != 3:
                raise IRSParameterError(f"{name} must be a 3-vector, got {pos}")
            object.__setattr__(self, name, pos)
        if not self.element_spacing_over_wavelength > 0:
            raise IRSParameterError(
                "element_spacing_over_wavelength must be positive, "
                f"got {self.element_spacing_over_wavelength}"
            )
        for label, dist in self.distances().items():
            if not dist > 0:
                raise IRSParameterError(f"Coincident positions: {label} distance is {dist}")

    def distances(self) -> dict[str, float]:
        """직접 링크 d0, Tx→IRS du, IRS→Rx dv 거리."""
        tx, rx, irs = (np.asarray(p) for p in (self.tx_pos, self.rx_pos, self.irs_pos))
        return {
            "d0": float(np.linalg.norm(rx - tx)),
            "du": float(np.linalg.norm(irs - tx)),
            "dv": float(np.linalg.norm(rx - irs)),
        }


@dataclass(frozen=True)
class FadingParams:
    """
    경로 손실과 라이시안 페이딩 파라미터.

    rician_factors는 선형 배율입니다. dB 입력은 ``from_db``를 사용합니다.
    aoa_aod가 None이면 ``sample_channel``이 배치로부터 각도를 계산합니다.
    """

    pathloss_ref: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_PATHLOSS_REF))
    ref_distances: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_REF_DISTANCES))
    exponents: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_EXPONENTS))
    rician_factors: dict[str, float] = field(
        default_factory=lambda: {
            "ku": db_to_linear(DEFAULT_RICIAN_DB),
            "kv": db_to_linear(DEFAULT_RICIAN_DB),
        }
    )
    aoa_aod: dict[str, float] | None = None

    def __post_init__(self):
        for key in ("c0", "cu", "cv"):
            if not self.pathloss_ref.get(key, 0.0) > 0:
                raise IRSParameterError(f"Reference path loss {key} must be positive")
        for key in ("d0", "du", "dv"):
            if not self.ref_distances.get(key, 0.0) > 0:
                raise IRSParameterError(f"Reference distance {key} must be positive")
        for key in ("a0", "au", "av"):
            if not self.exponents.get(key, 0.0) >= 1:
                raise IRSParameterError(f"Path-loss exponent {key} must be >= 1")
        for key in ("ku", "kv"):
            if not self.rician_factors.get(key, -1.0) >= 0:
                raise IRSParameterError(f"Rician factor {key} must be >= 0")
        if self.aoa_aod is not None:
            missing = {"theta_a", "phi_a", "theta_d", "phi_d"} - set(self.aoa_aod)
            if missing:
                raise IRSParameterError(f"Missing angles: {sorted(missing)}")

    @classmethod
    def from_db(cls, ku_db: float = DEFAULT_RICIAN_DB, kv_db: float = DEFAULT_RICIAN_DB,
                **kwargs) -> "FadingParams":
        """라이시안 계수를 dB로 받아 생성합니다."""
        factors = {"ku": db_to_linear(ku_db), "kv": db_to_linear(kv_db)}
        return cls(rician_factors=factors, **kwargs)


class ChannelEstimate:
    """
    추정 채널 ĥ₀ (직접 링크)와 ĥ₁..ĥ_L (반사 링크)의 극좌표 표현.

    coeffs[0]이 직접 링크, coeffs[1:]이 IRS 소자별 합성 채널입니다.
    """

    def __init__(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=np.complex128).reshape(-1)
        if coeffs.size < 2:
            raise IRSParameterError("ChannelEstimate needs a direct link and at least one element")
        if not np.all(np.isfinite(coeffs)):
            raise IRSParameterError("Channel coefficients must be finite")
        coeffs.setflags(write=False)
        self.coeffs = coeffs
        magnitudes = np.abs(coeffs)
        phases = wrap_phase(np.angle(coeffs))
        magnitudes.setflags(write=False)
        phases.setflags(write=False)
        self.magnitudes = magnitudes
        self.phases = phases

    @classmethod
    def from_coeffs(cls, direct: complex, reflected) -> "ChannelEstimate":
        """직접 링크 ĥ₀와 반사 링크 ĥ₁..ĥ_L를 따로 받아 생성합니다."""
        reflected = np.asarray(reflected, dtype=np.complex128).reshape(-1)
        return cls(np.concatenate(([complex(direct)], reflected)))

    @classmethod
    def from_polar(cls, magnitudes, phases) -> "ChannelEstimate":
        """크기 α̂와 위상 θ̂로부터 생성합니다."""
        magnitudes = np.asarray(magnitudes, dtype=float)
        phases = np.asarray(phases, dtype=float)
        if magnitudes.shape != phases.shape:
            raise IRSParameterError("magnitudes and phases must have the same shape")
        if np.any(magnitudes < 0):
            raise IRSParameterError("magnitudes must be nonnegative")
        estimate = cls(magnitudes * np.exp(1j * phases))
        # 입력한 극좌표를 그대로 보존 (재구성 오차 방지)
        mags = magnitudes.copy()
        phs = wrap_phase(phases)
        mags.setflags(write=False)
        phs.setflags(write=False)
        estimate.magnitudes = mags
        estimate.phases = phs
        return estimate

    @property
    def L(self) -> int:
        """IRS 소자 수."""
        return self.coeffs.size - 1

    @property
    def alpha0(self) -> float:
        return float(self.magnitudes[0])

    @property
    def alphas(self) -> np.ndarray:
        """소자별 크기 α̂₁..α̂_L."""
        return self.magnitudes[1:]

    @cached_property
    def alpha_min(self) -> float:
        """α̂₀..α̂_L 중 최솟값."""
        return float(self.magnitudes.min())

    def to_json(self, path: str | Path | None = None) -> str:
        """극좌표 형식 JSON으로 직렬화하고 경로가 주어지면 파일에 저장합니다."""
        payload = json.dumps(
            {
                "magnitudes": self.magnitudes.tolist(),
                "phases": self.phases.tolist(),
            },
            indent=2,
        )
        if path is not None:
            Path(path).write_text(payload + "\n", encoding="utf-8")
        return payload

    @classmethod
    def from_json(cls, source: str | Path) -> "ChannelEstimate":
        """
        JSON 파일 또는 문자열로부터 채널 추정치를 읽습니다.

        Raises:
            IRSParameterError: 형식이 잘못된 경우
        """
        text = str(source)
        candidate = Path(text)
        if not text.lstrip().startswith("{") and candidate.exists():
            text = candidate.read_text(encoding="utf-8")
        try:
            data = json.loads(text)
            return cls.from_polar(data["magnitudes"], data["phases"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise IRSParameterError(f"Invalid channel instance: {e}") from e

    def __repr__(self) -> str:
        return f"ChannelEstimate(L={self.L}, alpha_min={self.alpha_min:.3e})"


def default_geometry() -> ScenarioGeometry:
    """기본 시뮬레이션 배치를 반환합니다."""
    return ScenarioGeometry()


def default_fading() -> FadingParams:
    """기본 시뮬레이션 페이딩 파라미터를 반환합니다."""
    return FadingParams()


def _spherical_angles(direction: np.ndarray) -> tuple[float, float]:
    # 경사각: z축 기준, 방위각: xy 평면에서 x축 기준 [0, 2π)
    norm = float(np.linalg.norm(direction))
    inclination = float(np.arccos(np.clip(direction[2] / norm, -1.0, 1.0)))
    azimuth = float(wrap_phase(np.arctan2(direction[1], direction[0])))
    return inclination, azimuth


def angles_from_geometry(geom: ScenarioGeometry) -> dict[str, float]:
    """
    배치로부터 도래각(AoA)과 출발각(AoD)을 계산합니다.

    AoA는 Tx→IRS 방향 벡터 (irs − tx), AoD는 IRS→Rx 방향 벡터 (rx − irs)로
    계산합니다. 경사각은 z축으로부터, 방위각은 xy 평면에서 x축으로부터
    측정합니다.

    Args:
        geom: 시나리오 배치

    Returns:
        "theta_a", "phi_a", "theta_d", "phi_d" 키의 각도 딕셔너리 (라디안)

    Raises:
        IRSParameterError: 위치가 겹치는 경우
    """
    tx, rx, irs = (np.asarray(p, dtype=float) for p in (geom.tx_pos, geom.rx_pos, geom.irs_pos))
    to_irs = irs - tx
    to_rx = rx - irs
    if np.linalg.norm(to_irs) == 0 or np.linalg.norm(to_rx) == 0:
        raise IRSParameterError("Coincident positions: angles are undefined")
    theta_a, phi_a = _spherical_angles(to_irs)
    theta_d, phi_d = _spherical_angles(to_rx)
    return {"theta_a": theta_a, "phi_a": phi_a, "theta_d": theta_d, "phi_d": phi_d}


def path_losses(geom: ScenarioGeometry, fading: FadingParams) -> tuple[float, float, float]:
    """
    링크별 평균 경로 이득 ϱ = c·(d/d_ref)^(−a)를 계산합니다.

    Returns:
        (ϱ₀, ϱ_u, ϱ_v)
    """
    dist = geom.distances()
    ref = fading.pathloss_ref
    ref_d = fading.ref_distances
    exp = fading.exponents
    rho0 = ref["c0"] * (dist["d0"] / ref_d["d0"]) ** (-exp["a0"])
    rho_u = ref["cu"] * (dist["du"] / ref_d["du"]) ** (-exp["au"])
    rho_v = ref["cv"] * (dist["dv"] / ref_d["dv"]) ** (-exp["av"])
    return float(rho0), float(rho_u), float(rho_v)


def steering_vector(L: int, spacing: float, inclination: float, azimuth: float) -> np.ndarray:
    """균일 선형 배열의 LOS 조향 벡터 exp(j2π(d/λ)(ℓ−1)sin(ϑ)cos(φ))."""
    index = np.arange(L, dtype=float)
    return np.exp(1j * 2.0 * np.pi * spacing * index * np.sin(inclination) * np.cos(azimuth))


def _rician_weights(kappa: float) -> tuple[float, float]:
    if kappa >= PURE_LOS_KAPPA:
        return 1.0, 0.0
    return float(np.sqrt(kappa / (1.0 + kappa))), float(np.sqrt(1.0 / (1.0 + kappa)))


def _complex_gaussian(rng: np.random.Generator, size: int) -> np.ndarray:
    # 단위 분산 원형 복소 가우시안
    draws = rng.standard_normal((size, 2))
    return (draws[:, 0] + 1j * draws[:, 1]) / np.sqrt(2.0)


def derive_seed(base_seed: int, *keys: int) -> int:
    """
    (기본 시드, 시행 번호, ...)로부터 64비트 하위 시드를 만듭니다.

    같은 키는 항상 같은 시드를 주며 시행 순서와 무관합니다.
    """
    entropy = [int(base_seed) & 0xFFFFFFFFFFFFFFFF] + [int(k) & 0xFFFFFFFFFFFFFFFF for k in keys]
    state = np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)
    return int(state[0])


def make_rng(seed: int) -> np.random.Generator:
    """카운터 기반 Philox 생성기를 만듭니다."""
    return np.random.Generator(np.random.Philox(int(seed) & 0xFFFFFFFFFFFFFFFF))


def sample_channel(
    geom: ScenarioGeometry,
    fading: FadingParams,
    L: int,
    betas,
    seed: int,
) -> ChannelEstimate:
    """
    시드 기반 채널 추정치 하나를 생성합니다.

    ĥ₀ ~ CN(0, ϱ₀), ĥ_ℓ = β_ℓ·û_ℓ·v̂_ℓ이며 û, v̂는 LOS 조향 성분과
    단위 분산 NLOS 성분을 라이시안 가중치로 섞은 뒤 √ϱ로 스케일합니다.
    난수는 ĥ₀, û NLOS, v̂ NLOS 순서로 뽑습니다.

    Args:
        geom: 시나리오 배치
        fading: 페이딩 파라미터
        L: IRS 소자 수
        betas: 길이 L의 반사 진폭 (스칼라면 모든 소자에 적용)
        seed: 64비트 시드

    Returns:
        ChannelEstimate

    Raises:
        IRSParameterError: L < 1 또는 betas가 [0, 1] 밖이거나 길이가 맞지 않는 경우
    """
    if L < 1:
        raise IRSParameterError(f"L must be >= 1, got {L}")
    betas = np.asarray(betas, dtype=float)
    if betas.ndim == 0:
        betas = np.full(L, float(betas))
    if betas.shape != (L,):
        raise IRSParameterError(f"betas must have length {L}, got {betas.shape}")
    if np.any(betas < 0) or np.any(betas > 1):
        raise IRSParameterError("betas must lie in [0, 1]")

    h0, u, v = sample_links(geom, fading, L, seed)
    cascaded = betas * u * v

    logger.debug(f"Sampled channel L={L} seed={seed}")
    return ChannelEstimate(np.concatenate(([h0], cascaded)))


def sample_links(
    geom: ScenarioGeometry,
    fading: FadingParams,
    L: int,
    seed: int,
) -> tuple[complex, np.ndarray, np.ndarray]:
    """
    직접 링크 ĥ₀와 소자별 Tx→IRS û, IRS→Rx v̂ 계수를 생성합니다.

    Returns:
        (ĥ₀, û, v̂)
    """
    angles = fading.aoa_aod or angles_from_geometry(geom)
    rho0, rho_u, rho_v = path_losses(geom, fading)
    spacing = geom.element_spacing_over_wavelength

    rng = make_rng(seed)
    h0 = complex(np.sqrt(rho0) * _complex_gaussian(rng, 1)[0])
    u_nlos = _complex_gaussian(rng, L)
    v_nlos = _complex_gaussian(rng, L)

    los_u, nlos_u = _rician_weights(fading.rician_factors["ku"])
    los_v, nlos_v = _rician_weights(fading.rician_factors["kv"])
    u = np.sqrt(rho_u) * (
        los_u * steering_vector(L, spacing, angles["theta_a"], angles["phi_a"]) + nlos_u * u_nlos
    )
    v = np.sqrt(rho_v) * (
        los_v * steering_vector(L, spacing, angles["theta_d"], angles["phi_d"]) + nlos_v * v_nlos
    )
    return h0, u, v
