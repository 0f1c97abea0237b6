"""실험 설정: 시스템 파라미터, 스윕 설정, 설정 파일 로딩."""

import configparser
import logging
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .channel_model import FadingParams, ScenarioGeometry
from .constants import (
    ALGORITHMS,
    DEFAULT_BETA,
    DEFAULT_BITS,
    DEFAULT_ETA,
    DEFAULT_L,
    DEFAULT_NOISE_DBM,
    DEFAULT_NU,
    DEFAULT_P_OFF_MW,
    DEFAULT_P_ON_CONTINUOUS_MW,
    DEFAULT_P_STATIC_MW,
    DEFAULT_RICIAN_DB,
    DEFAULT_SEED,
    DEFAULT_SPACING_OVER_WAVELENGTH,
    DEFAULT_TAU,
    DEFAULT_TRIALS,
    DEFAULT_TX_POWER_DBM,
    EXHAUSTIVE_MAX_L,
    SWEEP_AXES,
    THREADS_ENV_VAR,
)
from .converters import convert_section, dbm_to_watt, mw_to_watt
from .exceptions import IRSConfigError, IRSError
from .phase_control import PhaseMode
from .worst_case import PowerModel, p_on_for_bits

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SystemParams:
    """
    송신 전력, 잡음 전력, 반사 진폭, 전력 모델 상수.

    전력 값은 설정 파일과 같은 단위 (dBm, mW)로 보관합니다.
    """

    power_dbm: float = DEFAULT_TX_POWER_DBM
    noise_dbm: float = DEFAULT_NOISE_DBM
    beta: float = DEFAULT_BETA
    eta: float = DEFAULT_ETA
    p_static_mw: float = DEFAULT_P_STATIC_MW
    p_on_mw: float = DEFAULT_P_ON_CONTINUOUS_MW
    p_off_mw: float = DEFAULT_P_OFF_MW
    rician_db: float = DEFAULT_RICIAN_DB
    spacing: float = DEFAULT_SPACING_OVER_WAVELENGTH

    @property
    def gamma_bar(self) -> float:
        """γ̄ = p/σ² (dBm → 와트 변환 후)."""
        return dbm_to_watt(self.power_dbm) / dbm_to_watt(self.noise_dbm)

    def power_model(self, mode: PhaseMode) -> PowerModel:
        """
        모드에 맞는 전력 모델.

        연속 모드는 p_on_mw, 이산 모드는 P_on(b) = (1.8b − 3) mW를 씁니다.
        """
        p_on = mw_to_watt(self.p_on_mw) if mode.is_continuous else p_on_for_bits(mode.bits)
        return PowerModel(
            p=dbm_to_watt(self.power_dbm),
            eta=self.eta,
            p_static=mw_to_watt(self.p_static_mw),
            p_on=p_on,
            p_off=mw_to_watt(self.p_off_mw),
        )

    def geometry(self) -> ScenarioGeometry:
        return ScenarioGeometry(element_spacing_over_wavelength=self.spacing)

    def fading(self) -> FadingParams:
        return FadingParams.from_db(self.rician_db, self.rician_db)


def _default_threads() -> int:
    value = os.getenv(THREADS_ENV_VAR)
    if not value:
        return 1
    try:
        return max(1, int(value))
    except ValueError as e:
        raise IRSConfigError(f"{THREADS_ENV_VAR} must be an integer, got {value!r}") from e


@dataclass(frozen=True)
class ExperimentConfig:
    """
    몬테카를로 스윕 설정.

    δ = τ·α̂_min, γ_min = ν·γ_worst(1_L; α̂_min)로 시행마다 정해집니다.
    """

    axis: str = "L"
    values: tuple[float, ...] = (10.0, 20.0, 30.0, 40.0, 50.0)
    trials: int = DEFAULT_TRIALS
    tau: float = DEFAULT_TAU
    nu: float = DEFAULT_NU
    mode: str = "c"
    bits: int = DEFAULT_BITS
    algorithms: tuple[str, ...] = ("dp", "all_on")
    seed: int = DEFAULT_SEED
    L: int = DEFAULT_L
    out: str | None = None
    threads: int = field(default_factory=_default_threads)
    record_timing: bool = True
    system: SystemParams = field(default_factory=SystemParams)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "algorithms", tuple(a.lower() for a in self.algorithms))
        self.validate()

    def validate(self) -> None:
        """
        설정 값을 검증합니다.

        Raises:
            IRSConfigError: 설정 값이 잘못된 경우
        """
        if self.axis not in SWEEP_AXES:
            raise IRSConfigError(f"Unknown sweep axis: {self.axis}. Expected one of {SWEEP_AXES}")
        if not self.values:
            raise IRSConfigError("Sweep needs at least one value")
        if self.trials < 1:
            raise IRSConfigError(f"trials must be >= 1, got {self.trials}")
        if self.threads < 1:
            raise IRSConfigError(f"threads must be >= 1, got {self.threads}")
        if self.mode not in ("c", "d"):
            raise IRSConfigError(f"mode must be 'c' or 'd', got {self.mode}")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown or not self.algorithms:
            raise IRSConfigError(f"Unknown algorithms: {sorted(unknown)}. Expected {ALGORITHMS}")

        taus = self.values if self.axis == "tau" else (self.tau,)
        nus = self.values if self.axis == "nu" else (self.nu,)
        if any(not 0.0 <= v <= 1.0 for v in (*taus, *nus)):
            raise IRSConfigError("tau and nu must lie in [0, 1]")

        lengths = self.values if self.axis == "L" else (self.L,)
        if any(v < 1 or v != int(v) for v in lengths):
            raise IRSConfigError(f"L values must be positive integers, got {lengths}")
        if "exhaustive" in self.algorithms and max(lengths) > EXHAUSTIVE_MAX_L:
            raise IRSConfigError(f"exhaustive search requires every L <= {EXHAUSTIVE_MAX_L}")

        discrete = self.mode == "d" or self.axis == "b"
        bit_values = self.values if self.axis == "b" else (self.bits,)
        if discrete and any(v < 2 or v != int(v) for v in bit_values):
            raise IRSConfigError(f"discrete mode needs integer bits >= 2, got {bit_values}")
        if discrete and "dp" in self.algorithms:
            raise IRSConfigError("dp solves the continuous-phase problem; use mode 'c'")
        if not discrete and "crbm" in self.algorithms:
            raise IRSConfigError("crbm solves the discrete-phase problem; use mode 'd'")

        try:
            self.system.power_model(PhaseMode.continuous())
            self.system.geometry()
            self.system.fading()
        except IRSError as e:
            raise IRSConfigError(f"Invalid scenario: {e}") from e

    @property
    def effective_mode(self) -> str:
        return "d" if self.axis == "b" else self.mode


_EXPERIMENT_KEYS = {f.name for f in fields(ExperimentConfig)} - {"system"}
_SCENARIO_KEYS = {f.name for f in fields(SystemParams)}


def _rename(section: dict) -> dict:
    # 설정 파일 키는 소문자, 데이터클래스 필드는 "L"
    return {("L" if key == "l" else key): value for key, value in section.items()}


def load_config(path: str | Path | None = None, **overrides) -> ExperimentConfig:
    """
    INI 형식 설정 파일을 읽고 명령행 값으로 덮어씁니다.

    파일은 [experiment]와 [scenario] 섹션을 가지며 None인 override는 무시합니다.

    Args:
        path: 설정 파일 경로 (없으면 기본값)
        **overrides: ExperimentConfig 또는 SystemParams 필드 값

    Returns:
        ExperimentConfig

    Raises:
        IRSConfigError: 파일을 읽을 수 없거나 값이 잘못된 경우
    """
    experiment: dict = {}
    scenario: dict = {}

    if path is not None:
        parser = configparser.ConfigParser()
        try:
            with open(path, encoding="utf-8") as f:
                parser.read_file(f)
        except (OSError, configparser.Error) as e:
            raise IRSConfigError(f"Cannot read config {path}: {e}") from e

        for name in parser.sections():
            if name not in ("experiment", "scenario"):
                raise IRSConfigError(f"Unknown config section: [{name}]")
        try:
            if parser.has_section("experiment"):
                experiment = _rename(convert_section(dict(parser["experiment"])))
            if parser.has_section("scenario"):
                scenario = convert_section(dict(parser["scenario"]))
        except ValueError as e:
            raise IRSConfigError(f"Invalid value in {path}: {e}") from e

        unknown = (set(experiment) - _EXPERIMENT_KEYS) | (set(scenario) - _SCENARIO_KEYS)
        if unknown:
            raise IRSConfigError(f"Unknown config keys: {sorted(unknown)}")
        logger.debug(f"Loaded config {path}: {experiment} {scenario}")

    for key, value in overrides.items():
        if value is None:
            continue
        if key in _SCENARIO_KEYS:
            scenario[key] = value
        elif key in _EXPERIMENT_KEYS:
            experiment[key] = value
        else:
            raise IRSConfigError(f"Unknown override: {key}")

    experiment = {k: v for k, v in experiment.items() if v is not None}
    scenario = {k: v for k, v in scenario.items() if v is not None}
    try:
        system = replace(SystemParams(), **scenario)
        return ExperimentConfig(system=system, **experiment)
    except (TypeError, ValueError) as e:
        raise IRSConfigError(f"Invalid configuration: {e}") from e
