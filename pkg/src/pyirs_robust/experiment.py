"""시드 기반 몬테카를로 스윕과 단일 인스턴스 풀이."""

import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from .channel_model import ChannelEstimate, derive_seed, sample_channel
from .config import ExperimentConfig, SystemParams
from .constants import CSV_COLUMNS, DEFAULT_L, DEFAULT_NU, DEFAULT_TAU
from .crbm_optimizer import solve_crbm
from .dp_optimizer import solve_dp
from .exceptions import IRSError, IRSParameterError
from .oracles import exhaustive_search
from .phase_control import PhaseMode, configure_phases
from .solution import Solution, SolveStatus
from .timing import MedianTimer
from .worst_case import (
    ActivationVector,
    PowerModel,
    f_c,
    f_d,
    total_power,
    worst_case_ee,
    worst_case_snr,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrialInstance:
    """시행 하나의 채널과 파생 파라미터."""

    ch: ChannelEstimate
    delta: float
    gamma_min: float
    gamma_bar: float
    pm: PowerModel
    mode: PhaseMode


@dataclass(frozen=True)
class SweepRecord:
    """(축 값, 알고리즘)별 집계 결과."""

    axis: str
    axis_value: float
    algorithm: str
    mode: str
    tau: float
    nu: float
    bits: int | None
    trials: int
    mean_ee: float
    std_ee: float
    mean_time_s: float
    feasible_rate: float
    mean_gap_bound: float

    def to_row(self) -> dict[str, str]:
        """CSV 행 (고정 열 순서, 정수 축은 정수로 표기)."""
        row = asdict(self)
        if self.axis in ("L", "b"):
            row["axis_value"] = int(self.axis_value)
        row["bits"] = "" if self.bits is None else int(self.bits)
        return {key: _format(row[key]) for key in CSV_COLUMNS}


def _format(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def solve_all_on(
    ch: ChannelEstimate,
    delta: float,
    gamma_min: float,
    gamma_bar: float,
    pm: PowerModel,
    mode: PhaseMode,
) -> Solution:
    """모든 소자를 켜는 기준 해 x = 1_L."""
    x = ActivationVector.ones(ch.L)
    gamma = worst_case_snr(ch, x, delta, mode, gamma_bar)
    if gamma < gamma_min:
        return Solution.infeasible("all_on")
    return Solution(
        status=SolveStatus.FEASIBLE,
        ee=float(worst_case_ee(ch, x, delta, mode, gamma_bar, pm)),
        x=x,
        m_star=ch.L,
        gap_bound=0.0,
        algorithm="all_on",
    )


def run_algorithm(algorithm: str, inst: TrialInstance, threads: int = 1) -> Solution:
    """
    알고리즘 이름으로 풀이를 실행합니다.

    Raises:
        IRSParameterError: 알 수 없는 알고리즘
    """
    args = (inst.ch, inst.delta, inst.gamma_min, inst.gamma_bar, inst.pm)
    if algorithm == "dp":
        if not inst.mode.is_continuous:
            raise IRSParameterError("dp solves the continuous-phase problem")
        return solve_dp(*args)
    if algorithm == "crbm":
        if inst.mode.is_continuous:
            raise IRSParameterError("crbm solves the discrete-phase problem")
        return solve_crbm(*args, inst.mode.bits)
    if algorithm == "exhaustive":
        return exhaustive_search(*args, inst.mode, threads=threads)
    if algorithm == "all_on":
        return solve_all_on(*args, inst.mode)
    raise IRSParameterError(f"Unknown algorithm: {algorithm}")


def make_instance(
    ch: ChannelEstimate,
    mode: PhaseMode,
    tau: float,
    nu: float,
    system: SystemParams,
    gamma_min: float | None = None,
) -> TrialInstance:
    """
    채널로부터 δ = τ·α̂_min, γ_min = ν·γ_worst(1_L; α̂_min)을 정합니다.

    gamma_min을 직접 주면 ν 규칙 대신 그 값을 씁니다.
    """
    gamma_bar = system.gamma_bar
    if gamma_min is None:
        floor = worst_case_snr(ch, np.ones(ch.L), ch.alpha_min, mode, gamma_bar)
        gamma_min = nu * float(floor)
    return TrialInstance(
        ch=ch,
        delta=tau * ch.alpha_min,
        gamma_min=float(gamma_min),
        gamma_bar=gamma_bar,
        pm=system.power_model(mode),
        mode=mode,
    )


def _point_settings(cfg: ExperimentConfig, value: float) -> dict:
    # 축 값 하나에 대한 (L, tau, nu, bits, system)
    settings = {
        "L": cfg.L,
        "tau": cfg.tau,
        "nu": cfg.nu,
        "bits": cfg.bits,
        "system": cfg.system,
    }
    if cfg.axis == "L":
        settings["L"] = int(value)
    elif cfg.axis == "tau":
        settings["tau"] = value
    elif cfg.axis == "nu":
        settings["nu"] = value
    elif cfg.axis == "b":
        settings["bits"] = int(value)
    elif cfg.axis == "power":
        settings["system"] = replace(cfg.system, power_dbm=value)
    return settings


def _run_trial(cfg: ExperimentConfig, settings: dict, trial: int) -> dict[str, tuple]:
    mode = PhaseMode.continuous() if cfg.effective_mode == "c" else \
        PhaseMode.discrete(settings["bits"])
    system = settings["system"]
    # 채널 시드는 (기본 시드, L, 시행)만으로 정해져 L 이외의 축 값끼리 같은 채널을 비교
    seed = derive_seed(cfg.seed, settings["L"], trial)
    ch = sample_channel(system.geometry(), system.fading(), settings["L"], system.beta, seed)
    inst = make_instance(ch, mode, settings["tau"], settings["nu"], system)

    outcomes = {}
    for algorithm in cfg.algorithms:
        timer = MedianTimer()
        try:
            if cfg.record_timing:
                sol, elapsed = timer.measure(run_algorithm, algorithm, inst)
            else:
                sol, elapsed = run_algorithm(algorithm, inst), 0.0
        except IRSError as e:
            logger.warning(f"Trial {trial} ({algorithm}, L={settings['L']}) failed: {e}")
            outcomes[algorithm] = (None, 0.0)
            continue
        outcomes[algorithm] = (sol, elapsed)
    return outcomes


def _aggregate(cfg: ExperimentConfig, value: float, settings: dict, algorithm: str,
               outcomes: list[tuple]) -> SweepRecord:
    ees = [sol.ee_value for sol, _ in outcomes if sol is not None and sol.is_feasible]
    gaps = [sol.gap_bound for sol, _ in outcomes if sol is not None and sol.is_feasible]
    times = [elapsed for _, elapsed in outcomes]
    mode = cfg.effective_mode
    return SweepRecord(
        axis=cfg.axis,
        axis_value=float(value),
        algorithm=algorithm,
        mode=mode,
        tau=float(settings["tau"]),
        nu=float(settings["nu"]),
        bits=None if mode == "c" else int(settings["bits"]),
        trials=cfg.trials,
        mean_ee=float(np.mean(ees)) if ees else float("nan"),
        std_ee=float(np.std(ees)) if ees else float("nan"),
        mean_time_s=float(np.mean(times)) if cfg.record_timing else 0.0,
        feasible_rate=len(ees) / cfg.trials,
        mean_gap_bound=float(np.mean(gaps)) if gaps else 0.0,
    )


def write_csv(records: list[SweepRecord], stream) -> None:
    """레코드를 CSV (LF 줄바꿈)로 씁니다."""
    writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow(record.to_row())


def run_sweep(cfg: ExperimentConfig) -> list[SweepRecord]:
    """
    설정된 축 값마다 trials개 시행을 실행하고 알고리즘별로 집계합니다.

    시행은 cfg.threads개 스레드로 병렬 실행되지만 결과는 시행 순서대로
    모으므로 스레드 수와 무관하게 같은 CSV가 만들어집니다.
    개별 시행의 솔버 오류는 경고로 기록되고 실현 불가능으로 집계됩니다.

    Args:
        cfg: 실험 설정

    Returns:
        (축 값 × 알고리즘)별 SweepRecord 리스트
    """
    records: list[SweepRecord] = []
    for value in cfg.values:
        settings = _point_settings(cfg, value)
        logger.info(f"Sweep {cfg.axis}={value:g}: {cfg.trials} trials, "
                    f"algorithms={','.join(cfg.algorithms)}")
        trials = range(cfg.trials)
        if cfg.threads > 1:
            with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
                per_trial = list(pool.map(lambda k: _run_trial(cfg, settings, k), trials))
        else:
            per_trial = [_run_trial(cfg, settings, k) for k in trials]

        for algorithm in cfg.algorithms:
            outcomes = [result[algorithm] for result in per_trial]
            records.append(_aggregate(cfg, value, settings, algorithm, outcomes))

    if cfg.out is not None:
        with open(cfg.out, "w", encoding="utf-8", newline="") as f:
            write_csv(records, f)
        logger.info(f"Wrote {len(records)} records to {cfg.out}")
    return records


def format_report(sol: Solution, inst: TrialInstance) -> str:
    """풀이 결과의 사람이 읽을 수 있는 보고서."""
    lines = [
        f"algorithm: {sol.algorithm}",
        f"mode: {inst.mode.label}" + ("" if inst.mode.is_continuous else f" (b={inst.mode.bits})"),
        f"L: {inst.ch.L}",
        f"delta: {inst.delta:.6e}",
        f"gamma_min: {inst.gamma_min:.6e}",
        f"status: {sol.status.value}",
    ]
    if not sol.is_feasible:
        return "\n".join(lines) + "\n"

    x = sol.x
    if inst.mode.is_continuous:
        lines.append(f"f_c: {f_c(inst.ch, x):.6e}")
    else:
        cfg = configure_phases(inst.ch, inst.mode)
        lines.append(f"f_d: {f_d(inst.ch, x, cfg.errors):.6e}")
    gamma = worst_case_snr(inst.ch, x, inst.delta, inst.mode, inst.gamma_bar)
    lines += [
        f"gamma_worst: {gamma:.6e}",
        f"p_tot_w: {total_power(inst.pm, x, inst.ch.L):.6e}",
        f"ee: {sol.ee_value:.6e}",
        f"m_star: {sol.m_star}",
        f"x: {''.join(str(int(b)) for b in x.bits)}",
        f"gap_bound: {sol.gap_bound:.6e}",
    ]
    return "\n".join(lines) + "\n"


def solve_single(
    algorithm: str,
    mode: PhaseMode,
    seed: int | None = None,
    instance: ChannelEstimate | None = None,
    L: int = DEFAULT_L,
    tau: float = DEFAULT_TAU,
    nu: float = DEFAULT_NU,
    system: SystemParams | None = None,
    gamma_min: float | None = None,
) -> tuple[Solution, str]:
    """
    인스턴스 하나를 풀고 (Solution, 보고서)를 반환합니다.

    instance가 없으면 seed로 채널을 생성합니다.

    Raises:
        IRSParameterError: instance와 seed가 모두 없는 경우
    """
    system = system or SystemParams()
    if instance is None:
        if seed is None:
            raise IRSParameterError("solve_single needs a seed or an instance")
        instance = sample_channel(system.geometry(), system.fading(), L, system.beta,
                                  derive_seed(seed, L, 0))
    inst = make_instance(instance, mode, tau, nu, system, gamma_min=gamma_min)
    sol = run_algorithm(algorithm, inst)
    return sol, format_report(sol, inst)


def records_to_csv(records: list[SweepRecord]) -> str:
    """레코드를 CSV 문자열로 변환합니다."""
    buffer = io.StringIO()
    write_csv(records, buffer)
    return buffer.getvalue()
