"""닫힌 형식과 최적화기를 기준 구현과 대조하는 검증 스위트."""

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from .channel_model import (
    ChannelEstimate,
    default_fading,
    default_geometry,
    derive_seed,
    make_rng,
    sample_channel,
)
from .config import SystemParams
from .converters import TWO_PI
from .crbm_optimizer import solve_crbm
from .dp_optimizer import solve_dp
from .exceptions import IRSError, IRSParameterError
from .experiment import make_instance
from .oracles import exhaustive_search, sampled_worst_snr
from .phase_control import (
    PhaseMode,
    closed_form_indices,
    configure_phases,
    decision_region_indices,
    quantization_errors,
    quantize_closed_form,
)
from .worst_case import f_c, f_d, received_snr, worst_case_error, worst_case_snr

logger = logging.getLogger(__name__)

SUITES = ("quantizer", "worstcase", "dp", "crbm", "monotonicity", "limits")

# crbm 스위트 격자: 전수 탐색과 대조 가능한 크기
CRBM_CHECK_LENGTHS = (4, 8, 12, 16)
CRBM_CHECK_TAUS = (0.0, 0.3, 0.6)
CRBM_CHECK_NUS = (0.0, 0.7)


@dataclass(frozen=True)
class CheckResult:
    """검증 항목 하나의 결과."""

    suite: str
    name: str
    passed: bool
    cases: int
    detail: str = ""


@dataclass
class VerificationSummary:
    """검증 결과 모음."""

    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]

    def report(self) -> str:
        lines = [
            f"[{'PASS' if r.passed else 'FAIL'}] {r.suite}/{r.name} ({r.cases} cases)"
            + (f": {r.detail}" if r.detail else "")
            for r in self.results
        ]
        lines.append(f"{len(self.results) - len(self.failures)}/{len(self.results)} checks passed")
        return "\n".join(lines) + "\n"


def _count(base: int, intensity: float) -> int:
    return max(1, int(round(base * intensity)))


def _instance(seed: int, key: int, index: int, L: int, beta: float = 0.9) -> ChannelEstimate:
    return sample_channel(default_geometry(), default_fading(), L, beta,
                          derive_seed(seed, key, index))


def _rel_close(a: float, b: float, rtol: float) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b), np.finfo(float).tiny)


def check_quantizer(seed: int, intensity: float) -> list[CheckResult]:
    rng = make_rng(derive_seed(seed, 1))
    n = _count(100_000, intensity)
    results = []
    mismatches = 0
    bound_violations = 0
    for b in range(1, 13):
        phases = rng.random(n) * TWO_PI
        differ = closed_form_indices(phases, b) != decision_region_indices(phases, b)
        mismatches += int(np.sum(differ))
        omega = TWO_PI / 2 ** b
        eps = quantization_errors(phases, quantize_closed_form(phases, b), b)
        bound_violations += int(np.sum((eps <= -omega / 2) | (eps > omega / 2)))
    results.append(CheckResult("quantizer", "closed_form_equals_regions", mismatches == 0, 12 * n,
                               f"{mismatches} mismatches" if mismatches else ""))
    results.append(CheckResult("quantizer", "error_bound", bound_violations == 0, 12 * n,
                               f"{bound_violations} violations" if bound_violations else ""))
    return results


def check_worstcase(seed: int, intensity: float) -> list[CheckResult]:
    rng = make_rng(derive_seed(seed, 2))
    n = _count(1000, intensity)
    samples = _count(10_000, intensity)
    system = SystemParams()
    gamma_bar = system.gamma_bar
    below = attain = forms = 0
    for i in range(n):
        L = int(rng.integers(1, 9))
        ch = _instance(seed, 2, i, L)
        tau = (0.1, 0.5, 1.0)[i % 3]
        bits = int(rng.integers(2, 11))
        mode = PhaseMode.continuous() if i % 2 == 0 else PhaseMode.discrete(bits)
        cfg = configure_phases(ch, mode)
        x = (rng.random(L) < 0.5).astype(float)
        delta = tau * ch.alpha_min
        closed = worst_case_snr(ch, x, delta, mode, gamma_bar, cfg)
        sampled = sampled_worst_snr(ch, x, cfg.discrete, delta, samples, derive_seed(seed, 2, i),
                                    gamma_bar, include_constructed=False)
        if sampled < closed * (1 - 1e-9):
            below += 1
        err = worst_case_error(ch, x, cfg.discrete, delta, mode)
        attained = received_snr(ch, x, err.coeffs, cfg.discrete, gamma_bar)
        if closed > 0 and not _rel_close(attained, closed, 1e-9):
            attain += 1
        values = [f_d(ch, x, cfg.errors, form) for form in ("magnitude", "quadratic",
                                                              "min-expansion")]
        if not all(_rel_close(v, values[0], 1e-9) for v in values):
            forms += 1
    return [
        CheckResult("worstcase", "sampled_not_below_closed_form", below == 0, n,
                    f"{below} violations" if below else ""),
        CheckResult("worstcase", "constructed_error_attains", attain == 0, n,
                    f"{attain} misses" if attain else ""),
        CheckResult("worstcase", "f_d_forms_agree", forms == 0, n,
                    f"{forms} disagreements" if forms else ""),
    ]


def check_dp(seed: int, intensity: float) -> list[CheckResult]:
    n = _count(100, intensity)
    system = SystemParams()
    mode = PhaseMode.continuous()
    mismatches = cases = 0
    for L in (4, 8, 12, 16):
        for i in range(n):
            ch = _instance(seed, 3, L * 1000 + i, L)
            for tau in (0.0, 0.3, 0.6):
                for nu in (0.0, 0.7):
                    inst = make_instance(ch, mode, tau, nu, system)
                    args = (inst.ch, inst.delta, inst.gamma_min, inst.gamma_bar, inst.pm)
                    dp = solve_dp(*args)
                    ex = exhaustive_search(*args, mode)
                    cases += 1
                    same_status = dp.is_feasible == ex.is_feasible
                    if not same_status or (dp.is_feasible and
                                           not _rel_close(dp.ee_value, ex.ee_value, 1e-12)):
                        mismatches += 1
    return [CheckResult("dp", "matches_exhaustive", mismatches == 0, cases,
                        f"{mismatches} mismatches" if mismatches else "")]


def check_crbm(seed: int, intensity: float) -> list[CheckResult]:
    n = _count(100, intensity)
    system = SystemParams()
    mode = PhaseMode.discrete(4)
    violations = cases = 0
    gaps = []
    for L in CRBM_CHECK_LENGTHS:
        for i in range(n):
            ch = _instance(seed, 4, L * 1000 + i, L)
            for tau, nu in itertools.product(CRBM_CHECK_TAUS, CRBM_CHECK_NUS):
                inst = make_instance(ch, mode, tau, nu, system)
                args = (inst.ch, inst.delta, inst.gamma_min, inst.gamma_bar, inst.pm)
                try:
                    sol = solve_crbm(*args, 4)
                except IRSError as e:
                    logger.warning(f"CRBM failed on case {i} (L={L}, nu={nu}): {e}")
                    violations += 1
                    continue
                ex = exhaustive_search(*args, mode)
                cases += 1
                slack = 1e-9 * max(1.0, abs(ex.ee_value))
                if not sol.ee_value <= ex.ee_value + slack <= sol.ee_upper + 2 * slack:
                    violations += 1
                gaps.append((ex.ee_value - sol.ee_value) / ex.ee_value)
    median_gap = float(np.median(gaps)) if gaps else 0.0
    return [
        CheckResult("crbm", "sandwich", violations == 0, cases,
                    f"{violations} violations" if violations else ""),
        CheckResult("crbm", "median_relative_gap", median_gap <= 0.02, len(gaps),
                    f"median {median_gap:.4%}"),
    ]


def check_monotonicity(seed: int, intensity: float) -> list[CheckResult]:
    rng = make_rng(derive_seed(seed, 5))
    n = _count(100, intensity)
    system = SystemParams()
    gamma_bar = system.gamma_bar
    flips = 0
    dp_violations = 0
    for i in range(n):
        L = int(rng.integers(2, 11))
        ch = _instance(seed, 5, i, L)
        delta = 0.5 * ch.alpha_min
        for mode in (PhaseMode.continuous(), PhaseMode.discrete(3), PhaseMode.discrete(6)):
            cfg = configure_phases(ch, mode)
            x = (rng.random(L) < 0.5).astype(float)
            base = worst_case_snr(ch, x, delta, mode, gamma_bar, cfg)
            for ell in np.flatnonzero(x == 0):
                flipped = x.copy()
                flipped[ell] = 1.0
                if worst_case_snr(ch, flipped, delta, mode, gamma_bar, cfg) < base * (1 - 1e-12):
                    flips += 1

        pm = system.power_model(PhaseMode.continuous())
        previous = np.inf
        for tau in np.linspace(0.0, 1.0, 6):
            sol = solve_dp(ch, tau * ch.alpha_min, 0.0, gamma_bar, pm)
            if sol.ee_value > previous * (1 + 1e-12):
                dp_violations += 1
            previous = sol.ee_value
        top = float(worst_case_snr(ch, np.ones(L), delta, PhaseMode.continuous(), gamma_bar))
        previous = np.inf
        for gamma_min in np.linspace(0.0, top, 6):
            sol = solve_dp(ch, delta, gamma_min, gamma_bar, pm)
            if sol.ee_value > previous * (1 + 1e-12):
                dp_violations += 1
            previous = sol.ee_value
    return [
        CheckResult("monotonicity", "coordinate_flip", flips == 0, n,
                    f"{flips} decreases" if flips else ""),
        CheckResult("monotonicity", "optimal_value_nonincreasing", dp_violations == 0, n,
                    f"{dp_violations} increases" if dp_violations else ""),
    ]


def check_limits(seed: int, intensity: float) -> list[CheckResult]:
    n = _count(20, intensity)
    system = SystemParams()
    gamma_bar = system.gamma_bar
    far = 0
    bound_breaks = 0
    for i in range(n):
        ch = _instance(seed, 6, i, 16)
        x = np.ones(ch.L)
        fc = f_c(ch, x)
        fd14 = f_d(ch, x, configure_phases(ch, PhaseMode.discrete(14)).errors)
        if abs(fd14 - fc) > 1e-6 * fc:
            far += 1
        delta = 0.5 * ch.alpha_min
        target = worst_case_snr(ch, x, delta, PhaseMode.continuous(), gamma_bar)
        for b in (2, 4, 8, 14):
            gap = target - worst_case_snr(ch, x, delta, PhaseMode.discrete(b), gamma_bar)
            # |f_d − f_c| ≤ f_c·(1 − cos(π/2^b)) 이므로 γ 차이도 같은 속도로 줄어듦
            allowed = 2.0 * gamma_bar * fc ** 2 * (1.0 - np.cos(np.pi / 2 ** b)) + 1e-12 * target
            if gap < -1e-12 * target or gap > allowed:
                bound_breaks += 1
    return [
        CheckResult("limits", "f_d_converges_to_f_c", far == 0, n,
                    f"{far} instances too far" if far else ""),
        CheckResult("limits", "discrete_snr_within_bound", bound_breaks == 0, n,
                    f"{bound_breaks} breaks" if bound_breaks else ""),
    ]


_CHECKS = {
    "quantizer": check_quantizer,
    "worstcase": check_worstcase,
    "dp": check_dp,
    "crbm": check_crbm,
    "monotonicity": check_monotonicity,
    "limits": check_limits,
}


def verify(suite: str = "all", seed: int = 0, intensity: float = 1.0) -> VerificationSummary:
    """
    검증 스위트를 실행합니다.

    Args:
        suite: "quantizer", "worstcase", "dp", "crbm", "monotonicity", "limits", "all"
        seed: 기본 시드
        intensity: 인스턴스 수 배율 (1.0이면 전체 규모)

    Returns:
        VerificationSummary

    Raises:
        IRSParameterError: 알 수 없는 스위트
    """
    if suite != "all" and suite not in _CHECKS:
        raise IRSParameterError(f"Unknown suite: {suite}. Expected one of {SUITES} or 'all'")
    if intensity <= 0:
        raise IRSParameterError(f"intensity must be positive, got {intensity}")
    names = SUITES if suite == "all" else (suite,)
    summary = VerificationSummary()
    for name in names:
        logger.info(f"Running verification suite '{name}' (intensity={intensity})")
        summary.results.extend(_CHECKS[name](seed, intensity))
    return summary
