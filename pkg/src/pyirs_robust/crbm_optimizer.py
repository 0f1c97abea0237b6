"""
이산 위상에서의 볼록 완화 후 반올림 (CRBM).

최악 SNR 상한 γ̂로 만든 분수 완화 문제를 Charnes-Cooper 변환
(t = 1/P_tot, y = t·x)으로 볼록 문제로 바꾸어 로그 장벽 내점법으로 풀고,
완화 해를 내림차순 정렬해 순차 활성화로 이진 해를 고릅니다.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.special import rel_entr

from .channel_model import ChannelEstimate
from .constants import (
    ARMIJO_ALPHA,
    ARMIJO_BETA,
    BARRIER_MAX_ITER,
    BARRIER_MU0,
    BARRIER_MU_FACTOR,
    BARRIER_MU_FLOOR,
    BARRIER_NEWTON_TOL,
    BARRIER_STEP_FRACTION,
    BARRIER_TOL,
)
from .converters import wrap_phase
from .exceptions import IRSAssumptionError, IRSInfeasibleError, IRSParameterError, IRSSolverError
from .phase_control import PhaseMode, PhaseShiftConfig, configure_phases
from .solution import Solution, SolveStatus
from .worst_case import (
    ActivationVector,
    ExpansionCoeffs,
    PowerModel,
    expansion_coeffs,
    upper_bound_ee,
    validate_uncertainty,
    worst_case_ee,
    worst_case_snr,
)

logger = logging.getLogger(__name__)

ALGORITHM = "crbm"
LN2 = np.log(2.0)

# μ_nm의 음수 허용 한계 (상대값)
MU_NEGATIVE_RTOL = 1e-12


@dataclass(frozen=True)
class BarrierSettings:
    """로그 장벽 내점법 설정."""

    mu0: float = BARRIER_MU0
    mu_factor: float = BARRIER_MU_FACTOR
    mu_floor: float = BARRIER_MU_FLOOR
    newton_tol: float = BARRIER_NEWTON_TOL
    max_iter: int = BARRIER_MAX_ITER
    step_fraction: float = BARRIER_STEP_FRACTION
    armijo_alpha: float = ARMIJO_ALPHA
    armijo_beta: float = ARMIJO_BETA


@dataclass(frozen=True)
class RelaxationProblem:
    """
    분수 완화 문제 max ÊE(x) s.t. γ̂(x) ≥ γ_min, x ∈ [0, 1]^L.

    p_base = P_fix + L·P_off, delta_p = P_on − P_off.
    """

    coeffs: ExpansionCoeffs
    gamma_bar: float
    gamma_min: float
    p_base: float
    delta_p: float
    L: int
    bits: int

    def __post_init__(self):
        mu = self.coeffs.mu
        scale = float(np.max(np.abs(mu))) if mu.size else 0.0
        if mu.size and mu.min() < -MU_NEGATIVE_RTOL * max(scale, np.finfo(float).tiny):
            raise IRSAssumptionError("Relaxation requires mu_nm >= 0 for concavity")

    @property
    def c(self) -> float:
        """1 + γ̄ξ."""
        return 1.0 + self.gamma_bar * self.coeffs.xi

    def t_of(self, y: np.ndarray) -> float:
        """t·P_tot(y/t) = 1에서 t를 y의 아핀 함수로 풉니다."""
        return (1.0 - self.delta_p * float(np.sum(y))) / self.p_base

    def u_of(self, y: np.ndarray) -> float:
        """u(y) = γ̄(Σζ'y + Σ_{n<m} μ_nm·min(y_n, y_m))."""
        n_idx, m_idx = np.triu_indices(self.L, k=1)
        pair_min = np.minimum(y[n_idx], y[m_idx])
        mu_vec = self.coeffs.mu[n_idx, m_idx]
        return self.gamma_bar * (float(self.coeffs.zeta_prime @ y) + float(mu_vec @ pair_min))

    def objective(self, t: float, w: float) -> float:
        """−rel_entr(t, (1 + γ̄ξ)t + w)/ln 2 = t·log₂(1 + γ̄ξ + w/t)."""
        return float(-rel_entr(t, self.c * t + w) / LN2)

    def fractional_objective(self, x, pm: PowerModel) -> float:
        """원래 분수 형태의 ÊE(x)."""
        return float(upper_bound_ee(self.coeffs, x, self.gamma_bar, pm))


@dataclass(frozen=True)
class RelaxationSolution:
    """
    완화 문제의 해.

    ee_rel은 반환한 점의 목적값, ee_upper는 쌍대 간격 추정을 더한
    완화 최적값의 상한입니다.
    """

    y: np.ndarray
    t: float
    w: float
    x_frac: np.ndarray
    ee_rel: float
    ee_upper: float
    solver_stats: dict = field(default_factory=dict)


def build_relaxation(
    ch: ChannelEstimate,
    phases_discrete,
    errors,
    delta: float,
    gamma_min: float,
    gamma_bar: float,
    pm: PowerModel,
    b: int,
) -> RelaxationProblem:
    """
    이산 위상 설정으로부터 완화 문제를 만듭니다.

    Raises:
        IRSAssumptionError: δ > α̂_min 또는 b < 2인 경우
        IRSInfeasibleError: 모두 켠 벡터가 SNR 하한을 만족하지 못하는 경우
    """
    validate_uncertainty(ch, delta)
    if b < 2:
        raise IRSAssumptionError(f"Relaxation requires b >= 2, got b={b}")
    errors = np.asarray(errors, dtype=float)
    discrete = np.asarray(phases_discrete, dtype=float)
    cfg = PhaseShiftConfig(
        continuous=wrap_phase(discrete - errors),
        discrete=discrete,
        errors=errors,
        bits=int(b),
    )
    gamma_all_on = worst_case_snr(ch, np.ones(ch.L), delta, PhaseMode.discrete(b), gamma_bar, cfg)
    if gamma_all_on < gamma_min:
        raise IRSInfeasibleError(
            f"All-on worst-case SNR {gamma_all_on:.4e} is below gamma_min {gamma_min:.4e}"
        )
    coeffs = expansion_coeffs(ch, errors, delta)
    # b ≥ 2에서 cos(ε_n − ε_m) > 0이므로 음수는 반올림 오차뿐
    scale = float(np.max(np.abs(coeffs.mu))) if coeffs.mu.size else 0.0
    mu = np.where(coeffs.mu < 0, np.where(coeffs.mu >= -MU_NEGATIVE_RTOL * scale, 0.0, coeffs.mu),
                  coeffs.mu)
    coeffs = ExpansionCoeffs(
        alpha0_sq=coeffs.alpha0_sq,
        zeta=coeffs.zeta,
        mu=mu,
        zeta_prime=coeffs.zeta_prime,
        xi=coeffs.xi,
        delta=coeffs.delta,
    )
    return RelaxationProblem(
        coeffs=coeffs,
        gamma_bar=float(gamma_bar),
        gamma_min=float(gamma_min),
        p_base=pm.base_power(ch.L),
        delta_p=pm.delta_p,
        L=ch.L,
        bits=int(b),
    )


class _BarrierProblem:
    """
    장벽 부분 문제 min −F(t, u) + μ·B(y, z).

    변수는 y (L)와 쌍별 에피그래프 변수 z (P = L(L−1)/2)이며 t와 w는
    소거되어 있습니다. 모든 부등식 제약은 변수에 대해 선형입니다.
    """

    def __init__(self, prob: RelaxationProblem):
        self.prob = prob
        self.L = prob.L
        self.n_idx, self.m_idx = np.triu_indices(prob.L, k=1)
        self.P = self.n_idx.size
        self.a = prob.delta_p / prob.p_base
        self.t0 = 1.0 / prob.p_base
        self.c = prob.c
        self.gz = prob.gamma_bar * prob.coeffs.zeta_prime
        self.gm = prob.gamma_bar * prob.coeffs.mu[self.n_idx, self.m_idx]
        self.floor_coef = prob.gamma_bar * prob.coeffs.xi - prob.gamma_min
        self.has_floor = prob.gamma_min > 0
        self.m = 2 * self.L + 3 * self.P + (1 if self.has_floor else 0)

    def split(self, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return v[: self.L], v[self.L:]

    def t_of(self, y: np.ndarray) -> float:
        return self.t0 - self.a * float(y.sum())

    def u_of(self, y: np.ndarray, z: np.ndarray) -> float:
        return float(self.gz @ y) + float(self.gm @ z)

    def grad_t(self) -> np.ndarray:
        return np.concatenate((np.full(self.L, -self.a), np.zeros(self.P)))

    def grad_u(self) -> np.ndarray:
        return np.concatenate((self.gz, self.gm))

    def slacks(self, v: np.ndarray) -> dict[str, np.ndarray | float]:
        y, z = self.split(v)
        t = self.t_of(y)
        out = {
            "y": y,
            "cap": t - y,
            "pair_n": y[self.n_idx] - z,
            "pair_m": y[self.m_idx] - z,
            "z": z,
        }
        if self.has_floor:
            out["floor"] = self.u_of(y, z) + self.floor_coef * t
        return out

    def strictly_feasible(self, v: np.ndarray) -> bool:
        return all(np.all(np.asarray(s) > 0) for s in self.slacks(v).values())

    def objective(self, v: np.ndarray) -> float:
        """F(t, u) = t·log₂((ct + u)/t)."""
        y, z = self.split(v)
        t = self.t_of(y)
        u = self.u_of(y, z)
        return float(t * (np.log(self.c * t + u) - np.log(t)) / LN2)

    def barrier(self, slacks: dict) -> float:
        return float(-sum(np.sum(np.log(s)) for s in slacks.values()))

    def merit(self, v: np.ndarray, mu: float) -> float:
        slacks = self.slacks(v)
        if not all(np.all(np.asarray(s) > 0) for s in slacks.values()):
            return np.inf
        return -self.objective(v) + mu * self.barrier(slacks)

    def _bincount(self, index: np.ndarray, weights: np.ndarray) -> np.ndarray:
        return np.bincount(index, weights=weights, minlength=self.L)

    def barrier_gradient(self, s: dict) -> np.ndarray:
        inv_cap = 1.0 / s["cap"]
        inv_n = 1.0 / s["pair_n"]
        inv_m = 1.0 / s["pair_m"]
        grad_y = -1.0 / s["y"] + inv_cap + self.a * inv_cap.sum()
        grad_y -= self._bincount(self.n_idx, inv_n) + self._bincount(self.m_idx, inv_m)
        grad_z = inv_n + inv_m - 1.0 / s["z"]
        grad = np.concatenate((grad_y, grad_z))
        if self.has_floor:
            grad -= self.floor_gradient() / s["floor"]
        return grad

    def floor_gradient(self) -> np.ndarray:
        return self.grad_u() + self.floor_coef * self.grad_t()

    def step_bound(self, s: dict, dv: np.ndarray) -> float:
        """모든 여유 변수를 양수로 유지하는 최대 스텝."""
        dy, dz = self.split(dv)
        dt = -self.a * dy.sum()
        changes = {
            "y": dy,
            "cap": dt - dy,
            "pair_n": dy[self.n_idx] - dz,
            "pair_m": dy[self.m_idx] - dz,
            "z": dz,
        }
        if self.has_floor:
            changes["floor"] = float(self.floor_gradient() @ dv)
        bound = np.inf
        for key, ds in changes.items():
            ds = np.atleast_1d(ds)
            sv = np.atleast_1d(s[key])
            shrinking = ds < 0
            if np.any(shrinking):
                bound = min(bound, float(np.min(-sv[shrinking] / ds[shrinking])))
        return bound

    def factorize(self, s: dict):
        """
        선형 제약 장벽 헤시안 K를 z 블록 슈어 보수로 분해합니다.

        Returns:
            K⁻¹을 행렬 우변에 적용하는 함수
        """
        L = self.L
        w_y = 1.0 / s["y"] ** 2
        w_cap = 1.0 / s["cap"] ** 2
        w_n = 1.0 / s["pair_n"] ** 2
        w_m = 1.0 / s["pair_m"] ** 2
        d_z = w_n + w_m + 1.0 / s["z"] ** 2

        # K_yy: 대각 + cap 제약의 (a·1 + e_ℓ) 외적 합
        S = np.full((L, L), self.a ** 2 * w_cap.sum())
        S += self.a * (w_cap[:, None] + w_cap[None, :])
        diag = w_y + w_cap + self._bincount(self.n_idx, w_n) + self._bincount(self.m_idx, w_m)
        # z 소거: K_yz K_zz⁻¹ K_zy
        diag -= self._bincount(self.n_idx, w_n ** 2 / d_z)
        diag -= self._bincount(self.m_idx, w_m ** 2 / d_z)
        S[np.diag_indices(L)] += diag
        coupling = w_n * w_m / d_z
        S[self.n_idx, self.m_idx] -= coupling
        S[self.m_idx, self.n_idx] -= coupling

        try:
            factor = scipy.linalg.cho_factor(S, lower=True, check_finite=False)
        except np.linalg.LinAlgError:
            # 조건수가 매우 나쁜 말기 반복에서 한 번만 대각 보정
            jitter = 1e-14 * float(np.max(np.abs(np.diag(S))))
            S[np.diag_indices(L)] += jitter
            factor = scipy.linalg.cho_factor(S, lower=True, check_finite=False)

        def solve(rhs: np.ndarray) -> np.ndarray:
            r_y, r_z = rhs[:L], rhs[L:]
            q = r_z / d_z[:, None]
            # K_yz = −w_n (n행), −w_m (m행)
            lifted = [
                self._bincount(self.n_idx, w_n * q[:, k])
                + self._bincount(self.m_idx, w_m * q[:, k])
                for k in range(rhs.shape[1])
            ]
            v_y = scipy.linalg.cho_solve(factor, r_y + np.stack(lifted, axis=1),
                                         check_finite=False)
            v_z = r_z + w_n[:, None] * v_y[self.n_idx] + w_m[:, None] * v_y[self.m_idx]
            return np.vstack((v_y, v_z / d_z[:, None]))

        return solve

    def newton_step(self, v: np.ndarray, mu: float) -> tuple[np.ndarray, np.ndarray, float]:
        """
        뉴턴 방향을 계산합니다.

        H = μK + κ·w wᵀ + (μ/s_h²)·g_h g_hᵀ이며 저랭크 부분은 Woodbury 공식으로
        처리합니다. w = u∇t − t∇u, κ = 1/(q² t ln 2).

        Returns:
            (방향, 그래디언트, 뉴턴 감소량 λ²)
        """
        s = self.slacks(v)
        y, z = self.split(v)
        t = self.t_of(y)
        u = self.u_of(y, z)
        q = self.c * t + u
        grad_t, grad_u = self.grad_t(), self.grad_u()

        f_t = (np.log(q) - np.log(t) + self.c * t / q - 1.0) / LN2
        f_u = t / (q * LN2)
        grad = -(f_t * grad_t + f_u * grad_u) + mu * self.barrier_gradient(s)

        columns = [u * grad_t - t * grad_u]
        weights = [1.0 / (q ** 2 * t * LN2)]
        if self.has_floor:
            columns.append(self.floor_gradient())
            weights.append(mu / s["floor"] ** 2)
        V = np.stack(columns, axis=1)
        C_inv = np.diag(1.0 / np.asarray(weights))

        solve_k = self.factorize(s)
        solved = solve_k(np.column_stack((-grad, V))) / mu
        x0, X = solved[:, 0], solved[:, 1:]
        small = C_inv + V.T @ X
        direction = x0 - X @ np.linalg.solve(small, V.T @ x0)
        decrement = float(-grad @ direction)
        return direction, grad, decrement


def _start_point(bp: _BarrierProblem) -> np.ndarray | None:
    # x = s·1_L 선 위에서 SNR 하한을 엄격히 만족하는 점을 찾음
    for s in (0.5, 0.9, 0.99, 0.999, 1 - 1e-6, 1 - 1e-9, 1 - 1e-12):
        t = 1.0 / (bp.prob.p_base + bp.prob.delta_p * bp.L * s)
        y = np.full(bp.L, s * t)
        z = np.full(bp.P, s * s * t)
        v = np.concatenate((y, z))
        if bp.strictly_feasible(v):
            return v
    return None


def solve_relaxation(
    prob: RelaxationProblem,
    tol: float = BARRIER_TOL,
    settings: BarrierSettings | None = None,
) -> RelaxationSolution:
    """
    Charnes-Cooper 볼록 문제를 로그 장벽 내점법으로 풉니다.

    μ를 settings.mu0에서 시작해 mu_factor로 나누며, 각 μ에서 뉴턴법으로
    중심화합니다. 쌍대 간격 추정 m·μ가 tol·max(1, |F|) 이하가 되면 멈춥니다.

    Args:
        prob: 완화 문제
        tol: 상대 허용 오차 (기본값: 1e-8)
        settings: 장벽법 설정

    Returns:
        RelaxationSolution

    Raises:
        IRSSolverError: 반복 한도 초과 또는 선탐색 실패
    """
    settings = settings or BarrierSettings()
    bp = _BarrierProblem(prob)
    v = _start_point(bp)

    if v is None:
        # γ̂(1_L) = γ_min: 실현 가능 집합이 1_L 한 점으로 축퇴
        x_frac = np.ones(prob.L)
        t = 1.0 / (prob.p_base + prob.delta_p * prob.L)
        y = x_frac * t
        w = prob.u_of(y)
        value = prob.objective(t, w)
        logger.debug("CRBM relaxation degenerate; feasible set is the all-on vector")
        return RelaxationSolution(
            y=y, t=t, w=w, x_frac=x_frac, ee_rel=value, ee_upper=value,
            solver_stats={"iterations": 0, "degenerate": True, "duality_gap": 0.0,
                          "newton_decrement": 0.0, "mu": 0.0, "kkt_residual": 0.0},
        )

    mu = settings.mu0
    iterations = 0
    decrement = np.inf
    grad = np.zeros_like(v)

    while True:
        # 중심화
        while True:
            if iterations >= settings.max_iter:
                raise IRSSolverError(
                    f"Barrier solver hit the iteration cap ({settings.max_iter})",
                    last_iterate=v.copy(),
                    residuals={"mu": mu, "newton_decrement": decrement,
                               "gradient_norm": float(np.linalg.norm(grad))},
                )
            try:
                direction, grad, decrement = bp.newton_step(v, mu)
            except np.linalg.LinAlgError as e:
                raise IRSSolverError(
                    f"Newton system became singular: {e}",
                    last_iterate=v.copy(),
                    residuals={"mu": mu, "newton_decrement": decrement},
                ) from e
            iterations += 1
            scale = max(1.0, abs(bp.objective(v)))
            if decrement / 2.0 <= settings.newton_tol * scale or \
                    np.linalg.norm(grad) <= settings.newton_tol:
                break

            step = min(1.0, settings.step_fraction * bp.step_bound(bp.slacks(v), direction))
            current = bp.merit(v, mu)
            slope = float(grad @ direction)
            armijo = settings.armijo_alpha * slope
            while bp.merit(v + step * direction, mu) > current + armijo * step:
                step *= settings.armijo_beta
                if step < 1e-16:
                    raise IRSSolverError(
                        "Barrier line search failed",
                        last_iterate=v.copy(),
                        residuals={"mu": mu, "newton_decrement": decrement,
                                   "gradient_norm": float(np.linalg.norm(grad))},
                    )
            v = v + step * direction

        value = bp.objective(v)
        gap = bp.m * mu
        logger.debug(f"CRBM barrier mu={mu:.1e} objective={value:.8e} gap={gap:.2e} "
                     f"iterations={iterations}")
        if gap <= tol * max(1.0, abs(value)) or mu <= settings.mu_floor:
            break
        mu /= settings.mu_factor

    y, _ = bp.split(v)
    y = np.maximum(y, 0.0)
    t = prob.t_of(y)
    x_frac = np.clip(y / t, 0.0, 1.0)
    w = prob.u_of(y)
    ee_rel = prob.objective(t, w)
    ee_upper = max(ee_rel, bp.objective(v)) + bp.m * mu + max(decrement, 0.0)
    return RelaxationSolution(
        y=y,
        t=t,
        w=w,
        x_frac=x_frac,
        ee_rel=ee_rel,
        ee_upper=ee_upper,
        solver_stats={
            "iterations": iterations,
            "degenerate": False,
            "duality_gap": bp.m * mu,
            "newton_decrement": decrement,
            "mu": mu,
            "kkt_residual": float(np.linalg.norm(grad)),
        },
    )


def round_and_select(
    rel: RelaxationSolution,
    ch: ChannelEstimate,
    errors,
    delta: float,
    gamma_min: float,
    gamma_bar: float,
    pm: PowerModel,
    b: int,
) -> Solution:
    """
    완화 해를 내림차순 정렬해 순차 활성화하고 가장 좋은 실현 가능 해를 고릅니다.

    x_frac 내림차순 (같은 값은 인덱스 오름차순)으로 하나씩 켜며 ΔRe, ΔIm을
    누적해 f_d를 갱신하고, EE가 엄격히 큰 경우에만 현재 해를 바꿉니다.

    Returns:
        Solution (status=feasible, gap_bound = ee_upper − ẼE)

    Raises:
        IRSAssumptionError: 전제 조건 위반
    """
    validate_uncertainty(ch, delta)
    mode = PhaseMode.discrete(b)
    if b < 2:
        raise IRSAssumptionError(f"Rounding requires b >= 2, got b={b}")
    L = ch.L
    errors = np.asarray(errors, dtype=float)
    order = np.argsort(-rel.x_frac, kind="stable")

    # 누적 ΔRe, ΔIm으로 각 접두 활성화의 f_d 계산
    re_terms = (ch.alphas * np.cos(errors))[order]
    im_terms = (ch.alphas * np.sin(errors))[order]
    delta_re = ch.alpha0 + np.concatenate(([0.0], np.cumsum(re_terms)))
    delta_im = np.concatenate(([0.0], np.cumsum(im_terms)))
    f = np.sqrt(delta_re ** 2 + delta_im ** 2)
    counts = np.arange(L + 1, dtype=float)
    gamma = gamma_bar * (f - delta * np.sqrt(1.0 + counts)) ** 2
    feasible = (gamma >= gamma_min) & (f >= delta * np.sqrt(1.0 + counts))
    feasible[L] = True
    ee = np.where(feasible, np.log2(1.0 + gamma) / (pm.base_power(L) + pm.delta_p * counts),
                  -np.inf)
    m_star = int(np.argmax(ee))

    bits = np.zeros(L, dtype=np.int8)
    bits[order[:m_star]] = 1
    x = ActivationVector(bits)
    ee_star = float(worst_case_ee(ch, x, delta, mode, gamma_bar, pm))
    gap = rel.ee_upper - ee_star
    logger.debug(f"CRBM rounding: M={m_star} ee={ee_star:.6e} gap_bound={gap:.3e}")
    if gap < 0.0:
        logger.warning(f"CRBM upper bound {rel.ee_upper:.6e} is below rounded EE {ee_star:.6e}")
    return Solution(
        status=SolveStatus.FEASIBLE,
        ee=ee_star,
        x=x,
        m_star=m_star,
        gap_bound=gap,
        algorithm=ALGORITHM,
        ee_rel=rel.ee_rel,
        ee_upper=rel.ee_upper,
        details={"x_frac": rel.x_frac, "solver_stats": rel.solver_stats},
    )


def solve_crbm(
    ch: ChannelEstimate,
    delta: float,
    gamma_min: float,
    gamma_bar: float,
    pm: PowerModel,
    b: int,
    tol: float = BARRIER_TOL,
    settings: BarrierSettings | None = None,
) -> Solution:
    """
    CRBM 전체 과정: 실현 가능성 확인, 완화 구성, 완화 풀이, 반올림.

    Raises:
        IRSAssumptionError: δ > α̂_min 또는 b < 2인 경우
        IRSParameterError: b가 정수가 아닌 경우
        IRSSolverError: 완화 솔버가 수렴하지 못한 경우
    """
    if int(b) != b:
        raise IRSParameterError(f"b must be an integer, got {b}")
    validate_uncertainty(ch, delta)
    mode = PhaseMode.discrete(int(b))
    if mode.bits < 2:
        raise IRSAssumptionError(f"CRBM requires b >= 2, got b={b}")
    cfg = configure_phases(ch, mode)
    gamma_all_on = worst_case_snr(ch, np.ones(ch.L), delta, mode, gamma_bar, cfg)
    if gamma_all_on < gamma_min:
        logger.debug(f"CRBM: all-on vector misses gamma_min={gamma_min:.4e}; infeasible")
        return Solution.infeasible(ALGORITHM)

    prob = build_relaxation(ch, cfg.discrete, cfg.errors, delta, gamma_min, gamma_bar, pm,
                            mode.bits)
    rel = solve_relaxation(prob, tol=tol, settings=settings)
    return round_and_select(rel, ch, cfg.errors, delta, gamma_min, gamma_bar, pm, mode.bits)
