"""pyirs-robust: CSI 불확실성에 강건한 IRS 소자 on/off 에너지 효율 최적화."""

__version__ = "0.1.0"

from .channel_model import ChannelEstimate, FadingParams, ScenarioGeometry, sample_channel
from .config import ExperimentConfig, SystemParams, load_config
from .crbm_optimizer import solve_crbm
from .dp_optimizer import solve_dp
from .exceptions import (
    IRSAssumptionError,
    IRSConfigError,
    IRSDegenerateError,
    IRSError,
    IRSGuardError,
    IRSInfeasibleError,
    IRSParameterError,
    IRSSolverError,
)
from .experiment import run_sweep, solve_single
from .oracles import exhaustive_search
from .phase_control import PhaseMode, configure_phases
from .solution import INFEASIBLE, Solution, SolveStatus
from .worst_case import ActivationVector, PowerModel, worst_case_ee, worst_case_snr

__all__ = [
    "ChannelEstimate",
    "FadingParams",
    "ScenarioGeometry",
    "sample_channel",
    "ExperimentConfig",
    "SystemParams",
    "load_config",
    "solve_crbm",
    "solve_dp",
    "IRSError",
    "IRSAssumptionError",
    "IRSConfigError",
    "IRSDegenerateError",
    "IRSGuardError",
    "IRSInfeasibleError",
    "IRSParameterError",
    "IRSSolverError",
    "run_sweep",
    "solve_single",
    "exhaustive_search",
    "PhaseMode",
    "configure_phases",
    "INFEASIBLE",
    "Solution",
    "SolveStatus",
    "ActivationVector",
    "PowerModel",
    "worst_case_ee",
    "worst_case_snr",
]
