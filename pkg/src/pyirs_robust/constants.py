"""pyirs-robust 상수 및 기본 시뮬레이션 파라미터."""

# 기본 시나리오 배치 (미터)
DEFAULT_TX_POS = (0.0, 0.0, 0.0)
DEFAULT_RX_POS = (100.0, 0.0, 0.0)
DEFAULT_IRS_POS = (50.0, 20.0, 10.0)
DEFAULT_SPACING_OVER_WAVELENGTH = 0.5

# 경로 손실: 기준 손실, 기준 거리(m), 지수
DEFAULT_PATHLOSS_REF = {"c0": 1e-5, "cu": 1e-3, "cv": 1e-3}
DEFAULT_REF_DISTANCES = {"d0": 1.0, "du": 1.0, "dv": 1.0}
DEFAULT_EXPONENTS = {"a0": 3.7, "au": 2.2, "av": 2.2}
DEFAULT_RICIAN_DB = 5.0

# 이 값 이상의 라이시안 계수는 순수 LOS로 취급
PURE_LOS_KAPPA = 1e12

# 기본 반사 진폭과 소자 수
DEFAULT_BETA = 0.9
DEFAULT_L = 20
DEFAULT_BITS = 4

# 전력 (dBm / mW)
DEFAULT_TX_POWER_DBM = 15.0
DEFAULT_NOISE_DBM = -95.0
DEFAULT_ETA = 0.8
DEFAULT_P_STATIC_MW = 10.0
DEFAULT_P_ON_CONTINUOUS_MW = 15.0
DEFAULT_P_OFF_MW = 0.3

# 이산 위상 P_on(b) = (1.8 b - 3) mW
P_ON_SLOPE_MW = 1.8
P_ON_INTERCEPT_MW = -3.0

# 실험 기본값
DEFAULT_TRIALS = 100
DEFAULT_TAU = 0.0
DEFAULT_NU = 0.7
DEFAULT_SEED = 42

# f_d 계산 형식
FD_FORMS = ("magnitude", "quadratic", "min-expansion")

# 장벽법 솔버 기본값
BARRIER_MU0 = 1.0
BARRIER_MU_FACTOR = 10.0
BARRIER_MU_FLOOR = 1e-14
BARRIER_NEWTON_TOL = 1e-10
BARRIER_MAX_ITER = 500
BARRIER_TOL = 1e-8
BARRIER_STEP_FRACTION = 0.99
ARMIJO_ALPHA = 0.01
ARMIJO_BETA = 0.5

# 오라클 크기 제한
EXHAUSTIVE_MAX_L = 25
SUBSET_GUARD = 1_000_000
EXHAUSTIVE_CHUNK = 1 << 16

# 타이밍: 1 ms 미만이면 5회 반복 후 중앙값
TIMING_REPEATS = 5
TIMING_THRESHOLD_S = 1e-3

# 실험 스윕 축과 알고리즘
SWEEP_AXES = ("L", "power", "nu", "b", "tau")
ALGORITHMS = ("dp", "crbm", "exhaustive", "all_on")

# CSV 출력 열
CSV_COLUMNS = [
    "axis",
    "axis_value",
    "algorithm",
    "mode",
    "tau",
    "nu",
    "bits",
    "trials",
    "mean_ee",
    "std_ee",
    "mean_time_s",
    "feasible_rate",
    "mean_gap_bound",
]

# 종료 코드
EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_VERIFY_FAILED = 2
EXIT_SOLVER_ERROR = 3

# 스레드 수 환경 변수
THREADS_ENV_VAR = "PYIRS_THREADS"
