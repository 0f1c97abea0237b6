"""pyirs-robust 커스텀 예외 클래스."""


class IRSError(Exception):
    """pyirs-robust 오류의 기본 예외 클래스."""
    pass


class IRSParameterError(IRSError):
    """잘못된 입력 파라미터 (범위를 벗어난 값, 길이 불일치 등)."""
    pass


class IRSAssumptionError(IRSError):
    """정리의 전제 조건 위반 (δ > α̂_min, 이산 모드에서 b < 2 등)."""
    pass


class IRSInfeasibleError(IRSError):
    """실현 가능성을 전제로 하는 연산이 실현 불가능한 인스턴스에 호출됨."""
    pass


class IRSDegenerateError(IRSError):
    """정의되지 않는 값 (f_d = 0일 때의 위상 각 등)."""
    pass


class IRSGuardError(IRSError):
    """오라클 크기 제한 초과 (L > 25, C(L, M) > 10⁶)."""
    pass


class IRSConfigError(IRSError):
    """실험 설정 오류."""
    pass


class IRSSolverError(IRSError):
    """내부 장벽법 솔버가 수렴하지 못함."""

    def __init__(self, message: str, last_iterate=None, residuals: dict | None = None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residuals = residuals or {}
