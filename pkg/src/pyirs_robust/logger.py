"""pyirs-robust 로깅 설정."""

import logging
import sys
from typing import TextIO


def setup_logger(
    name: str = "pyirs_robust",
    level: int = logging.INFO,
    stream: TextIO | None = None,
) -> logging.Logger:
    """
    로거 인스턴스를 설정하고 반환합니다.

    모듈들은 ``logging.getLogger(__name__)``로 하위 로거를 사용하므로
    패키지 로거 하나만 설정하면 전체에 적용됩니다.

    Args:
        name: 로거 이름
        level: 로깅 레벨 (기본값: INFO)
        stream: 출력 스트림 (기본값: sys.stderr, CSV 표준 출력과 분리)

    Returns:
        설정된 로거 인스턴스
    """
    logger = logging.getLogger(name)
    logger.setLevel(level)

    # 로거에 핸들러가 없는 경우에만 추가
    if not logger.handlers:
        handler = logging.StreamHandler(stream or sys.stderr)
        formatter = logging.Formatter(
            "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S"
        )
        handler.setFormatter(formatter)
        logger.addHandler(handler)

    return logger
