"""단위 변환 및 설정 값 변환 유틸리티."""

import numpy as np

TWO_PI = 2.0 * np.pi


def dbm_to_watt(value_dbm: float) -> float:
    """
    dBm 값을 와트로 변환합니다.

    Args:
        value_dbm: dBm 단위 전력

    Returns:
        와트 단위 전력 (10^((dBm - 30) / 10))
    """
    return float(10.0 ** ((value_dbm - 30.0) / 10.0))


def mw_to_watt(value_mw: float) -> float:
    """밀리와트를 와트로 변환합니다."""
    return float(value_mw) * 1e-3


def db_to_linear(value_db: float) -> float:
    """dB 값을 선형 배율로 변환합니다."""
    return float(10.0 ** (value_db / 10.0))


def wrap_phase(phases):
    """
    위상을 [0, 2π)로 감습니다.

    np.mod는 아주 작은 음수에 대해 정확히 2π를 돌려줄 수 있으므로
    그 경우 0으로 바꿉니다.

    Args:
        phases: 스칼라 또는 배열 (라디안)

    Returns:
        [0, 2π) 범위의 위상 (입력과 같은 형태)
    """
    wrapped = np.mod(phases, TWO_PI)
    return np.where(wrapped >= TWO_PI, 0.0, wrapped)


def wrap_symmetric(phases):
    """위상 차이를 (−π, π]로 감습니다."""
    wrapped = TWO_PI * np.floor((np.pi - np.asarray(phases, dtype=float)) / TWO_PI)
    return np.asarray(phases, dtype=float) + wrapped


def parse_float_list(value: str) -> list[float]:
    """
    쉼표로 구분된 숫자 목록을 변환합니다.

    Args:
        value: "10,20,50" 형태의 문자열

    Returns:
        실수 리스트

    Raises:
        ValueError: 숫자로 변환할 수 없는 항목이 있는 경우
    """
    items = [item.strip() for item in value.split(",")]
    return [float(item) for item in items if item]


def parse_str_list(value: str) -> list[str]:
    """쉼표로 구분된 문자열 목록을 소문자 리스트로 변환합니다."""
    return [item.strip().lower() for item in value.split(",") if item.strip()]


def convert_setting(field_name: str, value: str) -> int | float | str | list | None:
    """
    설정 파일의 필드 값을 필드명에 맞는 타입으로 변환합니다.

    Args:
        field_name: 설정 키 (예: "trials", "values", "tau")
        value: 변환할 문자열 값

    Returns:
        변환된 값 (int, float, list, str 또는 None)

    Raises:
        ValueError: 값이 타입에 맞지 않는 경우
    """
    # 빈 값 처리
    if value is None or value.strip() == "":
        return None

    clean_value = value.strip()

    if field_name in INT_SETTINGS:
        return int(clean_value)
    if field_name in FLOAT_SETTINGS:
        return float(clean_value)
    if field_name == "values":
        return parse_float_list(clean_value)
    if field_name == "algorithms":
        return parse_str_list(clean_value)
    if field_name in BOOL_SETTINGS:
        lowered = clean_value.lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"Invalid boolean for {field_name}: {value}")

    # 변환이 적용되지 않은 경우 원본 문자열 반환
    return clean_value


def convert_section(section: dict) -> dict:
    """
    설정 섹션의 모든 필드를 변환합니다.

    Args:
        section: 키-문자열 값 쌍을 포함한 딕셔너리

    Returns:
        변환된 값을 포함한 딕셔너리
    """
    return {
        field: convert_setting(field, value)
        for field, value in section.items()
    }


INT_SETTINGS = frozenset({"trials", "bits", "seed", "threads", "l"})
FLOAT_SETTINGS = frozenset({
    "tau",
    "nu",
    "power_dbm",
    "noise_dbm",
    "beta",
    "eta",
    "p_static_mw",
    "p_on_mw",
    "p_off_mw",
    "rician_db",
    "spacing",
})
BOOL_SETTINGS = frozenset({"record_timing"})
