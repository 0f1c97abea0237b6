"""단조 시계를 이용한 솔버 실행 시간 측정."""

import statistics
import time

from .constants import TIMING_REPEATS, TIMING_THRESHOLD_S


class MedianTimer:
    """
    실행 시간 측정기.

    첫 실행이 threshold보다 짧으면 repeats회까지 반복해 중앙값을 돌려줍니다.
    측정값은 저장하지 않으므로 여러 스레드가 하나의 측정기를 공유할 수 있습니다.
    """

    def __init__(self, repeats: int = TIMING_REPEATS, threshold: float = TIMING_THRESHOLD_S):
        """
        측정기를 초기화합니다.

        Args:
            repeats: 짧은 실행의 최대 반복 횟수
            threshold: 반복을 시작하는 기준 시간 (초)
        """
        if repeats < 1:
            raise ValueError(f"repeats must be >= 1, got {repeats}")
        self.repeats = repeats
        self.threshold = threshold

    def measure(self, func, *args, **kwargs):
        """
        함수를 실행하고 (결과, 측정 시간)을 반환합니다.

        반복 실행 시 결과는 첫 실행의 것을 돌려줍니다.
        """
        start = time.perf_counter()
        result = func(*args, **kwargs)
        durations = [time.perf_counter() - start]

        if durations[0] < self.threshold:
            for _ in range(self.repeats - 1):
                start = time.perf_counter()
                func(*args, **kwargs)
                durations.append(time.perf_counter() - start)

        return result, statistics.median(durations)
