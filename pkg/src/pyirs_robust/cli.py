"""pyirs-robust 명령행 인터페이스 (sweep, solve, verify)."""

import argparse
import logging
import sys

from . import __version__
from .channel_model import ChannelEstimate
from .config import load_config
from .constants import (
    ALGORITHMS,
    DEFAULT_BITS,
    DEFAULT_L,
    DEFAULT_NU,
    DEFAULT_TAU,
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    EXIT_SOLVER_ERROR,
    EXIT_VERIFY_FAILED,
    SWEEP_AXES,
)
from .converters import parse_float_list, parse_str_list
from .exceptions import (
    IRSAssumptionError,
    IRSConfigError,
    IRSError,
    IRSGuardError,
    IRSParameterError,
)
from .experiment import run_sweep, solve_single, write_csv
from .logger import setup_logger
from .phase_control import PhaseMode
from .verification import SUITES, verify

logger = logging.getLogger(__name__)

# 사용자 입력으로 생기는 오류 (종료 코드 1)
_CONFIG_ERRORS = (IRSConfigError, IRSParameterError, IRSAssumptionError, IRSGuardError)


class _Parser(argparse.ArgumentParser):
    """인자 오류를 종료 코드 2 대신 IRSConfigError로 올리는 파서."""

    def error(self, message):
        raise IRSConfigError(f"{self.prog}: {message}")


def _csv_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(parse_float_list(text))
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _csv_algorithms(text: str) -> tuple[str, ...]:
    return tuple(a.lower() for a in parse_str_list(text))


def build_parser() -> argparse.ArgumentParser:
    """서브커맨드별 인자를 정의한 파서를 만듭니다."""
    parser = _Parser(
        prog="pyirs-robust",
        description="Robust IRS on/off activation maximizing worst-case energy efficiency",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--debug", action="store_true", help="enable debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sweep = sub.add_parser("sweep", help="run a seeded Monte-Carlo sweep and write CSV")
    sweep.add_argument("--config", help="INI file with [experiment] and [scenario] sections")
    sweep.add_argument("--axis", choices=SWEEP_AXES)
    sweep.add_argument("--values", type=_csv_floats, help="comma-separated axis values")
    sweep.add_argument("--trials", type=int)
    sweep.add_argument("--tau", type=float)
    sweep.add_argument("--nu", type=float)
    sweep.add_argument("--mode", choices=("c", "d"))
    sweep.add_argument("--bits", type=int)
    sweep.add_argument("--algos", type=_csv_algorithms,
                       help=f"comma-separated subset of {','.join(ALGORITHMS)}")
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--L", dest="L", type=int, help="element count for non-L axes")
    sweep.add_argument("--out", help="CSV path (default: stdout)")
    sweep.add_argument("--threads", type=int)
    sweep.add_argument("--no-timing", action="store_true",
                       help="write 0 in mean_time_s for byte-identical output")

    solve = sub.add_parser("solve", help="solve one instance and print a report")
    solve.add_argument("--algo", choices=ALGORITHMS, required=True)
    solve.add_argument("--mode", choices=("c", "d"), default="c")
    solve.add_argument("--bits", type=int, default=DEFAULT_BITS)
    solve.add_argument("--seed", type=int)
    solve.add_argument("--instance", help="JSON channel instance (magnitudes, phases)")
    solve.add_argument("--L", dest="L", type=int, default=DEFAULT_L)
    solve.add_argument("--tau", type=float, default=DEFAULT_TAU)
    solve.add_argument("--nu", type=float, default=DEFAULT_NU)
    solve.add_argument("--gamma-min", type=float, help="SNR floor overriding the nu rule")
    solve.add_argument("--config", help="INI file whose [scenario] section is used")

    check = sub.add_parser("verify", help="cross-check closed forms against oracles")
    check.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--intensity", type=float, default=1.0,
                       help="scale factor for instance counts")
    return parser


def _cmd_sweep(args) -> int:
    cfg = load_config(
        args.config,
        axis=args.axis,
        values=args.values,
        trials=args.trials,
        tau=args.tau,
        nu=args.nu,
        mode=args.mode,
        bits=args.bits,
        algorithms=args.algos,
        seed=args.seed,
        L=args.L,
        out=args.out,
        threads=args.threads,
        record_timing=False if args.no_timing else None,
    )
    records = run_sweep(cfg)
    if cfg.out is None:
        write_csv(records, sys.stdout)
    return EXIT_OK


def _cmd_solve(args) -> int:
    if args.seed is None and args.instance is None:
        raise IRSConfigError("solve needs --seed or --instance")
    system = load_config(args.config).system
    instance = ChannelEstimate.from_json(args.instance) if args.instance else None
    mode = PhaseMode.parse(args.mode, args.bits)
    _, report = solve_single(
        args.algo,
        mode,
        seed=args.seed,
        instance=instance,
        L=args.L,
        tau=args.tau,
        nu=args.nu,
        system=system,
        gamma_min=args.gamma_min,
    )
    sys.stdout.write(report)
    return EXIT_OK


def _cmd_verify(args) -> int:
    summary = verify(args.suite, seed=args.seed, intensity=args.intensity)
    sys.stdout.write(summary.report())
    if not summary.passed:
        logger.error(f"{len(summary.failures)} verification checks failed")
        return EXIT_VERIFY_FAILED
    return EXIT_OK


_COMMANDS = {
    "sweep": _cmd_sweep,
    "solve": _cmd_solve,
    "verify": _cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    """
    명령행 진입점.

    Args:
        argv: 인자 리스트 (기본값: sys.argv[1:])

    Returns:
        종료 코드 (0 성공, 1 설정 오류, 2 검증 실패, 3 솔버 오류)
    """
    try:
        args = build_parser().parse_args(argv)
    except IRSConfigError as e:
        setup_logger().error(str(e))
        return EXIT_CONFIG_ERROR

    setup_logger(level=logging.DEBUG if args.debug else logging.INFO)
    try:
        return _COMMANDS[args.command](args)
    except _CONFIG_ERRORS as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG_ERROR
    except IRSError as e:
        logger.error(f"Solver error: {e}")
        return EXIT_SOLVER_ERROR


if __name__ == "__main__":
    sys.exit(main())
