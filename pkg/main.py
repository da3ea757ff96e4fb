import argparse
import logging
import sys

from utils.command_handlers import (
    EXIT_FAILURE, EXIT_USAGE, handle_check, handle_continuum_analyze, handle_continuum_similar,
    handle_enum_types, handle_eval, handle_repro,
)
from utils.errors import ContinuumError, GraphFormatError, SyntaxParseError, UniverseError
from utils.logging_config import setup_logging
from utils.relations import DEFAULT_BOUND
from utils.repro import DEFAULT_SEED, SUITES

# Константы
COMMAND_HANDLERS = {
    "check": handle_check,
    "eval": handle_eval,
    "repro": handle_repro,
    "continuum analyze": handle_continuum_analyze,
    "continuum similar": handle_continuum_similar,
    "enum-types": handle_enum_types,
}
FORMAT_ERRORS = (GraphFormatError, ContinuumError, SyntaxParseError, OSError)

logger = logging.getLogger(__name__)


def positive_int(text):
    """Аргумент командной строки >= 1"""
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"ожидалось число >= 1, получено {value}")
    return value


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="отчет в формате JSON")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed случайных сценариев")
    common.add_argument("--bound", type=positive_int, default=DEFAULT_BOUND, help="граница кванторов")
    common.add_argument("--verbose", action="store_true", help="подробный лог в stderr")

    parser = argparse.ArgumentParser(prog="universe", description="Конструкции над типами и операциями-графами")
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", parents=[common], help="проверка линейности графа")
    check.add_argument("path")

    evaluate = commands.add_parser("eval", parents=[common], help="вычисление графа")
    evaluate.add_argument("graph")
    evaluate.add_argument("inputs")

    repro = commands.add_parser("repro", parents=[common], help="воспроизведение построений")
    repro.add_argument("name", choices=sorted(SUITES))

    continuum = commands.add_parser("continuum", help="кубические комплексы")
    actions = continuum.add_subparsers(dest="action", required=True)
    analyze = actions.add_parser("analyze", parents=[common])
    analyze.add_argument("path")
    compare = actions.add_parser("similar", parents=[common])
    compare.add_argument("first")
    compare.add_argument("second")

    enum_types = commands.add_parser("enum-types", parents=[common], help="перечисление Ind1")
    enum_types.add_argument("count", type=positive_int)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    setup_logging(console_level=logging.INFO if args.verbose else logging.WARNING)
    command = args.command if args.command != "continuum" else f"continuum {args.action}"

    handler = COMMAND_HANDLERS[command]
    try:
        status, report = handler(args)
    except FORMAT_ERRORS as e:
        logger.error(f"Ошибка входных данных в команде {command}: {str(e)}", exc_info=True)
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_USAGE
    except UniverseError as e:
        logger.error(f"Ошибка в обработчике {command}: {str(e)}", exc_info=True)
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_FAILURE

    sys.stdout.write(report.render(as_json=args.json))
    logger.info("Команда %s завершена с кодом %d", command, status)
    return status


if __name__ == "__main__":
    sys.exit(main())
