import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from hyperent import __version__
from hyperent.commands.list_command import list_protocols
from hyperent.commands.run_command import EXIT_INVALID, EXIT_IO, config_from_mapping, load_config, run
from hyperent.config import settings
from hyperent.exceptions import ParameterError

logger = logging.getLogger(__name__)


def setup_logging(level: str) -> None:
    # stdout carries the result artifact; logs go to stderr
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if settings.log_file:
        handlers.append(logging.FileHandler(settings.log_file))
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def parse_assignment(text: str) -> Dict[str, Any]:
    """key=value with the value read as JSON when possible"""
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise ParameterError(f"--set expects key=value, got {text!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return {key: value}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperent",
        description="Simulate hyperentangled-photon protocols and check them against their closed forms.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py --list
  python main.py --protocol hbsa --set pol=psi- --set spat=phi+
  python main.py --protocol epp-curve --set F=0.8 --set rounds=3 --format csv
  python main.py --protocol teleport --mode sample --trials 100000 --seed 7
  python main.py --config run.json --out result.json
""",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--list", action="store_true", help="List registered protocols and exit")
    parser.add_argument("--config", help="JSON run configuration file")
    parser.add_argument("--protocol", help="Protocol name (overrides the config file)")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="Protocol parameter; repeatable, values parsed as JSON")
    parser.add_argument("--mode", choices=["exact", "sample"], help="exact enumeration or seeded sampling")
    parser.add_argument("--trials", type=int, help="Number of trials in sample mode")
    parser.add_argument("--seed", type=int, help=f"Random seed (default: {settings.default_seed})")
    parser.add_argument("--out", help="Output file (default: stdout)")
    parser.add_argument("--format", choices=["json", "csv"], help=f"Output format (default: {settings.output_format})")
    parser.add_argument("--log-level", default=settings.log_level, help="Logging level (default: %(default)s)")
    return parser


def _merge(args: argparse.Namespace) -> Dict[str, Any]:
    data: Dict[str, Any] = load_config(args.config) if args.config else {}
    parameters = dict(data.pop("parameters", None) or {})
    for assignment in args.set:
        parameters.update(parse_assignment(assignment))
    overrides = {
        "protocol": args.protocol,
        "mode": args.mode,
        "trials": args.trials,
        "seed": args.seed,
        "output_path": args.out,
        "output_format": args.format,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    data["parameters"] = parameters
    return data


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)

    if args.list:
        print(list_protocols().to_string(index=False))
        return 0

    try:
        config = config_from_mapping(_merge(args))
    except (ParameterError, ValidationError) as e:
        logger.error(f"Invalid configuration: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as e:
        logger.error(f"Cannot read configuration: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
