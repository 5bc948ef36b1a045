import json
import logging
import sys
from typing import Any, Dict

from pydantic import ValidationError

from hyperent import __version__
from hyperent.analysis import sample
from hyperent.exceptions import ParameterError, StateError, UnknownProtocolError
from hyperent.instrumentation import timed_run
from hyperent.models import CurveTable, RunConfig, RunMetadata, RunMode
from hyperent.protocols.base_protocol import get_protocol
from hyperent.storage import writer

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNKNOWN_PROTOCOL = 2
EXIT_INVALID = 3
EXIT_IO = 4


def config_from_mapping(data: Dict[str, Any]) -> RunConfig:
    """RunConfig from a JSON object; keys that are not run fields become protocol parameters"""
    fields = set(RunConfig.model_fields)
    parameters = dict(data.get("parameters") or {})
    parameters.update({k: v for k, v in data.items() if k not in fields})
    return RunConfig(**{k: v for k, v in data.items() if k in fields and k != "parameters"},
                     parameters=parameters)


def load_config(path: str) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except json.JSONDecodeError as e:
        raise ParameterError(f"Config file {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ParameterError(f"Config file {path} must hold a JSON object")
    return data


def metadata_for(config: RunConfig) -> Dict[str, Any]:
    metadata = RunMetadata(
        tool="hyperent",
        version=__version__,
        protocol=config.protocol,
        mode=config.mode,
        seed=config.seed,
        trials=config.trials,
        parameters=config.parameters,
    )
    return metadata.model_dump(mode="json")


def execute(config: RunConfig) -> None:
    """Run the configured protocol and write its artifact; errors propagate"""
    protocol = get_protocol(config.protocol)
    with timed_run(config.protocol, mode=config.mode.value):
        result = protocol.run(config.parameters)
    metadata = metadata_for(config)
    if config.mode == RunMode.SAMPLE:
        if isinstance(result, CurveTable):
            raise ParameterError(f"{config.protocol} produces a table and cannot be sampled")
        samples = sample(result, config.trials, config.seed)
        writer.write_samples(metadata, samples, config.output_path, config.output_format)
    elif isinstance(result, CurveTable):
        writer.write_table(metadata, result, config.output_path, config.output_format)
    else:
        writer.write_report(metadata, result, config.output_path, config.output_format)


def run(config: RunConfig) -> int:
    """Exit status: 0 ok, 2 unknown protocol, 3 invalid parameters, 4 output failure"""
    try:
        execute(config)
        return EXIT_OK
    except UnknownProtocolError as e:
        logger.error(f"Unknown protocol: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNKNOWN_PROTOCOL
    except (ParameterError, StateError, ValidationError) as e:
        logger.error(f"Invalid run of {config.protocol}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as e:
        logger.error(f"Output failure for {config.protocol}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
