import io
import json
import logging
import sys
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel

from hyperent.exceptions import OutputError
from hyperent.models import CurveTable, OutputFormat
from hyperent.state import Branch, Ensemble, PureState

logger = logging.getLogger(__name__)


def to_jsonable(value: Any) -> Any:
    """Plain JSON values; complex numbers become [re, im]"""
    if isinstance(value, PureState):
        return {
            "layout": [str(label) for label in value.layout.labels],
            "amplitudes": [to_jsonable(a) for a in value.amplitudes],
        }
    if isinstance(value, Ensemble):
        return {"members": [{"weight": w, "state": to_jsonable(s)} for w, s in value.members]}
    if isinstance(value, Branch):
        return {
            "outcome": list(value.outcome),
            "probability": value.probability,
            "accepted": value.accepted,
            "corrections": list(value.corrections),
            "state": to_jsonable(value.state),
        }
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, BaseModel):
        return to_jsonable(dict(value))
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def report_payload(report) -> Dict[str, Any]:
    return {
        "protocol": report.protocol,
        "success": report.success,
        "success_probability": report.success_probability,
        "corrections": list(report.corrections),
        "branches": [to_jsonable(b) for b in report.branches],
        "output": to_jsonable(report.output),
        "outputs": to_jsonable(report.outputs),
        "details": to_jsonable(report.details),
    }


def _format_floats(frame: pd.DataFrame) -> pd.DataFrame:
    frame = frame.copy()
    for column in frame.columns:
        if pd.api.types.is_float_dtype(frame[column]):
            frame[column] = frame[column].map(lambda v: repr(float(v)))
    return frame


class ResultWriter:
    """Writes run artifacts as JSON or CSV to a file or stdout"""

    def _emit(self, text: str, path: Optional[str]) -> None:
        try:
            if path is None:
                sys.stdout.write(text)
                sys.stdout.flush()
                return
            with open(path, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
            logger.info(f"Wrote {len(text)} bytes to {path}")
        except OSError as e:
            logger.error(f"Failed to write output to {path}: {e}")
            raise OutputError(f"Cannot write {path}: {e}") from e

    def _json(self, metadata: Dict[str, Any], key: str, body: Any) -> str:
        return json.dumps({"metadata": to_jsonable(metadata), key: to_jsonable(body)}, sort_keys=True, indent=2) + "\n"

    def _csv(self, metadata: Dict[str, Any], frame: pd.DataFrame) -> str:
        buffer = io.StringIO()
        for key in sorted(metadata):
            value = metadata[key]
            if isinstance(value, (dict, list)):
                value = json.dumps(to_jsonable(value), sort_keys=True)
            buffer.write(f"# {key}: {to_jsonable(value)}\n")
        _format_floats(frame).to_csv(buffer, index=False, lineterminator="\n")
        return buffer.getvalue()

    def write_report(self, metadata: Dict[str, Any], report, path: Optional[str] = None,
                     output_format: OutputFormat = OutputFormat.JSON) -> None:
        """Full report as JSON, or the branch table as CSV"""
        try:
            if output_format == OutputFormat.JSON:
                text = self._json(metadata, "report", report_payload(report))
            else:
                frame = pd.DataFrame(
                    [{
                        "outcome": " | ".join(b.outcome),
                        "probability": float(b.probability),
                        "accepted": b.accepted,
                        "corrections": " ".join(b.corrections),
                    } for b in report.branches],
                    columns=["outcome", "probability", "accepted", "corrections"],
                )
                text = self._csv(metadata, frame)
        except (TypeError, ValueError) as e:
            logger.error(f"Failed to serialize report {report.protocol}: {e}")
            raise
        self._emit(text, path)

    def write_table(self, metadata: Dict[str, Any], table: CurveTable, path: Optional[str] = None,
                    output_format: OutputFormat = OutputFormat.JSON) -> None:
        if output_format == OutputFormat.JSON:
            text = self._json(metadata, "table", table.model_dump())
        else:
            text = self._csv({**metadata, "table": table.metadata}, table.to_frame())
        self._emit(text, path)

    def write_samples(self, metadata: Dict[str, Any], result, path: Optional[str] = None,
                      output_format: OutputFormat = OutputFormat.JSON) -> None:
        deviations = result.deviations()
        if output_format == OutputFormat.JSON:
            body = {
                "counts": result.counts,
                "frequencies": result.frequencies,
                "deviations": deviations,
                "agrees": result.agrees(),
            }
            text = self._json(metadata, "samples", body)
        else:
            frame = pd.DataFrame(
                [{
                    "outcome": token,
                    "probability": float(entry["probability"]),
                    "count": int(result.counts.get(token, 0)),
                    "frequency": float(entry["frequency"]),
                    "bound": float(entry["bound"]),
                } for token, entry in sorted(deviations.items())],
                columns=["outcome", "probability", "count", "frequency", "bound"],
            )
            text = self._csv(metadata, frame)
        self._emit(text, path)


writer = ResultWriter()
