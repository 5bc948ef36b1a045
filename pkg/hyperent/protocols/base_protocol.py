import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Type, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from hyperent.config import settings
from hyperent.exceptions import ParameterError, StateError, UnknownProtocolError
from hyperent.models import CurveTable
from hyperent.state import Branch, Ensemble, PureState

logger = logging.getLogger(__name__)

Output = Union[PureState, Ensemble]


class ProtocolReport(BaseModel):
    """Outcome of one protocol run with its full branch trace"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    protocol: str
    success: Union[bool, str]
    output: Optional[Output] = None
    outputs: Dict[str, Output] = Field(default_factory=dict)
    corrections: List[str] = Field(default_factory=list)
    branches: List[Branch] = Field(default_factory=list)
    success_probability: float
    details: Dict[str, Any] = Field(default_factory=dict)

    def __init__(self, **data):
        super().__init__(**data)
        if not self.branches:
            return
        total = sum(b.probability for b in self.branches)
        if abs(total - 1.0) > settings.probability_tolerance:
            raise StateError(f"{self.protocol}: branch probabilities sum to {total:.12f}, not 1")
        accepted = sum(b.probability for b in self.branches if b.accepted)
        if abs(accepted - self.success_probability) > settings.probability_tolerance:
            raise StateError(
                f"{self.protocol}: success probability {self.success_probability:.12f} "
                f"does not match the accepted branches ({accepted:.12f})"
            )

    @property
    def accepted(self) -> List[Branch]:
        return [b for b in self.branches if b.accepted]


def collect_corrections(branches: List[Branch]) -> List[str]:
    """Distinct correction names in order of first use"""
    seen: List[str] = []
    for branch in branches:
        for name in branch.corrections:
            if name not in seen:
                seen.append(name)
    return seen


class BaseProtocol(ABC):
    """Base class for every runnable protocol or curve generator"""

    name: str = ""
    topic: str = ""
    anchor: str = ""
    parameters_model: Type[BaseModel]
    produces: str = "report"

    def run(self, parameters: Dict[str, Any]) -> Union[ProtocolReport, CurveTable]:
        """Validate the raw parameters and run the protocol"""
        validated = self.validate_parameters(parameters)
        try:
            return self._run(validated)
        except Exception as e:
            logger.error(f"Error running protocol {self.name}: {e}")
            raise

    def validate_parameters(self, parameters: Dict[str, Any]) -> BaseModel:
        try:
            return self.parameters_model(**parameters)
        except ValidationError as e:
            raise ParameterError(f"Invalid parameters for {self.name}: {e}") from e

    def parameter_schema(self) -> str:
        """Compact 'name:type=default' listing of the parameter model"""
        parts = []
        for field_name, field in self.parameters_model.model_fields.items():
            annotation = getattr(field.annotation, "__name__", str(field.annotation))
            if field.is_required():
                parts.append(f"{field_name}:{annotation}")
            else:
                parts.append(f"{field_name}:{annotation}={field.default}")
        return ", ".join(parts)

    @abstractmethod
    def _run(self, parameters: BaseModel) -> Union[ProtocolReport, CurveTable]:
        """Abstract method to be implemented by specific protocols"""
        pass


_REGISTRY: Dict[str, BaseProtocol] = {}


def register_protocol(cls: Type[BaseProtocol]) -> Type[BaseProtocol]:
    if cls.name in _REGISTRY:
        raise ValueError(f"Protocol {cls.name} is already registered")
    _REGISTRY[cls.name] = cls()
    return cls


def _load_catalog() -> None:
    import hyperent.protocols.catalog  # noqa: F401


def get_protocol(name: str) -> BaseProtocol:
    _load_catalog()
    if name not in _REGISTRY:
        raise UnknownProtocolError(f"Unknown protocol '{name}'; known: {', '.join(sorted(_REGISTRY))}")
    return _REGISTRY[name]


def registered_protocols() -> List[BaseProtocol]:
    _load_catalog()
    return [_REGISTRY[name] for name in sorted(_REGISTRY)]
