# cli/schemas.py
"""
Instance files.

    {"alpha": [..] or {"j": v},
     "d": {"n": v}  XOR  "pattern": [b1, ...],
     "solver": {"method": "ipf" | "mirror_descent", "tol": v, "max_iter": k},
     "seed": s, "samples": k, "depth": n}

Frequencies may be JSON numbers or strings such as "1/3" or "0.25", which
are read as exact rationals. A top-level list holds several instances.
"""
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, StrictFloat, StrictInt, StrictStr
from pydantic import ValidationError as PydanticValidationError
from pydantic import field_validator, model_validator

from core.exceptions import InstanceError
from core.types import BasePattern, StochasticVector, base_frequencies_from_pattern, validate_stochastic
from variational.solvers import SolverConfig

RawNumber = Union[StrictInt, StrictFloat, StrictStr]


def parse_number(value):
    """int and "p/q" or decimal strings become Fractions, floats stay floats."""
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"{value!r} is not a number or a fraction p/q")
    if isinstance(value, int):
        return Fraction(value)
    return value


@dataclass(frozen=True)
class Problem:
    alpha: StochasticVector
    d: StochasticVector
    pattern: Optional[BasePattern]


class SolverOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")

    method: Optional[Literal["ipf", "mirror_descent"]] = None
    tol: Optional[PositiveFloat] = None
    max_iter: Optional[PositiveInt] = None
    step: Optional[PositiveFloat] = None
    init: Optional[Literal["uniform", "random"]] = None

    def to_config(self, seed=0):
        given = self.model_dump(exclude_none=True)
        return SolverConfig(seed=seed, **given)


class InstanceFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: Optional[str] = None
    alpha: Union[list[RawNumber], dict[int, RawNumber]]
    d: Optional[dict[int, RawNumber]] = None
    pattern: Optional[list[StrictInt]] = None
    solver: SolverOptions = Field(default_factory=SolverOptions)
    seed: int = 0
    samples: PositiveInt = 500
    depth: Optional[int] = Field(default=None, ge=0)

    @field_validator("alpha", mode="after")
    @classmethod
    def clean_alpha(cls, value):
        if isinstance(value, list):
            value = dict(enumerate(value))
        return {j: parse_number(v) for j, v in value.items()}

    @field_validator("d", mode="after")
    @classmethod
    def clean_d(cls, value):
        if value is None:
            return None
        return {n: parse_number(v) for n, v in value.items()}

    @model_validator(mode="after")
    def check_one_base_source(self):
        if (self.d is None) == (self.pattern is None):
            raise ValueError("exactly one of 'd' and 'pattern' must be given")
        return self

    def to_problem(self):
        """Validate the vectors through core.types; pattern wins as the source of d."""
        alpha = validate_stochastic(self.alpha)
        if self.pattern is not None:
            pattern = BasePattern(tuple(self.pattern))
            return Problem(alpha, base_frequencies_from_pattern(pattern), pattern)
        return Problem(alpha, validate_stochastic(self.d), None)

    def solver_config(self):
        return self.solver.to_config(seed=self.seed)


def _field(loc):
    return ".".join(str(part) for part in loc) or None


def parse_instances(text):
    """Parse instance JSON text into a list of InstanceFile."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError(f"invalid JSON: {e.msg} (column {e.colno})", line=e.lineno)

    items = raw if isinstance(raw, list) else [raw]
    if not items:
        raise InstanceError("instance list is empty")

    instances = []
    for position, item in enumerate(items):
        try:
            instances.append(InstanceFile.model_validate(item))
        except PydanticValidationError as e:
            error = e.errors()[0]
            loc = error["loc"] if len(items) == 1 else (position, *error["loc"])
            raise InstanceError(error["msg"], field=_field(loc))
    return instances


def load_instances(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InstanceError(f"cannot read instance file: {e.strerror}")
    return parse_instances(text)
