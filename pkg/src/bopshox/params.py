"""Physical parameters of the coupled-oscillator system.

Units have hbar = 1 throughout; there is no switch for it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .errors import (
    ConfigError,
    CouplingOutOfRange,
    FrequencyOrderViolation,
    InvalidParameter,
    NonPositiveParameter,
)

PARAM_KEYS = ("m", "M", "omega", "Omega", "delta")


@dataclass(frozen=True)
class SystemParams:
    """Masses, frequencies and dimensionless coupling of the two oscillators.

    The x oscillator (mass `m`, frequency `omega`) is the fast one and the
    y oscillator (mass `M`, frequency `Omega`) the slow one, so
    ``Omega < omega`` is enforced. The bilinear coupling constant ``c`` of
    the ``c*x*y`` term is derived from ``delta``.
    """

    m: float
    M: float
    omega: float
    Omega: float
    delta: float
    Omega_bar: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for key in PARAM_KEYS:
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise InvalidParameter(f"{key} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise InvalidParameter(f"{key} must be finite, got {value!r}")
            object.__setattr__(self, key, float(value))
        for key in ("m", "M", "omega", "Omega"):
            if getattr(self, key) <= 0.0:
                raise NonPositiveParameter(f"{key} must be > 0, got {getattr(self, key)!r}")
        if abs(self.delta) >= 1.0:
            raise CouplingOutOfRange(f"|delta| must be < 1, got {self.delta!r}")
        if self.Omega >= self.omega:
            raise FrequencyOrderViolation(
                f"Omega must be strictly below omega (got Omega={self.Omega!r}, omega={self.omega!r})"
            )
        object.__setattr__(self, "Omega_bar", self.Omega / self.omega)

    @property
    def c(self) -> float:
        """Bilinear coupling constant of the ``c*x*y`` potential term."""
        return self.delta * math.sqrt(self.m * self.M) * self.omega * self.Omega

    @classmethod
    def from_reduced(cls, delta: float, Omega_bar: float, m: float = 1.0,
                     M: float = 1.0, omega: float = 1.0) -> "SystemParams":
        return cls(m=m, M=M, omega=omega, Omega=Omega_bar * omega, delta=delta)

    def replace(self, **changes) -> "SystemParams":
        values = {k: getattr(self, k) for k in PARAM_KEYS}
        values.update(changes)
        return SystemParams(**values)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in PARAM_KEYS}


@dataclass(frozen=True)
class StateIndex:
    """Quantum numbers: ``n`` for the fast x channel, ``l`` for the slow y channel."""

    n: int
    l: int

    def __post_init__(self):
        for key in ("n", "l"):
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise InvalidParameter(f"{key} must be a non-negative integer, got {value!r}")


def validate(raw: Mapping) -> SystemParams:
    """Build a `SystemParams` from a mapping with keys m, M, omega, Omega, delta.

    String values (as read from a config file) are converted with `float`.
    Every failure surfaces as a subclass of `InvalidParameter`.
    """
    if not isinstance(raw, Mapping):
        raise InvalidParameter(f"expected a mapping of parameters, got {type(raw).__name__}")
    missing = [k for k in PARAM_KEYS if k not in raw]
    if missing:
        raise InvalidParameter(f"missing parameter(s): {', '.join(missing)}")
    unknown = sorted(set(raw) - set(PARAM_KEYS))
    if unknown:
        raise InvalidParameter(f"unknown parameter(s): {', '.join(unknown)}")
    values = {}
    for key in PARAM_KEYS:
        value = raw[key]
        if isinstance(value, str):
            try:
                value = float(value)
            except ValueError:
                raise InvalidParameter(f"{key}: cannot parse {raw[key]!r} as a number") from None
        values[key] = value
    return SystemParams(**values)


def parse_config(text: str) -> dict:
    """Parse ``key = value`` lines. Blank lines and ``#`` comments are skipped."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in PARAM_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)
