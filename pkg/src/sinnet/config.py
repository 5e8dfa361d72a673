"""Network architecture configuration for sinusoidal MLPs."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np


class Parametrization(Enum):
    """Forward-map convention.

    PRACTICAL is the trainable form: first layer sin(W1(Ω⊙x) + ω·b1), later
    hidden layers sin(W_l x + b_l) (SSN) or sin(ω(W_l x + b_l)) (SIREN),
    affine output. NTK is the infinite-width analysis form: f0 = ω(W0 x + b0),
    f_l = W_l·sin(f_{l-1})/√n_l + b_l, with unit-variance parameter sampling.
    """

    PRACTICAL = "practical"
    NTK = "ntk"


class InitFamily(Enum):
    SSN_NORMAL = "ssn_normal"
    SIREN_UNIFORM = "siren_uniform"


@dataclass(frozen=True)
class InitScheme:
    """Weight initialization family; ``c`` is the uniform bound for SIREN."""

    family: InitFamily
    c: float = float(np.sqrt(6.0))

    def __post_init__(self) -> None:
        if self.family is InitFamily.SIREN_UNIFORM and not self.c > 0:
            raise ValueError(f"SIREN uniform bound c must be positive, got {self.c}")

    @staticmethod
    def ssn_normal() -> "InitScheme":
        return InitScheme(InitFamily.SSN_NORMAL)

    @staticmethod
    def siren_uniform(c: float = float(np.sqrt(6.0))) -> "InitScheme":
        return InitScheme(InitFamily.SIREN_UNIFORM, c)


@dataclass(frozen=True)
class NetworkConfig:
    """Architecture, frequency scaling and initialization of a sine MLP.

    ``omega`` is the first-layer frequency factor; ``per_axis_scale`` holds the
    optional per-input-axis multipliers λ so the effective per-axis frequency
    is Ω_j = λ_j·ω.
    """

    input_dim: int
    hidden_widths: tuple[int, ...]
    output_dim: int
    omega: float
    per_axis_scale: tuple[float, ...] = ()
    init_scheme: InitScheme = field(default_factory=InitScheme.ssn_normal)
    parametrization: Parametrization = Parametrization.PRACTICAL
    seed: int = 0

    def __post_init__(self) -> None:
        if self.input_dim < 1:
            raise ValueError(f"input_dim must be >= 1, got {self.input_dim}")
        if self.output_dim < 1:
            raise ValueError(f"output_dim must be >= 1, got {self.output_dim}")
        if len(self.hidden_widths) < 1 or any(w < 1 for w in self.hidden_widths):
            raise ValueError(f"hidden_widths must be non-empty positive, got {self.hidden_widths}")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        scale = self.per_axis_scale or tuple(1.0 for _ in range(self.input_dim))
        if len(scale) != self.input_dim:
            raise ValueError(
                f"per_axis_scale has length {len(scale)}, expected input_dim={self.input_dim}"
            )
        if any(not s > 0 for s in scale):
            raise ValueError(f"per_axis_scale entries must be positive, got {scale}")
        object.__setattr__(self, "hidden_widths", tuple(int(w) for w in self.hidden_widths))
        object.__setattr__(self, "per_axis_scale", tuple(float(s) for s in scale))

    @property
    def layer_widths(self) -> tuple[int, ...]:
        """Full width chain n_0, n_1, ..., n_L, n_out."""
        return (self.input_dim, *self.hidden_widths, self.output_dim)

    @property
    def effective_omega(self) -> np.ndarray:
        """Per-axis first-layer frequency vector Ω = λ·ω."""
        return self.omega * np.asarray(self.per_axis_scale, dtype=np.float64)


def make_config(
    input_dim: int,
    hidden_widths: Sequence[int],
    output_dim: int,
    omega: float,
    **kwargs,
) -> NetworkConfig:
    """Convenience constructor accepting any sequence for hidden widths."""
    return NetworkConfig(input_dim, tuple(hidden_widths), output_dim, omega, **kwargs)
