"""Numerical tolerances and run configuration shared across modules."""
from __future__ import annotations

from dataclasses import dataclass, field, replace


@dataclass(frozen=True)
class Tolerances:
    construction: float = 1e-12
    region: float = 1e-10
    contraction: float = 1e-9
    trace_preserving: float = 1e-10
    psd: float = 1e-9
    hermitian: float = 1e-10

    def __post_init__(self):
        for name, value in vars(self).items():
            if not value > 0:
                raise ValueError(f"tolerance {name!r} must be positive, got {value}")


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True)
class RunConfig:
    """Settings echoed into every CLI report."""

    tolerances: Tolerances = field(default_factory=Tolerances)
    seed: int = 0
    starts: int = 20
    probes: int = 10_000
    output_format: str = "text"

    def __post_init__(self):
        if self.starts < 1 or self.probes < 1:
            raise ValueError("starts and probes must be >= 1")
        if self.output_format not in ("text", "structured"):
            raise ValueError(f"unknown output format {self.output_format!r}")

    def with_tol(self, tol: float | None) -> "RunConfig":
        """Override every tolerance that governs a verdict with ``tol``."""
        if tol is None:
            return self
        tols = replace(self.tolerances, region=tol, contraction=tol, psd=tol)
        return replace(self, tolerances=tols)

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "starts": self.starts,
            "probes": self.probes,
            "format": self.output_format,
            "tolerances": dict(vars(self.tolerances)),
        }
