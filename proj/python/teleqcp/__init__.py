"""Teleportation fidelity as a detector of quantum critical points in spin chains."""

from ._core import (
    Correlators,
    SweepResult,
    TeleqcpError,
    ed_correlators,
    estimate_qcp,
    max_avg_fidelity,
    max_mean_fidelity,
    sweep,
    xxz_delta1,
    xxz_delta2,
    xy_correlators,
)

__all__ = [
    "Correlators",
    "SweepResult",
    "TeleqcpError",
    "ed_correlators",
    "estimate_qcp",
    "max_avg_fidelity",
    "max_mean_fidelity",
    "sweep",
    "xxz_delta1",
    "xxz_delta2",
    "xy_correlators",
]
