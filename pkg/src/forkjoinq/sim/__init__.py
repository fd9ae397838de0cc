"""Discrete-event simulation of fork-join queue variants."""

from .backend import ENV_FLAG, Backend, available_backends, get_backend
from .reference import EventQueue, ReferenceTrace, simulate_reference
from .runner import SamplePaths, SimConfig, SimResult, run, run_joint, sample_paths

__all__ = [
    "ENV_FLAG",
    "Backend",
    "available_backends",
    "get_backend",
    "EventQueue",
    "ReferenceTrace",
    "simulate_reference",
    "SamplePaths",
    "SimConfig",
    "SimResult",
    "run",
    "run_joint",
    "sample_paths",
]
