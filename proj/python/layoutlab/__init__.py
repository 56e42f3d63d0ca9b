"""Deterministic toolkit for 3D scene-layout benchmarks.

Generate seeded benchmark instances, solve them with rule-based oracles,
score predictions and reasoning traces, and render scenes — all through a
JSON/JSONL text interface that matches the ``layoutlab`` CLI byte for byte.
"""

from layoutlab._core import (
    GraphParseError,
    InfeasibleError,
    ValidationError,
    canonical_json,
    canonical_trace,
    evaluate,
    generate,
    group_advantages,
    render,
    score_trace,
    solve,
)

__all__ = [
    "GraphParseError",
    "InfeasibleError",
    "ValidationError",
    "canonical_json",
    "canonical_trace",
    "evaluate",
    "generate",
    "group_advantages",
    "render",
    "score_trace",
    "solve",
]
