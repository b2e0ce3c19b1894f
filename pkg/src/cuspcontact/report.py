"""Verification reports, sample plans and their serialization."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np


def fmt_num(x: float) -> str:
    """Deterministic 17-significant-digit decimal string."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _jsonable(v: Any) -> Any:
    if isinstance(v, (bool, str)) or v is None:
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return fmt_num(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return str(v)


@dataclass
class Report:
    """Outcome of one named check.

    ``failures`` counts samples that violated a non-metric condition (sign,
    positivity, missing witness); ``passed`` requires none of those and
    ``max_abs_error <= threshold``.
    """

    check: str
    params: dict
    samples: int
    max_abs_error: float
    threshold: float
    failures: int = 0
    details: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.max_abs_error <= self.threshold

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "params": _jsonable(self.params),
            "samples": int(self.samples),
            "max_abs_error": fmt_num(self.max_abs_error),
            "threshold": fmt_num(self.threshold),
            "pass": self.passed,
            "details": _jsonable(self.details),
        }

    def text_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" failures={self.failures}" if self.failures else ""
        return (
            f"{status} {self.check} samples={self.samples} "
            f"max_abs_error={fmt_num(self.max_abs_error)} threshold={fmt_num(self.threshold)}{extra}"
        )


class ErrorTracker:
    """Running max of |error| remembering the worst sample."""

    def __init__(self) -> None:
        self.max = 0.0
        self.worst: dict | None = None
        self.failures: list[dict] = []

    def update(self, err: float, **info) -> None:
        err = abs(float(err))
        if not err <= self.max:
            # NaN also lands here and poisons the max, failing the check
            self.max = err if not math.isnan(err) else math.inf
            self.worst = {"kind": "worst", "error": err, **info}

    def fail(self, **info) -> None:
        self.failures.append({"kind": "failure", **info})

    def report(self, check: str, params: dict, samples: int, threshold: float, extra: Iterable[dict] = ()) -> Report:
        details = list(extra)
        if self.worst is not None:
            details.append(self.worst)
        details.extend(self.failures[:5])
        return Report(check, params, samples, self.max, threshold, len(self.failures), details)


def emit_report(reports: Sequence[Report], fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=False)
    return "\n".join(r.text_line() for r in reports)


@dataclass(frozen=True)
class SamplePlan:
    """Counter-based deterministic sampler over a coordinate box.

    Sample ``i`` of stream ``s`` depends only on ``(seed, i, s)``.
    """

    seed: int = 42
    n_samples: int = 1000
    low: tuple[float, ...] = (0.0, 0.0, 0.0)
    high: tuple[float, ...] = (1.0, 1.0, 1.0)
    h: float = 1e-5
    tol: float = 1e-9

    def rng(self, i: int, stream: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed & 0xFFFFFFFFFFFFFFFF, i, stream])

    def point(self, i: int, stream: int = 0) -> np.ndarray:
        lo = np.asarray(self.low, dtype=float)
        hi = np.asarray(self.high, dtype=float)
        return lo + (hi - lo) * self.rng(i, stream).random(len(lo))

    def points(self, stream: int = 0) -> Iterable[np.ndarray]:
        for i in range(self.n_samples):
            yield self.point(i, stream)

    def vector(self, i: int, dim: int, stream: int = 1) -> np.ndarray:
        return self.rng(i, stream).uniform(-1.0, 1.0, dim)

    def replace(self, **kw) -> SamplePlan:
        from dataclasses import replace

        return replace(self, **kw)
