"""Central finite differences with one Richardson level and error tracking."""

from __future__ import annotations

import contextvars
from contextlib import contextmanager

import numpy as np

_EPS = np.finfo(float).eps
_tracker: contextvars.ContextVar = contextvars.ContextVar("fd_error_tracker", default=None)


class ErrorEstimate:
    """Running maximum of the finite-difference error estimates seen in a block."""

    def __init__(self):
        self.value = 0.0
        self.evaluations = 0

    def record(self, err: float) -> None:
        self.evaluations += 1
        if err > self.value:
            self.value = float(err)


@contextmanager
def fd_error_tracking():
    """Collect the largest derivative error estimate produced inside the block.

    Trackers nest; on exit the inner maximum is folded into the enclosing one.
    """
    est = ErrorEstimate()
    token = _tracker.set(est)
    try:
        yield est
    finally:
        _tracker.reset(token)
        parent = _tracker.get()
        if parent is not None:
            parent.record(est.value)


def record_error(err: float) -> None:
    est = _tracker.get()
    if est is not None:
        est.record(err)


def directional_derivative(f, x, v, step: float):
    """d/ds f(x + s v) at s = 0.

    Central differences at steps h and 2h are combined by Richardson
    extrapolation (fourth order); the same combination at 2h, 4h gives a
    second estimate whose difference, divided by 15, estimates the error.
    A noise term 2 (eps * max|f| + inner) / h is added, where ``inner`` is
    the largest error estimate recorded while evaluating f (nested
    differentiation amplifies it by 1/h).
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    h = float(step)
    vals = {}
    with fd_error_tracking() as inner:
        for s in (h, 2 * h, 4 * h):
            vals[s] = np.asarray(f(x + s * v)), np.asarray(f(x - s * v))
    d = {s: (vals[s][0] - vals[s][1]) / (2 * s) for s in vals}
    r1 = (4 * d[h] - d[2 * h]) / 3
    r2 = (4 * d[2 * h] - d[4 * h]) / 3
    scale = max(float(np.abs(vals[h][0]).max(initial=0.0)), float(np.abs(vals[h][1]).max(initial=0.0)))
    err = float(np.abs(r1 - r2).max(initial=0.0)) / 15 + 2 * (_EPS * scale + inner.value) / h
    record_error(err)
    return r1
