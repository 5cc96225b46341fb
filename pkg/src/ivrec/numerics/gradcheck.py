"""Finite-difference validation of tape gradients."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConfigError
from . import tape
from .tape import Var


def grad_check(fn, params: list[Var], eps: float = 1e-5) -> float:
    """Max relative error between tape gradients and central differences.

    fn: zero-argument callable returning a scalar Var, reading `params`
    by closure.  Must be deterministic (dropout off).  The relative error
    denominator is max(|analytic|, |numeric|, 1e-8); any non-finite
    gradient reports as infinity.
    """
    if not 1e-6 <= eps <= 1e-4:
        raise ConfigError(f"grad_check eps must lie in [1e-6, 1e-4], got {eps}")
    out = fn()
    if out.value.ndim != 0:
        raise ConfigError("grad_check requires a scalar-valued function")
    tape.zero_grad(params)
    tape.backward(out)
    analytic = [np.zeros_like(p.value) if p.grad is None else p.grad.copy()
                for p in params]

    worst = 0.0
    for p, a in zip(params, analytic):
        flat_val = p.value.reshape(-1)
        flat_a = a.reshape(-1)
        for i in range(flat_val.size):
            orig = flat_val[i]
            flat_val[i] = orig + eps
            f_plus = float(fn().value)
            flat_val[i] = orig - eps
            f_minus = float(fn().value)
            flat_val[i] = orig
            numeric = (f_plus - f_minus) / (2.0 * eps)
            ai = float(flat_a[i])
            if not (math.isfinite(ai) and math.isfinite(numeric)):
                return math.inf
            rel = abs(ai - numeric) / max(abs(ai), abs(numeric), 1e-8)
            worst = max(worst, rel)
    return worst
