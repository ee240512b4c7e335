"""Adam with a per-epoch multiplicative learning-rate decay."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from fdiadet.nn import ParamSet


@dataclass
class OptimizerState:
    """Adam moment accumulators plus the decayed-rate schedule.

    The effective rate at any step is ``learning_rate * decay ** epoch``;
    callers advance ``epoch`` once per training epoch.
    """

    learning_rate: float = 0.001
    decay: float = 0.99
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    epoch: int = 0
    m: ParamSet | None = None
    v: ParamSet | None = None

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if not 0.0 < self.decay <= 1.0:
            raise ValueError(f"decay must lie in (0, 1], got {self.decay}")

    @property
    def effective_rate(self) -> float:
        return self.learning_rate * self.decay ** self.epoch


def adam_step(state: OptimizerState, params: ParamSet, grads: ParamSet) -> tuple[ParamSet, OptimizerState]:
    """One Adam update in place; returns the mutated (params, state) pair."""
    if state.m is None:
        state.m = params.zeros_like()
        state.v = params.zeros_like()
    state.step += 1
    t = state.step
    lr = state.effective_rate
    b1, b2 = state.beta1, state.beta2
    bias1 = 1.0 - b1 ** t
    bias2 = 1.0 - b2 ** t
    for name, g in grads.items():
        if g.shape != params[name].shape:
            raise ValueError(f"gradient shape mismatch for {name!r}")
        m = state.m[name] * b1 + (1.0 - b1) * g
        v = state.v[name] * b2 + (1.0 - b2) * (g * g)
        state.m[name] = m
        state.v[name] = v
        m_hat = m / bias1
        v_hat = v / bias2
        params[name] = params[name] - lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return params, state
