"""Momentum SGD and the learning-rate schedules the training loop uses."""

from __future__ import annotations

import numpy as np

from bitwave.errors import ConfigError

DEFAULT_MOMENTUM = 0.9

LR_POLICIES = ("constant", "halve_every_30")


def lr_schedule(epoch: int, base_lr: float, policy: str = "constant") -> float:
    """Learning rate at a given epoch (0-based)."""
    if epoch < 0:
        raise ConfigError(f"epoch must be >= 0, got {epoch}")
    if policy == "constant":
        return base_lr
    if policy == "halve_every_30":
        return base_lr * 0.5 ** (epoch // 30)
    raise ConfigError(f"lr policy must be one of {LR_POLICIES}, got {policy!r}")


class MomentumSgd:
    """Classical momentum: v <- mu*v - lr*g; w <- w + v.

    mu = 0 degenerates to plain SGD. Velocities mirror parameter shapes.
    """

    def __init__(self, params, lr: float, momentum: float = DEFAULT_MOMENTUM):
        self.params = list(params)
        self.lr = float(lr)
        self.momentum = float(momentum)
        self.velocity = [np.zeros_like(p.data) for p in self.params]

    def zero_grad(self):
        for p in self.params:
            p.zero_grad()

    def step(self, lr: float | None = None):
        lr = self.lr if lr is None else lr
        for p, v in zip(self.params, self.velocity):
            v *= self.momentum
            v -= lr * p.grad
            p.data += v

    def state_arrays(self):
        """Velocity tensors in parameter order (for checkpointing)."""
        return list(self.velocity)

    def load_state_arrays(self, arrays):
        if len(arrays) != len(self.velocity):
            raise ConfigError("optimizer state does not match parameter count")
        for v, a in zip(self.velocity, arrays):
            if v.shape != a.shape:
                raise ConfigError("optimizer state shape mismatch")
            v[...] = a
