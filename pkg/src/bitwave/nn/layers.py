"""Trainable layers: valid convolutions (1-D and 2-D), ReLU, inverted
dropout, and the fully-connected layer.

Conventions shared by every layer:
  * forward(x, train=...) caches whatever backward needs;
  * backward(gy) returns grad wrt the input and accumulates parameter grads;
  * parameters are float64 and owned by Param objects.

Initialization is uniform +-sqrt(6 / fan_in) for conv/fc weights, zero for
biases, drawn from an explicit seeded generator.
"""

from __future__ import annotations

import numpy as np

from bitwave.errors import ConfigError
from bitwave.nn import backend


class Param:
    """A tensor parameter and its gradient accumulator."""

    def __init__(self, name: str, data: np.ndarray):
        self.name = name
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = np.zeros_like(self.data)

    def zero_grad(self):
        self.grad[...] = 0.0

    @property
    def size(self) -> int:
        return self.data.size


def uniform_init(rng: np.random.Generator, shape, fan_in: int) -> np.ndarray:
    limit = np.sqrt(6.0 / fan_in)
    return rng.uniform(-limit, limit, size=shape)


class Conv1d:
    """Valid cross-correlation over the time axis of (N, C, L) inputs."""

    def __init__(self, in_channels, out_channels, kernel, stride,
                 rng: np.random.Generator, name="conv1d"):
        self.name = name
        self.stride = int(stride)
        self.kernel = int(kernel)
        fan_in = in_channels * kernel
        self.w = Param(f"{name}.w",
                       uniform_init(rng, (out_channels, in_channels, kernel), fan_in))
        self.b = Param(f"{name}.b", np.zeros(out_channels))
        self._x = None

    def out_len(self, in_len: int) -> int:
        return backend.conv_out_len(in_len, self.kernel, self.stride)

    def forward(self, x, train=False):
        self._x = np.ascontiguousarray(x, dtype=np.float64)
        return backend.conv1d_forward(self._x, self.w.data, self.b.data, self.stride)

    def backward(self, gy):
        gx, gw, gb = backend.conv1d_backward(self._x, self.w.data, self.stride, gy)
        self.w.grad += gw
        self.b.grad += gb
        return gx

    def parameters(self):
        return [self.w, self.b]


class Conv2d:
    """Valid cross-correlation over the trailing two axes of (N, C, H, W)."""

    def __init__(self, in_channels, out_channels, kernel, stride,
                 rng: np.random.Generator, name="conv2d"):
        self.name = name
        self.kernel = (int(kernel[0]), int(kernel[1]))
        self.stride = (int(stride[0]), int(stride[1]))
        fan_in = in_channels * self.kernel[0] * self.kernel[1]
        self.w = Param(f"{name}.w",
                       uniform_init(rng, (out_channels, in_channels, *self.kernel),
                                    fan_in))
        self.b = Param(f"{name}.b", np.zeros(out_channels))
        self._x = None

    def out_shape(self, h: int, w: int) -> tuple[int, int]:
        return (backend.conv_out_len(h, self.kernel[0], self.stride[0]),
                backend.conv_out_len(w, self.kernel[1], self.stride[1]))

    def forward(self, x, train=False):
        self._x = np.ascontiguousarray(x, dtype=np.float64)
        return backend.conv2d_forward(self._x, self.w.data, self.b.data,
                                      *self.stride)

    def backward(self, gy):
        gx, gw, gb = backend.conv2d_backward(self._x, self.w.data,
                                             *self.stride, gy)
        self.w.grad += gw
        self.b.grad += gb
        return gx

    def parameters(self):
        return [self.w, self.b]


class Relu:
    def __init__(self, name="relu"):
        self.name = name
        self._mask = None

    def forward(self, x, train=False):
        self._mask = x > 0
        return np.where(self._mask, x, 0.0)

    def backward(self, gy):
        return np.where(self._mask, gy, 0.0)

    def parameters(self):
        return []


class Dropout:
    """Inverted dropout: eval mode is the exact identity.

    In train mode each element is zeroed with probability ``rate`` and
    survivors are scaled by 1/(1-rate), preserving the expectation. Masks
    come from the generator handed in at construction, so a reseeded model
    replays the identical mask sequence.
    """

    def __init__(self, rate: float, rng: np.random.Generator, name="dropout"):
        if not 0.0 <= rate < 1.0:
            raise ConfigError(f"dropout rate must lie in [0, 1), got {rate}")
        self.name = name
        self.rate = float(rate)
        self.rng = rng
        self._mask = None

    def forward(self, x, train=False):
        if not train or self.rate == 0.0:
            self._mask = None
            return x
        keep = 1.0 - self.rate
        self._mask = (self.rng.random(x.shape) >= self.rate) / keep
        return x * self._mask

    def backward(self, gy):
        if self._mask is None:
            return gy
        return gy * self._mask

    def parameters(self):
        return []


class Dense:
    """Affine map y = x @ W + b on (N, D) inputs."""

    def __init__(self, in_features, out_features, rng: np.random.Generator,
                 name="fc"):
        self.name = name
        self.w = Param(f"{name}.w",
                       uniform_init(rng, (in_features, out_features), in_features))
        self.b = Param(f"{name}.b", np.zeros(out_features))
        self._x = None

    def forward(self, x, train=False):
        self._x = np.asarray(x, dtype=np.float64)
        return self._x @ self.w.data + self.b.data

    def backward(self, gy):
        self.w.grad += self._x.T @ gy
        self.b.grad += gy.sum(axis=0)
        return gy @ self.w.data.T

    def parameters(self):
        return [self.w, self.b]
