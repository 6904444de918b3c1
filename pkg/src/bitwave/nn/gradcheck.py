"""Central-finite-difference gradient verification.

`grad_check` compares a fragment's analytic backward pass against numeric
central differences for every parameter element and every input element.
`run_battery` bundles the standard fragments (conv1d, conv2d, fc, a
conv-relu-fc composition, lstm, gru, bigru, softmax cross-entropy) into one
pass/fail report; the CLI `gradcheck` subcommand and the acceptance suite
both run it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from bitwave.errors import NumericalError
from bitwave.nn.layers import Conv1d, Conv2d, Dense, Relu
from bitwave.nn.loss import softmax_xent
from bitwave.nn.recurrent import BiGru, Gru, Lstm

LINEAR_TOLERANCE = 1e-7
DEFAULT_TOLERANCE = 1e-4
DEFAULT_EPS = 1e-5


@dataclass
class GradReport:
    name: str
    max_rel_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_rel_error <= self.tolerance

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return (f"{status}  {self.name:<24} max rel err {self.max_rel_error:.3e} "
                f"(tol {self.tolerance:.0e})")


def rel_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    a = np.asarray(analytic, dtype=np.float64)
    n = np.asarray(numeric, dtype=np.float64)
    if not (np.isfinite(a).all() and np.isfinite(n).all()):
        raise NumericalError("non-finite values in gradient comparison")
    denom = np.maximum(np.abs(a) + np.abs(n), 1e-8)
    return float(np.max(np.abs(a - n) / denom))


def _numeric_grad(loss_fn, array: np.ndarray, eps: float) -> np.ndarray:
    grad = np.zeros_like(array)
    flat = array.ravel()
    gflat = grad.ravel()
    for idx in range(flat.size):
        orig = flat[idx]
        flat[idx] = orig + eps
        loss_plus = loss_fn()
        flat[idx] = orig - eps
        loss_minus = loss_fn()
        flat[idx] = orig
        gflat[idx] = (loss_plus - loss_minus) / (2.0 * eps)
    return grad


def grad_check(fragment, x, eps: float = DEFAULT_EPS,
               tolerance: float = DEFAULT_TOLERANCE, name: str | None = None,
               _corrupt: bool = False) -> GradReport:
    """Compare analytic and numeric gradients of sum(forward(x) * R).

    The probe tensor R is fixed pseudo-random, so the scalar loss exercises
    every output element. Checks cover all parameters plus the input.
    """
    x = np.asarray(x, dtype=np.float64)
    probe_rng = np.random.default_rng(0x5EED)
    r = probe_rng.standard_normal(fragment.forward(x, train=False).shape)

    def loss_fn() -> float:
        return float(np.sum(fragment.forward(x, train=False) * r))

    for p in fragment.parameters():
        p.zero_grad()
    fragment.forward(x, train=False)
    gx_analytic = fragment.backward(r.copy())
    analytic = [p.grad.copy() for p in fragment.parameters()]
    if _corrupt and analytic:
        analytic[0] = analytic[0] + 1e-2

    worst = 0.0
    for p, a in zip(fragment.parameters(), analytic):
        numeric = _numeric_grad(loss_fn, p.data, eps)
        worst = max(worst, rel_error(a, numeric))
    numeric_x = _numeric_grad(loss_fn, x, eps)
    worst = max(worst, rel_error(gx_analytic, numeric_x))
    return GradReport(name or getattr(fragment, "name", "fragment"),
                      worst, tolerance)


class _Stack:
    """Minimal sequential container used only for battery fragments."""

    def __init__(self, name, layers):
        self.name = name
        self.layers = layers

    def forward(self, x, train=False):
        for layer in self.layers:
            x = layer.forward(x, train=train)
        return x

    def backward(self, gy):
        for layer in reversed(self.layers):
            gy = layer.backward(gy)
        return gy

    def parameters(self):
        return [p for layer in self.layers for p in layer.parameters()]


class _FlattenTail:
    """(N, C, L) -> (N, C*L) shim between conv and fc layers."""

    def __init__(self):
        self._shape = None

    def forward(self, x, train=False):
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, gy):
        return gy.reshape(self._shape)

    def parameters(self):
        return []


class _MaskedBiGru:
    """BiGru adapter fixing the length mask so pads stay out of the loss."""

    def __init__(self, cell: BiGru, lengths):
        self.name = cell.name
        self.cell = cell
        self.lengths = np.asarray(lengths)

    def forward(self, x, train=False):
        hs = self.cell.forward(x, lengths=self.lengths, train=train)
        mask = np.zeros(hs.shape[:2] + (1,))
        for i, length in enumerate(self.lengths):
            mask[i, : int(length)] = 1.0
        self._mask = mask
        return hs * mask

    def backward(self, gy):
        return self.cell.backward(gy * self._mask)

    def parameters(self):
        return self.cell.parameters()


def _softmax_report(tolerance=DEFAULT_TOLERANCE, eps=DEFAULT_EPS) -> GradReport:
    rng = np.random.default_rng(7)
    logits = rng.standard_normal(6) * 3.0
    label = 2
    _, analytic = softmax_xent(logits, label)
    numeric = _numeric_grad(lambda: softmax_xent(logits, label)[0], logits, eps)
    return GradReport("softmax_xent", rel_error(analytic, numeric), tolerance)


def run_battery(corrupt: bool = False) -> list[GradReport]:
    """Gradient battery over every layer kind; `corrupt` is the negative
    control that falsifies one analytic gradient."""
    rng = np.random.default_rng(20240601)
    reports = []

    fc = Dense(5, 4, rng, name="fc")
    reports.append(grad_check(fc, rng.standard_normal((3, 5)),
                              tolerance=LINEAR_TOLERANCE, _corrupt=corrupt))

    conv1 = Conv1d(2, 3, kernel=3, stride=2, rng=rng, name="conv1d")
    reports.append(grad_check(conv1, rng.standard_normal((2, 2, 9))))

    conv2 = Conv2d(2, 3, kernel=(3, 2), stride=(2, 1), rng=rng, name="conv2d")
    reports.append(grad_check(conv2, rng.standard_normal((2, 2, 7, 5))))

    stack = _Stack("conv_relu_fc", [
        Conv1d(2, 4, kernel=3, stride=2, rng=rng, name="stack.conv"),
        Relu(),
        _FlattenTail(),
        Dense(4 * 4, 3, rng, name="stack.fc"),
    ])
    reports.append(grad_check(stack, rng.standard_normal((2, 2, 9))))

    lstm = Lstm(3, 4, rng, name="lstm_t5")
    reports.append(grad_check(lstm, rng.standard_normal((2, 5, 3))))

    gru = Gru(3, 4, rng, name="gru_t5")
    reports.append(grad_check(gru, rng.standard_normal((2, 5, 3))))

    bigru = _MaskedBiGru(BiGru(3, 4, rng, name="bigru_t5"), lengths=[5, 3])
    reports.append(grad_check(bigru, rng.standard_normal((2, 5, 3))))

    reports.append(_softmax_report())
    return reports
