"""Softmax cross-entropy with max-subtraction stabilization."""

from __future__ import annotations

import numpy as np


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_xent(logits, label: int):
    """Loss and logit gradient for a single example.

    loss = -log softmax(logits)[label]; grad = softmax(logits) - onehot.
    """
    logits = np.asarray(logits, dtype=np.float64)
    n_classes = logits.shape[-1]
    if not 0 <= label < n_classes:
        raise ValueError(f"label {label} outside [0, {n_classes})")
    z = logits - logits.max()
    log_norm = np.log(np.exp(z).sum())
    loss = float(log_norm - z[label])
    grad = softmax(logits)
    grad[label] -= 1.0
    return loss, grad


def softmax_xent_batch(logits: np.ndarray, labels: np.ndarray):
    """Mean loss over a batch of (N, C) logits; grad already includes 1/N."""
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    n, n_classes = logits.shape
    if labels.min() < 0 or labels.max() >= n_classes:
        raise ValueError(f"labels outside [0, {n_classes})")
    z = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(z).sum(axis=1))
    loss = float(np.mean(log_norm - z[np.arange(n), labels]))
    grad = softmax(logits)
    grad[np.arange(n), labels] -= 1.0
    return loss, grad / n
