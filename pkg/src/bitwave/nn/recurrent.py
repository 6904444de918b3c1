"""Recurrent layers: LSTM, GRU, and a bidirectional GRU wrapper.

Cell equations (sigma = logistic):

  LSTM: i,f,o = sigma(...), g = tanh(...), c' = f*c + i*g, h' = o*tanh(c')
  GRU:  z,r = sigma(...), cand = tanh(Wx_n x + (r*h) Wh_n + b_n),
        h' = (1-z)*h + z*cand

Weights are packed per cell as Wx (D, G*H), Wh (H, G*H), b (G*H) with gate
blocks in the order written above. Recurrent weights use a plain scaled
uniform init (+-sqrt(1/fan_in)); the LSTM forget-gate bias starts at +1.

Batched sequences are (N, T, D). Padding is handled by the caller: the
forward pass runs every step, and masked readout plus zeroed upstream
gradients keep pad steps out of both the loss and the parameter gradients.
"""

from __future__ import annotations

import numpy as np

from bitwave.errors import ShapeError
from bitwave.nn.layers import Param


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _scaled_uniform(rng, shape, fan_in):
    limit = np.sqrt(1.0 / fan_in)
    return rng.uniform(-limit, limit, size=shape)


def reverse_padded(x: np.ndarray, lengths=None) -> np.ndarray:
    """Reverse each item's valid prefix along the time axis; zero the rest.

    Involution: applying it twice restores the input (pad tails stay zero),
    which is what lets the bidirectional backward pass reuse it.
    """
    if lengths is None:
        return x[:, ::-1].copy()
    out = np.zeros_like(x)
    for i, length in enumerate(lengths):
        length = int(length)
        out[i, :length] = x[i, length - 1 :: -1]
    return out


class Lstm:
    def __init__(self, input_size, hidden_size, rng: np.random.Generator,
                 name="lstm"):
        self.name = name
        self.input_size = int(input_size)
        self.hidden_size = int(hidden_size)
        h = self.hidden_size
        self.wx = Param(f"{name}.wx", _scaled_uniform(rng, (input_size, 4 * h),
                                                      input_size))
        self.wh = Param(f"{name}.wh", _scaled_uniform(rng, (h, 4 * h), h))
        bias = np.zeros(4 * h)
        bias[h : 2 * h] = 1.0  # forget gate starts open
        self.b = Param(f"{name}.b", bias)
        self._cache = None

    def parameters(self):
        return [self.wx, self.wh, self.b]

    def step(self, x_t, state=None):
        """One cell update; returns (h', (h', c')). Stateless wrt training."""
        x_t = np.atleast_2d(np.asarray(x_t, dtype=np.float64))
        n = x_t.shape[0]
        h_prev, c_prev = state if state is not None else (
            np.zeros((n, self.hidden_size)), np.zeros((n, self.hidden_size)))
        h_new, c_new, _ = self._advance(x_t, h_prev, c_prev)
        return h_new, (h_new, c_new)

    def _advance(self, x_t, h_prev, c_prev):
        hs = self.hidden_size
        pre = x_t @ self.wx.data + h_prev @ self.wh.data + self.b.data
        i = _sigmoid(pre[:, :hs])
        f = _sigmoid(pre[:, hs : 2 * hs])
        g = np.tanh(pre[:, 2 * hs : 3 * hs])
        o = _sigmoid(pre[:, 3 * hs :])
        c_new = f * c_prev + i * g
        h_new = o * np.tanh(c_new)
        return h_new, c_new, (i, f, g, o)

    def forward(self, x, train=False):
        """Run the full sequence; returns per-step hidden states (N, T, H)."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 3:
            raise ShapeError(f"lstm input must be (N, T, D), got {x.shape}")
        n, t_steps, _ = x.shape
        h = np.zeros((n, self.hidden_size))
        c = np.zeros((n, self.hidden_size))
        hs_out = np.zeros((n, t_steps, self.hidden_size))
        cache = []
        for t in range(t_steps):
            h_prev, c_prev = h, c
            h, c, gates = self._advance(x[:, t], h_prev, c_prev)
            hs_out[:, t] = h
            cache.append((x[:, t], h_prev, c_prev, gates, c))
        self._cache = cache
        return hs_out

    def backward(self, g_hs):
        """BPTT given per-step upstream gradients (N, T, H); returns gx."""
        cache = self._cache
        hs = self.hidden_size
        n, t_steps, _ = g_hs.shape
        gx = np.zeros((n, t_steps, self.input_size))
        dh_next = np.zeros((n, hs))
        dc_next = np.zeros((n, hs))
        for t in range(t_steps - 1, -1, -1):
            x_t, h_prev, c_prev, (i, f, g, o), c_new = cache[t]
            tanh_c = np.tanh(c_new)
            dh = g_hs[:, t] + dh_next
            dc = dc_next + dh * o * (1.0 - tanh_c * tanh_c)
            dpre = np.hstack([
                dc * g * i * (1.0 - i),
                dc * c_prev * f * (1.0 - f),
                dc * i * (1.0 - g * g),
                dh * tanh_c * o * (1.0 - o),
            ])
            self.wx.grad += x_t.T @ dpre
            self.wh.grad += h_prev.T @ dpre
            self.b.grad += dpre.sum(axis=0)
            gx[:, t] = dpre @ self.wx.data.T
            dh_next = dpre @ self.wh.data.T
            dc_next = dc * f
        return gx


class Gru:
    def __init__(self, input_size, hidden_size, rng: np.random.Generator,
                 name="gru"):
        self.name = name
        self.input_size = int(input_size)
        self.hidden_size = int(hidden_size)
        h = self.hidden_size
        self.wx = Param(f"{name}.wx", _scaled_uniform(rng, (input_size, 3 * h),
                                                      input_size))
        self.wh = Param(f"{name}.wh", _scaled_uniform(rng, (h, 3 * h), h))
        self.b = Param(f"{name}.b", np.zeros(3 * h))
        self._cache = None

    def parameters(self):
        return [self.wx, self.wh, self.b]

    def step(self, x_t, h_prev=None):
        x_t = np.atleast_2d(np.asarray(x_t, dtype=np.float64))
        if h_prev is None:
            h_prev = np.zeros((x_t.shape[0], self.hidden_size))
        h_new, _ = self._advance(x_t, h_prev)
        return h_new

    def _advance(self, x_t, h_prev):
        hs = self.hidden_size
        pre_x = x_t @ self.wx.data
        pre_h = h_prev @ self.wh.data[:, : 2 * hs]
        z = _sigmoid(pre_x[:, :hs] + pre_h[:, :hs] + self.b.data[:hs])
        r = _sigmoid(pre_x[:, hs : 2 * hs] + pre_h[:, hs:] + self.b.data[hs : 2 * hs])
        rh = r * h_prev
        cand = np.tanh(pre_x[:, 2 * hs :] + rh @ self.wh.data[:, 2 * hs :]
                       + self.b.data[2 * hs :])
        h_new = (1.0 - z) * h_prev + z * cand
        return h_new, (z, r, rh, cand)

    def forward(self, x, train=False):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 3 or x.shape[1] < 1:
            raise ShapeError(f"gru input must be (N, T>=1, D), got {x.shape}")
        n, t_steps, _ = x.shape
        h = np.zeros((n, self.hidden_size))
        hs_out = np.zeros((n, t_steps, self.hidden_size))
        cache = []
        for t in range(t_steps):
            h_prev = h
            h, gates = self._advance(x[:, t], h_prev)
            hs_out[:, t] = h
            cache.append((x[:, t], h_prev, gates))
        self._cache = cache
        return hs_out

    def backward(self, g_hs):
        cache = self._cache
        hs = self.hidden_size
        n, t_steps, _ = g_hs.shape
        gx = np.zeros((n, t_steps, self.input_size))
        dh_next = np.zeros((n, hs))
        for t in range(t_steps - 1, -1, -1):
            x_t, h_prev, (z, r, rh, cand) = cache[t]
            dh = g_hs[:, t] + dh_next
            dz = dh * (cand - h_prev)
            dcand = dh * z
            dh_prev = dh * (1.0 - z)

            dn_pre = dcand * (1.0 - cand * cand)
            drh = dn_pre @ self.wh.data[:, 2 * hs :].T
            dr = drh * h_prev
            dh_prev += drh * r

            dz_pre = dz * z * (1.0 - z)
            dr_pre = dr * r * (1.0 - r)

            dpre_x = np.hstack([dz_pre, dr_pre, dn_pre])
            self.wx.grad += x_t.T @ dpre_x
            self.wh.grad[:, : 2 * hs] += h_prev.T @ np.hstack([dz_pre, dr_pre])
            self.wh.grad[:, 2 * hs :] += rh.T @ dn_pre
            self.b.grad += dpre_x.sum(axis=0)

            gx[:, t] = dpre_x @ self.wx.data.T
            dh_prev += np.hstack([dz_pre, dr_pre]) @ self.wh.data[:, : 2 * hs].T
            dh_next = dh_prev
        return gx


class BiGru:
    """Forward and reverse GRU passes with per-step concatenated outputs.

    ``lengths`` marks each item's valid prefix: the reverse pass starts at
    the true final step, and pad positions come out (and backprop) as zero.
    """

    def __init__(self, input_size, hidden_size, rng: np.random.Generator,
                 name="bigru"):
        self.name = name
        self.hidden_size = int(hidden_size)
        self.fw = Gru(input_size, hidden_size, rng, name=f"{name}.fw")
        self.bw = Gru(input_size, hidden_size, rng, name=f"{name}.bw")
        self._lengths = None

    def parameters(self):
        return self.fw.parameters() + self.bw.parameters()

    def forward(self, x, lengths=None, train=False):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 3 or x.shape[1] < 1:
            raise ShapeError(f"bigru input must be (N, T>=1, D), got {x.shape}")
        self._lengths = lengths
        hs_f = self.fw.forward(x)
        hs_r = self.bw.forward(reverse_padded(x, lengths))
        hs_b = reverse_padded(hs_r, lengths)
        return np.concatenate([hs_f, hs_b], axis=2)

    def backward(self, g_hs):
        hs = self.hidden_size
        gx = self.fw.backward(np.ascontiguousarray(g_hs[:, :, :hs]))
        g_rev = reverse_padded(np.ascontiguousarray(g_hs[:, :, hs:]),
                               self._lengths)
        gx += reverse_padded(self.bw.backward(g_rev), self._lengths)
        return gx

    def final_states(self, hs_cat, lengths=None):
        """Readout vector per item: [forward h at last valid step, reverse h
        after its full pass] -> (N, 2H)."""
        n, t_steps, _ = hs_cat.shape
        if lengths is None:
            lengths = np.full(n, t_steps, dtype=np.int64)
        h = self.hidden_size
        out = np.empty((n, 2 * h))
        for i, length in enumerate(lengths):
            out[i, :h] = hs_cat[i, int(length) - 1, :h]
            out[i, h:] = hs_cat[i, 0, h:]
        return out
