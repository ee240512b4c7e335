"""Minimal NN substrate: parameter container, five layer kinds, forward/backward passes.

Everything runs in float64 on numpy. Backward passes return both parameter
gradients and input gradients; the latter feed the critics' gradient-penalty
term and cross-network chaining during adversarial training.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

LAYER_KINDS = ("lstm", "dense", "conv1d", "dropout", "activation")
ACTIVATION_KINDS = ("relu", "tanh", "leaky_relu", "identity")


class ShapeError(ValueError):
    """Input or parameter shape does not match the layer contract."""


@dataclass(frozen=True)
class LayerSpec:
    """Declarative description of one layer.

    units sizes lstm/dense outputs; filters/kernel_size size conv1d; rate is
    the dropout probability; activation/slope configure activation layers.
    A dense layer fed a sequence flattens it unless time_distributed is set,
    in which case the map applies per step. repeat_input lets the first lstm
    of a decoder tile a flat latent vector into a sequence.
    """

    kind: str
    units: int = 0
    filters: int = 0
    kernel_size: int = 0
    rate: float = 0.0
    activation: str = "identity"
    slope: float = 0.2
    return_sequences: bool = True
    time_distributed: bool = False
    repeat_input: int = 0

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise ValueError(f"unknown layer kind {self.kind!r}")
        if self.kind == "lstm" and self.units < 1:
            raise ValueError("lstm requires positive units")
        if self.kind == "dense" and self.units < 1:
            raise ValueError("dense requires positive units")
        if self.kind == "conv1d" and (self.filters < 1 or self.kernel_size < 1):
            raise ValueError("conv1d requires positive filters and kernel_size")
        if self.kind == "dropout" and not 0.0 <= self.rate < 1.0:
            raise ValueError(f"dropout rate must lie in [0, 1), got {self.rate}")
        if self.kind == "activation" and self.activation not in ACTIVATION_KINDS:
            raise ValueError(f"unknown activation {self.activation!r}")


class ParamSet:
    """Ordered named float64 tensors with a lossless flat-vector view."""

    def __init__(self):
        self._arrays: dict[str, np.ndarray] = {}

    def add(self, name: str, array: np.ndarray) -> None:
        if name in self._arrays:
            raise ValueError(f"duplicate parameter name {name!r}")
        self._arrays[name] = np.asarray(array, dtype=np.float64)

    def __getitem__(self, name: str) -> np.ndarray:
        return self._arrays[name]

    def __setitem__(self, name: str, array: np.ndarray) -> None:
        current = self._arrays[name]
        array = np.asarray(array, dtype=np.float64)
        if array.shape != current.shape:
            raise ShapeError(f"parameter {name!r} expects shape {current.shape}, got {array.shape}")
        self._arrays[name] = array

    def __contains__(self, name: str) -> bool:
        return name in self._arrays

    @property
    def names(self) -> list[str]:
        return list(self._arrays)

    def items(self):
        return self._arrays.items()

    @property
    def n_params(self) -> int:
        return sum(a.size for a in self._arrays.values())

    def to_flat(self) -> np.ndarray:
        if not self._arrays:
            return np.empty(0)
        return np.concatenate([a.ravel() for a in self._arrays.values()])

    def from_flat(self, flat: np.ndarray) -> None:
        flat = np.asarray(flat, dtype=np.float64)
        if flat.size != self.n_params:
            raise ShapeError(f"flat vector of {flat.size} values cannot fill {self.n_params} parameters")
        offset = 0
        for name, arr in self._arrays.items():
            self._arrays[name] = flat[offset:offset + arr.size].reshape(arr.shape).copy()
            offset += arr.size

    def copy(self) -> "ParamSet":
        out = ParamSet()
        for name, arr in self._arrays.items():
            out.add(name, arr.copy())
        return out

    def zeros_like(self) -> "ParamSet":
        out = ParamSet()
        for name, arr in self._arrays.items():
            out.add(name, np.zeros_like(arr))
        return out

    def l2_sum(self) -> float:
        """Sum of squared entries over every tensor."""
        return float(sum(np.sum(a * a) for a in self._arrays.values()))

    def add_scaled(self, other: "ParamSet", coeff: float) -> None:
        for name in self._arrays:
            self._arrays[name] = self._arrays[name] + coeff * other[name]


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


class _Layer:
    """Build-time shape inference plus forward/backward. Subclasses hold no arrays;
    all parameters live in the owning network's ParamSet under self.prefix."""

    def __init__(self, spec: LayerSpec, prefix: str):
        self.spec = spec
        self.prefix = prefix
        self.param_names: list[str] = []

    def build(self, in_shape: tuple, params: ParamSet, rng) -> tuple:
        raise NotImplementedError

    def forward(self, x, params, training, rng):
        raise NotImplementedError

    def backward(self, dy, cache, params, grads):
        raise NotImplementedError

    def _register(self, params: ParamSet, name: str, array: np.ndarray) -> str:
        full = f"{self.prefix}.{name}"
        params.add(full, array)
        self.param_names.append(full)
        return full


def _uniform_init(rng, shape, fan_in: int) -> np.ndarray:
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


class _Dense(_Layer):
    def build(self, in_shape, params, rng):
        spec = self.spec
        if len(in_shape) == 1:
            self.mode = "flat"
            fan_in = in_shape[0]
            out_shape = (spec.units,)
        elif len(in_shape) == 2:
            if spec.time_distributed:
                self.mode = "steps"
                fan_in = in_shape[1]
                out_shape = (in_shape[0], spec.units)
            else:
                self.mode = "flatten"
                fan_in = in_shape[0] * in_shape[1]
                out_shape = (spec.units,)
        else:
            raise ShapeError(f"dense cannot consume input shape {in_shape}")
        self.fan_in = fan_in
        self._register(params, "W", _uniform_init(rng, (fan_in, spec.units), fan_in))
        self._register(params, "b", np.zeros(spec.units))
        return out_shape

    def forward(self, x, params, training, rng):
        W = params[f"{self.prefix}.W"]
        b = params[f"{self.prefix}.b"]
        orig_shape = x.shape
        if self.mode == "flatten" and x.ndim == 3:
            x2 = x.reshape(x.shape[0], -1)
        else:
            x2 = x
        if x2.shape[-1] != self.fan_in:
            raise ShapeError(f"{self.prefix}: expected {self.fan_in} input features, got {x2.shape[-1]}")
        y = x2 @ W + b
        return y, (x2, orig_shape)

    def backward(self, dy, cache, params, grads):
        x2, orig_shape = cache
        W = params[f"{self.prefix}.W"]
        if x2.ndim == 3:
            grads[f"{self.prefix}.W"] += np.einsum("btf,btu->fu", x2, dy)
            grads[f"{self.prefix}.b"] += dy.sum(axis=(0, 1))
        else:
            grads[f"{self.prefix}.W"] += x2.T @ dy
            grads[f"{self.prefix}.b"] += dy.sum(axis=0)
        dx = dy @ W.T
        if self.mode == "flatten" and len(orig_shape) == 3:
            dx = dx.reshape(orig_shape)
        return dx


class _LSTM(_Layer):
    """Standard gated cell: input/forget/output gates with a tanh candidate.

    Gate pre-activations are ordered [i, f, g, o]; the forget-gate bias starts
    at 1 so early training does not wash out the cell state.
    """

    def build(self, in_shape, params, rng):
        spec = self.spec
        if len(in_shape) == 1:
            if spec.repeat_input < 1:
                raise ShapeError(f"{self.prefix}: flat input requires repeat_input")
            self.steps_in = spec.repeat_input
            in_features = in_shape[0]
        elif len(in_shape) == 2:
            self.steps_in = in_shape[0]
            in_features = in_shape[1]
        else:
            raise ShapeError(f"lstm cannot consume input shape {in_shape}")
        H = spec.units
        self.in_features = in_features
        self._register(params, "W", _uniform_init(rng, (in_features, 4 * H), in_features))
        self._register(params, "U", _uniform_init(rng, (H, 4 * H), H))
        b = np.zeros(4 * H)
        b[H:2 * H] = 1.0
        self._register(params, "b", b)
        return (self.steps_in, H) if spec.return_sequences else (H,)

    def forward(self, x, params, training, rng):
        repeated = x.ndim == 2
        if repeated:
            if self.spec.repeat_input < 1:
                raise ShapeError(f"{self.prefix}: flat input requires repeat_input")
            x = np.repeat(x[:, None, :], self.spec.repeat_input, axis=1)
        if x.shape[2] != self.in_features:
            raise ShapeError(f"{self.prefix}: expected {self.in_features} input features, got {x.shape[2]}")
        W = params[f"{self.prefix}.W"]
        U = params[f"{self.prefix}.U"]
        b = params[f"{self.prefix}.b"]
        B, T, _ = x.shape
        H = self.spec.units
        h = np.zeros((B, H))
        c = np.zeros((B, H))
        gates = np.empty((T, B, 4 * H))
        tanhc = np.empty((T, B, H))
        hs = np.empty((B, T, H))
        prev_c = np.empty((T, B, H))
        prev_h = np.empty((T, B, H))
        for t in range(T):
            prev_h[t] = h
            prev_c[t] = c
            a = x[:, t] @ W + h @ U + b
            i = _sigmoid(a[:, :H])
            f = _sigmoid(a[:, H:2 * H])
            g = np.tanh(a[:, 2 * H:3 * H])
            o = _sigmoid(a[:, 3 * H:])
            c = f * c + i * g
            tc = np.tanh(c)
            h = o * tc
            gates[t] = np.concatenate([i, f, g, o], axis=1)
            tanhc[t] = tc
            hs[:, t] = h
        y = hs if self.spec.return_sequences else h
        return y, (x, gates, tanhc, prev_h, prev_c, repeated)

    def backward(self, dy, cache, params, grads):
        x, gates, tanhc, prev_h, prev_c, repeated = cache
        W = params[f"{self.prefix}.W"]
        U = params[f"{self.prefix}.U"]
        B, T, _ = x.shape
        H = self.spec.units
        dW = np.zeros_like(W)
        dU = np.zeros_like(U)
        db = np.zeros(4 * H)
        dx = np.zeros_like(x)
        dh_next = np.zeros((B, H))
        dc_next = np.zeros((B, H))
        for t in reversed(range(T)):
            if self.spec.return_sequences:
                dh = dh_next + dy[:, t]
            else:
                dh = dh_next + (dy if t == T - 1 else 0.0)
            i = gates[t][:, :H]
            f = gates[t][:, H:2 * H]
            g = gates[t][:, 2 * H:3 * H]
            o = gates[t][:, 3 * H:]
            tc = tanhc[t]
            dc = dc_next + dh * o * (1.0 - tc * tc)
            da = np.concatenate([
                dc * g * i * (1.0 - i),
                dc * prev_c[t] * f * (1.0 - f),
                dc * i * (1.0 - g * g),
                dh * tc * o * (1.0 - o),
            ], axis=1)
            dW += x[:, t].T @ da
            dU += prev_h[t].T @ da
            db += da.sum(axis=0)
            dx[:, t] = da @ W.T
            dh_next = da @ U.T
            dc_next = dc * f
        grads[f"{self.prefix}.W"] += dW
        grads[f"{self.prefix}.U"] += dU
        grads[f"{self.prefix}.b"] += db
        if repeated:
            dx = dx.sum(axis=1)
        return dx


class _Conv1D(_Layer):
    """Cross-correlation with valid padding and stride 1."""

    def build(self, in_shape, params, rng):
        spec = self.spec
        if len(in_shape) == 1:
            # A flat vector is consumed as a single-channel sequence.
            steps, channels = in_shape[0], 1
        elif len(in_shape) == 2:
            steps, channels = in_shape
        else:
            raise ShapeError(f"conv1d cannot consume input shape {in_shape}")
        if spec.kernel_size > steps:
            raise ShapeError(f"{self.prefix}: kernel {spec.kernel_size} exceeds {steps} steps")
        self.in_channels = channels
        fan_in = spec.kernel_size * channels
        self._register(params, "W", _uniform_init(rng, (spec.kernel_size, channels, spec.filters), fan_in))
        self._register(params, "b", np.zeros(spec.filters))
        return (steps - spec.kernel_size + 1, spec.filters)

    def forward(self, x, params, training, rng):
        was_flat = x.ndim == 2 and self.in_channels == 1
        if was_flat:
            x = x[:, :, None]
        if x.ndim != 3 or x.shape[2] != self.in_channels:
            raise ShapeError(f"{self.prefix}: expected (batch, steps, {self.in_channels}) input")
        W = params[f"{self.prefix}.W"]
        b = params[f"{self.prefix}.b"]
        k = self.spec.kernel_size
        t_out = x.shape[1] - k + 1
        y = np.zeros((x.shape[0], t_out, self.spec.filters))
        for p in range(k):
            y += x[:, p:p + t_out, :] @ W[p]
        y += b
        return y, (x, was_flat)

    def backward(self, dy, cache, params, grads):
        x, was_flat = cache
        W = params[f"{self.prefix}.W"]
        k = self.spec.kernel_size
        t_out = dy.shape[1]
        dx = np.zeros_like(x)
        dW = np.zeros_like(W)
        for p in range(k):
            dW[p] = np.einsum("btc,btf->cf", x[:, p:p + t_out, :], dy)
            dx[:, p:p + t_out, :] += dy @ W[p].T
        grads[f"{self.prefix}.W"] += dW
        grads[f"{self.prefix}.b"] += dy.sum(axis=(0, 1))
        return dx[:, :, 0] if was_flat else dx


class _Dropout(_Layer):
    def build(self, in_shape, params, rng):
        return in_shape

    def forward(self, x, params, training, rng):
        rate = self.spec.rate
        if not training or rate == 0.0:
            return x, None
        if rng is None:
            raise ValueError(f"{self.prefix}: training-mode dropout needs an rng")
        mask = (rng.random(x.shape) >= rate) / (1.0 - rate)
        return x * mask, mask

    def backward(self, dy, cache, params, grads):
        if cache is None:
            return dy
        return dy * cache


class _Activation(_Layer):
    def build(self, in_shape, params, rng):
        return in_shape

    def forward(self, x, params, training, rng):
        kind = self.spec.activation
        if kind == "relu":
            return np.maximum(x, 0.0), x
        if kind == "tanh":
            y = np.tanh(x)
            return y, y
        if kind == "leaky_relu":
            return np.where(x >= 0.0, x, self.spec.slope * x), x
        return x, None

    def backward(self, dy, cache, params, grads):
        kind = self.spec.activation
        if kind == "relu":
            return dy * (cache > 0.0)
        if kind == "tanh":
            return dy * (1.0 - cache * cache)
        if kind == "leaky_relu":
            return dy * np.where(cache >= 0.0, 1.0, self.spec.slope)
        return dy


_LAYER_CLASSES = {
    "dense": _Dense,
    "lstm": _LSTM,
    "conv1d": _Conv1D,
    "dropout": _Dropout,
    "activation": _Activation,
}


class Network:
    """A sequential stack of layers sharing one ParamSet."""

    def __init__(self, specs: list[LayerSpec], input_shape: tuple, seed_or_rng):
        rng = seed_or_rng if isinstance(seed_or_rng, np.random.Generator) \
            else np.random.default_rng(seed_or_rng)
        self.specs = list(specs)
        self.input_shape = tuple(input_shape)
        self.params = ParamSet()
        self.layers: list[_Layer] = []
        shape = self.input_shape
        for idx, spec in enumerate(self.specs):
            layer = _LAYER_CLASSES[spec.kind](spec, prefix=f"l{idx:02d}_{spec.kind}")
            shape = layer.build(shape, self.params, rng)
            self.layers.append(layer)
        self.output_shape = shape

    def forward(self, x, training: bool = False, rng=None) -> np.ndarray:
        y, _ = self.forward_with_cache(x, training=training, rng=rng)
        return y

    def forward_with_cache(self, x, training: bool = False, rng=None):
        x = np.asarray(x, dtype=np.float64)
        caches = []
        for layer in self.layers:
            x, cache = layer.forward(x, self.params, training, rng)
            caches.append(cache)
        return x, caches

    def backward(self, caches, dy) -> tuple[np.ndarray, ParamSet]:
        """Propagate dy back through cached activations.

        Returns (gradient w.r.t. the network input, gradient ParamSet).
        """
        grads = self.params.zeros_like()
        dx = np.asarray(dy, dtype=np.float64)
        for layer, cache in zip(reversed(self.layers), reversed(caches)):
            dx = layer.backward(dx, cache, self.params, grads)
        return dx, grads

    def input_gradients(self, x, training: bool = False, rng=None) -> np.ndarray:
        """Per-sample gradient of the summed scalar output w.r.t. the input.

        Valid for networks with one output per sample; sample independence
        makes the summed backward pass equal the per-sample gradients.
        """
        y, caches = self.forward_with_cache(x, training=training, rng=rng)
        if y.ndim != 2 or y.shape[1] != 1:
            raise ShapeError(f"input_gradients expects per-sample scalar outputs, got {y.shape}")
        dx, _ = self.backward(caches, np.ones_like(y))
        return dx


def forward(network: Network, x, training: bool = False, rng=None) -> np.ndarray:
    """Functional alias for Network.forward."""
    return network.forward(x, training=training, rng=rng)


def finite_difference_gradient(loss_fn, params: ParamSet, h: float = 1e-5) -> ParamSet:
    """Central-difference gradient of a scalar loss over every parameter entry.

    The independent oracle for gradient checks; O(n) loss evaluations, so keep
    the parameter count small.
    """
    flat = params.to_flat()
    grad = np.zeros_like(flat)
    probe = params.copy()
    for idx in range(flat.size):
        bumped = flat.copy()
        bumped[idx] += h
        probe.from_flat(bumped)
        up = loss_fn(probe)
        bumped[idx] = flat[idx] - h
        probe.from_flat(bumped)
        down = loss_fn(probe)
        grad[idx] = (up - down) / (2.0 * h)
    out = params.zeros_like()
    out.from_flat(grad)
    return out
