"""Truncated AlexNet definition: topology, weight sources, numpy forward.

The convolutional stack follows the torchvision layer shapes. With a 227
pixel input the stack lands on a 6x6x256 map directly, so no adaptive
pooling is needed and the graph stays inside a plain Conv/ReLU/MaxPool/
Flatten/Gemm op set.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import WeightSourceError

INPUT_SIDE = 227
FLAT_DIM = 9216  # 256 channels x 6 x 6 after the conv stack

#: Output width of each exportable fully-connected layer.
LAYER_DIMS = {"fc6": 4096, "fc7": 4096, "fc8": 1000}

#: Preprocessing baked into every export: RGB order, scale to [0,1],
#: subtract the means below. The per-channel std of the pretrained
#: normalization is folded into the first conv instead (see fold_channel_std).
PIXEL_SCALE = 1.0 / 255.0
CHANNEL_MEANS = (0.485, 0.456, 0.406)
CHANNEL_STDS = (0.229, 0.224, 0.225)
CHANNEL_ORDER = "RGB"


@dataclass(frozen=True)
class ConvStep:
    name: str
    in_ch: int
    out_ch: int
    kernel: int
    stride: int
    pad: int


@dataclass(frozen=True)
class ReluStep:
    name: str


@dataclass(frozen=True)
class PoolStep:
    name: str
    kernel: int
    stride: int


@dataclass(frozen=True)
class FlattenStep:
    name: str


@dataclass(frozen=True)
class FcStep:
    name: str
    in_dim: int
    out_dim: int


_CONV_STACK = (
    ConvStep("conv1", 3, 64, 11, 4, 2),
    ReluStep("relu1"),
    PoolStep("pool1", 3, 2),
    ConvStep("conv2", 64, 192, 5, 1, 2),
    ReluStep("relu2"),
    PoolStep("pool2", 3, 2),
    ConvStep("conv3", 192, 384, 3, 1, 1),
    ReluStep("relu3"),
    ConvStep("conv4", 384, 256, 3, 1, 1),
    ReluStep("relu4"),
    ConvStep("conv5", 256, 256, 3, 1, 1),
    ReluStep("relu5"),
    PoolStep("pool5", 3, 2),
    FlattenStep("flatten"),
)

_FC_STACK = (
    FcStep("fc6", FLAT_DIM, 4096),
    ReluStep("relu6"),
    FcStep("fc7", 4096, 4096),
    ReluStep("relu7"),
    FcStep("fc8", 4096, 1000),
)


def steps_for_layer(layer: str) -> tuple:
    """Full step sequence ending at the requested layer's graph output.

    fc6 and fc7 are cut after their ReLU; fc8 is the raw pre-softmax output.
    """
    if layer not in LAYER_DIMS:
        raise ValueError(f"layer must be one of {sorted(LAYER_DIMS)}, got {layer!r}")
    steps = list(_CONV_STACK)
    for step in _FC_STACK:
        steps.append(step)
        if isinstance(step, FcStep) and step.name == layer and layer == "fc8":
            break
        if isinstance(step, ReluStep) and step.name == "relu" + layer[-1]:
            break
    return tuple(steps)


def weighted_names() -> tuple[str, ...]:
    return tuple(
        s.name for s in (*_CONV_STACK, *_FC_STACK) if isinstance(s, (ConvStep, FcStep))
    )


@dataclass(frozen=True)
class WeightSet:
    """All learned tensors plus the preprocessing they were built for."""

    tensors: dict  # name -> (W, b) float32 arrays
    provenance: str
    channel_means: tuple = CHANNEL_MEANS
    channel_order: str = CHANNEL_ORDER
    scale: float = PIXEL_SCALE


def random_weights(seed: int = 0) -> WeightSet:
    """He-initialized deterministic weights for offline use.

    The resulting graphs are structurally identical to a pretrained export;
    only the tensor values differ.
    """
    rng = np.random.default_rng(seed)
    tensors = {}
    for step in (*_CONV_STACK, *_FC_STACK):
        if isinstance(step, ConvStep):
            fan_in = step.in_ch * step.kernel * step.kernel
            w = rng.normal(0.0, np.sqrt(2.0 / fan_in),
                           (step.out_ch, step.in_ch, step.kernel, step.kernel))
            b = np.zeros(step.out_ch)
        elif isinstance(step, FcStep):
            w = rng.normal(0.0, np.sqrt(2.0 / step.in_dim), (step.out_dim, step.in_dim))
            b = np.zeros(step.out_dim)
        else:
            continue
        tensors[step.name] = (w.astype(np.float32), b.astype(np.float32))
    return WeightSet(tensors=tensors, provenance=f"random he-init, seed={seed}")


def fold_channel_std(conv_w: np.ndarray, stds) -> np.ndarray:
    """Fold a per-channel std division into first-conv weights.

    conv(W, (x - m) / s) == conv(fold(W, s), x - m), so exports can keep the
    sidecar to a scale and a mean subtraction only.
    """
    w = np.array(conv_w, dtype=np.float64)
    if w.ndim != 4 or w.shape[1] != len(stds):
        raise ValueError(f"expected (out, {len(stds)}, kh, kw) weights, got {w.shape}")
    for c, s in enumerate(stds):
        w[:, c] /= float(s)
    return w.astype(conv_w.dtype)


def _torchvision_state_dict() -> dict:
    # isolated so tests can substitute a failing or fake loader
    import torchvision.models

    weights = torchvision.models.AlexNet_Weights.IMAGENET1K_V1
    model = torchvision.models.alexnet(weights=weights)
    model.eval()
    return {k: v.detach().numpy() for k, v in model.state_dict().items()}


_TORCH_NAMES = {
    "conv1": "features.0", "conv2": "features.3", "conv3": "features.6",
    "conv4": "features.8", "conv5": "features.10",
    "fc6": "classifier.1", "fc7": "classifier.4", "fc8": "classifier.6",
}


def pretrained_weights() -> WeightSet:
    """ImageNet-pretrained tensors with normalization folded into conv1.

    Raises WeightSourceError when torchvision or its weight download is
    unavailable; the random fallback keeps exports possible offline.
    """
    try:
        state = _torchvision_state_dict()
    except Exception as exc:
        raise WeightSourceError(
            f"could not obtain pretrained weights: {exc}; "
            "rerun with --weights random for a deterministic offline export"
        ) from exc
    tensors = {}
    for name, prefix in _TORCH_NAMES.items():
        w = np.asarray(state[prefix + ".weight"], dtype=np.float32)
        b = np.asarray(state[prefix + ".bias"], dtype=np.float32)
        if name == "conv1":
            w = fold_channel_std(w, CHANNEL_STDS)
        tensors[name] = (w, b)
    return WeightSet(
        tensors=tensors,
        provenance="torchvision imagenet-v1, input std folded into conv1",
    )


def resolve_weights(mode: str, seed: int = 0) -> WeightSet:
    if mode == "random":
        return random_weights(seed)
    if mode == "pretrained":
        return pretrained_weights()
    if mode == "auto":
        try:
            return pretrained_weights()
        except WeightSourceError as exc:
            warnings.warn(f"{exc}; falling back to random weights", stacklevel=2)
            return random_weights(seed)
    raise ValueError(f"weights mode must be auto, pretrained, or random, got {mode!r}")


# ---------------------------------------------------------------------------
# numpy forward pass, used by export-side verification


def conv2d(x: np.ndarray, w: np.ndarray, b: np.ndarray, stride: int, pad: int) -> np.ndarray:
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    kh, kw = w.shape[2], w.shape[3]
    win = sliding_window_view(xp, (kh, kw), axis=(2, 3))[:, :, ::stride, ::stride]
    n, _, ho, wo = win.shape[:4]
    cols = win.transpose(0, 2, 3, 1, 4, 5).reshape(n * ho * wo, -1)
    res = cols @ w.reshape(w.shape[0], -1).T
    out = res.reshape(n, ho, wo, w.shape[0]).transpose(0, 3, 1, 2)
    return (out + b.reshape(1, -1, 1, 1)).astype(np.float32)


def maxpool2d(x: np.ndarray, kernel: int, stride: int) -> np.ndarray:
    win = sliding_window_view(x, (kernel, kernel), axis=(2, 3))[:, :, ::stride, ::stride]
    return win.max(axis=(-2, -1))


def forward(steps, tensors: dict, x: np.ndarray) -> np.ndarray:
    """Run a preprocessed (1,3,side,side) float32 tensor through the steps."""
    out = np.asarray(x, dtype=np.float32)
    for step in steps:
        if isinstance(step, ConvStep):
            w, b = tensors[step.name]
            out = conv2d(out, w, b, step.stride, step.pad)
        elif isinstance(step, ReluStep):
            out = np.maximum(out, 0.0)
        elif isinstance(step, PoolStep):
            out = maxpool2d(out, step.kernel, step.stride)
        elif isinstance(step, FlattenStep):
            out = out.reshape(out.shape[0], -1)
        elif isinstance(step, FcStep):
            w, b = tensors[step.name]
            out = (out @ w.T + b).astype(np.float32)
        else:
            raise TypeError(f"unknown step {step!r}")
    return out
