"""Export and verification of the truncated feature-extractor graphs.

export() writes alexnet_fc{6,7,8}.onnx plus alexnet_meta.json into one
directory. verify() re-reads those bytes, checks structure against the
canonical node plan, runs a fixed tensor through the parsed weights, and
records checksums so downstream integration tests can pin what they ran.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ExportError, ExportFormatError
from .network import (
    INPUT_SIDE,
    LAYER_DIMS,
    WeightSet,
    forward,
    resolve_weights,
    steps_for_layer,
)
from .onnx_io import build_model_bytes, node_plan, parse_model_file

META_FILE = "alexnet_meta.json"
REPORT_FILE = "verify_report.json"
_LAYER_ORDER = ("fc6", "fc7", "fc8")

#: Maximum |fc7 - relu(linear(fc6))| allowed by the composition check.
COMPOSITION_TOL = 1e-4


@dataclass(frozen=True)
class ExportConfig:
    """What to export and where; input_side is fixed by the consumers."""

    output_dir: Path
    layers: tuple = _LAYER_ORDER
    input_side: int = INPUT_SIDE
    weights: str = "auto"
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        layers = tuple(self.layers)
        if not layers:
            raise ValueError("layers must name at least one of fc6, fc7, fc8")
        if len(set(layers)) != len(layers):
            raise ValueError(f"duplicate layer in {layers}")
        for layer in layers:
            if layer not in LAYER_DIMS:
                raise ValueError(f"unknown layer {layer!r}, expected fc6, fc7, or fc8")
        object.__setattr__(self, "layers", layers)
        if self.input_side != INPUT_SIDE:
            raise ValueError(f"input side is fixed at {INPUT_SIDE}, got {self.input_side}")
        if self.weights not in ("auto", "pretrained", "random"):
            raise ValueError(
                f"weights mode must be auto, pretrained, or random, got {self.weights!r}"
            )


@dataclass(frozen=True)
class ExportResult:
    model_paths: dict
    sidecar_path: Path
    provenance: str


def model_file(directory, layer: str) -> Path:
    return Path(directory) / f"alexnet_{layer}.onnx"


def write_sidecar(directory, weights: WeightSet) -> Path:
    payload = {
        "input_side": INPUT_SIDE,
        "channel_means": list(weights.channel_means),
        "channel_order": weights.channel_order,
        "scale": weights.scale,
        "weights": weights.provenance,
    }
    path = Path(directory) / META_FILE
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def export(config: ExportConfig) -> ExportResult:
    """Write the requested graphs and the sidecar; deterministic per seed."""
    weights = resolve_weights(config.weights, config.seed)
    out_dir = config.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {}
    for layer in sorted(config.layers, key=_LAYER_ORDER.index):
        path = model_file(out_dir, layer)
        path.write_bytes(build_model_bytes(layer, weights))
        paths[layer] = path
    sidecar = write_sidecar(out_dir, weights)
    return ExportResult(model_paths=paths, sidecar_path=sidecar, provenance=weights.provenance)


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class GraphCheck:
    layer: str
    file: str
    ok: bool
    detail: str
    sha256: str = ""
    output_dim: int = 0
    output_sha256: str = ""


@dataclass(frozen=True)
class VerifyReport:
    checks: tuple
    composition_max_abs_diff: float | None
    ok: bool


def fixed_probe_image(seed: int = 2024) -> np.ndarray:
    """A deterministic uint8 RGB image covering the full pixel range."""
    rng = np.random.default_rng(seed)
    return rng.integers(0, 256, size=(INPUT_SIDE, INPUT_SIDE, 3), dtype=np.uint8)


def preprocess_image(image: np.ndarray, sidecar: dict) -> np.ndarray:
    """Apply the sidecar's preprocessing: reorder, scale, subtract means."""
    img = np.asarray(image)
    if sidecar.get("channel_order") == "BGR":
        img = img[..., ::-1]
    tensor = img.transpose(2, 0, 1).astype(np.float32)
    tensor = tensor * np.float32(sidecar["scale"])
    means = np.asarray(sidecar["channel_means"], dtype=np.float32).reshape(3, 1, 1)
    return (tensor - means)[None]


def _structural_mismatch(parsed, layer: str):
    expected = node_plan(layer)
    if len(parsed.nodes) != len(expected):
        return f"{len(parsed.nodes)} nodes, expected {len(expected)}"
    prev = parsed.input_name
    for node, (op_type, name, attrs) in zip(parsed.nodes, expected):
        if node.op_type != op_type:
            return f"node {name}: op {node.op_type}, expected {op_type}"
        if node.inputs[0] != prev:
            return f"node {name}: consumes {node.inputs[0]!r}, expected {prev!r}"
        if op_type in ("Conv", "Gemm"):
            wanted = (f"{name}_W", f"{name}_b")
            if tuple(node.inputs[1:3]) != wanted:
                return f"node {name}: weight inputs {node.inputs[1:]}, expected {wanted}"
            for tensor in wanted:
                if tensor not in parsed.initializers:
                    return f"initializer {tensor} missing"
        for attr_name, attr_val in attrs.items():
            got = node.attrs.get(attr_name)
            if isinstance(attr_val, float):
                if got is None or abs(got - attr_val) > 1e-6:
                    return f"node {name}: attribute {attr_name}={got}, expected {attr_val}"
            elif got != attr_val:
                return f"node {name}: attribute {attr_name}={got}, expected {attr_val}"
        prev = node.outputs[0]
    if parsed.output_name != prev:
        return f"declared output {parsed.output_name!r} is not the last tensor {prev!r}"
    if parsed.input_shape != (1, 3, INPUT_SIDE, INPUT_SIDE):
        return f"input shape {parsed.input_shape}, expected (1, 3, {INPUT_SIDE}, {INPUT_SIDE})"
    if parsed.output_shape != (1, LAYER_DIMS[layer]):
        return f"output shape {parsed.output_shape}, expected (1, {LAYER_DIMS[layer]})"
    return None


def _paired_tensors(parsed) -> dict:
    pairs = {}
    for name, arr in parsed.initializers.items():
        if name.endswith("_W"):
            pairs.setdefault(name[:-2], [None, None])[0] = arr
        elif name.endswith("_b"):
            pairs.setdefault(name[:-2], [None, None])[1] = arr
    return {k: (w, b) for k, (w, b) in pairs.items()}


def verify(model_dir, layers=_LAYER_ORDER, write_report: bool = True) -> VerifyReport:
    """Check every exported graph from its on-disk bytes.

    Never raises for a bad artifact; failures land in the per-graph checks
    so a caller can report all of them at once.
    """
    model_dir = Path(model_dir)
    meta_path = model_dir / META_FILE
    if not meta_path.is_file():
        raise ExportError(f"sidecar not found: {meta_path} (run the export first)")
    sidecar = json.loads(meta_path.read_text(encoding="utf-8"))
    probe = preprocess_image(fixed_probe_image(), sidecar)

    checks = []
    outputs = {}
    parsed_models = {}
    for layer in sorted(set(layers), key=_LAYER_ORDER.index):
        path = model_file(model_dir, layer)
        try:
            parsed = parse_model_file(path)
        except ExportFormatError as exc:
            checks.append(GraphCheck(layer, path.name, False, str(exc)))
            continue
        mismatch = _structural_mismatch(parsed, layer)
        if mismatch:
            checks.append(GraphCheck(layer, path.name, False, mismatch))
            continue
        out = forward(steps_for_layer(layer), _paired_tensors(parsed), probe).reshape(-1)
        if out.shape[0] != LAYER_DIMS[layer]:
            checks.append(GraphCheck(
                layer, path.name, False,
                f"produced {out.shape[0]} values, expected {LAYER_DIMS[layer]}",
            ))
            continue
        if not np.all(np.isfinite(out)):
            checks.append(GraphCheck(layer, path.name, False, "non-finite output values"))
            continue
        outputs[layer] = out
        parsed_models[layer] = parsed
        checks.append(GraphCheck(
            layer, path.name, True, "",
            sha256=hashlib.sha256(path.read_bytes()).hexdigest(),
            output_dim=int(out.shape[0]),
            output_sha256=hashlib.sha256(out.tobytes()).hexdigest(),
        ))

    residual = None
    if "fc6" in outputs and "fc7" in outputs:
        # fc7 must equal one linear+ReLU stage applied to the fc6 output
        w, b = _paired_tensors(parsed_models["fc7"])["fc7"]
        composed = np.maximum(outputs["fc6"] @ w.T + b, 0.0)
        residual = float(np.max(np.abs(composed - outputs["fc7"])))
        if residual > COMPOSITION_TOL:
            checks.append(GraphCheck(
                "fc7", model_file(model_dir, "fc7").name, False,
                f"composition residual {residual:.3e} exceeds {COMPOSITION_TOL}",
            ))

    report = VerifyReport(
        checks=tuple(checks),
        composition_max_abs_diff=residual,
        ok=all(c.ok for c in checks),
    )
    if write_report:
        payload = {
            "ok": report.ok,
            "composition_max_abs_diff": residual,
            "checks": [vars(c) for c in checks],
        }
        (model_dir / REPORT_FILE).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return report
