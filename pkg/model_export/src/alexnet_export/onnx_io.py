"""ONNX serialization of the truncated stacks, plus a read-back parser.

The writer emits the minimal op set (Conv, Relu, MaxPool, Flatten, Gemm)
with concrete shapes everywhere; the parser inverts it so verification can
run from the bytes on disk rather than from in-memory state.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ExportFormatError
from .network import (
    INPUT_SIDE,
    LAYER_DIMS,
    ConvStep,
    FcStep,
    FlattenStep,
    PoolStep,
    ReluStep,
    WeightSet,
    steps_for_layer,
)
from .protowire import (
    WIRE_32BIT,
    WIRE_LEN,
    WIRE_VARINT,
    iter_fields,
    packed_int64s,
    write_bytes_field,
    write_fixed32_field,
    write_key,
    write_string_field,
    write_varint,
    write_varint_field,
)

TENSOR_FLOAT = 1
_IR_VERSION = 8
_OPSET_VERSION = 13

# AttributeProto.type values
_ATTR_FLOAT = 1
_ATTR_INT = 2
_ATTR_INTS = 7


def _tensor_bytes(name: str, arr: np.ndarray) -> bytes:
    msg = bytearray()
    for d in arr.shape:
        write_varint_field(msg, 1, int(d))
    write_varint_field(msg, 2, TENSOR_FLOAT)
    write_string_field(msg, 8, name)
    write_bytes_field(msg, 9, np.ascontiguousarray(arr, dtype="<f4").tobytes())
    return bytes(msg)


def _attr_int(name: str, value: int) -> bytes:
    msg = bytearray()
    write_string_field(msg, 1, name)
    write_varint_field(msg, 3, int(value))
    write_varint_field(msg, 20, _ATTR_INT)
    return bytes(msg)


def _attr_float(name: str, value: float) -> bytes:
    msg = bytearray()
    write_string_field(msg, 1, name)
    write_fixed32_field(msg, 2, struct.pack("<f", value))
    write_varint_field(msg, 20, _ATTR_FLOAT)
    return bytes(msg)


def _attr_ints(name: str, values) -> bytes:
    msg = bytearray()
    write_string_field(msg, 1, name)
    packed = bytearray()
    for v in values:
        write_varint(packed, int(v))
    write_bytes_field(msg, 8, bytes(packed))
    write_varint_field(msg, 20, _ATTR_INTS)
    return bytes(msg)


def _node_bytes(op_type: str, name: str, inputs, outputs, attrs=()) -> bytes:
    msg = bytearray()
    for tensor in inputs:
        write_string_field(msg, 1, tensor)
    for tensor in outputs:
        write_string_field(msg, 2, tensor)
    write_string_field(msg, 3, name)
    write_string_field(msg, 4, op_type)
    for attr in attrs:
        write_bytes_field(msg, 5, attr)
    return bytes(msg)


def _value_info_bytes(name: str, shape) -> bytes:
    shape_msg = bytearray()
    for d in shape:
        dim = bytearray()
        write_varint_field(dim, 1, int(d))
        write_bytes_field(shape_msg, 1, bytes(dim))
    tensor_msg = bytearray()
    write_varint_field(tensor_msg, 1, TENSOR_FLOAT)
    write_bytes_field(tensor_msg, 2, bytes(shape_msg))
    type_msg = bytearray()
    write_bytes_field(type_msg, 1, bytes(tensor_msg))
    msg = bytearray()
    write_string_field(msg, 1, name)
    write_bytes_field(msg, 2, bytes(type_msg))
    return bytes(msg)


def node_plan(layer: str):
    """The node sequence a graph for `layer` must contain, in order.

    Each entry is (op_type, node_name, attrs dict); tensor wiring is implied
    by the order (each node consumes the previous node's output).
    """
    plan = []
    for step in steps_for_layer(layer):
        if isinstance(step, ConvStep):
            plan.append(("Conv", step.name, {
                "kernel_shape": [step.kernel, step.kernel],
                "strides": [step.stride, step.stride],
                "pads": [step.pad] * 4,
            }))
        elif isinstance(step, ReluStep):
            plan.append(("Relu", step.name, {}))
        elif isinstance(step, PoolStep):
            plan.append(("MaxPool", step.name, {
                "kernel_shape": [step.kernel, step.kernel],
                "strides": [step.stride, step.stride],
            }))
        elif isinstance(step, FlattenStep):
            plan.append(("Flatten", step.name, {"axis": 1}))
        elif isinstance(step, FcStep):
            plan.append(("Gemm", step.name, {"alpha": 1.0, "beta": 1.0, "transB": 1}))
    return plan


def build_model_bytes(layer: str, weights: WeightSet) -> bytes:
    """Serialize one truncated graph; deterministic for a given WeightSet."""
    nodes = []
    initializers = []
    prev = "input"
    for op_type, name, attrs in node_plan(layer):
        out_name = f"{name}_out"
        inputs = [prev]
        encoded = []
        if op_type in ("Conv", "Gemm"):
            w, b = weights.tensors[name]
            initializers.append(_tensor_bytes(f"{name}_W", w))
            initializers.append(_tensor_bytes(f"{name}_b", b))
            inputs += [f"{name}_W", f"{name}_b"]
        for attr_name, attr_val in attrs.items():
            if isinstance(attr_val, list):
                encoded.append(_attr_ints(attr_name, attr_val))
            elif isinstance(attr_val, float):
                encoded.append(_attr_float(attr_name, attr_val))
            else:
                encoded.append(_attr_int(attr_name, attr_val))
        nodes.append(_node_bytes(op_type, name, inputs, [out_name], encoded))
        prev = out_name

    graph = bytearray()
    for node in nodes:
        write_bytes_field(graph, 1, node)
    write_string_field(graph, 2, f"alexnet_{layer}")
    for init in initializers:
        write_bytes_field(graph, 5, init)
    write_bytes_field(graph, 11, _value_info_bytes("input", (1, 3, INPUT_SIDE, INPUT_SIDE)))
    write_bytes_field(graph, 12, _value_info_bytes(prev, (1, LAYER_DIMS[layer])))

    model = bytearray()
    write_varint_field(model, 1, _IR_VERSION)
    write_string_field(model, 2, "alexnet-export")
    write_string_field(model, 3, "0.1.0")
    opset = bytearray()
    write_varint_field(opset, 2, _OPSET_VERSION)
    write_bytes_field(model, 8, bytes(opset))
    write_bytes_field(model, 7, bytes(graph))
    return bytes(model)


# ---------------------------------------------------------------------------
# read-back


@dataclass(frozen=True)
class ParsedNode:
    op_type: str
    name: str
    inputs: tuple
    outputs: tuple
    attrs: dict = field(compare=False)


@dataclass(frozen=True)
class ParsedModel:
    graph_name: str
    nodes: tuple
    initializers: dict
    input_name: str
    input_shape: tuple
    output_name: str
    output_shape: tuple


def _parse_tensor(buf) -> tuple[str, np.ndarray]:
    dims, name, raw, floats = [], "", None, []
    dtype = None
    for fnum, wtype, val in iter_fields(buf):
        if fnum == 1:
            dims.extend(packed_int64s(val, wtype))
        elif fnum == 2:
            dtype = val
        elif fnum == 4:
            pos = 0
            while pos < len(val):
                floats.append(struct.unpack_from("<f", val, pos)[0])
                pos += 4
        elif fnum == 8:
            name = val.decode("utf-8")
        elif fnum == 9:
            raw = bytes(val)
    if dtype != TENSOR_FLOAT:
        raise ExportFormatError(f"initializer {name!r}: unsupported data type {dtype}")
    if raw is not None:
        if len(raw) % 4:
            raise ExportFormatError(f"initializer {name!r}: raw payload not float32-aligned")
        arr = np.frombuffer(raw, dtype="<f4")
    else:
        arr = np.asarray(floats, dtype=np.float32)
    expect = int(np.prod(dims)) if dims else arr.size
    if arr.size != expect:
        raise ExportFormatError(
            f"initializer {name!r}: {arr.size} values for shape {tuple(dims)}"
        )
    return name, arr.reshape(dims)


def _parse_attr(buf):
    name, value = "", None
    for fnum, wtype, val in iter_fields(buf):
        if fnum == 1:
            name = val.decode("utf-8")
        elif fnum == 2 and wtype == WIRE_32BIT:
            value = struct.unpack("<f", val)[0]
        elif fnum == 3 and wtype == WIRE_VARINT:
            value = packed_int64s(val, wtype)[0]
        elif fnum == 8:
            value = packed_int64s(val, wtype)
    return name, value


def _parse_node(buf) -> ParsedNode:
    inputs, outputs, name, op_type, attrs = [], [], "", "", {}
    for fnum, wtype, val in iter_fields(buf):
        if fnum == 1:
            inputs.append(val.decode("utf-8"))
        elif fnum == 2:
            outputs.append(val.decode("utf-8"))
        elif fnum == 3:
            name = val.decode("utf-8")
        elif fnum == 4:
            op_type = val.decode("utf-8")
        elif fnum == 5:
            attr_name, attr_val = _parse_attr(val)
            attrs[attr_name] = attr_val
    return ParsedNode(op_type, name, tuple(inputs), tuple(outputs), attrs)


def _parse_value_info(buf) -> tuple[str, tuple]:
    name, shape = "", []
    for fnum, wtype, val in iter_fields(buf):
        if fnum == 1:
            name = val.decode("utf-8")
        elif fnum == 2:
            for f2, w2, v2 in iter_fields(val):
                if f2 != 1:
                    continue
                for f3, w3, v3 in iter_fields(v2):
                    if f3 != 2:
                        continue
                    for f4, w4, v4 in iter_fields(v3):
                        if f4 != 1:
                            continue
                        dim = None
                        for f5, w5, v5 in iter_fields(v4):
                            if f5 == 1:
                                dim = int(v5)
                        shape.append(dim)
    return name, tuple(shape)


def parse_model_bytes(buf) -> ParsedModel:
    graph = None
    for fnum, wtype, val in iter_fields(buf):
        if fnum == 7 and wtype == WIRE_LEN:
            graph = val
    if graph is None:
        raise ExportFormatError("model contains no graph")

    nodes, initializers = [], {}
    graph_name, vin, vout = "", None, None
    for fnum, wtype, val in iter_fields(graph):
        if fnum == 1:
            nodes.append(_parse_node(val))
        elif fnum == 2:
            graph_name = val.decode("utf-8")
        elif fnum == 5:
            name, arr = _parse_tensor(val)
            initializers[name] = arr
        elif fnum == 11:
            vin = _parse_value_info(val)
        elif fnum == 12:
            vout = _parse_value_info(val)
    if vin is None or vout is None:
        raise ExportFormatError("graph is missing its input or output declaration")
    return ParsedModel(
        graph_name=graph_name,
        nodes=tuple(nodes),
        initializers=initializers,
        input_name=vin[0],
        input_shape=vin[1],
        output_name=vout[0],
        output_shape=vout[1],
    )


def parse_model_file(path) -> ParsedModel:
    path = Path(path)
    if not path.is_file():
        raise ExportFormatError(f"model file not found: {path}")
    try:
        return parse_model_bytes(path.read_bytes())
    except ExportFormatError as exc:
        raise ExportFormatError(f"{path.name}: {exc}") from exc
