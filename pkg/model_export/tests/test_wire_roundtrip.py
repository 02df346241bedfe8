"""Wire-level checks: what the writer emits, the parser must invert."""

import numpy as np
import pytest

from alexnet_export.errors import ExportFormatError
from alexnet_export.network import random_weights
from alexnet_export.onnx_io import build_model_bytes, node_plan, parse_model_bytes
from alexnet_export.protowire import (
    iter_fields,
    packed_int64s,
    read_varint,
    write_varint,
    write_varint_field,
)


def test_varint_roundtrip_boundaries():
    for value in (0, 1, 127, 128, 300, 2**32, 2**63 - 1, -1, -(2**63)):
        buf = bytearray()
        write_varint(buf, value)
        raw, pos = read_varint(bytes(buf), 0)
        assert pos == len(buf)
        signed = raw - (1 << 64) if raw >= (1 << 63) else raw
        assert signed == value


def test_truncated_varint_rejected():
    with pytest.raises(ExportFormatError, match="truncated"):
        read_varint(b"\x80\x80", 0)


def test_field_iteration_skips_unknown_fields():
    buf = bytearray()
    write_varint_field(buf, 1, 5)
    write_varint_field(buf, 99, 7)  # unknown field number is still well-formed
    fields = list(iter_fields(bytes(buf)))
    assert [(f, v) for f, _, v in fields] == [(1, 5), (99, 7)]


def test_packed_int64_negative_values():
    buf = bytearray()
    for v in (3, -2, 11):
        write_varint(buf, v)
    assert packed_int64s(bytes(buf), 2) == [3, -2, 11]


@pytest.fixture(scope="module")
def fc6_model():
    weights = random_weights(seed=3)
    return weights, parse_model_bytes(build_model_bytes("fc6", weights))


def test_initializers_roundtrip_bitwise(fc6_model):
    weights, parsed = fc6_model
    for name, (w, b) in weights.tensors.items():
        if f"{name}_W" not in parsed.initializers:
            continue  # fc7/fc8 tensors are not part of the fc6 graph
        assert np.array_equal(parsed.initializers[f"{name}_W"], w)
        assert np.array_equal(parsed.initializers[f"{name}_b"], b)
    assert "fc7_W" not in parsed.initializers


def test_node_sequence_matches_plan(fc6_model):
    _, parsed = fc6_model
    plan = node_plan("fc6")
    assert [n.op_type for n in parsed.nodes] == [op for op, _, _ in plan]
    assert [n.name for n in parsed.nodes] == [name for _, name, _ in plan]
    prev = parsed.input_name
    for node in parsed.nodes:
        assert node.inputs[0] == prev
        prev = node.outputs[0]
    assert parsed.output_name == prev


def test_declared_shapes(fc6_model):
    _, parsed = fc6_model
    assert parsed.input_shape == (1, 3, 227, 227)
    assert parsed.output_shape == (1, 4096)
    assert parsed.graph_name == "alexnet_fc6"


def test_conv_attributes_survive_roundtrip(fc6_model):
    _, parsed = fc6_model
    conv1 = parsed.nodes[0]
    assert conv1.attrs["kernel_shape"] == [11, 11]
    assert conv1.attrs["strides"] == [4, 4]
    assert conv1.attrs["pads"] == [2, 2, 2, 2]
    gemm = parsed.nodes[-2]
    assert gemm.op_type == "Gemm"
    assert gemm.attrs["transB"] == 1
    assert gemm.attrs["alpha"] == pytest.approx(1.0)


def test_parse_rejects_graphless_bytes():
    buf = bytearray()
    write_varint_field(buf, 1, 8)  # ir_version only
    with pytest.raises(ExportFormatError, match="no graph"):
        parse_model_bytes(bytes(buf))


def test_parse_rejects_truncated_model(fc6_model):
    weights, _ = fc6_model
    raw = build_model_bytes("fc6", weights)
    with pytest.raises(ExportFormatError):
        parse_model_bytes(raw[: len(raw) // 2])
