"""Behavior of the export and verify operations, plus the CLI wrapper."""

import json

import numpy as np
import pytest

from alexnet_export import ExportConfig, WeightSourceError, export, verify
from alexnet_export.cli import main
from alexnet_export.export import META_FILE, REPORT_FILE, fixed_probe_image, preprocess_image
from alexnet_export.network import (
    CHANNEL_STDS,
    LAYER_DIMS,
    conv2d,
    fold_channel_std,
    forward,
    random_weights,
    resolve_weights,
    steps_for_layer,
)
from alexnet_export.onnx_io import parse_model_file


def test_config_rejects_bad_values(tmp_path):
    with pytest.raises(ValueError, match="fixed at 227"):
        ExportConfig(output_dir=tmp_path, input_side=224)
    with pytest.raises(ValueError, match="unknown layer"):
        ExportConfig(output_dir=tmp_path, layers=("fc9",))
    with pytest.raises(ValueError, match="duplicate"):
        ExportConfig(output_dir=tmp_path, layers=("fc6", "fc6"))
    with pytest.raises(ValueError, match="at least one"):
        ExportConfig(output_dir=tmp_path, layers=())
    with pytest.raises(ValueError, match="weights mode"):
        ExportConfig(output_dir=tmp_path, weights="finetuned")


def test_export_writes_all_artifacts(exported_dir):
    for layer in ("fc6", "fc7", "fc8"):
        assert (exported_dir / f"alexnet_{layer}.onnx").is_file()
    meta = json.loads((exported_dir / META_FILE).read_text())
    assert meta["input_side"] == 227
    assert meta["channel_order"] in ("RGB", "BGR")
    assert len(meta["channel_means"]) == 3
    assert meta["scale"] > 0
    assert "weights" in meta


def test_export_is_deterministic(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    for directory in (a, b):
        export(ExportConfig(output_dir=directory, layers=("fc6",),
                            weights="random", seed=5))
    assert (a / "alexnet_fc6.onnx").read_bytes() == (b / "alexnet_fc6.onnx").read_bytes()
    assert (a / META_FILE).read_bytes() == (b / META_FILE).read_bytes()


def test_forward_dims_and_determinism(exported_dir):
    meta = json.loads((exported_dir / META_FILE).read_text())
    probe = preprocess_image(fixed_probe_image(), meta)
    for layer, dim in LAYER_DIMS.items():
        parsed = parse_model_file(exported_dir / f"alexnet_{layer}.onnx")
        tensors = {
            name[:-2]: (arr, parsed.initializers[name[:-2] + "_b"])
            for name, arr in parsed.initializers.items() if name.endswith("_W")
        }
        out1 = forward(steps_for_layer(layer), tensors, probe)
        out2 = forward(steps_for_layer(layer), tensors, probe)
        assert out1.shape == (1, dim)
        assert np.array_equal(out1, out2)
        assert np.all(np.isfinite(out1))


def test_fold_channel_std_equivalence():
    # conv(W, (x - m)/s) must equal conv(fold(W, s), x - m)
    rng = np.random.default_rng(9)
    w = rng.normal(0, 1, (4, 3, 3, 3)).astype(np.float32)
    b = rng.normal(0, 1, 4).astype(np.float32)
    x01 = rng.uniform(0, 1, (1, 3, 8, 8)).astype(np.float32)
    means = np.array([0.485, 0.456, 0.406], dtype=np.float32).reshape(1, 3, 1, 1)
    stds = np.array(CHANNEL_STDS, dtype=np.float32).reshape(1, 3, 1, 1)

    direct = conv2d((x01 - means) / stds, w, b, stride=1, pad=1)
    folded = conv2d(x01 - means, fold_channel_std(w, CHANNEL_STDS), b, stride=1, pad=1)
    assert np.allclose(direct, folded, atol=1e-5)


def test_fold_channel_std_rejects_bad_shape():
    with pytest.raises(ValueError, match="expected"):
        fold_channel_std(np.zeros((4, 2, 3, 3), dtype=np.float32), CHANNEL_STDS)


def test_verify_passes_and_writes_report(exported_dir):
    report = verify(exported_dir)
    assert report.ok
    assert all(c.ok for c in report.checks)
    assert {c.layer for c in report.checks} == {"fc6", "fc7", "fc8"}
    assert all(len(c.sha256) == 64 for c in report.checks)
    assert report.composition_max_abs_diff is not None
    assert report.composition_max_abs_diff <= 1e-4

    payload = json.loads((exported_dir / REPORT_FILE).read_text())
    assert payload["ok"] is True
    assert len(payload["checks"]) == 3


def test_verify_flags_truncated_file(tmp_path):
    export(ExportConfig(output_dir=tmp_path, layers=("fc6",), weights="random", seed=2))
    path = tmp_path / "alexnet_fc6.onnx"
    path.write_bytes(path.read_bytes()[:1000])
    report = verify(tmp_path, layers=("fc6",))
    assert not report.ok
    failed = report.checks[0]
    assert failed.file == "alexnet_fc6.onnx"
    assert not failed.ok


def test_verify_flags_missing_file(tmp_path):
    export(ExportConfig(output_dir=tmp_path, layers=("fc6",), weights="random", seed=2))
    report = verify(tmp_path, layers=("fc6", "fc8"))
    assert not report.ok
    by_layer = {c.layer: c for c in report.checks}
    assert by_layer["fc6"].ok
    assert not by_layer["fc8"].ok
    assert "alexnet_fc8.onnx" in by_layer["fc8"].detail


def test_verify_flags_tampered_weights(tmp_path):
    export(ExportConfig(output_dir=tmp_path, layers=("fc6",), weights="random", seed=2))
    path = tmp_path / "alexnet_fc6.onnx"
    raw = bytearray(path.read_bytes())
    # flip one exponent byte deep inside the first weight payload to NaN range
    target = raw.find(b"conv1_W") + 5000
    raw[target:target + 4] = b"\xff\xff\xff\x7f"
    path.write_bytes(bytes(raw))
    report = verify(tmp_path, layers=("fc6",))
    assert not report.ok
    assert "non-finite" in report.checks[0].detail


def test_verify_requires_sidecar(tmp_path):
    from alexnet_export.errors import ExportError

    with pytest.raises(ExportError, match="sidecar"):
        verify(tmp_path)


def test_pretrained_unavailable_raises_actionable_error(monkeypatch):
    import alexnet_export.network as network

    def boom():
        raise RuntimeError("download failed")

    monkeypatch.setattr(network, "_torchvision_state_dict", boom)
    with pytest.raises(WeightSourceError, match="--weights random"):
        resolve_weights("pretrained")


def test_auto_falls_back_to_random(monkeypatch):
    import alexnet_export.network as network

    def boom():
        raise RuntimeError("download failed")

    monkeypatch.setattr(network, "_torchvision_state_dict", boom)
    with pytest.warns(UserWarning, match="falling back to random"):
        weights = resolve_weights("auto", seed=4)
    assert weights.provenance.startswith("random")
    reference = random_weights(seed=4)
    assert np.array_equal(weights.tensors["conv1"][0], reference.tensors["conv1"][0])


def test_cli_export_then_verify(tmp_path, capsys):
    out = tmp_path / "models"
    assert main(["export", "--out", str(out), "--layers", "fc6",
                 "--weights", "random", "--seed", "3"]) == 0
    stdout = capsys.readouterr().out
    assert "alexnet_fc6.onnx" in stdout
    assert META_FILE in stdout

    assert main(["verify", "--dir", str(out), "--layers", "fc6"]) == 0
    assert "ok" in capsys.readouterr().out

    (out / "alexnet_fc6.onnx").write_bytes(b"not a model")
    assert main(["verify", "--dir", str(out), "--layers", "fc6"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_cli_rejects_unknown_layer(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["export", "--out", str(tmp_path), "--layers", "fc9"])
    assert exc.value.code == 2


def test_cli_reports_missing_sidecar(tmp_path, capsys):
    assert main(["verify", "--dir", str(tmp_path)]) == 2
    assert "sidecar" in capsys.readouterr().err
