"""Deep features from an exported graph, with a stub fallback.

When the models directory holds the exported fc6 graph, patches are
resized to 227x227, preprocessed per the sidecar, and run through the
embedded inference runtime. Without it, the deterministic hash-stub
extractor keeps the same interface so everything downstream still runs.
"""

from pathlib import Path

from _common import demo_dataset

from woundtissue.evaluation import extract_manifest_features
from woundtissue.features import DescriptorTag

MODELS_DIR = Path(__file__).resolve().parent.parent / "models"


def main() -> None:
    manifest = demo_dataset()
    if (MODELS_DIR / "alexnet_fc6.onnx").is_file():
        tag, model_dir = DescriptorTag.FC6, MODELS_DIR
        print(f"using exported graph from {MODELS_DIR}")
    else:
        tag, model_dir = DescriptorTag.STUB6, None
        print("models directory not found; using the hash-stub extractor")
        print("(generate real graphs with: python3 -m alexnet_export.cli "
              "export --out models)")

    small = manifest.entries[:3]
    cache = extract_manifest_features(
        type(manifest)(entries=tuple(small), patch_side=manifest.patch_side),
        tag, model_dir,
    )
    print(f"\nextracted {len(cache)} patches from {len(small)} images, "
          f"feature dim {cache.dim}")
    row = cache.features[0]
    print(f"first vector: min {row.min():.4f}, max {row.max():.4f}, "
          f"nonzero {int((row != 0).sum())} of {row.shape[0]}")


if __name__ == "__main__":
    main()
