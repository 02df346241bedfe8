"""Labeling a new image patch by patch with a trained bundle.

A model bundle (descriptor tag, optional PCA, classifier) labels every
grid patch of an input image; the result is a solid class-code map plus a
half-transparent overlay on the source pixels.
"""

import collections

import numpy as np
from _common import demo_dataset, out_path

from woundtissue.core import TissueClass, class_palette, load_labeled_image, write_rgb_png
from woundtissue.evaluation import ModelBundle, extract_manifest_features, predict_label_map
from woundtissue.features import DescriptorTag
from woundtissue.svm import svm_train


def main() -> None:
    manifest = demo_dataset()
    cache = extract_manifest_features(manifest, DescriptorTag.HSV)
    model = svm_train(cache.features.astype(np.float64), cache.labels, seed=0)
    bundle = ModelBundle(tag=DescriptorTag.HSV, patch_side=manifest.patch_side, svm=model)

    image = load_labeled_image(manifest.entries[4])
    label_map, overlay = predict_label_map(image, bundle)
    print(f"image {image.id}: {image.height}x{image.width} pixels")
    print(f"label map covers the patch grid: {label_map.shape[0]}x{label_map.shape[1]}")

    counts = collections.Counter(label_map.ravel().tolist())
    print("\npredicted class share of the mapped area:")
    for code, count in sorted(counts.items()):
        share = 100 * count / label_map.size
        print(f"  {TissueClass(code).name.lower():22s} {share:5.1f}%")

    palette = np.array([class_palette(c) for c in range(8)], dtype=np.uint8)
    map_path = out_path(f"{image.id}_label_map.png")
    overlay_path = out_path(f"{image.id}_overlay.png")
    write_rgb_png(map_path, palette[label_map])
    write_rgb_png(overlay_path, overlay)
    print(f"\nwrote {map_path.name} and {overlay_path.name}")


if __name__ == "__main__":
    main()
