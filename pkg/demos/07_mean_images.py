"""What the classifier looks at: mean excitation and inhibition patches.

Feature dimensions are ranked by how strongly the trained classifier
reacts to them; for each leading dimension, the patches with the highest
and lowest values are averaged into an excitation / inhibition image pair.
"""

import numpy as np
from _common import demo_dataset, out_path

from woundtissue.core import load_labeled_image, write_rgb_png
from woundtissue.evaluation import extract_manifest_features, mean_activation_images
from woundtissue.features import DescriptorTag
from woundtissue.patches import labeled_patches
from woundtissue.svm import svm_train


def main() -> None:
    manifest = demo_dataset()
    cache = extract_manifest_features(manifest, DescriptorTag.HSV)
    model = svm_train(cache.features.astype(np.float64), cache.labels, seed=0)

    patches = []
    for entry in manifest.entries:
        pset = labeled_patches(load_labeled_image(entry), manifest.patch_side)
        patches.extend(lp.patch for lp in pset.patches)

    pairs = mean_activation_images(patches, cache.features, top_dims=3,
                                   fraction=0.1, model=model)
    print(f"{len(patches)} patches, top {len(pairs)} dimensions by classifier weight\n")
    for pair in pairs:
        exc = out_path(f"mean_dim{pair.feature_index}_excitation.png")
        inh = out_path(f"mean_dim{pair.feature_index}_inhibition.png")
        write_rgb_png(exc, pair.excitation)
        write_rgb_png(inh, pair.inhibition)
        print(f"dimension {pair.feature_index}: averaged {pair.support_count} patches "
              f"per side")
        print(f"  excitation mean color {pair.excitation.mean(axis=(0, 1)).round(1)} "
              f"-> {exc.name}")
        print(f"  inhibition mean color {pair.inhibition.mean(axis=(0, 1)).round(1)} "
              f"-> {inh.name}")


if __name__ == "__main__":
    main()
