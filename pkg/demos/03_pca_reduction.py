"""Dimensionality reduction of patch descriptors with PCA.

The HSV histograms of all dataset patches (dim 96) are projected to 18
components; the cumulative explained variance shows how much signal the
reduction keeps.
"""

import numpy as np
from _common import demo_dataset

from woundtissue.evaluation import extract_manifest_features
from woundtissue.features import DescriptorTag
from woundtissue.pca import pca_fit, pca_transform_batch


def main() -> None:
    manifest = demo_dataset()
    cache = extract_manifest_features(manifest, DescriptorTag.HSV)
    print(f"{len(cache)} patches, descriptor dim {cache.dim}")

    model = pca_fit(cache.features, 18)
    total = np.var(cache.features.astype(np.float64), axis=0, ddof=1).sum()
    kept = model.explained_variance.sum()
    print(f"PCA(18) keeps {100 * kept / total:.1f}% of the total variance")

    running = np.cumsum(model.explained_variance) / total
    print("\ncomponent  explained  cumulative")
    for i, (ev, cum) in enumerate(zip(model.explained_variance, running), start=1):
        print(f"  {i:2d}       {100 * ev / total:6.2f}%    {100 * cum:6.2f}%")

    reduced = pca_transform_batch(model, cache.features)
    print(f"\nreduced feature matrix: {reduced.shape[0]} x {reduced.shape[1]}")
    print("orthonormal basis check, max |C C^T - I|:",
          f"{np.max(np.abs(model.components @ model.components.T - np.eye(18))):.2e}")


if __name__ == "__main__":
    main()
